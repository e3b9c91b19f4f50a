#include <doctest.h>

#include <cmath>

#include "axisdesc/matcher.hpp"
#include "axisdesc/pipeline.hpp"
#include "helpers.hpp"

using namespace axisdesc;
using namespace testutil;

namespace {

// Builds a descriptor straight from record data: {kind, r, theta, norm_length}
// per half, theta ascending.
ShapeDescriptor make_desc(const std::vector<std::array<double, 4>>& half0,
                          const std::vector<std::array<double, 4>>& half1) {
    ShapeDescriptor d;
    int order = 0;
    for (int h = 0; h < 2; ++h) {
        for (const auto& row : (h == 0 ? half0 : half1)) {
            BranchRecord r;
            r.kind = row[0] > 0 ? AxisKind::positive : AxisKind::negative;
            r.r = row[1];
            r.theta = row[2];
            r.norm_length = row[3];
            r.order_index = order++;
            d.halves[h].push_back(r);
        }
    }
    const int n = order;
    for (auto& half : d.halves) {
        for (auto& r : half) {
            r.prev = (r.order_index + n - 1) % n;
            r.next = (r.order_index + 1) % n;
        }
    }
    d.total_axes_length = 100.0;
    d.extrinsic = {10.0, 12.0, 100.0, 1.0, 0.0};
    return d;
}

// Independent oracle: plain enumeration of every order-preserving partial
// bijection between the halves, no pruning, no tables.
double oracle_half(const std::vector<BranchRecord>& a, const std::vector<BranchRecord>& b,
                   const SimilarityThresholds& thr, std::size_t i, std::size_t j) {
    if (i == a.size()) return 0.0;
    double best = oracle_half(a, b, thr, i + 1, j);  // a[i] unmatched
    for (std::size_t l = j; l < b.size(); ++l) {
        const double s = branch_similarity(a[i], b[l], thr);
        if (s <= 0.0) continue;
        const double v = s * ((a[i].norm_length + b[l].norm_length) * 0.5) +
                         oracle_half(a, b, thr, i + 1, l + 1);
        if (v > best) best = v;
    }
    return best;
}

double oracle_total(const ShapeDescriptor& a, const ShapeDescriptor& b,
                    const SimilarityThresholds& thr) {
    double best = 0.0;
    for (int swap = 0; swap < 2; ++swap) {
        double t = 0.0;
        for (int h = 0; h < 2; ++h) {
            t += oracle_half(a.halves[h], b.halves[swap ? 1 - h : h], thr, 0, 0);
        }
        best = std::max(best, t);
    }
    return best;
}

ShapeDescriptor random_descriptor(TestRng& rng, int max_per_half) {
    std::vector<std::array<double, 4>> halves[2];
    for (int h = 0; h < 2; ++h) {
        const int n = 1 + rng.below(max_per_half);
        double theta = 0.0;
        for (int i = 0; i < n; ++i) {
            theta += rng.uniform() * (M_PI / n);
            halves[h].push_back({rng.uniform() < 0.5 ? 1.0 : -1.0, rng.uniform() * 0.8, theta,
                                 0.05 + rng.uniform() * 0.4});
        }
    }
    return make_desc(halves[0], halves[1]);
}

}  // namespace

TEST_CASE("feature similarity formula") {
    CHECK(feature_similarity(0.3, 0.3, 0.5) == 1.0);          // identical features
    CHECK(feature_similarity(0.5, 0.7, 0.5) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(feature_similarity(0.1, 0.6, 0.5) == 0.0);          // at the threshold
    CHECK(feature_similarity(0.0, 0.9, 0.5) == 0.0);          // clamped, never negative
    CHECK_THROWS_AS(feature_similarity(0, 0, 0), PipelineError);
}

TEST_CASE("branch similarity: averaging, type gate, zero gate") {
    const SimilarityThresholds thr;
    BranchRecord a, b;
    a.kind = b.kind = AxisKind::positive;
    a.r = b.r = 0.4;
    a.theta = b.theta = 1.0;
    a.norm_length = b.norm_length = 0.25;
    CHECK(branch_similarity(a, b, thr) == 1.0);

    // Feature scores (1.0, 0.6, 0.8) average to 0.8.
    b.theta = a.theta + 0.4 * thr.theta_thr;
    b.norm_length = a.norm_length + 0.2 * thr.len_thr;
    CHECK(branch_similarity(a, b, thr) == doctest::Approx(0.8).epsilon(1e-12));

    // Different types are simply not matched.
    b.kind = AxisKind::negative;
    CHECK(branch_similarity(a, b, thr) == 0.0);
    b.kind = AxisKind::positive;

    // Any zero feature gates the whole score to zero.
    b.r = a.r + thr.r_thr;
    CHECK(branch_similarity(a, b, thr) == 0.0);
}

TEST_CASE("identity match scores 1 with the identity pairing") {
    const ShapeDescriptor d = make_desc({{1, 0.0, 0.0, 0.3}, {-1, 0.4, 1.2, 0.2}},
                                        {{1, 0.0, 0.0, 0.35}, {-1, 0.38, 1.1, 0.15}});
    const MatchResult r = match_shapes(d, d);
    CHECK(r.total == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(r.pairs.size() == 4);
    for (const auto& p : r.pairs) {
        CHECK(p.a == p.b);
        CHECK(p.score == 1.0);
    }
    CHECK(r.unmatched_a.empty());
    CHECK(r.unmatched_b.empty());
}

TEST_CASE("deleting a branch costs exactly its weight") {
    const ShapeDescriptor a = make_desc({{1, 0.0, 0.0, 0.4}, {1, 0.3, 0.9, 0.3}},
                                        {{1, 0.0, 0.0, 0.2}, {-1, 0.5, 1.3, 0.1}});
    // B = A minus the half-0 branch with weight 0.3.
    const ShapeDescriptor b = make_desc({{1, 0.0, 0.0, 0.4}},
                                        {{1, 0.0, 0.0, 0.2}, {-1, 0.5, 1.3, 0.1}});
    const MatchResult r = match_shapes(a, b);
    CHECK(r.total == doctest::Approx(1.0 - 0.3).epsilon(1e-12));
    CHECK(r.pairs.size() == 3);
    REQUIRE(r.unmatched_a.size() == 1);
    CHECK(r.unmatched_a[0] == 1);

    // Monotone damage: the deletion can never raise the score.
    CHECK(r.total <= match_shapes(a, a).total);
}

TEST_CASE("branch and bound equals exhaustive search on random descriptors") {
    TestRng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const ShapeDescriptor a = random_descriptor(rng, 6);
        const ShapeDescriptor b = random_descriptor(rng, 6);
        const MatchResult r = match_shapes(a, b);
        const double want = oracle_total(a, b, {});
        REQUIRE(r.total == want);  // exact, not approximate
    }
}

TEST_CASE("match invariants: symmetry, range, order constraint") {
    TestRng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const ShapeDescriptor a = random_descriptor(rng, 5);
        const ShapeDescriptor b = random_descriptor(rng, 5);
        const MatchResult ab = match_shapes(a, b);
        const MatchResult ba = match_shapes(b, a);
        CHECK(std::fabs(ab.total - ba.total) <= 1e-9);
        CHECK(ab.total >= 0.0);
        CHECK(ab.total <= 1.0);

        // Matched pairs preserve theta order per half in both shapes.
        const int half0_a = static_cast<int>(a.halves[0].size());
        for (int h = 0; h < 2; ++h) {
            int prev_b = -1;
            for (const auto& p : ab.pairs) {
                const bool in_half = h == 0 ? p.a < half0_a : p.a >= half0_a;
                if (!in_half) continue;
                CHECK(p.b > prev_b);
                prev_b = p.b;
            }
        }
    }
}

TEST_CASE("pairs form a partial bijection of equal kinds") {
    TestRng rng(99);
    const ShapeDescriptor a = random_descriptor(rng, 6);
    const ShapeDescriptor b = random_descriptor(rng, 6);
    const MatchResult r = match_shapes(a, b);
    std::vector<int> used_a(a.record_count(), 0), used_b(b.record_count(), 0);
    for (const auto& p : r.pairs) {
        used_a[p.a]++;
        used_b[p.b]++;
        CHECK(a.record(p.a).kind == b.record(p.b).kind);
        CHECK(p.score > 0.0);
    }
    for (int c : used_a) CHECK(c <= 1);
    for (int c : used_b) CHECK(c <= 1);
    CHECK(r.pairs.size() + r.unmatched_a.size() == a.record_count());
    CHECK(r.pairs.size() + r.unmatched_b.size() == b.record_count());
}

TEST_CASE("empty descriptors yield total 0") {
    const ShapeDescriptor empty = make_desc({}, {});
    const ShapeDescriptor d = make_desc({{1, 0.1, 0.0, 1.0}}, {});
    CHECK(match_shapes(empty, empty).total == 0.0);
    CHECK(match_shapes(empty, d).total == 0.0);
}

TEST_CASE("variant mode multiplies in the extrinsic penalties") {
    ShapeDescriptor a = make_desc({{1, 0.0, 0.0, 0.6}}, {{1, 0.0, 0.0, 0.4}});
    ShapeDescriptor b = a;
    CHECK(match_shapes(a, b, {}, MatchMode::variant).total ==
          doctest::Approx(1.0).epsilon(1e-12));

    // 90-degree frame rotation halves the score.
    b.extrinsic.m0 = 0.0;
    b.extrinsic.m1 = 1.0;
    CHECK(match_shapes(a, b, {}, MatchMode::variant).total ==
          doctest::Approx(0.5).epsilon(1e-12));

    // Doubling the total length zeroes the scale factor.
    b = a;
    b.extrinsic.total_length = 2.0 * a.extrinsic.total_length;
    CHECK(match_shapes(a, b, {}, MatchMode::variant).total ==
          doctest::Approx(0.0).epsilon(1e-12));
    // Invariant mode ignores extrinsic data entirely.
    CHECK(match_shapes(a, b).total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("match_multi: singleton sets reduce to match_shapes; max over alternatives") {
    TestRng rng(5);
    const ShapeDescriptor a = random_descriptor(rng, 5);
    const ShapeDescriptor b = random_descriptor(rng, 5);
    const std::vector<ShapeDescriptor> sa{a}, sb{b};
    CHECK(match_multi(sa, sb).total == match_shapes(a, b).total);

    const std::vector<ShapeDescriptor> many{b, a};
    CHECK(match_multi(sa, many).total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("square matched against itself through the alternative frames") {
    const ExtractResult r = run_extraction(rect_mask(91, 91), {});
    REQUIRE(r.descriptors.size() == 12);
    const MatchResult m = match_multi(r.descriptors, r.descriptors);
    CHECK(m.total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("3-fold shape vs its 120-degree rotation via alternative frames") {
    const ExtractResult r0 = run_extraction(family_mask("star3", {.scale = 0.55}), {});
    const ExtractResult r1 =
        run_extraction(family_mask("star3", {.scale = 0.55, .rot_deg = 120.0}), {});
    const MatchResult m = match_multi(r0.descriptors, r1.descriptors);
    CHECK(m.total >= 0.95);
}
