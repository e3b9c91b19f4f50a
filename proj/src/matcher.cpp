#include "axisdesc/matcher.hpp"

#include <algorithm>
#include <cmath>

namespace axisdesc {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
// Exploration slack on the optimistic bound: never prune a node whose true
// value could exceed the incumbent by rounding-level amounts, so the search
// stays exactly optimal.
constexpr double kBoundSlack = 1e-9;

double circular_diff(double a, double b) {
    double d = std::fabs(a - b);
    if (d > kTwoPi) d = std::fmod(d, kTwoPi);
    return d > M_PI ? kTwoPi - d : d;
}

struct HalfSolve {
    double total = 0.0;
    std::vector<MatchResult::Pair> pairs;  // local half indices
};

// Exact max-weight order-preserving partial bijection between the records of
// one half of A and one half of B. Depth-first branch and bound; a partial
// assignment is pruned when its score plus the optimistic remainder (every
// remaining A record at its best feasible pair value) cannot beat the
// incumbent.
HalfSolve solve_half(const std::vector<BranchRecord>& a, const std::vector<BranchRecord>& b,
                     const SimilarityThresholds& thr) {
    HalfSolve best;
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (n == 0 || m == 0) return best;

    std::vector<double> score(static_cast<std::size_t>(n) * m);
    std::vector<double> value(score.size());  // score * pair weight
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double s = branch_similarity(a[i], b[j], thr);
            score[i * m + j] = s;
            value[i * m + j] = s > 0.0 ? s * ((a[i].norm_length + b[j].norm_length) * 0.5) : 0.0;
        }
    }
    // tail[i][j] = max_{l >= j} value[i][l]; bound[i][j] = sum_{k >= i} tail[k][j].
    std::vector<double> tail(static_cast<std::size_t>(n) * (m + 1), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = m - 1; j >= 0; --j) {
            tail[i * (m + 1) + j] = std::max(tail[i * (m + 1) + j + 1], value[i * m + j]);
        }
    }
    std::vector<double> bound(static_cast<std::size_t>(n + 1) * (m + 1), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        for (int j = 0; j <= m; ++j) {
            bound[i * (m + 1) + j] = bound[(i + 1) * (m + 1) + j] + tail[i * (m + 1) + j];
        }
    }

    std::vector<MatchResult::Pair> current;
    double best_total = 0.0;
    std::vector<MatchResult::Pair> best_pairs;

    auto dfs = [&](auto&& self, int i, int j, double acc) -> void {
        if (acc + bound[i * (m + 1) + j] + kBoundSlack <= best_total) return;
        if (i == n) {
            if (acc > best_total) {
                best_total = acc;
                best_pairs = current;
            }
            return;
        }
        for (int l = j; l < m; ++l) {
            const double v = value[i * m + l];
            if (v <= 0.0) continue;
            current.push_back({i, l, score[i * m + l]});
            self(self, i + 1, l + 1, acc + v);
            current.pop_back();
        }
        self(self, i + 1, j, acc);  // leave a[i] unmatched
    };
    dfs(dfs, 0, 0, 0.0);

    // An empty assignment never updates the incumbent above; accept it.
    best.total = best_total;
    best.pairs = std::move(best_pairs);
    return best;
}

}  // namespace

double feature_similarity(double f0, double f1, double f_thr) {
    if (!(f_thr > 0.0)) throw PipelineError("feature_similarity: threshold must be positive");
    return std::max(1.0 - std::fabs(f0 - f1) / f_thr, 0.0);
}

double branch_similarity(const BranchRecord& a, const BranchRecord& b,
                         const SimilarityThresholds& thr) {
    if (a.kind != b.kind) return 0.0;
    const double s_r = feature_similarity(a.r, b.r, thr.r_thr);
    const double s_t = std::max(1.0 - circular_diff(a.theta, b.theta) / thr.theta_thr, 0.0);
    const double s_l = feature_similarity(a.norm_length, b.norm_length, thr.len_thr);
    if (s_r == 0.0 || s_t == 0.0 || s_l == 0.0) return 0.0;
    return (s_r + s_t + s_l) / 3.0;
}

MatchResult match_shapes(const ShapeDescriptor& a, const ShapeDescriptor& b,
                         const SimilarityThresholds& thr, MatchMode mode) {
    MatchResult out;
    out.mode = mode;

    double best_total = -1.0;
    std::vector<MatchResult::Pair> best_pairs;
    for (int swap = 0; swap < 2; ++swap) {
        double total = 0.0;
        std::vector<MatchResult::Pair> pairs;
        for (int h = 0; h < 2; ++h) {
            const auto& ha = a.halves[h];
            const auto& hb = b.halves[swap ? 1 - h : h];
            HalfSolve s = solve_half(ha, hb, thr);
            total += s.total;
            for (const MatchResult::Pair& p : s.pairs) {
                pairs.push_back({ha[p.a].order_index, hb[p.b].order_index, p.score});
            }
        }
        if (total > best_total) {
            best_total = total;
            best_pairs = std::move(pairs);
        }
    }

    out.total = std::max(best_total, 0.0);
    out.pairs = std::move(best_pairs);
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const MatchResult::Pair& x, const MatchResult::Pair& y) { return x.a < y.a; });

    std::vector<bool> in_a(a.record_count(), false), in_b(b.record_count(), false);
    for (const MatchResult::Pair& p : out.pairs) {
        in_a[p.a] = true;
        in_b[p.b] = true;
    }
    for (std::size_t i = 0; i < in_a.size(); ++i) {
        if (!in_a[i]) out.unmatched_a.push_back(static_cast<int>(i));
    }
    for (std::size_t i = 0; i < in_b.size(); ++i) {
        if (!in_b[i]) out.unmatched_b.push_back(static_cast<int>(i));
    }

    if (mode == MatchMode::variant) {
        const double ang_a = std::atan2(a.extrinsic.m1, a.extrinsic.m0);
        const double ang_b = std::atan2(b.extrinsic.m1, b.extrinsic.m0);
        const double orient = std::max(1.0 - circular_diff(ang_a, ang_b) / M_PI, 0.0);
        double scale = 0.0;
        if (a.extrinsic.total_length > 0.0 && b.extrinsic.total_length > 0.0) {
            const double ratio = a.extrinsic.total_length / b.extrinsic.total_length;
            scale = std::max(1.0 - std::fabs(std::log(ratio)) / std::log(2.0), 0.0);
        }
        out.total *= orient * scale;
    }
    return out;
}

MatchResult match_multi(std::span<const ShapeDescriptor> a, std::span<const ShapeDescriptor> b,
                        const SimilarityThresholds& thr, MatchMode mode) {
    MatchResult best;
    best.mode = mode;
    bool first = true;
    for (const ShapeDescriptor& da : a) {
        for (const ShapeDescriptor& db : b) {
            MatchResult r = match_shapes(da, db, thr, mode);
            if (first || r.total > best.total) {
                best = std::move(r);
                first = false;
            }
        }
    }
    return best;
}

}  // namespace axisdesc
