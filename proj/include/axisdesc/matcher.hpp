#pragma once

#include <span>
#include <vector>

#include "axisdesc/descriptor.hpp"

namespace axisdesc {

struct SimilarityThresholds {
    double r_thr = 0.5;
    double theta_thr = 1.5707963267948966;  // pi/2
    double len_thr = 0.5;
};

enum class MatchMode { invariant, variant };

struct MatchResult {
    struct Pair {
        int a = -1, b = -1;  // order indices in A and B
        double score = 0.0;  // unweighted pair score in (0,1]
    };
    std::vector<Pair> pairs;
    std::vector<int> unmatched_a, unmatched_b;
    double total = 0.0;
    MatchMode mode = MatchMode::invariant;
};

// max(1 - |f0-f1|/f_thr, 0); the clamp keeps the score in [0,1].
double feature_similarity(double f0, double f1, double f_thr);

// 0 for differing kinds; otherwise mean of the r, theta and norm_length
// feature scores, gated to 0 when any of them is 0.
double branch_similarity(const BranchRecord& a, const BranchRecord& b,
                         const SimilarityThresholds& thr);

// Best order-preserving partial bijection per half (both half pairings are
// tried, the better one is kept), solved exactly by branch and bound with the
// optimistic-remainder bound. Pair weight is the mean of the two norm_lengths,
// so unmatched branches forfeit their weight.
MatchResult match_shapes(const ShapeDescriptor& a, const ShapeDescriptor& b,
                         const SimilarityThresholds& thr = {},
                         MatchMode mode = MatchMode::invariant);

// Maximum over the cartesian product of descriptor alternatives; ties keep
// the earliest (a_index, b_index).
MatchResult match_multi(std::span<const ShapeDescriptor> a, std::span<const ShapeDescriptor> b,
                        const SimilarityThresholds& thr = {},
                        MatchMode mode = MatchMode::invariant);

}  // namespace axisdesc
