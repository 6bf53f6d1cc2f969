#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ismnet/scores.hpp"

namespace ismnet {

/// Ground-truth comparison of simplices i < j: +1 if s_i > s_j, -1 if
/// s_i < s_j, 0 on ties.
struct RankPair {
    SimplexId i;
    SimplexId j;
    int relation;

    bool operator==(const RankPair&) const = default;
};

/// Kendall tau-a: (concordant - discordant) / (m(m-1)/2). Pairs tied in
/// either list count as neither. O(m log m) merge-sort inversion counting.
/// Throws std::invalid_argument on length mismatch or m < 2.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// All pairs over `subset` (taken in ascending id order). Throws
/// std::invalid_argument if any id is unobserved or out of range.
std::vector<RankPair> truth_pairs(const InfluenceScores& scores, std::span<const SimplexId> subset);

struct Split {
    std::vector<SimplexId> train;
    std::vector<SimplexId> val;
    std::vector<SimplexId> test;
};

/// Seeded shuffle, then sizes round(ratio * n) for train and val with the
/// remainder going to test. Each part is returned sorted.
Split split_ids(std::span<const SimplexId> ids, std::array<double, 3> ratios, std::uint64_t seed);

}  // namespace ismnet
