#include "ismnet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ismnet/rng.hpp"

namespace ismnet {

namespace {

// Sorts v ascending and returns the number of strict inversions.
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf) {
    std::int64_t swaps = 0;
    const std::size_t n = v.size();
    buf.resize(n);
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n);
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    swaps += static_cast<std::int64_t>(mid - i);
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
        }
        std::swap(v, buf);
    }
    return swaps;
}

// Number of pairs tied within runs of equal values in a sorted sequence.
template <typename Eq>
std::int64_t tied_pairs(std::size_t n, Eq&& equal) {
    std::int64_t total = 0, run = 1;
    for (std::size_t i = 1; i < n; ++i) {
        if (equal(i - 1, i)) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total + run * (run - 1) / 2;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("kendall_tau: lists differ in length");
    const std::size_t m = x.size();
    if (m < 2) throw std::invalid_argument("kendall_tau: need at least two items");

    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
    });

    const auto n0 = static_cast<std::int64_t>(m) * static_cast<std::int64_t>(m - 1) / 2;
    const auto n1 = tied_pairs(m, [&](std::size_t a, std::size_t b) { return x[idx[a]] == x[idx[b]]; });
    const auto n3 = tied_pairs(m, [&](std::size_t a, std::size_t b) {
        return x[idx[a]] == x[idx[b]] && y[idx[a]] == y[idx[b]];
    });

    std::vector<double> ys(m), buf;
    for (std::size_t i = 0; i < m; ++i) ys[i] = y[idx[i]];
    // Within x-ties y is ascending, so every inversion is a discordant pair.
    const auto discordant = count_inversions(ys, buf);
    const auto n2 = tied_pairs(m, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

    // Pairs untied in both lists: n0 - n1 - n2 + n3 = concordant + discordant.
    const auto untied = n0 - n1 - n2 + n3;
    const auto concordant = untied - discordant;
    return static_cast<double>(concordant - discordant) / static_cast<double>(n0);
}

std::vector<RankPair> truth_pairs(const InfluenceScores& scores, std::span<const SimplexId> subset) {
    std::vector<SimplexId> ids(subset.begin(), subset.end());
    std::sort(ids.begin(), ids.end());
    for (auto id : ids) {
        if (id >= scores.size()) throw std::invalid_argument("truth_pairs: id out of range");
        if (!scores.is_observed(id))
            throw std::invalid_argument("truth_pairs: simplex " + std::to_string(id) + " is unobserved");
    }
    std::vector<RankPair> pairs;
    if (ids.size() > 1) pairs.reserve(ids.size() * (ids.size() - 1) / 2);
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            const double si = scores.values[ids[a]], sj = scores.values[ids[b]];
            pairs.push_back({ids[a], ids[b], si > sj ? 1 : (si < sj ? -1 : 0)});
        }
    }
    return pairs;
}

Split split_ids(std::span<const SimplexId> ids, std::array<double, 3> ratios, std::uint64_t seed) {
    if (ids.empty()) throw std::invalid_argument("split: no ids");
    for (double r : ratios)
        if (!(r >= 0.0)) throw std::invalid_argument("split: ratios must be non-negative");
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9)
        throw std::invalid_argument("split: ratios must sum to 1");

    std::vector<SimplexId> shuffled(ids.begin(), ids.end());
    Rng rng(seed);
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[uniform_index(rng, i)]);

    const auto n = static_cast<double>(shuffled.size());
    const auto n_train = std::min(shuffled.size(), static_cast<std::size_t>(std::llround(ratios[0] * n)));
    const auto n_val = std::min(shuffled.size() - n_train, static_cast<std::size_t>(std::llround(ratios[1] * n)));
    Split s;
    s.train.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train),
                 shuffled.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), shuffled.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

}  // namespace ismnet
