#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "ismnet/complex.hpp"
#include "ismnet/rng.hpp"

// Small graph builders shared by the unit tests.
namespace ismnet::testing {

using EdgeList = std::vector<std::pair<NodeLabel, NodeLabel>>;

inline EdgeList complete_edges(NodeLabel n) {
    EdgeList e;
    for (NodeLabel i = 0; i < n; ++i)
        for (NodeLabel j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return e;
}

inline EdgeList path_edges(NodeLabel n) {
    EdgeList e;
    for (NodeLabel i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return e;
}

/// Centre 0, leaves 1..leaves.
inline EdgeList star_edges(NodeLabel leaves) {
    EdgeList e;
    for (NodeLabel i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return e;
}

/// Triangle {0,1,2} plus pendant edge {2,3}.
inline EdgeList triangle_pendant_edges() { return {{0, 1}, {0, 2}, {1, 2}, {2, 3}}; }

/// G(n, p); isolated vertices simply do not appear.
inline EdgeList random_edges(NodeLabel n, double p, std::uint64_t seed) {
    Rng rng(seed);
    EdgeList e;
    for (NodeLabel i = 0; i < n; ++i)
        for (NodeLabel j = i + 1; j < n; ++j)
            if (uniform01(rng) < p) e.emplace_back(i, j);
    return e;
}

/// Preferential attachment, each new node joins `m` distinct earlier nodes.
inline EdgeList preferential_edges(NodeLabel n, std::size_t m, std::uint64_t seed) {
    Rng rng(seed);
    EdgeList e;
    std::vector<NodeLabel> ends;
    for (NodeLabel i = 0; i <= m; ++i)
        for (NodeLabel j = i + 1; j <= m; ++j) {
            e.emplace_back(i, j);
            ends.push_back(i);
            ends.push_back(j);
        }
    for (NodeLabel v = m + 1; v < n; ++v) {
        std::vector<NodeLabel> targets;
        while (targets.size() < m) {
            const auto t = ends[uniform_index(rng, ends.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (auto t : targets) {
            e.emplace_back(t, v);
            ends.push_back(t);
            ends.push_back(v);
        }
    }
    return e;
}

inline SimplicialComplex graph(const EdgeList& e) { return from_edge_list(e); }

inline SimplicialComplex lifted(const EdgeList& e, int max_order) {
    return clique_lift(from_edge_list(e), max_order);
}

}  // namespace ismnet::testing
