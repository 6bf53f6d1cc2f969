#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ismnet/scores.hpp"
#include "ismnet/sparse.hpp"

namespace ismnet {

using NodeId = std::uint32_t;
/// External node label as it appears in input files.
using NodeLabel = std::uint64_t;

/// Default per-layer simplex cap used as a memory guard during construction.
inline constexpr std::size_t kDefaultSimplexCap = 5'000'000;

/// A set of h+1 nodes, stored strictly ascending.
class Simplex {
public:
    /// Throws std::invalid_argument unless `vertices` is non-empty and strictly ascending.
    explicit Simplex(std::vector<NodeId> vertices);
    /// Sorts first; duplicates are still rejected.
    static Simplex from_unsorted(std::vector<NodeId> vertices);

    int order() const noexcept { return static_cast<int>(vertices_.size()) - 1; }
    std::span<const NodeId> vertices() const noexcept { return vertices_; }

    auto operator<=>(const Simplex&) const = default;

private:
    std::vector<NodeId> vertices_;
};

/// All simplices of one order, in lexicographic vertex order. Ids are the
/// positions in that order and are therefore stable.
class SimplexLayer {
public:
    SimplexLayer() = default;
    /// `flat` holds size*(order+1) node ids, rows sorted and unique.
    SimplexLayer(int order, std::vector<NodeId> flat);

    int order() const noexcept { return order_; }
    std::size_t width() const noexcept { return static_cast<std::size_t>(order_) + 1; }
    std::size_t size() const noexcept { return flat_.size() / width(); }

    std::span<const NodeId> operator[](SimplexId id) const { return {flat_.data() + id * width(), width()}; }

    std::optional<SimplexId> find(std::span<const NodeId> vertices) const;

    std::span<const NodeId> flat() const noexcept { return flat_; }

    bool operator==(const SimplexLayer&) const = default;

private:
    int order_ = 0;
    std::vector<NodeId> flat_;
};

/// Immutable simplicial complex with layers 0..max_order.
///
/// Node ids are dense (0..n-1); `labels()[id]` recovers the external label.
/// Every layer up to max_order exists, though higher layers may be empty.
class SimplicialComplex {
public:
    SimplicialComplex() = default;
    /// Validates layer shapes and downward closure.
    SimplicialComplex(std::vector<NodeLabel> labels, std::vector<SimplexLayer> layers);

    std::size_t node_count() const noexcept { return labels_.size(); }
    int max_order() const noexcept { return static_cast<int>(layers_.size()) - 1; }
    bool has_layer(int order) const noexcept { return order >= 0 && order <= max_order(); }

    /// Throws MissingLayerError for orders above max_order.
    const SimplexLayer& layer(int order) const;
    std::size_t count(int order) const { return layer(order).size(); }

    std::span<const NodeLabel> labels() const noexcept { return labels_; }

    std::optional<SimplexId> find(const Simplex& s) const;
    Simplex simplex(int order, SimplexId id) const;

    /// Checks that every (h-1)-face of every stored h-simplex is stored.
    bool is_downward_closed() const;

    /// FNV-1a hash over labels and layer contents.
    std::uint64_t content_hash() const;

    bool operator==(const SimplicialComplex&) const = default;

private:
    std::vector<NodeLabel> labels_;
    std::vector<SimplexLayer> layers_;
};

struct SimplexRecord {
    std::vector<NodeLabel> vertices;
    double weight = 1.0;
};

struct SimplexListResult {
    SimplicialComplex complex;
    /// One score vector per order; listed simplices are observed.
    std::vector<InfluenceScores> scores;
    /// Number of records merged into an earlier identical record.
    std::size_t duplicate_records = 0;
};

/// Graph complex (orders 0 and 1). Duplicate and reversed pairs collapse;
/// self-loops raise ParseError carrying the pair index.
SimplicialComplex from_edge_list(std::span<const std::pair<NodeLabel, NodeLabel>> edges);

/// Clique complex of the 1-skeleton up to `max_order`.
SimplicialComplex clique_lift(const SimplicialComplex& complex, int max_order,
                              std::size_t cap = kDefaultSimplexCap);

/// Downward closure of explicitly listed simplices (e.g. coauthorship papers).
SimplexListResult from_simplex_list(std::span<const SimplexRecord> records,
                                    std::size_t cap = kDefaultSimplexCap);

/// Maximal cliques of the 1-skeleton via pivoting Bron-Kerbosch over a
/// degeneracy ordering. Each clique is sorted; the list is sorted.
std::vector<std::vector<NodeId>> maximal_cliques(const SimplicialComplex& complex);

/// B_{h,f}: n_h x n_f 0/1 matrix, 1 where one simplex strictly contains the other.
CsrMatrix incidence_matrix(const SimplicialComplex& complex, int h, int f);

/// k_{d,m}: for each m-simplex, the number of d-simplices incident to it.
std::vector<std::int64_t> generalized_degree(const SimplicialComplex& complex, int d, int m);

}  // namespace ismnet
