#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ismnet/complex.hpp"
#include "ismnet/sparse.hpp"

namespace ismnet {

/// Node adjacency of a complex's 1-skeleton, neighbours sorted.
class NodeGraph {
public:
    explicit NodeGraph(const SimplicialComplex& complex);
    explicit NodeGraph(std::vector<std::vector<NodeId>> adjacency);

    std::size_t size() const noexcept { return adj_.size(); }
    std::size_t degree(NodeId v) const { return adj_[v].size(); }
    const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[v]; }
    std::size_t edge_count() const noexcept { return edges_; }

private:
    std::vector<std::vector<NodeId>> adj_;
    std::size_t edges_ = 0;
};

enum class NodeMetric { degree, neighbor_degree, h_index, coreness, closeness, betweenness };
enum class IterativeMetric { pagerank, eigenvector };

/// Throws ConfigError on an unknown name.
NodeMetric parse_node_metric(std::string_view name);
std::string_view to_string(NodeMetric m);

std::vector<double> node_centrality(const NodeGraph& graph, NodeMetric metric);
std::vector<double> node_centrality(const SimplicialComplex& complex, NodeMetric metric);

std::vector<double> degree_centrality(const NodeGraph& g);
/// Mean neighbour degree, 0 for isolated nodes.
std::vector<double> neighbor_degree(const NodeGraph& g);
/// Largest h such that at least h neighbours have degree >= h.
std::vector<double> h_index(const NodeGraph& g);
/// k-core index by bucket peeling.
std::vector<double> coreness(const NodeGraph& g);
/// 1 / (sum of distances inside the node's component); 0 for singletons.
std::vector<double> closeness(const NodeGraph& g);
/// Brandes accumulation, undirected (each pair counted once).
std::vector<double> betweenness(const NodeGraph& g);

struct IterativeResult {
    std::vector<double> values;
    int iterations = 0;
    bool converged = false;
};

struct IterativeOptions {
    double damping = 0.85;
    int max_iters = 1000;
    double tol = 1e-12;
};

IterativeResult iterative_centrality(const NodeGraph& g, IterativeMetric metric, IterativeOptions opts = {});

/// Named feature columns, one row per simplex of some layer.
struct FeatureMatrix {
    std::vector<std::string> names;
    DenseMatrix values;
};

/// Node features with the requested metrics as columns.
FeatureMatrix node_features(const NodeGraph& g, const std::vector<NodeMetric>& metrics);

/// Row for each h-simplex = mean of its vertices' rows; h = 0 is the identity.
FeatureMatrix simplex_features(const FeatureMatrix& node_features, const SimplicialComplex& complex, int h);

/// Per-column z-score with population variance; constant columns become 0.
FeatureMatrix standardize(const FeatureMatrix& x);

/// Simplex-level baseline score for one node metric: vertex mean.
std::vector<double> simplex_baseline(const std::vector<double>& node_scores, const SimplicialComplex& complex, int h);

/// Higher-order degree baseline: sum of generalized degrees k_{d,h} over all
/// other orders d <= max_order.
std::vector<double> higher_order_degree(const SimplicialComplex& complex, int h);

}  // namespace ismnet
