#include "ismnet/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "ismnet/error.hpp"

namespace ismnet {

NodeGraph::NodeGraph(const SimplicialComplex& complex) : adj_(complex.node_count()) {
    const auto& edges = complex.layer(1);
    for (SimplexId e = 0; e < edges.size(); ++e) {
        auto uv = edges[e];
        adj_[uv[0]].push_back(uv[1]);
        adj_[uv[1]].push_back(uv[0]);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
    edges_ = edges.size();
}

NodeGraph::NodeGraph(std::vector<std::vector<NodeId>> adjacency) : adj_(std::move(adjacency)) {
    std::size_t half_edges = 0;
    for (auto& a : adj_) {
        std::sort(a.begin(), a.end());
        half_edges += a.size();
    }
    edges_ = half_edges / 2;
}

NodeMetric parse_node_metric(std::string_view name) {
    if (name == "degree") return NodeMetric::degree;
    if (name == "neighbor_degree") return NodeMetric::neighbor_degree;
    if (name == "h_index") return NodeMetric::h_index;
    if (name == "coreness") return NodeMetric::coreness;
    if (name == "closeness") return NodeMetric::closeness;
    if (name == "betweenness") return NodeMetric::betweenness;
    throw ConfigError("unknown centrality metric '" + std::string(name) + "'");
}

std::string_view to_string(NodeMetric m) {
    switch (m) {
        case NodeMetric::degree: return "degree";
        case NodeMetric::neighbor_degree: return "neighbor_degree";
        case NodeMetric::h_index: return "h_index";
        case NodeMetric::coreness: return "coreness";
        case NodeMetric::closeness: return "closeness";
        case NodeMetric::betweenness: return "betweenness";
    }
    return "?";
}

std::vector<double> node_centrality(const NodeGraph& g, NodeMetric metric) {
    switch (metric) {
        case NodeMetric::degree: return degree_centrality(g);
        case NodeMetric::neighbor_degree: return neighbor_degree(g);
        case NodeMetric::h_index: return h_index(g);
        case NodeMetric::coreness: return coreness(g);
        case NodeMetric::closeness: return closeness(g);
        case NodeMetric::betweenness: return betweenness(g);
    }
    throw ConfigError("unknown centrality metric");
}

std::vector<double> node_centrality(const SimplicialComplex& complex, NodeMetric metric) {
    return node_centrality(NodeGraph(complex), metric);
}

std::vector<double> degree_centrality(const NodeGraph& g) {
    std::vector<double> d(g.size());
    for (NodeId v = 0; v < g.size(); ++v) d[v] = static_cast<double>(g.degree(v));
    return d;
}

std::vector<double> neighbor_degree(const NodeGraph& g) {
    std::vector<double> nd(g.size(), 0.0);
    for (NodeId v = 0; v < g.size(); ++v) {
        if (g.degree(v) == 0) continue;
        double s = 0.0;
        for (auto u : g.neighbors(v)) s += static_cast<double>(g.degree(u));
        nd[v] = s / static_cast<double>(g.degree(v));
    }
    return nd;
}

std::vector<double> h_index(const NodeGraph& g) {
    std::vector<double> out(g.size(), 0.0);
    std::vector<std::size_t> degs;
    for (NodeId v = 0; v < g.size(); ++v) {
        degs.clear();
        for (auto u : g.neighbors(v)) degs.push_back(g.degree(u));
        std::sort(degs.begin(), degs.end(), std::greater<>());
        std::size_t h = 0;
        while (h < degs.size() && degs[h] >= h + 1) ++h;
        out[v] = static_cast<double>(h);
    }
    return out;
}

std::vector<double> coreness(const NodeGraph& g) {
    // Batagelj-Zaversnik: nodes bucketed by current degree, peeled in
    // ascending degree, ties by id.
    const std::size_t n = g.size();
    std::vector<std::size_t> deg(n);
    std::size_t max_deg = 0;
    for (NodeId v = 0; v < n; ++v) max_deg = std::max(max_deg, deg[v] = g.degree(v));
    std::vector<std::size_t> bin(max_deg + 2, 0);
    for (auto d : deg) ++bin[d];
    std::size_t start = 0;
    for (std::size_t d = 0; d <= max_deg; ++d) {
        const auto c = bin[d];
        bin[d] = start;
        start += c;
    }
    std::vector<NodeId> vert(n);
    std::vector<std::size_t> pos(n);
    for (NodeId v = 0; v < n; ++v) {
        pos[v] = bin[deg[v]]++;
        vert[pos[v]] = v;
    }
    for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
    bin[0] = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const NodeId v = vert[i];
        for (auto u : g.neighbors(v)) {
            if (deg[u] > deg[v]) {
                const auto du = deg[u];
                const auto pu = pos[u];
                const auto pw = bin[du];
                const NodeId w = vert[pw];
                if (u != w) {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                ++bin[du];
                --deg[u];
            }
        }
    }
    return {deg.begin(), deg.end()};
}

namespace {

// BFS distances from s; unreachable = SIZE_MAX.
void bfs(const NodeGraph& g, NodeId s, std::vector<std::size_t>& dist, std::vector<NodeId>& order) {
    std::fill(dist.begin(), dist.end(), SIZE_MAX);
    order.clear();
    dist[s] = 0;
    order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head) {
        const NodeId v = order[head];
        for (auto u : g.neighbors(v)) {
            if (dist[u] != SIZE_MAX) continue;
            dist[u] = dist[v] + 1;
            order.push_back(u);
        }
    }
}

}  // namespace

std::vector<double> closeness(const NodeGraph& g) {
    const std::size_t n = g.size();
    std::vector<double> out(n, 0.0);
#pragma omp parallel
    {
        std::vector<std::size_t> dist(n);
        std::vector<NodeId> order;
#pragma omp for schedule(dynamic, 16)
        for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(n); ++s) {
            bfs(g, static_cast<NodeId>(s), dist, order);
            std::size_t total = 0;
            for (auto v : order) total += dist[v];
            out[static_cast<std::size_t>(s)] = total > 0 ? 1.0 / static_cast<double>(total) : 0.0;
        }
    }
    return out;
}

std::vector<double> betweenness(const NodeGraph& g) {
    const std::size_t n = g.size();
    // Fixed source partition so the reduction order does not depend on the
    // thread count.
    const std::size_t blocks = std::min<std::size_t>(n, 64);
    std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
#pragma omp parallel
    {
        std::vector<std::size_t> dist(n);
        std::vector<NodeId> order;
        std::vector<double> sigma(n), delta(n);
#pragma omp for schedule(dynamic, 1)
        for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
            auto& acc = partial[static_cast<std::size_t>(b)];
            for (std::size_t s = static_cast<std::size_t>(b); s < n; s += blocks) {
                bfs(g, static_cast<NodeId>(s), dist, order);
                for (auto v : order) sigma[v] = 0.0, delta[v] = 0.0;
                sigma[s] = 1.0;
                for (auto v : order)
                    for (auto u : g.neighbors(v))
                        if (dist[u] == dist[v] + 1) sigma[u] += sigma[v];
                for (auto it = order.rbegin(); it != order.rend(); ++it) {
                    const NodeId w = *it;
                    for (auto v : g.neighbors(w))
                        if (dist[v] + 1 == dist[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                    if (w != s) acc[w] += delta[w];
                }
            }
        }
    }
    std::vector<double> out(n, 0.0);
    for (const auto& p : partial)
        for (std::size_t v = 0; v < n; ++v) out[v] += p[v];
    for (auto& v : out) v /= 2.0;
    return out;
}

IterativeResult iterative_centrality(const NodeGraph& g, IterativeMetric metric, IterativeOptions opts) {
    const std::size_t n = g.size();
    IterativeResult res;
    if (n == 0) {
        res.converged = true;
        return res;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> x(n, inv_n), next(n);
    for (res.iterations = 1; res.iterations <= opts.max_iters; ++res.iterations) {
        if (metric == IterativeMetric::pagerank) {
            double dangling = 0.0;
            for (NodeId v = 0; v < n; ++v)
                if (g.degree(v) == 0) dangling += x[v];
            const double base = (1.0 - opts.damping) * inv_n + opts.damping * dangling * inv_n;
            for (NodeId v = 0; v < n; ++v) {
                double s = 0.0;
                for (auto u : g.neighbors(v)) s += x[u] / static_cast<double>(g.degree(u));
                next[v] = base + opts.damping * s;
            }
        } else {
            // Power iteration on A + I: same leading eigenvector, no
            // oscillation on bipartite graphs.
            double norm = 0.0;
            for (NodeId v = 0; v < n; ++v) {
                double s = x[v];
                for (auto u : g.neighbors(v)) s += x[u];
                next[v] = s;
                norm += std::abs(s);
            }
            if (norm == 0.0) break;
            for (auto& v : next) v /= norm;
        }
        double diff = 0.0;
        for (std::size_t v = 0; v < n; ++v) diff += std::abs(next[v] - x[v]);
        x.swap(next);
        if (diff < opts.tol) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged) res.iterations = opts.max_iters;
    res.values = std::move(x);
    return res;
}

FeatureMatrix node_features(const NodeGraph& g, const std::vector<NodeMetric>& metrics) {
    FeatureMatrix f;
    f.values = DenseMatrix(g.size(), metrics.size());
    for (std::size_t c = 0; c < metrics.size(); ++c) {
        f.names.emplace_back(to_string(metrics[c]));
        const auto col = node_centrality(g, metrics[c]);
        for (std::size_t r = 0; r < g.size(); ++r) f.values(r, c) = col[r];
    }
    return f;
}

FeatureMatrix simplex_features(const FeatureMatrix& node_features, const SimplicialComplex& complex, int h) {
    if (node_features.values.rows() != complex.node_count())
        throw DimensionError("node feature rows (" + std::to_string(node_features.values.rows()) +
                             ") do not cover all " + std::to_string(complex.node_count()) + " nodes");
    if (h == 0) return node_features;
    const auto& layer = complex.layer(h);
    const std::size_t d = node_features.values.cols();
    FeatureMatrix out;
    out.names = node_features.names;
    out.values = DenseMatrix(layer.size(), d);
    const double inv = 1.0 / static_cast<double>(h + 1);
    for (SimplexId s = 0; s < layer.size(); ++s) {
        auto row = out.values.row(s);
        for (auto v : layer[s]) {
            auto src = node_features.values.row(v);
            for (std::size_t c = 0; c < d; ++c) row[c] += src[c];
        }
        for (auto& x : row) x *= inv;
    }
    return out;
}

FeatureMatrix standardize(const FeatureMatrix& x) {
    FeatureMatrix out = x;
    const std::size_t n = x.values.rows();
    if (n == 0) return out;
    for (std::size_t c = 0; c < x.values.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += x.values(r, c);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) var += (x.values(r, c) - mean) * (x.values(r, c) - mean);
        var /= static_cast<double>(n);
        const double sd = std::sqrt(var);
        // Relative floor: columns equal up to rounding count as constant.
        const bool constant = sd <= 1e-12 * std::max(1.0, std::abs(mean));
        for (std::size_t r = 0; r < n; ++r) out.values(r, c) = constant ? 0.0 : (x.values(r, c) - mean) / sd;
    }
    return out;
}

std::vector<double> simplex_baseline(const std::vector<double>& node_scores, const SimplicialComplex& complex, int h) {
    FeatureMatrix f;
    f.names = {"score"};
    f.values = DenseMatrix(node_scores.size(), 1);
    std::copy(node_scores.begin(), node_scores.end(), f.values.data().begin());
    const auto s = simplex_features(f, complex, h);
    return {s.values.data().begin(), s.values.data().end()};
}

std::vector<double> higher_order_degree(const SimplicialComplex& complex, int h) {
    std::vector<double> out(complex.count(h), 0.0);
    for (int d = 0; d <= complex.max_order(); ++d) {
        if (d == h) continue;
        const auto k = generalized_degree(complex, d, h);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += static_cast<double>(k[i]);
    }
    return out;
}

}  // namespace ismnet
