#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ismnet/error.hpp"
#include "ismnet/evaluation.hpp"
#include "ismnet/io.hpp"
#include "ismnet/rng.hpp"

namespace ismnet::pipeline {

InputFormat parse_format(const std::string& name) {
    if (name == "edges") return InputFormat::edges;
    if (name == "simplices") return InputFormat::simplices;
    throw ConfigError("unknown input format '" + name + "' (expected edges or simplices)");
}

SimplicialComplex load_input(const std::filesystem::path& path, InputFormat format, int max_order, std::size_t cap) {
    if (format == InputFormat::edges) {
        const auto edges = io::read_edge_list(path);
        if (edges.empty()) throw Error("edge list " + path.string() + " has no edges");
        return clique_lift(from_edge_list(edges), max_order, cap);
    }
    return from_simplex_list(io::read_simplex_list(path), cap).complex;
}

std::vector<NodeMetric> default_metrics() {
    return {NodeMetric::degree, NodeMetric::neighbor_degree, NodeMetric::h_index, NodeMetric::coreness};
}

FeatureMatrix hub_features(const SimplicialComplex& complex, int h, const std::vector<NodeMetric>& metrics,
                           bool standardize_columns) {
    const NodeGraph graph(complex);
    auto x = simplex_features(node_features(graph, metrics), complex, h);
    return standardize_columns ? standardize(x) : x;
}

const std::vector<std::string>& baseline_names() {
    static const std::vector<std::string> names{"DC", "ND", "HI", "CC", "HD"};
    return names;
}

std::vector<double> baseline_scores(const SimplicialComplex& complex, int h, const std::string& name) {
    if (name == "HD") return higher_order_degree(complex, h);
    NodeMetric metric;
    if (name == "DC")
        metric = NodeMetric::degree;
    else if (name == "ND")
        metric = NodeMetric::neighbor_degree;
    else if (name == "HI")
        metric = NodeMetric::h_index;
    else if (name == "CC")
        metric = NodeMetric::coreness;
    else
        throw ConfigError("unknown baseline '" + name + "' (expected DC, ND, HI, CC or HD)");
    return simplex_baseline(node_centrality(complex, metric), complex, h);
}

double subset_tau(std::span<const double> predicted, std::span<const double> truth, std::span<const SimplexId> ids) {
    std::vector<double> a, b;
    a.reserve(ids.size());
    b.reserve(ids.size());
    for (auto i : ids) {
        a.push_back(predicted[i]);
        b.push_back(truth[i]);
    }
    return kendall_tau(a, b);
}

double threshold(const SimplicialComplex& complex, double gamma) { return epidemic_threshold(NodeGraph(complex), gamma); }

DiffusionParams diffusion_params(const SimplicialComplex& complex, double beta_ratio, double beta2_ratio,
                                 double gamma, int runs, std::uint64_t seed) {
    DiffusionParams p;
    p.gamma = gamma;
    p.beta = beta_ratio * threshold(complex, gamma);
    if (beta2_ratio != 0.0) {
        p.higher_betas = {beta2_ratio * p.beta};
        p.model = ContagionModel::hsir;
    }
    p.runs = runs;
    p.seed = seed;
    p.validate();
    return p;
}

std::vector<ModelParams> TrainedModel::params() const {
    std::vector<ModelParams> out;
    for (const auto& m : members) out.push_back(m.params);
    return out;
}

std::vector<double> TrainedModel::scores(const DenseMatrix& x) const {
    const auto p = params();
    return predict_logits(ops, x, p);
}

TrainedModel train_model(const SimplicialComplex& complex, int h, int max_order, const DenseMatrix& x,
                         const InfluenceScores& labels, TrainConfig config, int ensemble) {
    if (ensemble < 1) throw ConfigError("ensemble size must be at least 1");
    if (h > complex.max_order()) throw ConfigError("hub order " + std::to_string(h) + " exceeds the complex's order");
    TrainedModel model;
    model.shape.hub_order = h;
    model.shape.fringe_orders = default_fringe_orders(complex, h, max_order);
    if (model.shape.fringe_orders.empty())
        throw ConfigError("no fringe layers for hub order " + std::to_string(h) + " up to order " +
                          std::to_string(max_order));
    model.shape.input_dim = x.cols();
    model.shape.hidden = config.hidden;
    model.shape.embed = config.embed;
    model.shape.cheb_order = config.cheb_order;
    OperatorCache cache(complex);
    model.ops = build_operators(cache, h, model.shape.fringe_orders);

    const auto root = config.seed;
    config.split_seed = derive_seed(root, "split");
    for (int m = 0; m < ensemble; ++m) {
        config.seed = derive_seed(derive_seed(root, "train"), static_cast<std::uint64_t>(m));
        model.members.push_back(train(model.ops, x, labels, model.shape, config));
    }
    model.split = model.members.front().split;
    return model;
}

std::vector<SimplexId> top_fraction(std::span<const double> scores, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("top fraction must lie in (0, 1)");
    const auto order = rank_by_score(scores);
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(scores.size()))));
    return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(count, order.size()))};
}

std::vector<std::vector<NodeId>> simplex_vertices(const SimplicialComplex& complex, int h,
                                                  std::span<const SimplexId> ids) {
    const auto& layer = complex.layer(h);
    std::vector<std::vector<NodeId>> out;
    out.reserve(ids.size());
    for (auto id : ids) {
        const auto s = layer[id];
        out.emplace_back(s.begin(), s.end());
    }
    return out;
}

std::vector<SpreadPoint> random_immunization(const SimplicialComplex& complex, const ContagionGraph& cg, int h,
                                             std::size_t count, double seed_fraction,
                                             std::span<const double> beta_grid, const DiffusionParams& params) {
    params.validate();
    const auto n = complex.count(h);
    if (count == 0 || count > n) throw ConfigError("immunized simplex count out of range");
    std::vector<std::vector<double>> samples(beta_grid.size());
    for (int i = 0; i < params.runs; ++i) {
        const auto run = static_cast<std::uint64_t>(i);
        Rng rng(derive_seed(derive_seed(params.seed, "random-immunize"), run));
        std::vector<SimplexId> ids(n);
        std::iota(ids.begin(), ids.end(), SimplexId{0});
        for (std::size_t k = 0; k < count; ++k) std::swap(ids[k], ids[k + uniform_index(rng, n - k)]);
        ids.resize(count);
        std::sort(ids.begin(), ids.end());
        DiffusionParams one = params;
        one.runs = 1;
        one.seed = derive_seed(params.seed, run);
        const auto points = immunize_and_spread(cg, simplex_vertices(complex, h, ids), seed_fraction, beta_grid, one);
        for (std::size_t b = 0; b < points.size(); ++b) samples[b].push_back(points[b].mean_recovered);
    }
    std::vector<SpreadPoint> table;
    for (std::size_t b = 0; b < beta_grid.size(); ++b) {
        const auto& r = samples[b];
        const double mean = kahan_sum(r) / static_cast<double>(r.size());
        double ss = 0.0;
        for (double v : r) ss += (v - mean) * (v - mean);
        const double sd = r.size() > 1 ? std::sqrt(ss / static_cast<double>(r.size() - 1)) : 0.0;
        table.push_back({beta_grid[b], mean, sd / std::sqrt(static_cast<double>(r.size()))});
    }
    return table;
}

}  // namespace ismnet::pipeline
