#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ismnet/centrality.hpp"
#include "ismnet/complex.hpp"
#include "ismnet/diffusion.hpp"
#include "ismnet/model.hpp"

// Experiment building blocks shared by the command-line tool and the
// acceptance suite.
namespace ismnet::pipeline {

enum class InputFormat { edges, simplices };

InputFormat parse_format(const std::string& name);

/// Reads an edge list (clique-lifted to max_order) or a simplex list.
SimplicialComplex load_input(const std::filesystem::path& path, InputFormat format, int max_order,
                             std::size_t cap = kDefaultSimplexCap);

/// degree, neighbor_degree, h_index, coreness
std::vector<NodeMetric> default_metrics();

/// Node metrics averaged onto the h-simplices, optionally z-scored.
FeatureMatrix hub_features(const SimplicialComplex& complex, int h, const std::vector<NodeMetric>& metrics,
                           bool standardize_columns = true);

/// DC, ND, HI, CC, HD
const std::vector<std::string>& baseline_names();
/// Throws ConfigError for unknown names.
std::vector<double> baseline_scores(const SimplicialComplex& complex, int h, const std::string& name);

/// Kendall tau restricted to `ids`.
double subset_tau(std::span<const double> predicted, std::span<const double> truth, std::span<const SimplexId> ids);

/// beta_th of the complex's 1-skeleton at recovery rate gamma.
double threshold(const SimplicialComplex& complex, double gamma);

/// SIR (beta2 == 0) or HSIR parameters at beta = beta_ratio * beta_th and
/// beta2 = beta2_ratio * beta.
DiffusionParams diffusion_params(const SimplicialComplex& complex, double beta_ratio, double beta2_ratio,
                                 double gamma, int runs, std::uint64_t seed);

/// An ensemble of models sharing one split.
struct TrainedModel {
    ModelShape shape;
    OperatorSet ops;
    std::vector<TrainResult> members;
    Split split;

    std::vector<ModelParams> params() const;
    /// Ranking scores (mean logits).
    std::vector<double> scores(const DenseMatrix& x) const;
};

/// Member m trains with seed derive_seed(derive_seed(seed, "train"), m);
/// every member uses the split drawn from derive_seed(seed, "split").
TrainedModel train_model(const SimplicialComplex& complex, int h, int max_order, const DenseMatrix& x,
                         const InfluenceScores& labels, TrainConfig config, int ensemble = 1);

/// Ids of the top round(fraction * n) entries (at least one) by descending
/// score, ties by id.
std::vector<SimplexId> top_fraction(std::span<const double> scores, double fraction);

std::vector<std::vector<NodeId>> simplex_vertices(const SimplicialComplex& complex, int h,
                                                  std::span<const SimplexId> ids);

/// Each run immunises its own uniformly random set of `count` h-simplices.
/// Run i uses derive_seed(params.seed, "random-immunize", i) for the set and
/// derive_seed(params.seed, i) as the spreading seed.
std::vector<SpreadPoint> random_immunization(const SimplicialComplex& complex, const ContagionGraph& cg, int h,
                                             std::size_t count, double seed_fraction,
                                             std::span<const double> beta_grid, const DiffusionParams& params);

}  // namespace ismnet::pipeline
