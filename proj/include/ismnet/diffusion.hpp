#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ismnet/centrality.hpp"
#include "ismnet/complex.hpp"
#include "ismnet/rng.hpp"
#include "ismnet/scores.hpp"

namespace ismnet {

enum class ContagionModel { sir, hsir };

struct DiffusionParams {
    /// Per-step infection probability through one infected neighbour.
    double beta = 0.0;
    /// Per-step recovery probability.
    double gamma = 1.0;
    /// beta_2, beta_3, ... ; only beta_2 is supported by the engine.
    std::vector<double> higher_betas;
    int runs = 1000;
    std::uint64_t seed = 0;
    ContagionModel model = ContagionModel::sir;
    /// Safety cap on synchronous steps (reached only when gamma is 0 or tiny).
    int max_steps = 100000;

    double beta2() const { return higher_betas.empty() ? 0.0 : higher_betas.front(); }

    /// Throws ConfigError on out-of-range probabilities, runs < 1, or a
    /// non-zero beta_p for p > 2.
    void validate() const;
};

struct RunOutcome {
    /// Recovered fraction at termination. For truncated runs the still
    /// infected nodes are counted too (ever-infected fraction).
    double recovered_fraction = 0.0;
    int steps = 0;
    std::size_t susceptible = 0;
    std::size_t infected = 0;
    std::size_t recovered = 0;
    bool truncated = false;
};

/// Node graph plus, for each node, the (other two vertices of) every
/// 2-simplex containing it.
class ContagionGraph {
public:
    explicit ContagionGraph(const SimplicialComplex& complex);

    const NodeGraph& graph() const noexcept { return graph_; }
    std::size_t size() const noexcept { return graph_.size(); }
    std::span<const std::pair<NodeId, NodeId>> triangles(NodeId v) const { return triangles_[v]; }
    bool has_triangles() const noexcept { return triangle_count_ > 0; }

private:
    NodeGraph graph_;
    std::vector<std::vector<std::pair<NodeId, NodeId>>> triangles_;
    std::size_t triangle_count_ = 0;
};

/// Called after every step with (step, S, I, R).
using StepObserver = std::function<void(int, std::size_t, std::size_t, std::size_t)>;

struct DegreeMoments {
    double mean = 0.0;
    double mean_square = 0.0;
};

DegreeMoments degree_moments(const NodeGraph& g);

/// beta_th = <k> / (<k^2> - <k>) * gamma.
double epidemic_threshold(const NodeGraph& g, double gamma);

/// Synchronous discrete-time SIR. Each step every susceptible node with m
/// infected neighbours is infected with probability 1-(1-beta)^m; then every
/// node that was infected at the start of the step recovers with probability
/// gamma. `immunized` nodes start recovered.
RunOutcome sir_run(const NodeGraph& g, std::span<const NodeId> seeds, const DiffusionParams& params, Rng& rng,
                   std::span<const NodeId> immunized = {}, const StepObserver& observer = {});

/// SIR with an extra channel through 2-simplices: infection probability
/// 1-(1-beta)^{m1}(1-beta2)^{m2}, m2 = 2-simplices whose other two vertices
/// are infected. Consumes random numbers exactly like sir_run.
RunOutcome hsir_run(const ContagionGraph& cg, std::span<const NodeId> seeds, const DiffusionParams& params, Rng& rng,
                    std::span<const NodeId> immunized = {}, const StepObserver& observer = {});

/// Stream key for a seed set; independent of simplex id so labels are
/// equivariant under id relabelling.
std::uint64_t seed_set_key(std::span<const NodeId> seeds);

/// Per-run recovered fractions when `seeds` start infected; run i uses the
/// stream derive_seed(params.seed, seed_set_key(seeds), i).
std::vector<double> infection_samples(const ContagionGraph& cg, std::span<const NodeId> seeds,
                                      const DiffusionParams& params);

/// Mean recovered fraction over params.runs runs seeded by the simplex's vertices.
double simplex_infection_ability(const ContagionGraph& cg, std::span<const NodeId> simplex,
                                 const DiffusionParams& params);

/// Infection ability of every h-simplex.
InfluenceScores generate_labels(const SimplicialComplex& complex, int h, const DiffusionParams& params);

struct SpreadPoint {
    double beta = 0.0;
    double mean_recovered = 0.0;
    double std_error = 0.0;
};

/// Immunises the nodes of `immunized_simplices`, seeds round(seed_fraction *
/// |rest|) (at least one) uniformly random remaining nodes per run, and
/// reports the mean final recovered fraction (immunised nodes included) for
/// each beta. Run i draws from derive_seed(params.seed, "immunize", i) at
/// every beta, so grid points and strategies share random numbers.
std::vector<SpreadPoint> immunize_and_spread(const ContagionGraph& cg,
                                             const std::vector<std::vector<NodeId>>& immunized_simplices,
                                             double seed_fraction, std::span<const double> beta_grid,
                                             const DiffusionParams& params);

/// Compensated summation, fixed order.
double kahan_sum(std::span<const double> values);

}  // namespace ismnet
