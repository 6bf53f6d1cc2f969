#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ismnet/complex.hpp"
#include "ismnet/evaluation.hpp"
#include "ismnet/hoh.hpp"
#include "ismnet/scores.hpp"
#include "ismnet/sparse.hpp"

namespace ismnet {

/// One HoH operator per fringe order, in the order of ModelShape::fringe_orders.
using OperatorSet = std::vector<std::shared_ptr<const HoHOperator>>;

/// Architecture of a spectral simplex ranker.
struct ModelShape {
    int hub_order = 0;
    std::vector<int> fringe_orders;
    std::size_t input_dim = 0;
    std::size_t hidden = 16;
    std::size_t embed = 8;
    /// Highest Chebyshev degree K.
    int cheb_order = 3;

    bool operator==(const ModelShape&) const = default;
};

struct TensorSpec {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t offset = 0;

    bool operator==(const TensorSpec&) const = default;
};

/// Flat parameter vector with a fixed tensor layout:
///
///   per fringe f:  f<f>.w1 (d x H), f<f>.b1 (1 x H), f<f>.w2 (H x d'), f<f>.b2 (1 x d')
///   per fringe f:  f<f>.omega (1 x K+1)
///   readout.w (F*d' x 1), readout.b (1 x 1)
///
/// Gradients share the same type and layout.
class ModelParams {
public:
    ModelParams() = default;
    /// All-zero parameters for `shape`.
    explicit ModelParams(ModelShape shape);

    const ModelShape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<TensorSpec>& tensors() const noexcept { return tensors_; }

    std::span<double> tensor(std::size_t index);
    std::span<const double> tensor(std::size_t index) const;
    /// Throws std::out_of_range for unknown names.
    std::size_t tensor_index(const std::string& name) const;

    // Index helpers for fringe slot `s` (position in shape().fringe_orders).
    std::size_t w1(std::size_t s) const { return 4 * s; }
    std::size_t b1(std::size_t s) const { return 4 * s + 1; }
    std::size_t w2(std::size_t s) const { return 4 * s + 2; }
    std::size_t b2(std::size_t s) const { return 4 * s + 3; }
    std::size_t omega(std::size_t s) const { return 4 * shape_.fringe_orders.size() + s; }
    std::size_t readout_w() const { return 5 * shape_.fringe_orders.size(); }
    std::size_t readout_b() const { return 5 * shape_.fringe_orders.size() + 1; }

    bool operator==(const ModelParams&) const = default;

private:
    ModelShape shape_;
    std::vector<TensorSpec> tensors_;
    std::vector<double> values_;
};

/// Fan-in scaled uniform weights, zero biases, omega = (1, 0, ..., 0).
ModelParams init_params(const ModelShape& shape, std::uint64_t seed);

/// Intermediate values kept for the backward pass.
struct ForwardTrace {
    std::vector<DenseMatrix> hidden_pre;                 // X W1 + b1, per fringe
    std::vector<DenseMatrix> hidden;                     // leaky(hidden_pre)
    std::vector<std::vector<DenseMatrix>> cheb_terms;    // T_k(A) phi(X), per fringe
    DenseMatrix embedding;                               // concatenated Y
    std::vector<double> logits;                          // readout before the logistic
    std::vector<double> scores;                          // logistic(logits)
};

/// Chebyshev coefficients c_0 = omega_0, c_k = omega_k / k.
std::vector<double> chebyshev_coefficients(std::span<const double> omega);

/// Predicted scores in (0, 1) for every hub simplex.
InfluenceScores forward(const OperatorSet& ops, const DenseMatrix& x, const ModelParams& params,
                        ForwardTrace* trace = nullptr);

/// -sum tanh(y_i - y_j) R_ij over the pairs.
double ranking_loss(std::span<const double> predicted, std::span<const RankPair> pairs);

struct LossAndGradient {
    double loss = 0.0;
    ModelParams gradient;
};

/// Exact reverse-mode gradient of ranking_loss(forward(...)).
LossAndGradient gradients(const OperatorSet& ops, const DenseMatrix& x, const ModelParams& params,
                          std::span<const RankPair> pairs);

struct TrainConfig {
    double learning_rate = 1e-2;
    int epochs = 500;
    /// Pairs sampled per epoch = pairs_per_item * |train|.
    std::size_t pairs_per_item = 20;
    std::array<double, 3> split{0.6, 0.2, 0.2};
    /// Epochs without validation improvement before stopping; 0 disables.
    int patience = 0;
    std::uint64_t seed = 0;
    /// Seed for the train/val/test split; derived from `seed` when unset.
    std::optional<std::uint64_t> split_seed;
    int cheb_order = 3;
    std::size_t hidden = 16;
    std::size_t embed = 8;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    /// Throws ConfigError.
    void validate() const;
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;
    double train_tau = 0.0;
    double val_tau = 0.0;

    bool operator==(const EpochLog&) const = default;
};

struct TrainResult {
    ModelParams params;
    std::vector<EpochLog> log;
    int best_epoch = 0;
    double best_val_tau = 0.0;
    Split split;
};

/// Adam on sampled ranking pairs; keeps the parameters with the best
/// validation tau. Deterministic for a given config.
TrainResult train(const OperatorSet& ops, const DenseMatrix& x, const InfluenceScores& labels,
                  const ModelShape& shape, const TrainConfig& config);

/// Fringe orders 0..max_order except h, limited to layers the complex has.
std::vector<int> default_fringe_orders(const SimplicialComplex& complex, int h, int max_order);

OperatorSet build_operators(OperatorCache& cache, int h, std::span<const int> fringe_orders);

/// Builds operators from the complex and trains.
TrainResult train(const SimplicialComplex& complex, int h, int max_order, const DenseMatrix& x,
                  const InfluenceScores& labels, const TrainConfig& config);

/// Mean predicted scores over an ensemble of models.
std::vector<double> predict_scores(const OperatorSet& ops, const DenseMatrix& x,
                                   std::span<const ModelParams> ensemble);

/// Mean readout before the logistic. Orders simplices exactly like the
/// scores, but stays distinct where the logistic rounds to 0 or 1.
std::vector<double> predict_logits(const OperatorSet& ops, const DenseMatrix& x,
                                   std::span<const ModelParams> ensemble);

/// Simplex ids by descending score, ties by ascending id.
std::vector<SimplexId> rank_by_score(std::span<const double> scores);

/// rank_by_score of predict_logits.
std::vector<SimplexId> predict_rank(const OperatorSet& ops, const DenseMatrix& x,
                                    std::span<const ModelParams> ensemble);

}  // namespace ismnet
