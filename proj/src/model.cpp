#include "ismnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ismnet/error.hpp"
#include "ismnet/rng.hpp"

namespace ismnet {

namespace {

constexpr double kLeakySlope = 0.01;

double logistic(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

DenseMatrix as_matrix(std::span<const double> v, std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    std::copy(v.begin(), v.end(), m.data().begin());
    return m;
}

void add_row_bias(DenseMatrix& m, std::span<const double> bias) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
    }
}

void column_sums_into(const DenseMatrix& m, std::span<double> out) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) out[c] += row[c];
    }
}

void check_inputs(const OperatorSet& ops, const DenseMatrix& x, const ModelParams& params) {
    const auto& shape = params.shape();
    if (ops.size() != shape.fringe_orders.size())
        throw DimensionError("expected " + std::to_string(shape.fringe_orders.size()) + " operators, got " +
                             std::to_string(ops.size()));
    if (x.cols() != shape.input_dim)
        throw DimensionError("feature matrix has " + std::to_string(x.cols()) + " columns, model expects " +
                             std::to_string(shape.input_dim));
    for (std::size_t s = 0; s < ops.size(); ++s) {
        if (!ops[s]) throw DimensionError("missing operator for fringe order " + std::to_string(shape.fringe_orders[s]));
        if (ops[s]->fringe_order >= 0 && ops[s]->fringe_order != shape.fringe_orders[s])
            throw DimensionError("operator " + std::to_string(s) + " has fringe order " +
                                 std::to_string(ops[s]->fringe_order) + ", expected " +
                                 std::to_string(shape.fringe_orders[s]));
        if (ops[s]->adjacency.rows() != x.rows())
            throw DimensionError("operator for fringe order " + std::to_string(shape.fringe_orders[s]) + " is " +
                                 std::to_string(ops[s]->adjacency.rows()) + " square, feature matrix has " +
                                 std::to_string(x.rows()) + " rows");
    }
}

}  // namespace

// --- ModelParams -----------------------------------------------------------

ModelParams::ModelParams(ModelShape shape) : shape_(std::move(shape)) {
    if (shape_.cheb_order < 0) throw ConfigError("Chebyshev order must be non-negative");
    for (int f : shape_.fringe_orders)
        if (f == shape_.hub_order) throw ConfigError("fringe orders must exclude the hub order");
    std::size_t offset = 0;
    auto push = [&](std::string name, std::size_t rows, std::size_t cols) {
        tensors_.push_back({std::move(name), rows, cols, offset});
        offset += rows * cols;
    };
    const auto d = shape_.input_dim, h = shape_.hidden, e = shape_.embed;
    for (int f : shape_.fringe_orders) {
        const auto p = "f" + std::to_string(f) + ".";
        push(p + "w1", d, h);
        push(p + "b1", 1, h);
        push(p + "w2", h, e);
        push(p + "b2", 1, e);
    }
    for (int f : shape_.fringe_orders) push("f" + std::to_string(f) + ".omega", 1, static_cast<std::size_t>(shape_.cheb_order) + 1);
    push("readout.w", shape_.fringe_orders.size() * e, 1);
    push("readout.b", 1, 1);
    values_.assign(offset, 0.0);
}

std::span<double> ModelParams::tensor(std::size_t index) {
    const auto& t = tensors_.at(index);
    return {values_.data() + t.offset, t.rows * t.cols};
}

std::span<const double> ModelParams::tensor(std::size_t index) const {
    const auto& t = tensors_.at(index);
    return {values_.data() + t.offset, t.rows * t.cols};
}

std::size_t ModelParams::tensor_index(const std::string& name) const {
    for (std::size_t i = 0; i < tensors_.size(); ++i)
        if (tensors_[i].name == name) return i;
    throw std::out_of_range("no tensor named " + name);
}

ModelParams init_params(const ModelShape& shape, std::uint64_t seed) {
    ModelParams p(shape);
    Rng rng(derive_seed(seed, "init_params"));
    auto fill = [&](std::size_t idx, std::size_t fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
        for (auto& w : p.tensor(idx)) w = (2.0 * uniform01(rng) - 1.0) * bound;
    };
    for (std::size_t s = 0; s < shape.fringe_orders.size(); ++s) {
        fill(p.w1(s), shape.input_dim);
        fill(p.w2(s), shape.hidden);
        p.tensor(p.omega(s))[0] = 1.0;
    }
    fill(p.readout_w(), shape.fringe_orders.size() * shape.embed);
    return p;
}

// --- forward ---------------------------------------------------------------

std::vector<double> chebyshev_coefficients(std::span<const double> omega) {
    std::vector<double> c(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k) c[k] = k == 0 ? omega[0] : omega[k] / static_cast<double>(k);
    return c;
}

InfluenceScores forward(const OperatorSet& ops, const DenseMatrix& x, const ModelParams& params, ForwardTrace* trace) {
    check_inputs(ops, x, params);
    const auto& shape = params.shape();
    const std::size_t n = x.rows();
    const std::size_t nf = shape.fringe_orders.size();
    const std::size_t e = shape.embed;

    ForwardTrace local;
    ForwardTrace& t = trace ? *trace : local;
    t = ForwardTrace{};
    t.embedding = DenseMatrix(n, nf * e);

    for (std::size_t s = 0; s < nf; ++s) {
        DenseMatrix pre = matmul(x, as_matrix(params.tensor(params.w1(s)), shape.input_dim, shape.hidden));
        add_row_bias(pre, params.tensor(params.b1(s)));
        DenseMatrix act = pre;
        for (auto& v : act.data()) v = v > 0.0 ? v : kLeakySlope * v;
        DenseMatrix phi = matmul(act, as_matrix(params.tensor(params.w2(s)), shape.hidden, e));
        add_row_bias(phi, params.tensor(params.b2(s)));

        auto terms = chebyshev_apply(ops[s]->adjacency, phi, shape.cheb_order);
        const auto c = chebyshev_coefficients(params.tensor(params.omega(s)));
        for (std::size_t k = 0; k < terms.size(); ++k) {
            if (c[k] == 0.0) continue;
            for (std::size_t r = 0; r < n; ++r) {
                auto src = terms[k].row(r);
                auto dst = t.embedding.row(r).subspan(s * e, e);
                for (std::size_t j = 0; j < e; ++j) dst[j] += c[k] * src[j];
            }
        }
        t.hidden_pre.push_back(std::move(pre));
        t.hidden.push_back(std::move(act));
        t.cheb_terms.push_back(std::move(terms));
    }

    const auto w = params.tensor(params.readout_w());
    const double b = params.tensor(params.readout_b())[0];
    t.logits.resize(n);
    t.scores.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto y = t.embedding.row(r);
        double z = b;
        for (std::size_t j = 0; j < y.size(); ++j) z += y[j] * w[j];
        t.logits[r] = z;
        t.scores[r] = logistic(z);
    }
    return InfluenceScores::all_observed(t.scores);
}

double ranking_loss(std::span<const double> predicted, std::span<const RankPair> pairs) {
    double loss = 0.0;
    for (const auto& p : pairs) {
        if (p.relation == 0) continue;
        loss -= std::tanh(predicted[p.i] - predicted[p.j]) * p.relation;
    }
    return loss;
}

// --- backward --------------------------------------------------------------

LossAndGradient gradients(const OperatorSet& ops, const DenseMatrix& x, const ModelParams& params,
                          std::span<const RankPair> pairs) {
    ForwardTrace t;
    forward(ops, x, params, &t);
    const auto& shape = params.shape();
    const std::size_t n = x.rows();
    const std::size_t nf = shape.fringe_orders.size();
    const std::size_t e = shape.embed;

    LossAndGradient out{0.0, ModelParams(shape)};
    auto& g = out.gradient;

    // d loss / d score
    std::vector<double> d_score(n, 0.0);
    for (const auto& p : pairs) {
        if (p.relation == 0) continue;
        const double th = std::tanh(t.scores[p.i] - t.scores[p.j]);
        out.loss -= th * p.relation;
        const double dt = (1.0 - th * th) * p.relation;
        d_score[p.i] -= dt;
        d_score[p.j] += dt;
    }
    // Through the logistic.
    std::vector<double> d_logit(n);
    for (std::size_t r = 0; r < n; ++r) d_logit[r] = d_score[r] * t.scores[r] * (1.0 - t.scores[r]);

    // Readout.
    const auto w = params.tensor(params.readout_w());
    auto gw = g.tensor(g.readout_w());
    double gb = 0.0;
    DenseMatrix d_embed(n, nf * e);
    for (std::size_t r = 0; r < n; ++r) {
        gb += d_logit[r];
        auto y = t.embedding.row(r);
        auto dy = d_embed.row(r);
        for (std::size_t j = 0; j < y.size(); ++j) {
            gw[j] += y[j] * d_logit[r];
            dy[j] = w[j] * d_logit[r];
        }
    }
    g.tensor(g.readout_b())[0] = gb;

    for (std::size_t s = 0; s < nf; ++s) {
        DenseMatrix dy(n, e);
        for (std::size_t r = 0; r < n; ++r) {
            auto src = d_embed.row(r).subspan(s * e, e);
            std::copy(src.begin(), src.end(), dy.row(r).begin());
        }
        // Coefficient gradients.
        const auto& terms = t.cheb_terms[s];
        auto gomega = g.tensor(g.omega(s));
        for (std::size_t k = 0; k < terms.size(); ++k) {
            double dc = 0.0;
            auto tk = terms[k].data();
            auto dd = dy.data();
            for (std::size_t i = 0; i < tk.size(); ++i) dc += tk[i] * dd[i];
            gomega[k] = k == 0 ? dc : dc / static_cast<double>(k);
        }
        // T_k(A) is symmetric, so the adjoint of the filter is the filter itself.
        const auto c = chebyshev_coefficients(params.tensor(params.omega(s)));
        const auto back = chebyshev_apply(ops[s]->adjacency, dy, shape.cheb_order);
        DenseMatrix d_phi(n, e);
        for (std::size_t k = 0; k < back.size(); ++k)
            if (c[k] != 0.0) axpy(c[k], back[k], d_phi);

        // phi = act W2 + b2
        const DenseMatrix gw2 = matmul_tn(t.hidden[s], d_phi);
        std::copy(gw2.data().begin(), gw2.data().end(), g.tensor(g.w2(s)).begin());
        column_sums_into(d_phi, g.tensor(g.b2(s)));
        DenseMatrix d_act = matmul_nt(d_phi, as_matrix(params.tensor(params.w2(s)), shape.hidden, e));
        // act = leaky(pre)
        auto pre = t.hidden_pre[s].data();
        auto da = d_act.data();
        for (std::size_t i = 0; i < da.size(); ++i) da[i] *= pre[i] > 0.0 ? 1.0 : kLeakySlope;
        // pre = X W1 + b1
        const DenseMatrix gw1 = matmul_tn(x, d_act);
        std::copy(gw1.data().begin(), gw1.data().end(), g.tensor(g.w1(s)).begin());
        column_sums_into(d_act, g.tensor(g.b1(s)));
    }
    return out;
}

// --- training --------------------------------------------------------------

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (cheb_order < 1) throw ConfigError("Chebyshev order K must be >= 1");
    if (hidden == 0 || embed == 0) throw ConfigError("hidden and embedding widths must be positive");
    for (double r : split)
        if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
    if (std::abs(split[0] + split[1] + split[2] - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
    if (patience < 0) throw ConfigError("patience must be non-negative");
}

namespace {

double subset_tau(std::span<const double> pred, const InfluenceScores& truth, std::span<const SimplexId> ids) {
    if (ids.size() < 2) return 0.0;
    std::vector<double> a, b;
    a.reserve(ids.size());
    b.reserve(ids.size());
    for (auto i : ids) {
        a.push_back(pred[i]);
        b.push_back(truth.values[i]);
    }
    return kendall_tau(a, b);
}

std::vector<RankPair> sample_pairs(const InfluenceScores& labels, std::span<const SimplexId> train,
                                   std::size_t budget, Rng& rng) {
    const std::size_t m = train.size();
    const std::size_t total = m * (m - 1) / 2;
    if (total <= budget) return truth_pairs(labels, train);
    std::vector<RankPair> pairs;
    pairs.reserve(budget);
    while (pairs.size() < budget) {
        auto a = train[uniform_index(rng, m)];
        auto b = train[uniform_index(rng, m)];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const double sa = labels.values[a], sb = labels.values[b];
        pairs.push_back({a, b, sa > sb ? 1 : (sa < sb ? -1 : 0)});
    }
    return pairs;
}

}  // namespace

TrainResult train(const OperatorSet& ops, const DenseMatrix& x, const InfluenceScores& labels,
                  const ModelShape& shape, const TrainConfig& config) {
    config.validate();
    if (labels.size() != x.rows()) throw DimensionError("labels and feature rows differ in length");
    const auto observed = labels.observed_ids();
    if (observed.size() < 2) throw Error("training needs at least two observed labels");

    TrainResult result;
    result.split = split_ids(observed, config.split, config.split_seed.value_or(derive_seed(config.seed, "split")));
    if (result.split.train.size() < 2) throw Error("training split has fewer than two labelled simplices");

    ModelParams params = init_params(shape, derive_seed(config.seed, "init"));
    Rng pair_rng(derive_seed(config.seed, "pairs"));
    const std::size_t budget = config.pairs_per_item * result.split.train.size();

    std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
    const auto& val_ids = result.split.val.size() >= 2 ? result.split.val : result.split.train;

    // Logits rank like the scores without the ties of a saturated logistic.
    auto evaluate = [&](const ModelParams& p) {
        ForwardTrace trace;
        forward(ops, x, p, &trace);
        const auto& pred = trace.logits;
        return std::pair{subset_tau(pred, labels, result.split.train), subset_tau(pred, labels, val_ids)};
    };

    {
        const auto [tr, va] = evaluate(params);
        result.params = params;
        result.best_val_tau = va;
        result.best_epoch = 0;
        result.log.push_back({0, 0.0, tr, va});
    }

    double b1_pow = 1.0, b2_pow = 1.0;
    int since_best = 0;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto pairs = sample_pairs(labels, result.split.train, budget, pair_rng);
        const auto lg = gradients(ops, x, params, pairs);

        b1_pow *= config.adam_beta1;
        b2_pow *= config.adam_beta2;
        auto w = params.values();
        auto gr = lg.gradient.values();
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * gr[i];
            v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * gr[i] * gr[i];
            const double mhat = m[i] / (1.0 - b1_pow);
            const double vhat = v[i] / (1.0 - b2_pow);
            w[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_eps);
        }

        const auto [tr, va] = evaluate(params);
        result.log.push_back({epoch, lg.loss, tr, va});
        if (va > result.best_val_tau) {
            result.best_val_tau = va;
            result.best_epoch = epoch;
            result.params = params;
            since_best = 0;
        } else if (config.patience > 0 && ++since_best >= config.patience) {
            break;
        }
    }
    return result;
}

std::vector<int> default_fringe_orders(const SimplicialComplex& complex, int h, int max_order) {
    std::vector<int> out;
    for (int f = 0; f <= max_order; ++f)
        if (f != h && complex.has_layer(f)) out.push_back(f);
    return out;
}

OperatorSet build_operators(OperatorCache& cache, int h, std::span<const int> fringe_orders) {
    OperatorSet ops;
    for (int f : fringe_orders) ops.push_back(cache.get(h, f));
    return ops;
}

TrainResult train(const SimplicialComplex& complex, int h, int max_order, const DenseMatrix& x,
                  const InfluenceScores& labels, const TrainConfig& config) {
    OperatorCache cache(complex);
    ModelShape shape;
    shape.hub_order = h;
    shape.fringe_orders = default_fringe_orders(complex, h, max_order);
    shape.input_dim = x.cols();
    shape.hidden = config.hidden;
    shape.embed = config.embed;
    shape.cheb_order = config.cheb_order;
    if (shape.fringe_orders.empty()) throw ConfigError("no fringe layers available for hub order " + std::to_string(h));
    const auto ops = build_operators(cache, h, shape.fringe_orders);
    return train(ops, x, labels, shape, config);
}

std::vector<double> predict_scores(const OperatorSet& ops, const DenseMatrix& x,
                                   std::span<const ModelParams> ensemble) {
    if (ensemble.empty()) throw ConfigError("ensemble is empty");
    std::vector<double> mean(x.rows(), 0.0);
    for (const auto& p : ensemble) {
        const auto s = forward(ops, x, p).values;
        for (std::size_t i = 0; i < s.size(); ++i) mean[i] += s[i];
    }
    if (ensemble.size() > 1)
        for (auto& v : mean) v /= static_cast<double>(ensemble.size());
    return mean;
}

std::vector<double> predict_logits(const OperatorSet& ops, const DenseMatrix& x,
                                   std::span<const ModelParams> ensemble) {
    if (ensemble.empty()) throw ConfigError("ensemble is empty");
    std::vector<double> mean(x.rows(), 0.0);
    ForwardTrace trace;
    for (const auto& p : ensemble) {
        forward(ops, x, p, &trace);
        for (std::size_t i = 0; i < trace.logits.size(); ++i) mean[i] += trace.logits[i];
    }
    if (ensemble.size() > 1)
        for (auto& v : mean) v /= static_cast<double>(ensemble.size());
    return mean;
}

std::vector<SimplexId> rank_by_score(std::span<const double> scores) {
    std::vector<SimplexId> order(scores.size());
    std::iota(order.begin(), order.end(), SimplexId{0});
    std::stable_sort(order.begin(), order.end(), [&](SimplexId a, SimplexId b) { return scores[a] > scores[b]; });
    return order;
}

std::vector<SimplexId> predict_rank(const OperatorSet& ops, const DenseMatrix& x,
                                    std::span<const ModelParams> ensemble) {
    return rank_by_score(predict_logits(ops, x, ensemble));
}

}  // namespace ismnet
