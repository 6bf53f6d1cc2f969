#include "ismnet/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ismnet/error.hpp"

namespace ismnet {

namespace {

constexpr std::uint8_t kS = 0;
constexpr std::uint8_t kI = 1;
constexpr std::uint8_t kR = 2;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

// Shared synchronous S->I->R loop. `tri` is null for plain SIR.
RunOutcome simulate(const NodeGraph& g, const ContagionGraph* tri, std::span<const NodeId> seeds,
                    std::span<const NodeId> immunized, double beta, double beta2, const DiffusionParams& params,
                    Rng& rng, const StepObserver& observer) {
    const std::size_t n = g.size();
    if (seeds.empty()) throw Error("contagion needs at least one seed");
    std::vector<std::uint8_t> state(n, kS);
    std::size_t recovered = 0;
    for (auto v : immunized) {
        if (v >= n) throw Error("immunized node out of range");
        if (state[v] != kR) ++recovered;
        state[v] = kR;
    }
    std::vector<NodeId> infected;
    for (auto v : seeds) {
        if (v >= n) throw Error("seed node out of range");
        if (state[v] == kR) throw Error("seed node " + std::to_string(v) + " is immunized");
        if (state[v] == kI) continue;
        state[v] = kI;
        infected.push_back(v);
    }
    std::sort(infected.begin(), infected.end());

    std::vector<std::uint32_t> m1(n, 0), m2(n, 0);
    std::vector<NodeId> touched, next;

    RunOutcome out;
    int step = 0;
    while (!infected.empty()) {
        if (step >= params.max_steps) {
            out.truncated = true;
            break;
        }
        ++step;
        touched.clear();
        for (auto u : infected) {
            for (auto v : g.neighbors(u)) {
                if (state[v] != kS) continue;
                if (m1[v] == 0) touched.push_back(v);
                ++m1[v];
            }
        }
        if (tri) {
            // Triangle {u,a,b}: counted from the smaller infected vertex only.
            for (auto u : infected) {
                for (auto [a, b] : tri->triangles(u)) {
                    if (state[a] == kI && state[b] == kS && u < a) ++m2[b];
                    if (state[b] == kI && state[a] == kS && u < b) ++m2[a];
                }
            }
        }
        std::sort(touched.begin(), touched.end());

        next.clear();
        for (auto v : touched) {
            double keep = 1.0;
            if (m1[v] > 0) keep *= std::pow(1.0 - beta, static_cast<double>(m1[v]));
            if (m2[v] > 0) keep *= std::pow(1.0 - beta2, static_cast<double>(m2[v]));
            m1[v] = 0;
            m2[v] = 0;
            const double p = 1.0 - keep;
            if (p <= 0.0) continue;
            if (p >= 1.0 || uniform01(rng) < p) next.push_back(v);
        }

        std::size_t kept = 0;
        for (auto u : infected) {
            const bool recovers = params.gamma >= 1.0 || (params.gamma > 0.0 && uniform01(rng) < params.gamma);
            if (recovers) {
                state[u] = kR;
                ++recovered;
            } else {
                infected[kept++] = u;
            }
        }
        infected.resize(kept);
        for (auto v : next) state[v] = kI;
        if (!next.empty()) {
            const auto mid = infected.size();
            infected.insert(infected.end(), next.begin(), next.end());
            std::inplace_merge(infected.begin(), infected.begin() + static_cast<std::ptrdiff_t>(mid), infected.end());
        }
        if (observer) observer(step, n - recovered - infected.size(), infected.size(), recovered);
    }
    out.steps = step;
    out.infected = infected.size();
    out.recovered = recovered;
    out.susceptible = n - recovered - infected.size();
    out.recovered_fraction = n ? static_cast<double>(recovered + infected.size()) / static_cast<double>(n) : 0.0;
    return out;
}

}  // namespace

void DiffusionParams::validate() const {
    if (!is_probability(beta)) throw ConfigError("beta must lie in [0, 1], got " + std::to_string(beta));
    if (!is_probability(gamma)) throw ConfigError("gamma must lie in [0, 1], got " + std::to_string(gamma));
    for (std::size_t i = 0; i < higher_betas.size(); ++i) {
        if (!is_probability(higher_betas[i]))
            throw ConfigError("beta_" + std::to_string(i + 2) + " must lie in [0, 1]");
        if (i > 0 && higher_betas[i] != 0.0)
            throw ConfigError("contagion through simplices of order > 2 is not supported (beta_" +
                              std::to_string(i + 2) + " given)");
    }
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
}

ContagionGraph::ContagionGraph(const SimplicialComplex& complex)
    : graph_(complex), triangles_(complex.node_count()) {
    if (!complex.has_layer(2)) return;
    const auto& tris = complex.layer(2);
    for (SimplexId t = 0; t < tris.size(); ++t) {
        auto s = tris[t];
        triangles_[s[0]].emplace_back(s[1], s[2]);
        triangles_[s[1]].emplace_back(s[0], s[2]);
        triangles_[s[2]].emplace_back(s[0], s[1]);
    }
    triangle_count_ = tris.size();
}

DegreeMoments degree_moments(const NodeGraph& g) {
    DegreeMoments m;
    if (g.size() == 0) return m;
    for (NodeId v = 0; v < g.size(); ++v) {
        const auto k = static_cast<double>(g.degree(v));
        m.mean += k;
        m.mean_square += k * k;
    }
    m.mean /= static_cast<double>(g.size());
    m.mean_square /= static_cast<double>(g.size());
    return m;
}

double epidemic_threshold(const NodeGraph& g, double gamma) {
    if (g.edge_count() == 0) throw Error("epidemic threshold needs at least one edge");
    const auto m = degree_moments(g);
    if (m.mean_square == m.mean) throw Error("threshold undefined: <k^2> equals <k>");
    return m.mean / (m.mean_square - m.mean) * gamma;
}

RunOutcome sir_run(const NodeGraph& g, std::span<const NodeId> seeds, const DiffusionParams& params, Rng& rng,
                   std::span<const NodeId> immunized, const StepObserver& observer) {
    params.validate();
    return simulate(g, nullptr, seeds, immunized, params.beta, 0.0, params, rng, observer);
}

RunOutcome hsir_run(const ContagionGraph& cg, std::span<const NodeId> seeds, const DiffusionParams& params, Rng& rng,
                    std::span<const NodeId> immunized, const StepObserver& observer) {
    params.validate();
    return simulate(cg.graph(), &cg, seeds, immunized, params.beta, params.beta2(), params, rng, observer);
}

std::uint64_t seed_set_key(std::span<const NodeId> seeds) {
    std::uint64_t h = mix64(seeds.size());
    for (auto v : seeds) h = mix64(h ^ v);
    return h;
}

namespace {

double one_run(const ContagionGraph& cg, std::span<const NodeId> seeds, const DiffusionParams& params, Rng& rng) {
    if (params.model == ContagionModel::hsir)
        return simulate(cg.graph(), &cg, seeds, {}, params.beta, params.beta2(), params, rng, {}).recovered_fraction;
    return simulate(cg.graph(), nullptr, seeds, {}, params.beta, 0.0, params, rng, {}).recovered_fraction;
}

std::vector<double> samples_serial(const ContagionGraph& cg, std::span<const NodeId> seeds,
                                   const DiffusionParams& params) {
    std::vector<double> out(static_cast<std::size_t>(params.runs));
    const auto key = seed_set_key(seeds);
    for (int i = 0; i < params.runs; ++i) {
        Rng rng(derive_seed(params.seed, key, static_cast<std::uint64_t>(i)));
        out[static_cast<std::size_t>(i)] = one_run(cg, seeds, params, rng);
    }
    return out;
}

}  // namespace

double kahan_sum(std::span<const double> values) {
    double sum = 0.0, c = 0.0;
    for (double v : values) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

std::vector<double> infection_samples(const ContagionGraph& cg, std::span<const NodeId> seeds,
                                      const DiffusionParams& params) {
    params.validate();
    std::vector<double> out(static_cast<std::size_t>(params.runs));
    const auto key = seed_set_key(seeds);
#pragma omp parallel for schedule(dynamic, 64)
    for (int i = 0; i < params.runs; ++i) {
        Rng rng(derive_seed(params.seed, key, static_cast<std::uint64_t>(i)));
        out[static_cast<std::size_t>(i)] = one_run(cg, seeds, params, rng);
    }
    return out;
}

double simplex_infection_ability(const ContagionGraph& cg, std::span<const NodeId> simplex,
                                 const DiffusionParams& params) {
    const auto s = infection_samples(cg, simplex, params);
    return kahan_sum(s) / static_cast<double>(s.size());
}

InfluenceScores generate_labels(const SimplicialComplex& complex, int h, const DiffusionParams& params) {
    params.validate();
    const auto& layer = complex.layer(h);
    if (layer.size() == 0) throw Error("layer " + std::to_string(h) + " is empty");
    if (params.model == ContagionModel::hsir && !complex.has_layer(2))
        throw Error("higher-order contagion needs a complex with a 2-simplex layer");
    const ContagionGraph cg(complex);
    std::vector<double> scores(layer.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(layer.size()); ++s) {
        const auto samples = samples_serial(cg, layer[static_cast<SimplexId>(s)], params);
        scores[static_cast<std::size_t>(s)] = kahan_sum(samples) / static_cast<double>(samples.size());
    }
    return InfluenceScores::all_observed(std::move(scores));
}

std::vector<SpreadPoint> immunize_and_spread(const ContagionGraph& cg,
                                             const std::vector<std::vector<NodeId>>& immunized_simplices,
                                             double seed_fraction, std::span<const double> beta_grid,
                                             const DiffusionParams& params) {
    params.validate();
    if (!(seed_fraction > 0.0 && seed_fraction < 1.0)) throw ConfigError("seed fraction must lie in (0, 1)");
    const std::size_t n = cg.size();
    std::vector<std::uint8_t> blocked(n, 0);
    std::vector<NodeId> immunized;
    for (const auto& s : immunized_simplices)
        for (auto v : s) {
            if (v >= n) throw Error("immunized node out of range");
            if (!blocked[v]) immunized.push_back(v);
            blocked[v] = 1;
        }
    std::sort(immunized.begin(), immunized.end());
    std::vector<NodeId> rest;
    for (NodeId v = 0; v < n; ++v)
        if (!blocked[v]) rest.push_back(v);
    if (rest.empty()) throw Error("immunized set covers every node");
    const auto seed_count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(seed_fraction * static_cast<double>(rest.size()))));

    const auto stream = derive_seed(params.seed, "immunize");
    std::vector<SpreadPoint> table;
    for (double beta : beta_grid) {
        DiffusionParams p = params;
        p.beta = beta;
        p.validate();
        std::vector<double> r(static_cast<std::size_t>(p.runs));
#pragma omp parallel for schedule(dynamic, 4)
        for (int i = 0; i < p.runs; ++i) {
            Rng rng(derive_seed(stream, static_cast<std::uint64_t>(i)));
            // Partial Fisher-Yates draws the seed set.
            std::vector<NodeId> pool = rest;
            for (std::size_t k = 0; k < seed_count; ++k) {
                const auto j = k + uniform_index(rng, pool.size() - k);
                std::swap(pool[k], pool[j]);
            }
            std::vector<NodeId> seeds(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(seed_count));
            std::sort(seeds.begin(), seeds.end());
            const bool higher = p.model == ContagionModel::hsir;
            r[static_cast<std::size_t>(i)] =
                simulate(cg.graph(), higher ? &cg : nullptr, seeds, immunized, p.beta, higher ? p.beta2() : 0.0, p,
                         rng, {})
                    .recovered_fraction;
        }
        const double mean = kahan_sum(r) / static_cast<double>(r.size());
        double ss = 0.0;
        for (double x : r) ss += (x - mean) * (x - mean);
        const double sd = r.size() > 1 ? std::sqrt(ss / static_cast<double>(r.size() - 1)) : 0.0;
        table.push_back({beta, mean, sd / std::sqrt(static_cast<double>(r.size()))});
    }
    return table;
}

}  // namespace ismnet
