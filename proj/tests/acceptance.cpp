// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                      run every criterion
//   acceptance --criterion <name>   run one
//   acceptance --list               print the names

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ismnet/centrality.hpp"
#include "ismnet/complex.hpp"
#include "ismnet/diffusion.hpp"
#include "ismnet/evaluation.hpp"
#include "ismnet/hoh.hpp"
#include "ismnet/io.hpp"
#include "ismnet/model.hpp"
#include "ismnet/rng.hpp"
#include "pipeline.hpp"

using namespace ismnet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

fs::path desk_graph() { return fs::path(ISMNET_SOURCE_DIR) / "data" / "flare.edges"; }

std::vector<std::pair<NodeLabel, NodeLabel>> random_edges(NodeLabel n, double p, Rng& rng) {
    std::vector<std::pair<NodeLabel, NodeLabel>> e;
    for (NodeLabel i = 0; i < n; ++i)
        for (NodeLabel j = i + 1; j < n; ++j)
            if (uniform01(rng) < p) e.emplace_back(i, j);
    return e;
}

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------

Outcome hoh_spectra() {
    Rng rng(2024);
    std::size_t operators = 0;
    double worst_low = 0.0, worst_high = 0.0, worst_lmin = -1.0;
    bool symmetric = true;
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<NodeLabel>(10 + trial % 21);
        const int max_order = 1 + trial % 3;
        auto edges = random_edges(n, 0.3, rng);
        if (edges.empty()) edges.emplace_back(0, 1);
        const auto cx = clique_lift(from_edge_list(edges), max_order);
        for (int h = 0; h <= cx.max_order(); ++h)
            for (int f = 0; f <= cx.max_order(); ++f) {
                if (h == f || cx.count(h) == 0 || cx.count(f) == 0) continue;
                const auto op = hoh_adjacency(cx, h, f);
                symmetric = symmetric && op.adjacency == op.adjacency.transposed();
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(op.adjacency.to_dense()),
                                                                  Eigen::EigenvaluesOnly);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ls(to_eigen(hoh_laplacian(op).to_dense()),
                                                                  Eigen::EigenvaluesOnly);
                worst_low = std::min(worst_low, es.eigenvalues().minCoeff());
                worst_high = std::max(worst_high, es.eigenvalues().maxCoeff());
                worst_lmin = std::max(worst_lmin, ls.eigenvalues().minCoeff());
                ++operators;
            }
    }
    const bool ok = symmetric && worst_low >= -1e-8 && worst_high <= 1.0 + 1e-8 && worst_lmin <= 1e-8;
    return {ok, std::to_string(operators) + " operators, symmetric=" + (symmetric ? "yes" : "no") +
                    ", eigenvalues in [" + fmt(worst_low) + ", " + fmt(worst_high) +
                    "], largest min eig(L) " + fmt(worst_lmin)};
}

Outcome chebyshev_oracle() {
    Rng rng(7);
    double worst = 0.0;
    int cases = 0;
    auto check = [&](const Eigen::MatrixXd& a) {
        const auto n = static_cast<std::size_t>(a.rows());
        DenseMatrix ad(n, n), x(n, 3);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) ad(i, j) = a(i, j);
        for (auto& v : x.data()) v = uniform01(rng) - 0.5;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        const auto& lam = es.eigenvalues();
        for (int k = 0; k <= 6; ++k) {
            const auto z = chebyshev_apply(CsrMatrix::from_dense(ad), x, k);
            Eigen::VectorXd t0 = Eigen::VectorXd::Ones(lam.size()), t1 = lam, tk = t0;
            for (int d = 0; d <= k; ++d) {
                if (d == 0)
                    tk = t0;
                else if (d == 1)
                    tk = t1;
                else {
                    tk = 2.0 * lam.cwiseProduct(t1) - t0;
                    t0 = t1;
                    t1 = tk;
                }
                const Eigen::MatrixXd ref =
                    es.eigenvectors() * tk.asDiagonal() * es.eigenvectors().transpose() * to_eigen(x);
                worst = std::max(worst, (to_eigen(z[static_cast<std::size_t>(d)]) - ref).cwiseAbs().maxCoeff());
            }
        }
        ++cases;
    };
    // HoH adjacencies with at most 20 hubs.
    for (int trial = 0; trial < 30; ++trial) {
        const auto cx = clique_lift(from_edge_list(random_edges(12, 0.4, rng)), 2);
        for (int h = 0; h <= 2; ++h)
            for (int f = 0; f <= 2; ++f) {
                if (h == f || cx.count(h) == 0 || cx.count(h) > 20 || cx.count(f) == 0) continue;
                check(to_eigen(hoh_adjacency(cx, h, f).adjacency.to_dense()));
            }
    }
    // Dense symmetric matrices scaled into [-1, 1].
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = static_cast<Eigen::Index>(2 + trial % 19);
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = uniform01(rng) - 0.5;
        Eigen::MatrixXd s = m + m.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
        s /= es.eigenvalues().cwiseAbs().maxCoeff();
        check(s);
    }
    return {worst <= 1e-6, std::to_string(cases) + " matrices, K = 0..6, max |error| " + fmt(worst)};
}

Outcome threshold_reproduction() {
    struct Row {
        const char* name;
        double k, k2, beta_th;
    };
    const Row table[] = {{"Figeys", 5.75, 321.76, 0.02}, {"GrQC", 5.53, 93.25, 0.06}, {"Hep", 5.26, 65.89, 0.09},
                         {"NZC", 5.66, 590.96, 0.01},    {"Sex", 7.72, 252.64, 0.03}, {"Vidal", 4.07, 62.82, 0.07}};
    const char* env = std::getenv("ISMNET_DATA_DIR");
    const fs::path dir = env ? fs::path(env) : fs::path(ISMNET_SOURCE_DIR) / "data" / "table3";
    bool ok = true;
    std::string detail;
    auto near = [](double ours, double printed) { return std::abs(ours - printed) <= 0.005 + 1e-12; };
    for (const auto& row : table) {
        std::string file = row.name;
        std::transform(file.begin(), file.end(), file.begin(), [](unsigned char c) { return std::tolower(c); });
        const auto path = dir / (file + ".edges");
        if (!detail.empty()) detail += "; ";
        if (!fs::exists(path)) {
            ok = false;
            detail += std::string(row.name) + ": dataset not available (" + path.string() + ")";
            continue;
        }
        const NodeGraph g(from_edge_list(io::read_edge_list(path)));
        const auto m = degree_moments(g);
        const double th = epidemic_threshold(g, 1.0);
        const bool row_ok = near(m.mean, row.k) && near(m.mean_square, row.k2) && near(th, row.beta_th);
        ok = ok && row_ok;
        detail += std::string(row.name) + (row_ok ? " ok" : " MISMATCH") + " <k>=" + fmt(m.mean, 4) +
                  " <k^2>=" + fmt(m.mean_square, 5) + " beta_th=" + fmt(th, 3);
    }
    return {ok, detail};
}

Outcome sir_exactness() {
    const auto cx = from_edge_list(std::vector<std::pair<NodeLabel, NodeLabel>>{{0, 1}, {1, 2}});
    const ContagionGraph cg(cx);
    DiffusionParams p;
    p.beta = 0.5;
    p.gamma = 1.0;
    p.runs = 100000;
    p.seed = 11;
    const std::vector<NodeId> seed{1};
    const double mean = simplex_infection_ability(cg, seed, p);
    // Recovered count is 1 + Bin(2, 1/2): Var(r) = 2 (1/2)(1/2) / 9.
    const double se = std::sqrt(2.0 * 0.25 / 9.0 / p.runs);
    const double z = (mean - 2.0 / 3.0) / se;
    return {std::abs(z) <= 3.0, "mean r " + fmt(mean, 8) + " vs 2/3, z = " + fmt(z, 3)};
}

Outcome hsir_degeneration() {
    Rng pick(5);
    std::vector<SimplicialComplex> complexes{
        clique_lift(from_edge_list(io::read_edge_list(fs::path(ISMNET_SOURCE_DIR) / "data" / "lesmis.edges")), 2),
        clique_lift(from_edge_list(random_edges(40, 0.15, pick)), 2),
        clique_lift(from_edge_list(random_edges(25, 0.3, pick)), 3)};
    std::size_t runs = 0, identical = 0;
    for (std::size_t c = 0; c < complexes.size(); ++c) {
        const ContagionGraph cg(complexes[c]);
        const double th = epidemic_threshold(cg.graph(), 1.0);
        DiffusionParams sir;
        sir.beta = std::min(1.0, 1.5 * th);
        sir.gamma = 0.8;
        DiffusionParams hsir = sir;
        hsir.model = ContagionModel::hsir;
        hsir.higher_betas = {0.0};
        const int per_complex = c == 0 ? 3334 : 3333;
        for (int i = 0; i < per_complex; ++i) {
            const auto s = derive_seed(derive_seed(99, c), static_cast<std::uint64_t>(i));
            const std::vector<NodeId> seeds{static_cast<NodeId>(s % cg.size())};
            Rng a(s), b(s);
            const auto x = sir_run(cg.graph(), seeds, sir, a);
            const auto y = hsir_run(cg, seeds, hsir, b);
            identical += x.recovered_fraction == y.recovered_fraction && x.steps == y.steps && a() == b();
            ++runs;
        }
    }
    return {identical == runs, std::to_string(identical) + "/" + std::to_string(runs) +
                                   " paired runs bit-identical (r, steps, stream position)"};
}

Outcome kendall_oracle() {
    Rng rng(1234);
    int equal = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto m = 2 + uniform_index(rng, 199);
        const auto levels = 1 + uniform_index(rng, 30);
        std::vector<double> x(m), y(m);
        for (auto& v : x) v = static_cast<double>(uniform_index(rng, levels));
        for (auto& v : y) v = static_cast<double>(uniform_index(rng, levels));
        long long c = 0, d = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                const double s = (x[i] - x[j]) * (y[i] - y[j]);
                c += s > 0;
                d += s < 0;
            }
        const double brute = static_cast<double>(c - d) / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
        equal += kendall_tau(x, y) == brute;
    }
    return {equal == 1000, std::to_string(equal) + "/1000 lists exactly equal"};
}

Outcome gradient_check() {
    double worst = 0.0;
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(derive_seed(seed, "gradient-check"));
        std::vector<std::pair<NodeLabel, NodeLabel>> edges;
        do edges = random_edges(10, 0.5, rng);
        while (from_edge_list(edges).count(0) != 10);
        const auto cx = clique_lift(from_edge_list(edges), 2);
        OperatorCache cache(cx);
        const std::vector<int> fringes{1, 2};
        const auto ops = build_operators(cache, 0, fringes);
        ModelShape shape;
        shape.fringe_orders = fringes;
        shape.input_dim = 4;
        DenseMatrix x(10, 4);
        for (auto& v : x.data()) v = 2.0 * uniform01(rng) - 1.0;
        auto params = init_params(shape, seed);
        for (auto& v : params.values()) v = 0.8 * uniform01(rng) - 0.4;
        std::vector<double> truth(10);
        for (auto& v : truth) v = uniform01(rng);
        std::vector<SimplexId> ids(10);
        for (SimplexId i = 0; i < 10; ++i) ids[i] = i;
        const auto pairs = truth_pairs(InfluenceScores::all_observed(truth), ids);
        const auto g = gradients(ops, x, params, pairs);
        for (int k = 0; k < 20; ++k) {
            const auto idx = uniform_index(rng, params.size());
            const double eps = 1e-4;
            auto plus = params, minus = params;
            plus.values()[idx] += eps;
            minus.values()[idx] -= eps;
            const double fd = (ranking_loss(forward(ops, x, plus).values, pairs) -
                               ranking_loss(forward(ops, x, minus).values, pairs)) /
                              (2.0 * eps);
            const double an = g.gradient.values()[idx];
            worst = std::max(worst, std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-8}));
            ++checked;
        }
    }
    return {worst < 1e-4, std::to_string(checked) + " parameters, max relative error " + fmt(worst, 3)};
}

struct DeskReplicate {
    double ismnet = 0.0;
    std::map<std::string, double> baselines;
    pipeline::TrainedModel model;
    DenseMatrix x;
};

// One seeded replicate of the CLI pipeline: labels, split, training, test tau.
DeskReplicate desk_replicate(const SimplicialComplex& cx, int h, std::uint64_t seed) {
    const auto params = pipeline::diffusion_params(cx, 1.5, 0.0, 1.0, 1000, derive_seed(seed, "labels"));
    const auto labels = generate_labels(cx, h, params);
    DeskReplicate r;
    r.x = pipeline::hub_features(cx, h, pipeline::default_metrics()).values;
    TrainConfig tc;
    tc.seed = seed;
    r.model = pipeline::train_model(cx, h, 3, r.x, labels, tc);
    const auto& test = r.model.split.test;
    r.ismnet = pipeline::subset_tau(r.model.scores(r.x), labels.values, test);
    for (const auto& b : pipeline::baseline_names())
        r.baselines[b] = pipeline::subset_tau(pipeline::baseline_scores(cx, h, b), labels.values, test);
    return r;
}

Outcome desk_ranking() {
    const auto cx = pipeline::load_input(desk_graph(), pipeline::InputFormat::edges, 3);
    bool ok = true;
    std::string detail = desk_graph().filename().string() + ", F=3, beta=1.5 beta_th";
    for (int h : {0, 2}) {
        std::vector<double> ism;
        std::map<std::string, std::vector<double>> base;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto r = desk_replicate(cx, h, seed);
            ism.push_back(r.ismnet);
            for (const auto& [name, tau] : r.baselines) base[name].push_back(tau);
        }
        std::string best;
        double best_tau = -2.0;
        for (const auto& [name, taus] : base)
            if (median(taus) > best_tau) {
                best_tau = median(taus);
                best = name;
            }
        const double m = median(ism);
        ok = ok && m >= best_tau;
        detail += "; h=" + std::to_string(h) + ": ISMnet median " + fmt(m, 4) + " vs best baseline " + best + " " +
                  fmt(best_tau, 4);
    }
    return {ok, detail};
}

Outcome immunization_ordering() {
    const auto cx = pipeline::load_input(desk_graph(), pipeline::InputFormat::edges, 3);
    const auto r = desk_replicate(cx, 2, 0);
    const auto top = pipeline::top_fraction(r.model.scores(r.x), 0.05);
    const ContagionGraph cg(cx);
    const auto params = pipeline::diffusion_params(cx, 2.0, 0.0, 1.0, 100, derive_seed(0, "immunize"));
    const std::vector<double> grid{params.beta};
    const auto ism = immunize_and_spread(cg, pipeline::simplex_vertices(cx, 2, top), 0.05, grid, params)[0];
    const auto rnd = pipeline::random_immunization(cx, cg, 2, top.size(), 0.05, grid, params)[0];
    const double pooled = std::hypot(ism.std_error, rnd.std_error);
    return {ism.mean_recovered <= rnd.mean_recovered + pooled,
            std::to_string(top.size()) + " of " + std::to_string(cx.count(2)) + " 2-simplices immunized: ISMnet r " +
                fmt(ism.mean_recovered, 4) + " (SE " + fmt(ism.std_error, 2) + ") vs random r " +
                fmt(rnd.mean_recovered, 4) + " (SE " + fmt(rnd.std_error, 2) + ")"};
}

Outcome order_sweep() {
    const auto out = fs::temp_directory_path() / "ismnet_acceptance_sweep";
    fs::remove_all(out);
    const int status = cli::run_command(
        {"sweep-order", "--input", desk_graph().string(), "--orders", "1,2,3", "--out", out.string()});
    if (status != 0) return {false, "sweep-order exited with " + std::to_string(status)};
    std::ifstream in(out / "tau_vs_order.order.csv");
    std::string line;
    std::getline(in, line);
    if (line != "method,max_order,tau") return {false, "unexpected header '" + line + "'"};
    int rows = 0;
    bool finite = true;
    std::string detail;
    while (std::getline(in, line)) {
        const auto last = line.rfind(',');
        const double tau = std::stod(line.substr(last + 1));
        finite = finite && std::isfinite(tau);
        ++rows;
        detail += (detail.empty() ? "" : "; ") + line;
    }
    return {rows == 3 && finite, std::to_string(rows) + " rows: " + detail};
}

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {"hoh_spectra", 30, hoh_spectra},
        {"chebyshev_oracle", 5, chebyshev_oracle},
        {"threshold_reproduction", 6 * 60, threshold_reproduction},
        {"sir_exactness", 10, sir_exactness},
        {"hsir_degeneration", 30, hsir_degeneration},
        {"kendall_oracle", 10, kendall_oracle},
        {"gradient_check", 10, gradient_check},
        {"desk_ranking", 30 * 60, desk_ranking},
        {"immunization_ordering", 10 * 60, immunization_ordering},
        {"order_sweep", 45 * 60, order_sweep},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string only;
    bool list = false;
    app.add_option("--criterion", only, "Run a single criterion");
    app.add_flag("--list", list, "List criterion names");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& c : criteria()) std::cout << c.name << '\n';
        return 0;
    }
    int failures = 0, ran = 0;
    for (const auto& c : criteria()) {
        if (!only.empty() && c.name != only) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs >= c.budget_seconds) {
            o.pass = false;
            o.detail += " [over the " + fmt(c.budget_seconds) + " s budget]";
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " (" << fmt(secs, 3) << " s): " << o.detail
                  << std::endl;
    }
    if (ran == 0) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
