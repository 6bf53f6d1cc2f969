#include "commands.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "ismnet/checkpoint.hpp"
#include "ismnet/io.hpp"
#include "ismnet/rng.hpp"
#include "json.hpp"
#include "pipeline.hpp"

#ifndef ISMNET_VERSION
#define ISMNET_VERSION "0.0.0"
#endif

namespace ismnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

MissingInputsError::MissingInputsError(std::vector<std::string> missing)
    : Error([&] {
          std::string msg = "missing report inputs:";
          for (const auto& m : missing) msg += "\n  " + m;
          return msg;
      }()),
      missing_(std::move(missing)) {}

namespace {

template <typename... Args>
void log(fmt::format_string<Args...> f, Args&&... args) {
    fmt::print(stderr, "[ismnet] {}\n", fmt::format(f, std::forward<Args>(args)...));
}

// --- configuration -----------------------------------------------------------

struct ExperimentConfig {
    std::string input;
    std::string format = "edges";
    std::string complex_dir;
    int hub_order = 0;
    int max_order = 3;
    std::size_t cap = kDefaultSimplexCap;
    std::vector<std::string> metrics{"degree", "neighbor_degree", "h_index", "coreness"};
    bool standardize = true;

    std::vector<double> beta_ratios{1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8, 3.0};
    std::vector<double> beta2_ratios{0.0};
    double gamma = 1.0;
    int runs = 1000;
    std::uint64_t seed = 0;
    int threads = 0;

    double learning_rate = 1e-2;
    int epochs = 500;
    std::size_t pairs_per_item = 20;
    std::vector<double> split_ratios{0.6, 0.2, 0.2};
    int patience = 0;
    int cheb_order = 3;
    std::size_t hidden = 16;
    std::size_t embed = 8;
    int ensemble = 1;

    int immunize_order = 2;
    double top_fraction = 0.05;
    double seed_fraction = 0.05;
    std::vector<double> lambda_grid = [] {
        std::vector<double> g;
        for (int i = 0; i <= 100; ++i) g.push_back(0.25 * i);
        return g;
    }();
    int repeats = 100;

    std::vector<int> orders{1, 2, 3};

    std::string out;
};

// Everything that changes results. Paths, output locations and the thread
// count are left out.
json config_json(const ExperimentConfig& c) {
    return {{"format", c.format},
            {"hub_order", c.hub_order},
            {"max_order", c.max_order},
            {"cap", c.cap},
            {"metrics", c.metrics},
            {"standardize", c.standardize},
            {"beta_ratio", c.beta_ratios},
            {"beta2_ratio", c.beta2_ratios},
            {"gamma", c.gamma},
            {"runs", c.runs},
            {"seed", c.seed},
            {"lr", c.learning_rate},
            {"epochs", c.epochs},
            {"pairs_per_item", c.pairs_per_item},
            {"split_ratios", c.split_ratios},
            {"patience", c.patience},
            {"cheb_order", c.cheb_order},
            {"hidden", c.hidden},
            {"embed", c.embed},
            {"ensemble", c.ensemble},
            {"immunize_order", c.immunize_order},
            {"top_fraction", c.top_fraction},
            {"seed_fraction", c.seed_fraction},
            {"lambda_grid", c.lambda_grid},
            {"repeats", c.repeats},
            {"orders", c.orders}};
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string hash_text(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return hex64(h);
}

void validate(const ExperimentConfig& c) {
    if (c.max_order < 1) throw ConfigError("--max-order must be at least 1");
    if (c.hub_order < 0) throw ConfigError("--hub-order must be non-negative");
    if (c.hub_order > c.max_order) throw ConfigError("--hub-order must not exceed --max-order");
    if (c.runs < 1) throw ConfigError("--runs must be at least 1");
    if (c.ensemble < 1) throw ConfigError("--ensemble must be at least 1");
    if (c.split_ratios.size() != 3) throw ConfigError("--split-ratios takes exactly three values");
    if (c.beta_ratios.empty()) throw ConfigError("--beta-ratio needs at least one value");
    if (c.beta2_ratios.empty()) throw ConfigError("--beta2-ratio needs at least one value");
    for (double r : c.beta_ratios)
        if (!(r >= 0.0)) throw ConfigError("--beta-ratio values must be non-negative");
    for (double r : c.beta2_ratios)
        if (!(r >= 0.0)) throw ConfigError("--beta2-ratio values must be non-negative");
    for (const auto& m : c.metrics) parse_node_metric(m);
}

TrainConfig train_config(const ExperimentConfig& c) {
    TrainConfig t;
    t.learning_rate = c.learning_rate;
    t.epochs = c.epochs;
    t.pairs_per_item = c.pairs_per_item;
    std::copy(c.split_ratios.begin(), c.split_ratios.end(), t.split.begin());
    t.patience = c.patience;
    t.seed = c.seed;
    t.cheb_order = c.cheb_order;
    t.hidden = c.hidden;
    t.embed = c.embed;
    t.validate();
    return t;
}

std::vector<NodeMetric> metrics(const ExperimentConfig& c) {
    std::vector<NodeMetric> out;
    for (const auto& m : c.metrics) out.push_back(parse_node_metric(m));
    return out;
}

// --- files -------------------------------------------------------------------

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error("bad JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

fs::path sidecar(const fs::path& file) { return fs::path(file.string() + ".meta.json"); }

std::optional<json> read_sidecar(const fs::path& file) {
    const auto p = sidecar(file);
    if (!fs::exists(p)) return std::nullopt;
    return read_json(p);
}

void prepare_file(const fs::path& file) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

// Score file of unknown length: sized by its largest id.
InfluenceScores read_scores(const fs::path& path, std::size_t min_size = 0) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    std::size_t n = min_size;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        try {
            n = std::max<std::size_t>(n, std::stoull(line.substr(0, comma)) + 1);
        } catch (const std::exception&) {
            // reported by read_scores_csv below
        }
    }
    return io::read_scores_csv(path, n);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string fmt_num(double v) { return io::format_double(v); }

// --- run context -------------------------------------------------------------

struct Run {
    const ExperimentConfig& cfg;
    std::string subcommand;
    json config;
    std::string config_hash;
    bool force = false;
    fs::path manifest_path;
    json details = json::object();

    json manifest(const std::string& status, const std::string& message = {}) const {
        json m;
        m["tool"] = "ismnet";
        m["version"] = ISMNET_VERSION;
        m["subcommand"] = subcommand;
        m["status"] = status;
        if (!message.empty()) m["error"] = message;
        m["config_hash"] = config_hash;
        m["config"] = config;
        m["seeds"] = {{"root", cfg.seed},
                      {"labels", derive_seed(cfg.seed, "labels")},
                      {"train", derive_seed(cfg.seed, "train")},
                      {"split", derive_seed(cfg.seed, "split")},
                      {"immunize", derive_seed(cfg.seed, "immunize")}};
        for (auto it = details.begin(); it != details.end(); ++it) m[it.key()] = it.value();
        return m;
    }

    // Sidecar for a data file produced by this run.
    void write_sidecar(const fs::path& file, const json& extra) const {
        json m = manifest("ok");
        for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
        write_json(sidecar(file), m);
    }

    void check_hash(const std::optional<json>& meta, const fs::path& what) const {
        const std::string theirs = meta ? meta->value("config_hash", std::string{}) : std::string{};
        if (theirs == config_hash) return;
        const std::string msg = what.string() + " was produced under config hash '" + theirs +
                                "', this run uses '" + config_hash + "'";
        if (!force) throw Error(msg + " (use --force to override)");
        log("warning: {}", msg);
    }
};

SimplicialComplex obtain_complex(const ExperimentConfig& cfg) {
    if (!cfg.complex_dir.empty()) {
        log("loading complex from {}", cfg.complex_dir);
        return io::load_complex(cfg.complex_dir);
    }
    if (cfg.input.empty()) throw ConfigError("either --input or --complex is required");
    log("reading {} ({})", cfg.input, cfg.format);
    auto cx = pipeline::load_input(cfg.input, pipeline::parse_format(cfg.format), cfg.max_order, cfg.cap);
    std::string counts;
    for (int h = 0; h <= cx.max_order(); ++h) counts += fmt::format(" n_{}={}", h, cx.count(h));
    log("complex:{}", counts);
    return cx;
}

void require_order(const SimplicialComplex& cx, int h) {
    if (!cx.has_layer(h) || cx.count(h) == 0)
        throw ConfigError("the complex has no simplices of order " + std::to_string(h));
}

DenseMatrix obtain_features(const ExperimentConfig& cfg, const SimplicialComplex& cx, int h,
                            const std::string& features_path) {
    if (!features_path.empty()) {
        auto x = io::read_features_csv(features_path);
        if (x.rows() != cx.count(h))
            throw DimensionError("feature file has " + std::to_string(x.rows()) + " rows, layer " +
                                 std::to_string(h) + " has " + std::to_string(cx.count(h)));
        return x;
    }
    return pipeline::hub_features(cx, h, metrics(cfg), cfg.standardize).values;
}

std::string dataset_hash(const SimplicialComplex& cx) { return hex64(cx.content_hash()); }

void check_dataset(const std::optional<json>& meta, const SimplicialComplex& cx, const fs::path& what, bool force) {
    if (!meta || !meta->contains("dataset_hash")) return;
    const auto theirs = meta->at("dataset_hash").get<std::string>();
    if (theirs == dataset_hash(cx)) return;
    const std::string msg = what.string() + " was computed on a different complex";
    if (!force) throw Error(msg + " (use --force to override)");
    log("warning: {}", msg);
}

std::string label_file_name(int h, double beta_ratio, double beta2_ratio) {
    return fmt::format("labels_h{}_b{}_bb{}.csv", h, fmt_num(beta_ratio), fmt_num(beta2_ratio));
}

// --- subcommands ---------------------------------------------------------------

struct Paths {
    std::string complex_out;
    std::string features;
    std::string labels;
    std::string checkpoint;
    std::string pred;
    std::string truth;
    std::string split;
    std::string subset = "all";
    std::string method;
    std::vector<std::string> methods;
    std::string scores;
    std::string ranked;
    std::string results;
    bool partial = false;
};

fs::path require_out(const ExperimentConfig& cfg) {
    if (cfg.out.empty()) throw ConfigError("--out is required");
    return cfg.out;
}

void cmd_lift(Run& run, const Paths&) {
    const auto out = require_out(run.cfg);
    if (run.cfg.input.empty()) throw ConfigError("lift needs --input");
    ExperimentConfig c = run.cfg;
    c.complex_dir.clear();
    const auto cx = obtain_complex(c);
    io::save_complex(cx, out);
    run.details["dataset_hash"] = dataset_hash(cx);
    for (int h = 0; h <= cx.max_order(); ++h) run.details["n_" + std::to_string(h)] = cx.count(h);
    log("wrote complex to {}", out.string());
}

void cmd_features(Run& run, const Paths&) {
    const auto out = require_out(run.cfg);
    const auto cx = obtain_complex(run.cfg);
    const int h = run.cfg.hub_order;
    require_order(cx, h);
    const auto x = pipeline::hub_features(cx, h, metrics(run.cfg), run.cfg.standardize);
    prepare_file(out);
    io::write_features_csv(out, x.names, x.values);
    run.details["dataset_hash"] = dataset_hash(cx);
    run.details["hub_order"] = h;
    log("wrote {} x {} features to {}", x.values.rows(), x.values.cols(), out.string());
}

void cmd_label(Run& run, const Paths&) {
    const auto out = require_out(run.cfg);
    const auto cx = obtain_complex(run.cfg);
    const int h = run.cfg.hub_order;
    require_order(cx, h);
    const double beta_th = pipeline::threshold(cx, run.cfg.gamma);
    log("beta_th = {}", beta_th);
    fs::create_directories(out);
    json files = json::array();
    for (double br : run.cfg.beta_ratios) {
        for (double b2r : run.cfg.beta2_ratios) {
            const auto params = pipeline::diffusion_params(cx, br, b2r, run.cfg.gamma, run.cfg.runs,
                                                           derive_seed(run.cfg.seed, "labels"));
            log("labelling {} {}-simplices at beta={} beta2={} ({} runs each)", cx.count(h), h, params.beta,
                params.beta2(), params.runs);
            const auto labels = generate_labels(cx, h, params);
            const auto file = out / label_file_name(h, br, b2r);
            io::write_scores_csv(file, labels);
            run.write_sidecar(file, {{"kind", "labels"},
                                     {"hub_order", h},
                                     {"beta_ratio", br},
                                     {"beta2_ratio", b2r},
                                     {"beta", params.beta},
                                     {"beta2", params.beta2()},
                                     {"beta_th", beta_th},
                                     {"gamma", params.gamma},
                                     {"runs", params.runs},
                                     {"seed", params.seed},
                                     {"count", labels.size()},
                                     {"dataset_hash", dataset_hash(cx)}});
            files.push_back(file.filename().string());
        }
    }
    run.details["files"] = files;
    run.details["dataset_hash"] = dataset_hash(cx);
}

void cmd_train(Run& run, const Paths& paths) {
    const auto out = require_out(run.cfg);
    if (paths.labels.empty()) throw ConfigError("train needs --labels");
    const auto cx = obtain_complex(run.cfg);
    const int h = run.cfg.hub_order;
    require_order(cx, h);
    const auto meta = read_sidecar(paths.labels);
    run.check_hash(meta, paths.labels);
    check_dataset(meta, cx, paths.labels, run.force);
    auto labels = io::read_scores_csv(paths.labels, cx.count(h));
    const auto x = obtain_features(run.cfg, cx, h, paths.features);
    const auto tc = train_config(run.cfg);
    const int max_order = std::min(run.cfg.max_order, cx.max_order());
    log("training {} model(s) on {} labelled {}-simplices", run.cfg.ensemble, labels.observed_ids().size(), h);
    const auto model = pipeline::train_model(cx, h, max_order, x, labels, tc, run.cfg.ensemble);

    Checkpoint ckpt;
    ckpt.shape = model.shape;
    ckpt.config = tc;
    ckpt.config.split_seed = derive_seed(run.cfg.seed, "split");
    ckpt.config_hash = run.config_hash;
    for (const auto& m : model.members) {
        ckpt.members.push_back(m.params);
        ckpt.best_epochs.push_back(m.best_epoch);
        ckpt.val_taus.push_back(m.best_val_tau);
        log("member {}: best epoch {}, validation tau {}", ckpt.members.size() - 1, m.best_epoch, m.best_val_tau);
    }
    save_checkpoint(out, ckpt);

    std::ofstream logf(out / "log.csv");
    logf << "member,epoch,loss,train_tau,val_tau\n";
    for (std::size_t m = 0; m < model.members.size(); ++m)
        for (const auto& e : model.members[m].log)
            logf << m << ',' << e.epoch << ',' << fmt_num(e.loss) << ',' << fmt_num(e.train_tau) << ','
                 << fmt_num(e.val_tau) << '\n';
    write_json(out / "split.json",
               {{"train", model.split.train}, {"val", model.split.val}, {"test", model.split.test}});
    run.details["dataset_hash"] = dataset_hash(cx);
    run.details["hub_order"] = h;
    run.details["fringe_orders"] = model.shape.fringe_orders;
    run.details["labels"] = paths.labels;
}

void cmd_rank(Run& run, const Paths& paths) {
    const auto out = require_out(run.cfg);
    if (paths.checkpoint.empty()) throw ConfigError("rank needs --checkpoint");
    const auto ckpt = load_checkpoint(paths.checkpoint);
    if (ckpt.config_hash != run.config_hash) {
        const std::string msg = "checkpoint was trained under config hash '" + ckpt.config_hash + "'";
        if (!run.force) throw Error(msg + " (use --force to override)");
        log("warning: {}", msg);
    }
    const auto cx = obtain_complex(run.cfg);
    const int h = ckpt.shape.hub_order;
    require_order(cx, h);
    const auto x = obtain_features(run.cfg, cx, h, paths.features);
    OperatorCache cache(cx);
    const auto ops = build_operators(cache, h, ckpt.shape.fringe_orders);
    const auto scores = predict_logits(ops, x, ckpt.members);
    prepare_file(out);
    io::write_scores_csv(out, InfluenceScores::all_observed(scores));
    run.details["kind"] = "prediction";
    run.details["method"] = paths.method.empty() ? "ISMnet" : paths.method;
    run.details["hub_order"] = h;
    run.details["dataset_hash"] = dataset_hash(cx);
    if (!paths.ranked.empty()) {
        prepare_file(paths.ranked);
        std::ofstream r(paths.ranked);
        if (!r) throw Error("cannot write " + paths.ranked);
        r << "rank,simplex_id,score\n";
        const auto order = rank_by_score(scores);
        for (std::size_t i = 0; i < order.size(); ++i)
            r << i + 1 << ',' << order[i] << ',' << fmt_num(scores[order[i]]) << '\n';
    }
    log("wrote {} scores to {}", scores.size(), out.string());
}

std::vector<SimplexId> subset_ids(const Paths& paths) {
    if (paths.subset == "all") return {};
    if (paths.split.empty()) throw ConfigError("--subset " + paths.subset + " needs --split");
    const auto j = read_json(paths.split);
    if (!j.contains(paths.subset)) throw ConfigError("split file has no '" + paths.subset + "' part");
    return j.at(paths.subset).get<std::vector<SimplexId>>();
}

void cmd_evaluate(Run& run, const Paths& paths) {
    if (paths.pred.empty() || paths.truth.empty()) throw ConfigError("evaluate needs --pred and --truth");
    const auto pred_meta = read_sidecar(paths.pred);
    const auto truth_meta = read_sidecar(paths.truth);
    const std::string pred_hash = pred_meta ? pred_meta->value("config_hash", std::string{}) : std::string{};
    const std::string truth_hash = truth_meta ? truth_meta->value("config_hash", std::string{}) : std::string{};
    if (pred_hash != truth_hash) {
        const std::string msg = "config hash mismatch: prediction '" + pred_hash + "', truth '" + truth_hash + "'";
        if (!run.force) throw Error(msg + " (use --force to override)");
        log("warning: {}", msg);
    }
    const auto pred = read_scores(paths.pred);
    const auto truth = read_scores(paths.truth, pred.size());
    std::vector<SimplexId> ids = subset_ids(paths);
    if (paths.subset == "all")
        for (SimplexId i = 0; i < truth.size(); ++i) ids.push_back(i);
    std::vector<double> a, b;
    for (auto i : ids) {
        if (i >= truth.size() || i >= pred.size()) throw Error("simplex id " + std::to_string(i) + " out of range");
        if (!truth.is_observed(i) || !pred.is_observed(i)) continue;
        a.push_back(pred.values[i]);
        b.push_back(truth.values[i]);
    }
    if (a.size() < 2) throw Error("fewer than two simplices are scored in both files");
    const double tau = kendall_tau(a, b);
    std::string shown = fmt_num(tau);
    if (shown.find_first_of(".en") == std::string::npos) shown += ".0";
    fmt::print("tau={}\n", shown);
    std::fflush(stdout);

    const std::string method = !paths.method.empty() ? paths.method
                               : pred_meta         ? pred_meta->value("method", std::string("unknown"))
                                                   : std::string("unknown");
    const double br = truth_meta ? truth_meta->value("beta_ratio", 0.0) : 0.0;
    const double b2r = truth_meta ? truth_meta->value("beta2_ratio", 0.0) : 0.0;
    run.details["tau"] = tau;
    run.details["pairs_of"] = a.size();
    run.details["method"] = method;
    run.details["subset"] = paths.subset;
    if (!run.cfg.out.empty()) {
        const fs::path out = run.cfg.out;
        prepare_file(out);
        const bool fresh = !fs::exists(out) || fs::file_size(out) == 0;
        std::ofstream f(out, std::ios::app);
        if (!f) throw Error("cannot write " + out.string());
        if (fresh) f << "method,beta_ratio,beta2_ratio,tau\n";
        f << method << ',' << fmt_num(br) << ',' << fmt_num(b2r) << ',' << fmt_num(tau) << '\n';
    }
}

std::vector<double> beta_grid(const ExperimentConfig& cfg, double beta_th, std::vector<double>& lambdas) {
    // lambda * beta_th, clipped at 1: points past the clip collapse onto one beta = 1 point.
    std::vector<double> betas;
    lambdas.clear();
    bool clipped = false;
    for (double l : cfg.lambda_grid) {
        if (!(l >= 0.0)) throw ConfigError("--lambda-grid values must be non-negative");
        const double b = l * beta_th;
        if (b <= 1.0) {
            betas.push_back(b);
            lambdas.push_back(l);
        } else if (!clipped) {
            clipped = true;
            betas.push_back(1.0);
            lambdas.push_back(1.0 / beta_th);
        }
    }
    return betas;
}

void cmd_immunize(Run& run, const Paths& paths) {
    const auto out = require_out(run.cfg);
    const auto cx = obtain_complex(run.cfg);
    const int q = run.cfg.immunize_order;
    require_order(cx, q);
    const ContagionGraph cg(cx);
    const double beta_th = pipeline::threshold(cx, run.cfg.gamma);
    std::vector<double> lambdas;
    const auto betas = beta_grid(run.cfg, beta_th, lambdas);
    DiffusionParams params;
    params.gamma = run.cfg.gamma;
    params.runs = run.cfg.repeats;
    params.seed = derive_seed(run.cfg.seed, "immunize");
    params.validate();

    std::string method;
    std::vector<SpreadPoint> table;
    if (!paths.scores.empty()) {
        const auto meta = read_sidecar(paths.scores);
        run.check_hash(meta, paths.scores);
        const auto s = io::read_scores_csv(paths.scores, cx.count(q));
        if (s.observed_ids().size() != s.size()) throw Error("--scores must score every " + std::to_string(q) + "-simplex");
        method = !paths.method.empty() ? paths.method : meta ? meta->value("method", std::string("ISMnet")) : "ISMnet";
        const auto top = pipeline::top_fraction(s.values, run.cfg.top_fraction);
        table = immunize_and_spread(cg, pipeline::simplex_vertices(cx, q, top), run.cfg.seed_fraction, betas, params);
    } else if (paths.method == "random") {
        method = "random";
        const auto count = pipeline::top_fraction(std::vector<double>(cx.count(q), 0.0), run.cfg.top_fraction).size();
        table = pipeline::random_immunization(cx, cg, q, count, run.cfg.seed_fraction, betas, params);
    } else if (!paths.method.empty()) {
        method = paths.method;
        const auto s = pipeline::baseline_scores(cx, q, method);
        const auto top = pipeline::top_fraction(s, run.cfg.top_fraction);
        table = immunize_and_spread(cg, pipeline::simplex_vertices(cx, q, top), run.cfg.seed_fraction, betas, params);
    } else {
        throw ConfigError("immunize needs --scores or --method");
    }
    prepare_file(out);
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out.string());
    f << "method,lambda,beta,mean_r,std_error\n";
    for (std::size_t i = 0; i < table.size(); ++i)
        f << method << ',' << fmt_num(lambdas[i]) << ',' << fmt_num(table[i].beta) << ','
          << fmt_num(table[i].mean_recovered) << ',' << fmt_num(table[i].std_error) << '\n';
    run.details["method"] = method;
    run.details["beta_th"] = beta_th;
    run.details["dataset_hash"] = dataset_hash(cx);
    log("wrote {} grid points to {}", table.size(), out.string());
}

void cmd_baseline(Run& run, const Paths& paths) {
    const auto out = require_out(run.cfg);
    const auto cx = obtain_complex(run.cfg);
    const int h = run.cfg.hub_order;
    require_order(cx, h);
    const auto methods = paths.methods.empty() ? pipeline::baseline_names() : paths.methods;
    fs::create_directories(out);
    for (const auto& m : methods) {
        const auto s = pipeline::baseline_scores(cx, h, m);
        const auto file = out / (m + ".csv");
        io::write_scores_csv(file, InfluenceScores::all_observed(s));
        run.write_sidecar(file, {{"kind", "prediction"}, {"method", m}, {"hub_order", h},
                                 {"dataset_hash", dataset_hash(cx)}});
        log("wrote {} scores to {}", m, file.string());
    }
    run.details["methods"] = methods;
}

SimplicialComplex truncate(const SimplicialComplex& cx, int max_order) {
    std::vector<SimplexLayer> layers;
    for (int h = 0; h <= std::min(max_order, cx.max_order()); ++h) layers.push_back(cx.layer(h));
    return SimplicialComplex(std::vector<NodeLabel>(cx.labels().begin(), cx.labels().end()), std::move(layers));
}

void cmd_sweep_order(Run& run, const Paths&) {
    const auto out = require_out(run.cfg);
    if (run.cfg.orders.empty()) throw ConfigError("--orders needs at least one value");
    const int h = run.cfg.hub_order;
    int top = 0;
    for (int f : run.cfg.orders) {
        if (f < 1) throw ConfigError("--orders values must be at least 1");
        if (f < h) throw ConfigError("--orders value " + std::to_string(f) + " is below the hub order");
        top = std::max(top, f);
    }
    const double br = run.cfg.beta_ratios.front();
    const double b2r = run.cfg.beta2_ratios.front();
    ExperimentConfig c = run.cfg;
    c.max_order = std::max(top, b2r > 0.0 ? 2 : 1);
    const auto full = obtain_complex(c);
    require_order(full, h);
    const auto params = pipeline::diffusion_params(full, br, b2r, run.cfg.gamma, run.cfg.runs,
                                                   derive_seed(run.cfg.seed, "labels"));
    log("labelling {} {}-simplices at beta={} beta2={}", full.count(h), h, params.beta, params.beta2());
    const auto labels = generate_labels(full, h, params);
    fs::create_directories(out);
    const auto label_file = out / label_file_name(h, br, b2r);
    io::write_scores_csv(label_file, labels);
    run.write_sidecar(label_file, {{"kind", "labels"}, {"hub_order", h}, {"beta_ratio", br}, {"beta2_ratio", b2r},
                                   {"beta", params.beta}, {"beta2", params.beta2()}, {"gamma", params.gamma},
                                   {"runs", params.runs}, {"seed", params.seed}, {"dataset_hash", dataset_hash(full)}});

    const auto tc = train_config(run.cfg);
    const auto table = out / "tau_vs_order.order.csv";
    std::ofstream f(table);
    if (!f) throw Error("cannot write " + table.string());
    f << "method,max_order,tau\n";
    for (int order : run.cfg.orders) {
        const auto cx = truncate(full, order);
        const auto x = pipeline::hub_features(cx, h, metrics(run.cfg), run.cfg.standardize).values;
        const auto model = pipeline::train_model(cx, h, order, x, labels, tc, run.cfg.ensemble);
        if (model.split.test.size() < 2)
            throw Error("test split holds " + std::to_string(model.split.test.size()) +
                        " simplices; sweep-order needs at least two");
        const auto scores = model.scores(x);
        const double tau = pipeline::subset_tau(scores, labels.values, model.split.test);
        log("max order {}: test tau {}", order, tau);
        f << "ISMnet," << order << ',' << fmt_num(tau) << '\n';
    }
    run.details["dataset_hash"] = dataset_hash(full);
}

void cmd_report(Run& run, const Paths& paths) {
    const auto out = require_out(run.cfg);
    if (paths.results.empty()) throw ConfigError("report needs --results");
    const auto written = emit_report(paths.results, out, paths.partial);
    json files = json::array();
    for (const auto& p : written) files.push_back(p.filename().string());
    run.details["files"] = files;
}

// Directory outputs carry run.json; file outputs a .meta.json sidecar.
fs::path manifest_location(const std::string& subcommand, const std::string& out) {
    static const std::set<std::string> dir_outputs{"lift", "label", "train", "baseline", "sweep-order", "report"};
    if (out.empty()) return fs::path(subcommand + ".run.json");
    if (dir_outputs.count(subcommand)) return fs::path(out) / "run.json";
    return sidecar(out);
}

// --- option wiring -------------------------------------------------------------

void add_experiment_options(CLI::App& app, ExperimentConfig& c) {
    app.add_option("--input", c.input, "Edge list or simplex list file");
    app.add_option("--format", c.format, "Input format")->check(CLI::IsMember({"edges", "simplices"}));
    app.add_option("--complex", c.complex_dir, "Complex directory written by lift (instead of --input)");
    app.add_option("--hub-order", c.hub_order, "Order h of the ranked simplices");
    app.add_option("--max-order", c.max_order, "Largest simplex order F");
    app.add_option("--cap", c.cap, "Per-layer simplex cap");
    app.add_option("--metrics", c.metrics, "Node metrics used as input features")->delimiter(',');
    app.add_option("--standardize", c.standardize, "Z-score feature columns");
    app.add_option("--beta-ratio", c.beta_ratios, "beta / beta_th grid")->delimiter(',');
    app.add_option("--beta2-ratio", c.beta2_ratios, "beta2 / beta grid (0 selects SIR)")->delimiter(',');
    app.add_option("--gamma", c.gamma, "Recovery probability per step");
    app.add_option("--runs", c.runs, "Simulations per label");
    app.add_option("--seed", c.seed, "Root seed");
    app.add_option("--threads", c.threads, "Worker thread cap (0 = all)");
    app.add_option("--lr", c.learning_rate, "Learning rate");
    app.add_option("--epochs", c.epochs, "Training epochs");
    app.add_option("--pairs-per-item", c.pairs_per_item, "Pairs sampled per training simplex and epoch");
    app.add_option("--split-ratios", c.split_ratios, "Train, validation, test fractions")->delimiter(',');
    app.add_option("--patience", c.patience, "Early-stop patience in epochs (0 = off)");
    app.add_option("--cheb-order", c.cheb_order, "Chebyshev order K");
    app.add_option("--hidden", c.hidden, "MLP hidden width");
    app.add_option("--embed", c.embed, "Embedding width per fringe");
    app.add_option("--ensemble", c.ensemble, "Models averaged when ranking");
    app.add_option("--immunize-order", c.immunize_order, "Order of the immunized simplices");
    app.add_option("--top-fraction", c.top_fraction, "Fraction of simplices immunized");
    app.add_option("--seed-fraction", c.seed_fraction, "Fraction of remaining nodes seeded");
    app.add_option("--lambda-grid", c.lambda_grid, "beta / beta_th values for immunization")->delimiter(',');
    app.add_option("--repeats", c.repeats, "Simulations per immunization grid point");
    app.add_option("--orders", c.orders, "Maximum orders for sweep-order")->delimiter(',');
    app.add_option("--out", c.out, "Output file or directory");
}

}  // namespace

// --- report ----------------------------------------------------------------------

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error(p.string() + " is empty");
    t.header = split_csv(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = split_csv(line);
        if (row.size() != t.header.size()) throw Error(p.string() + ": row has " + std::to_string(row.size()) + " fields");
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<fs::path> find_files(const fs::path& dir, const std::string& suffix) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& want, const fs::path& p) {
    if (t.header != want) throw Error(p.string() + ": unexpected header");
}

double to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error("bad number '" + s + "' in results");
}

// Mean tau per key, keys kept in sorted order.
using TauKey = std::vector<std::string>;
struct TauAgg {
    double sum = 0.0;
    int n = 0;
};

void write_tau_table(const fs::path& path, const std::string& header, const std::map<TauKey, TauAgg>& agg) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << header << '\n';
    for (const auto& [key, a] : agg) {
        for (const auto& k : key) f << k << ',';
        f << fmt_num(a.sum / a.n) << ',' << a.n << '\n';
    }
}

}  // namespace

std::vector<fs::path> emit_report(const fs::path& results, const fs::path& out, bool allow_missing) {
    const std::vector<std::string> eval_header{"method", "beta_ratio", "beta2_ratio", "tau"};
    const std::vector<std::string> imm_header{"method", "lambda", "beta", "mean_r", "std_error"};
    const std::vector<std::string> order_header{"method", "max_order", "tau"};

    std::map<TauKey, TauAgg> by_beta, heat, by_order;
    std::vector<std::vector<std::string>> immunization;
    for (const auto& p : find_files(results, ".eval.csv")) {
        const auto t = read_csv(p);
        expect_header(t, eval_header, p);
        for (const auto& r : t.rows) {
            const double tau = to_double(r[3]);
            const double b2 = to_double(r[2]);
            to_double(r[1]);
            auto& a = b2 == 0.0 ? by_beta[{r[0], r[1]}] : heat[{r[0], r[1], r[2]}];
            a.sum += tau;
            ++a.n;
        }
    }
    for (const auto& p : find_files(results, ".immunize.csv")) {
        const auto t = read_csv(p);
        expect_header(t, imm_header, p);
        for (const auto& r : t.rows) immunization.push_back(r);
    }
    for (const auto& p : find_files(results, ".order.csv")) {
        const auto t = read_csv(p);
        expect_header(t, order_header, p);
        for (const auto& r : t.rows) {
            auto& a = by_order[{r[0], r[1]}];
            a.sum += to_double(r[2]);
            ++a.n;
        }
    }

    std::vector<std::string> missing;
    if (by_beta.empty()) missing.push_back("tau_vs_beta (*.eval.csv rows with beta2_ratio = 0)");
    if (heat.empty()) missing.push_back("tau_heatmap (*.eval.csv rows with beta2_ratio > 0)");
    if (immunization.empty()) missing.push_back("immunization (*.immunize.csv)");
    if (by_order.empty()) missing.push_back("tau_vs_order (*.order.csv)");
    if (!missing.empty() && !allow_missing) throw MissingInputsError(missing);

    fs::create_directories(out);
    std::vector<fs::path> written;
    if (!by_beta.empty()) {
        written.push_back(out / "tau_vs_beta.csv");
        write_tau_table(written.back(), "method,beta_ratio,tau,n", by_beta);
    }
    if (!heat.empty()) {
        written.push_back(out / "tau_heatmap.csv");
        write_tau_table(written.back(), "method,beta_ratio,beta2_ratio,tau,n", heat);
    }
    if (!immunization.empty()) {
        std::stable_sort(immunization.begin(), immunization.end(), [](const auto& a, const auto& b) {
            return a[0] != b[0] ? a[0] < b[0] : to_double(a[1]) < to_double(b[1]);
        });
        written.push_back(out / "immunization.csv");
        std::ofstream f(written.back());
        if (!f) throw Error("cannot write " + written.back().string());
        f << "method,lambda,beta,mean_r,std_error\n";
        for (const auto& r : immunization) f << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << ',' << r[4] << '\n';
    }
    if (!by_order.empty()) {
        written.push_back(out / "tau_vs_order.csv");
        write_tau_table(written.back(), "method,max_order,tau,n", by_order);
    }
    return written;
}

// --- entry point -------------------------------------------------------------------

int run_command(const std::vector<std::string>& args) {
    ExperimentConfig cfg;
    Paths paths;
    bool force = false;

    CLI::App app{"Rank influential simplices in simplicial complexes", "ismnet"};
    app.set_version_flag("--version", ISMNET_VERSION);
    app.set_config("--config", "", "TOML file supplying option values");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    add_experiment_options(app, cfg);
    app.add_flag("--force", force, "Accept artifacts whose config hash differs");

    using Handler = std::function<void(Run&, const Paths&)>;
    std::vector<std::pair<CLI::App*, Handler>> commands;
    auto add = [&](const std::string& name, const std::string& about, Handler fn) {
        auto* sub = app.add_subcommand(name, about);
        sub->fallthrough();
        commands.emplace_back(sub, std::move(fn));
        return sub;
    };

    add("lift", "Build the clique complex of an edge list (or a simplex list) and save it", cmd_lift);
    add("features", "Write standardized centrality features for the hub layer", cmd_features);
    add("label", "Simulate SIR/HSIR infection ability labels over the beta grid", cmd_label);
    auto* train_cmd = add("train", "Train a model on a label file and write a checkpoint", cmd_train);
    train_cmd->add_option("--labels", paths.labels, "Label file written by label")->required();
    train_cmd->add_option("--features", paths.features, "Feature file (default: computed)");
    auto* rank_cmd = add("rank", "Score and rank hub simplices with a checkpoint", cmd_rank);
    rank_cmd->add_option("--checkpoint", paths.checkpoint, "Checkpoint directory")->required();
    rank_cmd->add_option("--features", paths.features, "Feature file (default: computed)");
    rank_cmd->add_option("--ranked", paths.ranked, "Also write rank,simplex_id,score here");
    rank_cmd->add_option("--method", paths.method, "Method name recorded with the scores");
    auto* eval_cmd = add("evaluate", "Kendall tau between predicted and true scores", cmd_evaluate);
    eval_cmd->add_option("--pred", paths.pred, "Predicted scores")->required();
    eval_cmd->add_option("--truth", paths.truth, "Ground-truth labels")->required();
    eval_cmd->add_option("--split", paths.split, "split.json from train");
    eval_cmd->add_option("--subset", paths.subset, "Part of the split to score")
        ->check(CLI::IsMember({"all", "train", "val", "test"}));
    eval_cmd->add_option("--method", paths.method, "Method name for the results row");
    auto* imm_cmd = add("immunize", "Immunize top-ranked simplices and simulate SIR", cmd_immunize);
    imm_cmd->add_option("--scores", paths.scores, "Scores of the simplices to immunize");
    imm_cmd->add_option("--method", paths.method, "Baseline name, 'random', or a label for --scores");
    auto* base_cmd = add("baseline", "Write centrality baseline scores for the hub layer", cmd_baseline);
    base_cmd->add_option("--methods", paths.methods, "Subset of DC,ND,HI,CC,HD")->delimiter(',');
    add("sweep-order", "Train and evaluate at each maximum order", cmd_sweep_order);
    auto* report_cmd = add("report", "Collect results into plot-ready tables", cmd_report);
    report_cmd->add_option("--results", paths.results, "Directory with evaluation outputs")->required();
    report_cmd->add_flag("--partial", paths.partial, "Write the families that are present");

    std::vector<const char*> argv{"ismnet"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        fmt::print("{}", app.help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        fmt::print("{}", app.help("", CLI::AppFormatMode::All));
        return 0;
    } catch (const CLI::CallForVersion&) {
        fmt::print("ismnet {}\n", ISMNET_VERSION);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (app.get_subcommands().empty()) {
            std::string known;
            for (const auto& [sub, fn] : commands) known += " " + sub->get_name();
            log("unknown or missing subcommand; expected one of:{}", known);
            return 2;
        }
        log("configuration error: {}", e.what());
        return 3;
    }

    auto* chosen = app.get_subcommands().front();
    Run run{cfg, chosen->get_name(), config_json(cfg), {}, force, {}, json::object()};
    run.config_hash = hash_text(run.config.dump());
    run.manifest_path = manifest_location(run.subcommand, cfg.out);
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

    int status = 0;
    std::string message;
    try {
        validate(cfg);
        for (const auto& [sub, fn] : commands)
            if (sub == chosen) fn(run, paths);
    } catch (const ConfigError& e) {
        status = 3;
        message = e.what();
    } catch (const std::exception& e) {
        status = 1;
        message = e.what();
    }
    if (status != 0) log("error: {}", message);

    if (!run.manifest_path.empty()) {
        try {
            write_json(run.manifest_path, run.manifest(status == 0 ? "ok" : "error", message));
        } catch (const std::exception& e) {
            log("could not write run manifest: {}", e.what());
            if (status == 0) status = 1;
        }
    }
    return status;
}

}  // namespace ismnet::cli
