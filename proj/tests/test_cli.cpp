#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

struct Workspace {
    fs::path root;

    explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / ("ismnet_cli_" + name)) {
        fs::remove_all(root);
        fs::create_directories(root);
    }

    fs::path operator/(const std::string& p) const { return root / p; }

    Result run(const std::string& args) const {
        const auto out = root / ".stdout", err = root / ".stderr";
        const std::string cmd = "cd '" + root.string() + "' && '" ISMNET_BIN "' " + args + " >'" + out.string() +
                                "' 2>'" + err.string() + "'";
        const int raw = std::system(cmd.c_str());
        Result r;
        r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }
};

const char* kToyConfig = R"(max-order = 2
hub-order = 0
beta-ratio = [1.0]
runs = 200
seed = 3
epochs = 30
lambda-grid = [0.0, 1.0, 2.0]
repeats = 20
)";

}  // namespace

TEST_CASE("lift on K3 reports one 2-simplex") {
    Workspace ws("lift");
    spit(ws / "k3.edges", "0 1\n1 2\n0 2\n");
    const auto r = ws.run("lift --input k3.edges --max-order 2 --out cx");
    REQUIRE(r.status == 0);
    const auto manifest = json::parse(slurp(ws / "cx/manifest.json"));
    CHECK(manifest.at("n_2") == 1);
    CHECK(manifest.at("n_0") == 3);
    const auto run = json::parse(slurp(ws / "cx/run.json"));
    CHECK(run.at("status") == "ok");
    CHECK(run.at("config_hash").get<std::string>().size() == 16);
    CHECK(run.contains("seeds"));
    CHECK(run.contains("version"));
}

TEST_CASE("evaluate identical tie-free files prints tau=1.0") {
    Workspace ws("eval");
    const std::string scores = "simplex_id,score\n0,0.5\n1,0.25\n2,0.75\n3,0.125\n";
    spit(ws / "a.csv", scores);
    spit(ws / "b.csv", scores);
    const auto r = ws.run("evaluate --pred a.csv --truth b.csv");
    CHECK(r.status == 0);
    CHECK(r.out == "tau=1.0\n");
}

TEST_CASE("exit codes") {
    Workspace ws("exit");
    spit(ws / "g.edges", "0 1\n1 2\n2 0\n2 3\n");
    CHECK(ws.run("").status == 2);
    CHECK(ws.run("frobnicate --input g.edges").status == 2);
    CHECK(ws.run("--help").status == 0);
    CHECK(ws.run("--version").out.find("ismnet") != std::string::npos);
    CHECK(ws.run("lift --input g.edges --max-order two --out cx").status == 3);
    CHECK(ws.run("lift --input g.edges --bogus-flag 1 --out cx").status == 3);
    CHECK(ws.run("lift --input g.edges --hub-order 5 --max-order 2 --out cx").status == 3);
    CHECK(ws.run("label --input g.edges --beta-ratio 40 --runs 5 --out labels").status == 3);
    CHECK(ws.run("label --input g.edges --beta2-ratio 2 --beta-ratio 1 --runs 5 --out labels").status == 3);

    spit(ws / "bad.toml", "unknown-key = 1\n");
    CHECK(ws.run("lift --config bad.toml --input g.edges --out cx").status == 3);

    const auto missing = ws.run("lift --input nowhere.edges --out cx2");
    CHECK(missing.status == 1);
    const auto manifest = json::parse(slurp(ws / "cx2/run.json"));
    CHECK(manifest.at("status") == "error");
    CHECK(manifest.at("error").get<std::string>().find("nowhere.edges") != std::string::npos);
}

TEST_CASE("report on an empty directory lists the four families") {
    Workspace ws("report_empty");
    fs::create_directories(ws / "results");
    const auto r = ws.run("report --results results --out tables");
    CHECK(r.status == 1);
    for (const char* family : {"tau_vs_beta", "tau_heatmap", "immunization", "tau_vs_order"})
        CHECK(r.err.find(family) != std::string::npos);

    try {
        ismnet::cli::emit_report(ws / "results", ws / "tables");
        FAIL("no error for an empty results directory");
    } catch (const ismnet::cli::MissingInputsError& e) {
        CHECK(e.missing().size() == 4);
    }
}

TEST_CASE("report tables") {
    Workspace ws("report");
    spit(ws / "results/a.eval.csv",
         "method,beta_ratio,beta2_ratio,tau\nISMnet,1,0,0.5\nISMnet,1,0,0.7\nISMnet,1.2,0,0.4\nISMnet,1,2,0.3\n");
    spit(ws / "results/b.immunize.csv", "method,lambda,beta,mean_r,std_error\nISMnet,1,0.1,0.2,0.01\n");
    spit(ws / "results/c.order.csv", "method,max_order,tau\nISMnet,1,0.25\nISMnet,2,0.5\n");
    const auto files = ismnet::cli::emit_report(ws / "results", ws / "tables");
    CHECK(files.size() == 4);

    auto lines = [&](const std::string& name) {
        std::vector<std::string> out;
        std::istringstream in(slurp(ws / "tables" / name));
        for (std::string l; std::getline(in, l);) out.push_back(l);
        return out;
    };
    const auto beta = lines("tau_vs_beta.csv");
    REQUIRE(beta.size() == 3);
    CHECK(beta[0] == "method,beta_ratio,tau,n");
    CHECK(beta[1] == "ISMnet,1,0.6,2");
    CHECK(lines("tau_heatmap.csv")[0] == "method,beta_ratio,beta2_ratio,tau,n");
    CHECK(lines("tau_heatmap.csv")[1] == "ISMnet,1,2,0.3,1");
    CHECK(lines("immunization.csv")[0] == "method,lambda,beta,mean_r,std_error");
    CHECK(lines("tau_vs_order.csv")[0] == "method,max_order,tau,n");
    CHECK(lines("tau_vs_order.csv").size() == 3);

    fs::remove(ws / "results/c.order.csv");
    CHECK_THROWS_AS(ismnet::cli::emit_report(ws / "results", ws / "tables2"), ismnet::cli::MissingInputsError);
    CHECK(ismnet::cli::emit_report(ws / "results", ws / "tables2", true).size() == 3);
}

TEST_CASE("toy pipeline end to end") {
    Workspace ws("pipeline");
    spit(ws / "toy.edges", "# triangle with a pendant\n0 1\n0 2\n1 2\n2 3\n");
    spit(ws / "toy.toml", kToyConfig);
    const std::string cfg = "--config toy.toml ";

    REQUIRE(ws.run("lift " + cfg + "--input toy.edges --out cx").status == 0);
    REQUIRE(ws.run("features " + cfg + "--complex cx --out features.csv").status == 0);
    CHECK(slurp(ws / "features.csv").rfind("simplex_id,degree,neighbor_degree,h_index,coreness\n", 0) == 0);
    REQUIRE(ws.run("label " + cfg + "--complex cx --out labels").status == 0);
    const auto label_file = ws / "labels/labels_h0_b1_bb0.csv";
    REQUIRE(fs::exists(label_file));
    const auto sidecar = json::parse(slurp(label_file.string() + ".meta.json"));
    CHECK(sidecar.at("runs") == 200);
    CHECK(sidecar.at("beta").get<double>() == doctest::Approx(0.8));

    REQUIRE(ws.run("train " + cfg + "--complex cx --labels labels/labels_h0_b1_bb0.csv --out model").status == 0);
    for (const char* f : {"checkpoint.json", "params.bin", "log.csv", "split.json", "run.json"})
        CHECK(fs::exists(ws / "model" / f));
    REQUIRE(ws.run("rank " + cfg + "--complex cx --checkpoint model --out pred.csv --ranked ranked.csv").status == 0);
    CHECK(slurp(ws / "ranked.csv").rfind("rank,simplex_id,score\n", 0) == 0);

    const auto ev = ws.run("evaluate " + cfg +
                           "--pred pred.csv --truth labels/labels_h0_b1_bb0.csv --out results/toy.eval.csv");
    CHECK(ev.status == 0);
    CHECK(ev.out.rfind("tau=", 0) == 0);
    CHECK(slurp(ws / "results/toy.eval.csv").rfind("method,beta_ratio,beta2_ratio,tau\nISMnet,1,0,", 0) == 0);

    REQUIRE(ws.run("baseline " + cfg + "--complex cx --out base").status == 0);
    for (const char* m : {"DC", "ND", "HI", "CC", "HD"}) CHECK(fs::exists(ws / "base" / (std::string(m) + ".csv")));
    CHECK(ws.run("evaluate " + cfg + "--pred base/DC.csv --truth labels/labels_h0_b1_bb0.csv --method DC "
                                     "--out results/dc.eval.csv")
              .status == 0);

    REQUIRE(ws.run("immunize " + cfg + "--complex cx --method DC --out results/dc.immunize.csv").status == 0);
    const auto imm = slurp(ws / "results/dc.immunize.csv");
    CHECK(imm.rfind("method,lambda,beta,mean_r,std_error\n", 0) == 0);
    // Four nodes leave a single test simplex, too few for a tau.
    const auto small = ws.run("sweep-order " + cfg + "--input toy.edges --orders 1,2 --out sweep_toy");
    CHECK(small.status == 1);
    CHECK(small.err.find("test split") != std::string::npos);
    REQUIRE(ws.run("sweep-order " + cfg + "--input '" ISMNET_SOURCE_DIR "/data/karate.edges' --orders 1,2 --out sweep")
                .status == 0);
    fs::copy_file(ws / "sweep/tau_vs_order.order.csv", ws / "results/tau_vs_order.order.csv");

    // No HSIR rows yet, so the heatmap family is missing.
    CHECK(ws.run("report --results results --out tables").status == 1);
    CHECK(ws.run("report --results results --partial --out tables").status == 0);
    CHECK(fs::exists(ws / "tables/tau_vs_beta.csv"));

    SUBCASE("reruns are byte-identical") {
        REQUIRE(ws.run("label " + cfg + "--complex cx --out labels2").status == 0);
        CHECK(slurp(ws / "labels2/labels_h0_b1_bb0.csv") == slurp(label_file));
        REQUIRE(ws.run("train " + cfg + "--complex cx --labels labels/labels_h0_b1_bb0.csv --out model2").status ==
                0);
        CHECK(slurp(ws / "model2/params.bin") == slurp(ws / "model/params.bin"));
        CHECK(slurp(ws / "model2/checkpoint.json") == slurp(ws / "model/checkpoint.json"));
    }
    SUBCASE("mismatched config hashes are refused unless forced") {
        const auto other = ws.run("label " + cfg + "--seed 4 --complex cx --out labels_seed4");
        REQUIRE(other.status == 0);
        const std::string args = "evaluate --pred pred.csv --truth labels_seed4/labels_h0_b1_bb0.csv";
        const auto refused = ws.run(args);
        CHECK(refused.status == 1);
        CHECK(refused.err.find("hash") != std::string::npos);
        CHECK(ws.run(args + " --force").status == 0);
        CHECK(ws.run("train " + cfg + "--complex cx --labels labels_seed4/labels_h0_b1_bb0.csv --out m3").status ==
              1);
    }
}
