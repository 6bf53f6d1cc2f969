#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "ismnet/checkpoint.hpp"
#include "ismnet/error.hpp"
#include "json.hpp"

using namespace ismnet;
namespace fs = std::filesystem;

namespace {

Checkpoint sample() {
    Checkpoint c;
    c.shape.hub_order = 2;
    c.shape.fringe_orders = {0, 1, 3};
    c.shape.input_dim = 4;
    c.shape.cheb_order = 2;
    c.config.seed = 17;
    c.config.split_seed = 99;
    c.config.epochs = 12;
    c.members = {init_params(c.shape, 1), init_params(c.shape, 2)};
    c.best_epochs = {3, 7};
    c.val_taus = {0.5, 0.625};
    c.config_hash = "0123456789abcdef";
    return c;
}

fs::path fresh(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("ismnet_test_ckpt_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("checkpoint round trip") {
    const auto dir = fresh("roundtrip");
    const auto c = sample();
    save_checkpoint(dir, c);
    CHECK(fs::file_size(dir / "params.bin") == 2 * c.members[0].size() * sizeof(double));
    const auto back = load_checkpoint(dir);
    CHECK(back.shape == c.shape);
    CHECK(back.members == c.members);
    CHECK(back.best_epochs == c.best_epochs);
    CHECK(back.val_taus == c.val_taus);
    CHECK(back.config_hash == c.config_hash);
    CHECK(back.config.split_seed == c.config.split_seed);
    CHECK(back.config.seed == 17);

    std::ifstream in(dir / "checkpoint.json");
    const auto j = nlohmann::json::parse(in);
    CHECK(j.at("format") == "ismnet-checkpoint-1");
    CHECK(j.at("tensors").size() == c.members[0].tensors().size());
    CHECK(j.at("tensors")[0].at("name") == "f0.w1");
}

TEST_CASE("saving twice gives identical bytes") {
    const auto a = fresh("a"), b = fresh("b");
    save_checkpoint(a, sample());
    save_checkpoint(b, sample());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(a / "params.bin") == slurp(b / "params.bin"));
    CHECK(slurp(a / "checkpoint.json") == slurp(b / "checkpoint.json"));
}

TEST_CASE("truncated blob is rejected") {
    const auto dir = fresh("truncated");
    save_checkpoint(dir, sample());
    fs::resize_file(dir / "params.bin", 64);
    CHECK_THROWS_AS(load_checkpoint(dir), Error);
    CHECK_THROWS_AS(load_checkpoint(fresh("missing")), Error);
}
