#include "ismnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "ismnet/error.hpp"
#include "json.hpp"

namespace ismnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json shape_to_json(const ModelShape& s) {
    return {{"hub_order", s.hub_order},   {"fringe_orders", s.fringe_orders}, {"input_dim", s.input_dim},
            {"hidden", s.hidden},         {"embed", s.embed},                 {"cheb_order", s.cheb_order}};
}

ModelShape shape_from_json(const json& j) {
    ModelShape s;
    s.hub_order = j.at("hub_order").get<int>();
    s.fringe_orders = j.at("fringe_orders").get<std::vector<int>>();
    s.input_dim = j.at("input_dim").get<std::size_t>();
    s.hidden = j.at("hidden").get<std::size_t>();
    s.embed = j.at("embed").get<std::size_t>();
    s.cheb_order = j.at("cheb_order").get<int>();
    return s;
}

json config_to_json(const TrainConfig& c) {
    return {{"learning_rate", c.learning_rate},
            {"epochs", c.epochs},
            {"pairs_per_item", c.pairs_per_item},
            {"split", c.split},
            {"patience", c.patience},
            {"seed", c.seed},
            {"split_seed", c.split_seed ? json(*c.split_seed) : json(nullptr)},
            {"cheb_order", c.cheb_order},
            {"hidden", c.hidden},
            {"embed", c.embed},
            {"adam_beta1", c.adam_beta1},
            {"adam_beta2", c.adam_beta2},
            {"adam_eps", c.adam_eps}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.learning_rate = j.at("learning_rate").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.pairs_per_item = j.at("pairs_per_item").get<std::size_t>();
    c.split = j.at("split").get<std::array<double, 3>>();
    c.patience = j.at("patience").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("split_seed") && !j.at("split_seed").is_null()) c.split_seed = j.at("split_seed").get<std::uint64_t>();
    c.cheb_order = j.at("cheb_order").get<int>();
    c.hidden = j.at("hidden").get<std::size_t>();
    c.embed = j.at("embed").get<std::size_t>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.adam_eps = j.at("adam_eps").get<double>();
    return c;
}

void put_le(std::ostream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

double get_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const fs::path& dir, const Checkpoint& ckpt) {
    fs::create_directories(dir);
    ModelParams layout(ckpt.shape);
    json tensors = json::array();
    for (const auto& t : layout.tensors())
        tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}, {"offset", t.offset}});

    json manifest;
    manifest["format"] = "ismnet-checkpoint-1";
    manifest["config_hash"] = ckpt.config_hash;
    manifest["shape"] = shape_to_json(ckpt.shape);
    manifest["train"] = config_to_json(ckpt.config);
    manifest["members"] = ckpt.members.size();
    manifest["params_per_member"] = layout.size();
    manifest["epoch"] = ckpt.best_epochs;
    manifest["val_tau"] = ckpt.val_taus;
    manifest["tensors"] = tensors;
    manifest["blob"] = "params.bin";
    {
        std::ofstream out(dir / "checkpoint.json");
        if (!out) throw Error("cannot write " + (dir / "checkpoint.json").string());
        out << manifest.dump(2) << '\n';
    }
    std::ofstream blob(dir / "params.bin", std::ios::binary);
    if (!blob) throw Error("cannot write " + (dir / "params.bin").string());
    for (const auto& m : ckpt.members) {
        if (!(m.shape() == ckpt.shape)) throw DimensionError("ensemble member shape differs from checkpoint shape");
        for (double v : m.values()) put_le(blob, v);
    }
}

Checkpoint load_checkpoint(const fs::path& dir) {
    json manifest;
    {
        std::ifstream in(dir / "checkpoint.json");
        if (!in) throw Error("cannot read " + (dir / "checkpoint.json").string());
        try {
            in >> manifest;
        } catch (const json::exception& e) {
            throw Error("bad checkpoint manifest: " + std::string(e.what()));
        }
    }
    Checkpoint ckpt;
    std::size_t members = 0, per_member = 0;
    try {
        ckpt.shape = shape_from_json(manifest.at("shape"));
        ckpt.config = config_from_json(manifest.at("train"));
        ckpt.config_hash = manifest.at("config_hash").get<std::string>();
        ckpt.best_epochs = manifest.at("epoch").get<std::vector<int>>();
        ckpt.val_taus = manifest.at("val_tau").get<std::vector<double>>();
        members = manifest.at("members").get<std::size_t>();
        per_member = manifest.at("params_per_member").get<std::size_t>();
    } catch (const json::exception& e) {
        throw Error("bad checkpoint manifest: " + std::string(e.what()));
    }
    ModelParams layout(ckpt.shape);
    if (layout.size() != per_member)
        throw Error("checkpoint declares " + std::to_string(per_member) + " parameters, shape implies " +
                    std::to_string(layout.size()));

    std::ifstream blob(dir / manifest.value("blob", std::string("params.bin")), std::ios::binary);
    if (!blob) throw Error("cannot read checkpoint parameter blob");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(blob)), std::istreambuf_iterator<char>());
    if (bytes.size() != members * per_member * 8)
        throw Error("parameter blob has " + std::to_string(bytes.size()) + " bytes, expected " +
                    std::to_string(members * per_member * 8));
    for (std::size_t m = 0; m < members; ++m) {
        ModelParams p(ckpt.shape);
        auto v = p.values();
        for (std::size_t i = 0; i < per_member; ++i) v[i] = get_le(bytes.data() + 8 * (m * per_member + i));
        ckpt.members.push_back(std::move(p));
    }
    return ckpt;
}

}  // namespace ismnet
