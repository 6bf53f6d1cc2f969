#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ismnet/model.hpp"

namespace ismnet {

/// A trained model (or ensemble of models sharing one shape) on disk.
///
/// `<dir>/checkpoint.json` holds the shape, training config, epoch, validation
/// tau and the tensor layout; `<dir>/params.bin` is the members' flat parameter
/// vectors back to back as little-endian float64.
struct Checkpoint {
    ModelShape shape;
    TrainConfig config;
    std::vector<ModelParams> members;
    std::vector<int> best_epochs;
    std::vector<double> val_taus;
    std::string config_hash;
};

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt);
/// Throws Error on a missing file, malformed manifest or size mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace ismnet
