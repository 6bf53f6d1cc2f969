#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ismnet/error.hpp"

namespace ismnet::cli {

/// Runs one subcommand. `args` excludes the program name. Returns the
/// process exit status: 0 on success, 1 on runtime failure, 2 for an unknown
/// or missing subcommand, 3 for configuration errors.
int run_command(const std::vector<std::string>& args);

/// Raised by emit_report when result families are absent.
class MissingInputsError : public Error {
public:
    explicit MissingInputsError(std::vector<std::string> missing);
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

/// Collects *.eval.csv, *.immunize.csv and *.order.csv below `results` and
/// writes tau_vs_beta.csv, tau_heatmap.csv, immunization.csv and
/// tau_vs_order.csv into `out`. Throws MissingInputsError naming every absent
/// family unless `allow_missing`, in which case only present families are
/// written. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& results, const std::filesystem::path& out,
                                               bool allow_missing = false);

}  // namespace ismnet::cli
