#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "app/output.hpp"

namespace hmm::app {

struct RunOptions {
  std::size_t threads = 0;  // 0: all hardware threads
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> format;
};

struct CommandResult {
  Table table;
  std::string summary;  // one line for stdout
  std::optional<std::string> failure;  // set when the run completed but a check failed
};

const std::vector<std::string>& command_names();

/// Pure computation; no files are touched.
CommandResult compute(const std::string& command, const RunConfig& config, const RunOptions& opt);

/// compute() plus writing `<out>/<command>.<format>`. Returns the written path.
std::filesystem::path run(const std::string& command, const RunConfig& config, const RunOptions& opt,
                          CommandResult* result = nullptr);

/// Metrics of one sweep point; only what the objective needs is computed, the rest is NaN.
Metrics evaluate_point(const RunConfig& config, Objective objective, const SweepConfig& sweep);

}  // namespace hmm::app
