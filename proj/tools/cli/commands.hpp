#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vetk::cli {

struct Artifact {
  std::string path;  // relative to the output directory
  std::string content;
};

struct RunResult {
  std::string stdout_text;
  std::vector<Artifact> artifacts;
};

/// Runs `subcommand` from a fully resolved config. Output depends on nothing
/// else, which is what makes manifests replayable.
RunResult execute(const std::string& subcommand, const nlohmann::json& config);

/// Master seed recorded in a config, if the subcommand draws random numbers.
nlohmann::json config_seed(const std::string& subcommand, const nlohmann::json& config);

}  // namespace vetk::cli
