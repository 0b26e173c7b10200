#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "haddm/config.hpp"

namespace haddm {

struct RunResult {
  std::vector<std::string> files_written;
};

// Executes the configured experiment and writes
//   <outdir>/<experiment>-<seed>.(csv|json)    data, deterministic bytes
//   <outdir>/<experiment>-<seed>.meta.json     config echo, seed, version, wall time
// The density experiment additionally writes the two measurement sets as
// <experiment>-<seed>-tds.csv / -rts.csv.
RunResult run_experiment(const ExperimentConfig& cfg,
                         const nlohmann::json& config_echo);

// Parse-level and construction-level checks without running the experiment.
// Throws ConfigError or Error on problems.
void validate_experiment(const ExperimentConfig& cfg);

}  // namespace haddm
