#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "haddm/array.hpp"
#include "haddm/density.hpp"
#include "haddm/perf.hpp"

namespace haddm {

// Schema violation; `path` is the dotted location of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error("config error at " + path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct DoaScenario {
  double theta0_deg = 50.0;
  double snr_db = 10.0;  // per antenna
  bool noiseless = false;
  int n_snapshots = 64;
  int n_ambiguity_snapshots = 64;
};

struct SweepRmseScenario {
  EstimationProtocol proto;
  std::vector<double> snr_grid_db = {-10, -5, 0, 5, 10, 20, 30};
  int n_trials = 200;
};

struct DensityScenario {
  DensityProtocol proto;
};

struct DmEvalScenario {
  DmProtocol proto;
};

struct SnrEstScenario {
  double theta0_deg = 50.0;
  std::vector<double> snr_grid_db = {0, 10};
  int n_snapshots = 10000;
  int n_trials = 20;
};

struct OutputSpec {
  std::string directory = "out";
  std::string format = "csv";  // or "json"
};

struct ExperimentConfig {
  std::string experiment;  // doa | sweep-rmse | density | dm-eval | snr-est
  std::uint64_t seed = 1;
  ArrayConfig array;
  OutputSpec output;
  std::variant<DoaScenario, SweepRmseScenario, DensityScenario, DmEvalScenario,
               SnrEstScenario>
      scenario;
};

// Strict parse: unknown keys anywhere are rejected, types are checked, and
// every violation throws ConfigError naming the field path.
ExperimentConfig parse_config(const nlohmann::json& root);

// Applies one "path.to.field=value" override onto the raw JSON tree before
// parsing. Values parse as JSON scalars when possible, else as strings.
void apply_override(nlohmann::json& root, const std::string& assignment);

}  // namespace haddm
