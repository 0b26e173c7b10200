#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "haddm/config.hpp"
#include "haddm/errors.hpp"
#include "haddm/runner.hpp"

namespace {

nlohmann::json load_config(const std::string& path,
                           const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw haddm::Error("cli/load_config", "cannot open " + path);
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw haddm::ConfigError(path, e.what());
  }
  for (const std::string& o : overrides) haddm::apply_override(root, o);
  return root;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid-array direction finding and directional modulation runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  CLI::App* run = app.add_subcommand("run", "Run an experiment and write its outputs");
  run->add_option("config", config_path, "JSON experiment description")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--set", overrides,
                  "Override a config field, e.g. --set scenario.n_trials=50");

  CLI::App* validate =
      app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "JSON experiment description")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--set", overrides, "Override a config field");

  CLI11_PARSE(app, argc, argv);

  try {
    const nlohmann::json root = load_config(config_path, overrides);
    const haddm::ExperimentConfig cfg = haddm::parse_config(root);
    if (app.got_subcommand(validate)) {
      haddm::validate_experiment(cfg);
      std::cout << "ok: " << cfg.experiment << " (seed " << cfg.seed << ")\n";
      return 0;
    }
    const haddm::RunResult result = haddm::run_experiment(cfg, root);
    for (const std::string& f : result.files_written) std::cout << f << "\n";
    return 0;
  } catch (const haddm::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const haddm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
