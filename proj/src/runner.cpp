#include "haddm/runner.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "haddm/errors.hpp"
#include "haddm/report.hpp"
#include "haddm/rng.hpp"

#ifndef HADDM_VERSION
#define HADDM_VERSION "0.0.0-unknown"
#endif

namespace haddm {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* rule_name(WeightRule rule) {
  switch (rule) {
    case WeightRule::snr_ratio: return "snr_ratio";
    case WeightRule::sample_count: return "sample_count";
    default: return "snr_sample_product";
  }
}

SweepResult run_doa(const ArrayConfig& array, const DoaScenario& s,
                    std::uint64_t seed) {
  const double sigma_s2 = std::pow(10.0, s.snr_db / 10.0);
  const double sigma_n2 = s.noiseless ? 0.0 : 1.0;
  RngStream rng(derive_seed(seed, {0xD0AE5ULL}));
  const SnapshotSource src =
      monte_carlo_source(array, s.theta0_deg, sigma_s2, sigma_n2, rng);
  const SnapshotBatch batch = generate_snapshots(
      array, s.theta0_deg, sigma_s2, sigma_n2, s.n_snapshots, rng);
  const DoaEstimate est =
      estimate_doa(array, batch, src, s.n_ambiguity_snapshots);

  SweepResult result;
  result.axis_name = "candidate";
  Series angle{"angle_deg", {}}, power{"power", {}};
  for (std::size_t i = 0; i < est.candidates.size(); ++i) {
    result.axis.push_back(static_cast<double>(i));
    angle.points.push_back({est.candidates[i].angle_deg, 0.0, 1});
    power.points.push_back({est.candidates[i].power, 0.0, 1});
  }
  result.series = {std::move(angle), std::move(power)};
  result.info["selected_deg"] = fmt(est.selected_deg);
  result.info["principal_deg"] = fmt(est.principal.degrees);
  result.info["theta0_deg"] = fmt(s.theta0_deg);
  result.info["snapshots_used"] = std::to_string(est.snapshots_used);
  return result;
}

SweepResult density_to_sweep(const DensityOutcome& out,
                             const DensityProtocol& proto) {
  SweepResult result;
  result.axis_name = "stage";
  result.axis = {0.0, 1.0};  // 0 = training, 1 = real-time

  const auto stage_rows = [](const MeasurementSet& set, double mean, double var) {
    const double n = static_cast<double>(set.angles_deg.size());
    SeriesPoint mp{mean, std::sqrt(var / n), static_cast<long>(n)};
    // Normal-theory standard error of the variance estimate.
    SeriesPoint vp{var, var * std::sqrt(2.0 / (n - 1.0)), static_cast<long>(n)};
    SeriesPoint sp{set.snr_hat, 0.0, static_cast<long>(n)};
    return std::array<SeriesPoint, 3>{mp, vp, sp};
  };
  const auto t = stage_rows(out.tds, out.mean_tds, out.var_tds);
  const auto r = stage_rows(out.rts, out.mean_rts, out.var_rts);

  result.series = {Series{"mean_deg", {t[0], r[0]}},
                   Series{"var_deg2", {t[1], r[1]}},
                   Series{"snr_hat", {t[2], r[2]}}};
  result.info["combined_mean_deg"] = fmt(out.combined_mean);
  result.info["combined_variance_deg2"] = fmt(out.combined_variance);
  result.info["delta_max_deg"] = fmt(out.model.delta_max_deg);
  result.info["k_d"] = fmt(out.model.k_d);
  result.info["weight_rule"] = rule_name(proto.method.rule);
  result.info["motion"] =
      proto.method.state == MotionState::moving ? "moving" : "stationary";
  if (!out.tds.angles_deg.empty() && out.tds.angles_deg.size() >= 500) {
    result.info["gauss_skewness"] = fmt(out.gaussianity.skewness);
    result.info["gauss_excess_kurtosis"] = fmt(out.gaussianity.excess_kurtosis);
    result.info["gauss_pass"] = out.gaussianity.pass ? "true" : "false";
  }
  return result;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("runner/write", "cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error("runner/write", "write failed for " + path);
}

}  // namespace

void validate_experiment(const ExperimentConfig& cfg) {
  const auto check_theta = [&](double theta) { cfg.array.phase_step(theta); };
  if (const auto* s = std::get_if<DoaScenario>(&cfg.scenario)) {
    check_theta(s->theta0_deg);
  } else if (const auto* s = std::get_if<SweepRmseScenario>(&cfg.scenario)) {
    check_theta(s->proto.theta0_deg);
  } else if (const auto* s = std::get_if<DensityScenario>(&cfg.scenario)) {
    check_theta(s->proto.theta0_deg);
  } else if (const auto* s = std::get_if<DmEvalScenario>(&cfg.scenario)) {
    check_theta(s->proto.theta_d_deg);
    check_theta(s->proto.theta_e_deg);
    check_theta(s->proto.learning.theta0_deg);
    const int streams = s->proto.n_streams > 0 ? s->proto.n_streams
                                               : cfg.array.n_subarrays;
    if (streams > cfg.array.n_antennas - 1)
      throw ConfigError("scenario.n_streams",
                        "needs at most n_antennas - 1 noise streams");
  } else if (const auto* s = std::get_if<SnrEstScenario>(&cfg.scenario)) {
    check_theta(s->theta0_deg);
  }
}

RunResult run_experiment(const ExperimentConfig& cfg,
                         const nlohmann::json& config_echo) {
  validate_experiment(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  SweepResult result;
  const DensityOutcome* density = nullptr;
  DensityOutcome density_storage;

  if (const auto* s = std::get_if<DoaScenario>(&cfg.scenario)) {
    result = run_doa(cfg.array, *s, cfg.seed);
  } else if (const auto* s = std::get_if<SweepRmseScenario>(&cfg.scenario)) {
    result = rmse_sweep(cfg.array, s->proto, s->snr_grid_db, s->n_trials, cfg.seed);
  } else if (const auto* s = std::get_if<DensityScenario>(&cfg.scenario)) {
    density_storage = density_experiment(cfg.array, s->proto, cfg.seed);
    density = &density_storage;
    result = density_to_sweep(density_storage, s->proto);
  } else if (const auto* s = std::get_if<DmEvalScenario>(&cfg.scenario)) {
    result = dm_eval_experiment(cfg.array, s->proto, cfg.seed);
  } else if (const auto* s = std::get_if<SnrEstScenario>(&cfg.scenario)) {
    result = snr_est_experiment(cfg.array, s->theta0_deg, s->snr_grid_db,
                                s->n_snapshots, s->n_trials, cfg.seed);
  } else {
    throw Error("runner/run_experiment", "unhandled scenario type");
  }

  std::filesystem::create_directories(cfg.output.directory);
  const std::string stem = cfg.output.directory + "/" + cfg.experiment + "-" +
                           std::to_string(cfg.seed);

  RunResult run;
  const std::string data_path = stem + "." + cfg.output.format;
  if (cfg.output.format == "json") {
    write_json_file(sweep_to_json(result), data_path);
  } else {
    write_sweep_csv(result, data_path);
  }
  run.files_written.push_back(data_path);

  if (density) {
    write_measurements_csv(density->tds, stem + "-tds.csv");
    write_measurements_csv(density->rts, stem + "-rts.csv");
    run.files_written.push_back(stem + "-tds.csv");
    run.files_written.push_back(stem + "-rts.csv");
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  nlohmann::json meta;
  meta["experiment"] = cfg.experiment;
  meta["seed"] = cfg.seed;
  meta["version"] = HADDM_VERSION;
  meta["wall_seconds"] = wall;
  meta["config"] = config_echo;
  meta["files"] = run.files_written;
  const std::string meta_path = stem + ".meta.json";
  write_json_file(meta, meta_path);
  run.files_written.push_back(meta_path);
  return run;
}

}  // namespace haddm
