#include "haddm/perf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "haddm/errors.hpp"
#include "haddm/linalg.hpp"
#include "haddm/parallel.hpp"
#include "haddm/rng.hpp"

namespace haddm {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Mean and standard error of a per-trial sample.
SeriesPoint mean_point(const std::vector<double>& xs) {
  SeriesPoint pt;
  pt.n = static_cast<long>(xs.size());
  pt.mean = compensated_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = xs[i] - pt.mean;
      sq[i] = d * d;
    }
    const double var =
        compensated_sum(sq) / static_cast<double>(xs.size() - 1);
    pt.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return pt;
}

// Truncated-Gaussian error draw (degrees), rejection from the parent.
double tg_draw(const GaussianDoaModel& model, RngStream& rng) {
  if (model.point_mass()) return 0.0;
  const double sigma = std::sqrt(model.variance_deg2);
  for (int it = 0; it < 100000; ++it) {
    const double x = rng.gaussian() * sigma;
    if (std::abs(x) <= model.delta_max_deg) return x;
  }
  throw Error("perf/tg_draw", "rejection sampler starved, window too narrow");
}

struct StageRun {
  MeasurementSet set;
  double mean = 0.0;
  double var = 0.0;
};

// One measurement stage: n independent direction estimates at the given
// per-antenna SNR, then one estimator-chain SNR estimate for the stage.
StageRun run_stage(const ArrayConfig& cfg, double theta0_deg, double snr_db,
                   int n_measurements, int n_snapshots, int n_amb,
                   StageLabel label, std::uint64_t seed, std::uint64_t tag) {
  if (n_measurements < 2)
    throw Error("perf/density_experiment", "need at least two measurements per stage");
  const double s2 = db_to_linear(snr_db);

  // Initial batches go through the nominal-direction probe stage: a
  // zero-phase stage is broadside-aligned and its branch gain off 90 degrees
  // can drop below the subspace-detection threshold at campaign SNRs,
  // especially for large M.
  const AnalogMatrix probe = nominal_probe_analog(cfg, theta0_deg);
  std::vector<double> angles(n_measurements);
  parallel_for(n_measurements, [&](int t) {
    RngStream rng(derive_seed(seed, {tag, static_cast<std::uint64_t>(t)}));
    const SnapshotSource src = monte_carlo_source(cfg, theta0_deg, s2, 1.0, rng);
    const SnapshotBatch batch =
        generate_snapshots(cfg, theta0_deg, s2, 1.0, n_snapshots, rng, probe);
    angles[t] = estimate_doa(cfg, batch, src, n_amb).selected_deg;
  });

  StageRun run;
  run.set.angles_deg = std::move(angles);
  run.set.label = label;
  run.mean = sample_mean(run.set.angles_deg);
  run.var = sample_variance(run.set.angles_deg);

  // Stage SNR estimate from the same chain: noise floor off a zero-phase
  // calibration batch, branch energies off an aligned batch.
  const int n_cal = 4096;
  RngStream rng(derive_seed(seed, {tag, 0x5eedULL, 0ULL}));
  const SnapshotSource src = monte_carlo_source(cfg, theta0_deg, s2, 1.0, rng);
  const CovarianceEstimate cov =
      sample_covariance(src(zero_phase_analog(cfg), n_cal));
  const double floor =
      debiased_noise_floor(cov.noise_floor, cfg.n_subarrays, n_cal);
  const SnrEstimate snr = estimate_snr(cfg, run.mean, src, floor, n_cal);
  run.set.snr_hat = snr.rho;
  return run;
}

}  // namespace

double achievable_rate(const LinkScenario& s, double theta_deg,
                       double noise_var) {
  if (!(noise_var > 0.0))
    throw Error("perf/achievable_rate", "noise variance must be positive");
  const Eigen::VectorXcd h = centered_steering(s.array, theta_deg);
  const Eigen::MatrixXcd v = s.beamformer.analog.assemble();
  const Eigen::RowVectorXcd row = h.adjoint() * v;
  const std::complex<double> gc = row * s.beamformer.v_bb;
  const double signal = s.beamformer.beta * s.power * std::norm(gc);
  const double leak =
      (1.0 - s.beamformer.beta) * s.power * (row * s.beamformer.t_bb).squaredNorm();
  return std::log2(1.0 + signal / (leak + noise_var));
}

RateReport secrecy_report(const LinkScenario& s) {
  RateReport r;
  r.rate_desired = achievable_rate(s, s.theta_d_deg, s.noise_d);
  r.rate_eave = achievable_rate(s, s.theta_e_deg, s.noise_e);
  r.secrecy = std::max(0.0, r.rate_desired - r.rate_eave);
  return r;
}

std::complex<double> qpsk_map(int b0, int b1) {
  if ((b0 & ~1) || (b1 & ~1))
    throw Error("perf/qpsk_map", "bits must be 0 or 1");
  const double s = 1.0 / std::sqrt(2.0);
  return {s * (1 - 2 * b0), s * (1 - 2 * b1)};
}

std::pair<int, int> qpsk_demap(std::complex<double> symbol) {
  return {symbol.real() < 0.0 ? 1 : 0, symbol.imag() < 0.0 ? 1 : 0};
}

BerCount ber_trial(const LinkScenario& s, long long n_bits, RngStream& rng) {
  if (n_bits < 1000 || (n_bits & 1))
    throw Error("perf/ber_trial", "bit count must be even and >= 1000");

  const Eigen::MatrixXcd v = s.beamformer.analog.assemble();
  const Eigen::RowVectorXcd row_d =
      centered_steering(s.array, s.theta_d_deg).adjoint() * v;
  const Eigen::RowVectorXcd row_e =
      centered_steering(s.array, s.theta_e_deg).adjoint() * v;
  const std::complex<double> gd = row_d * s.beamformer.v_bb;
  const std::complex<double> ge = row_e * s.beamformer.v_bb;
  const Eigen::RowVectorXcd td = row_d * s.beamformer.t_bb;
  const Eigen::RowVectorXcd te = row_e * s.beamformer.t_bb;

  const double amp_c = std::sqrt(s.beamformer.beta * s.power);
  const double amp_n = std::sqrt((1.0 - s.beamformer.beta) * s.power);
  const std::complex<double> eq_d = amp_c * gd;  // genie single-tap equalizers
  const std::complex<double> eq_e = amp_c * ge;
  const int n_streams = static_cast<int>(s.beamformer.t_bb.cols());

  BerCount count;
  count.bits = n_bits;
  Eigen::VectorXcd z(n_streams);
  for (long long i = 0; i < n_bits / 2; ++i) {
    const int b0 = rng.uniform() < 0.5 ? 0 : 1;
    const int b1 = rng.uniform() < 0.5 ? 0 : 1;
    const std::complex<double> x = qpsk_map(b0, b1);

    std::complex<double> an_d = 0.0, an_e = 0.0;
    if (amp_n > 0.0) {
      for (int k = 0; k < n_streams; ++k) z(k) = rng.cgaussian(1.0);
      an_d = amp_n * (td * z).value();
      an_e = amp_n * (te * z).value();
    }
    const std::complex<double> yd =
        amp_c * gd * x + an_d + rng.cgaussian(s.noise_d);
    const std::complex<double> ye =
        amp_c * ge * x + an_e + rng.cgaussian(s.noise_e);

    const auto [d0, d1] = qpsk_demap(yd / eq_d);
    const auto [e0, e1] = qpsk_demap(ye / eq_e);
    count.errors_d += (d0 != b0) + (d1 != b1);
    count.errors_e += (e0 != b0) + (e1 != b1);
  }
  return count;
}

SweepResult rmse_sweep(const ArrayConfig& cfg, const EstimationProtocol& proto,
                       const std::vector<double>& snr_grid_db, int n_trials,
                       std::uint64_t seed) {
  if (snr_grid_db.empty())
    throw Error("perf/rmse_sweep", "empty SNR grid");
  if (n_trials < 2)
    throw Error("perf/rmse_sweep", "need at least two trials");

  SweepResult result;
  result.axis_name = "snr_db";
  result.axis = snr_grid_db;
  Series rmse;
  rmse.name = "rmse_deg";

  for (std::size_t p = 0; p < snr_grid_db.size(); ++p) {
    const double s2 = db_to_linear(snr_grid_db[p]);
    std::vector<double> sq_err(n_trials);
    parallel_for(n_trials, [&](int t) {
      RngStream rng(derive_seed(
          seed, {0xA11CEULL, static_cast<std::uint64_t>(p),
                 static_cast<std::uint64_t>(t)}));
      const SnapshotSource src =
          monte_carlo_source(cfg, proto.theta0_deg, s2, 1.0, rng);
      const SnapshotBatch batch = generate_snapshots(
          cfg, proto.theta0_deg, s2, 1.0, proto.n_snapshots, rng);
      const DoaEstimate est =
          estimate_doa(cfg, batch, src, proto.n_ambiguity_snapshots);
      const double err = est.selected_deg - proto.theta0_deg;
      sq_err[t] = err * err;
    });

    const SeriesPoint mse = mean_point(sq_err);
    SeriesPoint pt;
    pt.n = mse.n;
    pt.mean = std::sqrt(mse.mean);
    // Delta method: se(sqrt(m)) ~ se(m) / (2*sqrt(m)).
    pt.std_error = pt.mean > 0.0 ? mse.std_error / (2.0 * pt.mean) : 0.0;
    rmse.points.push_back(pt);
  }
  result.series.push_back(std::move(rmse));
  result.info["theta0_deg"] = fmt(proto.theta0_deg);
  result.info["n_trials"] = std::to_string(n_trials);
  return result;
}

DensityOutcome density_experiment(const ArrayConfig& cfg,
                                  const DensityProtocol& proto,
                                  std::uint64_t seed) {
  const StageRun tds =
      run_stage(cfg, proto.theta0_deg, proto.snr_tds_db, proto.n_tds,
                proto.n_snapshots, proto.n_ambiguity_snapshots,
                StageLabel::tds, seed, 0x7d5ULL);
  const StageRun rts =
      run_stage(cfg, proto.theta0_deg, proto.snr_rts_db, proto.n_rts,
                proto.n_snapshots, proto.n_ambiguity_snapshots,
                StageLabel::rts, seed, 0x275ULL);

  DensityOutcome out;
  out.tds = tds.set;
  out.rts = rts.set;
  out.mean_tds = tds.mean;
  out.var_tds = tds.var;
  out.mean_rts = rts.mean;
  out.var_rts = rts.var;
  out.combined_mean = combine_mean(tds.set, rts.set, proto.method);
  out.combined_variance = combine_variance(tds.set, rts.set, proto.method);
  out.model = make_doa_model(out.combined_mean, out.combined_variance,
                             default_delta_max(out.combined_variance, cfg));
  if (tds.set.angles_deg.size() >= 500)
    out.gaussianity = gaussianity_check(tds.set.angles_deg);
  return out;
}

namespace {

// Both transmitters built from one learning pass: the robust design uses
// the learned error densities, the plain design collapses them to point
// estimates at the same learned means.
struct DmSetup {
  HybridBeamformer robust;
  HybridBeamformer aligned;
  GaussianDoaModel model_d, model_e;
};

DmSetup build_dm_setup(const ArrayConfig& cfg, const DmProtocol& proto,
                       std::uint64_t seed, DensityOutcome* learn_d_out,
                       DensityOutcome* learn_e_out) {
  DensityProtocol learn = proto.learning;
  learn.theta0_deg = proto.theta_d_deg;
  const DensityOutcome learn_d =
      density_experiment(cfg, learn, derive_seed(seed, {0xD0AULL}));
  learn.theta0_deg = proto.theta_e_deg;
  const DensityOutcome learn_e =
      density_experiment(cfg, learn, derive_seed(seed, {0xE0EULL}));

  const int n_streams = proto.n_streams > 0 ? proto.n_streams : cfg.n_subarrays;

  DmSetup setup;
  setup.model_d = learn_d.model;
  setup.model_e = learn_e.model;

  const auto assemble = [&](const GaussianDoaModel& md,
                            const GaussianDoaModel& me) {
    const AnalogMatrix analog = robust_analog_matrix(md.mean_deg, md, cfg);
    const FdBeamformer fd = fd_nsp_beamformers(md.mean_deg, md, me.mean_deg,
                                               me, cfg, n_streams);
    const Eigen::MatrixXcd v = analog.assemble();
    return assemble_hybrid(analog, digital_confidential(v, fd.v_fd),
                           an_projection(v, fd.t_fd), proto.beta);
  };

  setup.robust = assemble(setup.model_d, setup.model_e);
  const GaussianDoaModel point_d = make_doa_model(
      setup.model_d.mean_deg, 0.0, setup.model_d.delta_max_deg);
  const GaussianDoaModel point_e = make_doa_model(
      setup.model_e.mean_deg, 0.0, setup.model_e.delta_max_deg);
  setup.aligned = assemble(point_d, point_e);

  if (learn_d_out) *learn_d_out = learn_d;
  if (learn_e_out) *learn_e_out = learn_e;
  return setup;
}

}  // namespace

SweepResult dm_eval_experiment(const ArrayConfig& cfg, const DmProtocol& proto,
                               std::uint64_t seed) {
  if (proto.snr_grid_db.empty())
    throw Error("perf/dm_eval_experiment", "empty SNR grid");
  if (proto.n_draws < 2)
    throw Error("perf/dm_eval_experiment", "need at least two draws");

  const DmSetup setup = build_dm_setup(cfg, proto, seed, nullptr, nullptr);

  SweepResult result;
  result.axis_name = "snr_db";
  result.axis = proto.snr_grid_db;
  Series sr_r{"secrecy_robust", {}}, sr_a{"secrecy_aligned", {}};
  Series sr_gap{"secrecy_gap", {}};  // paired robust - aligned
  Series ber_r{"ber_robust", {}}, ber_a{"ber_aligned", {}};
  Series ber_er{"ber_eve_robust", {}}, ber_ea{"ber_eve_aligned", {}};
  Series ber_gap{"ber_gap", {}};  // robust - aligned, desired receiver

  for (std::size_t p = 0; p < proto.snr_grid_db.size(); ++p) {
    const double power = db_to_linear(proto.snr_grid_db[p]);
    const int n = proto.n_draws;
    std::vector<double> v_sr_r(n), v_sr_a(n), v_sr_gap(n);
    std::vector<long long> e_r(n), e_a(n), e_er(n), e_ea(n);

    parallel_for(n, [&](int draw) {
      RngStream rng(derive_seed(
          seed, {0xD3AULL, static_cast<std::uint64_t>(p),
                 static_cast<std::uint64_t>(draw)}));
      // Drawn directions are physical arrival angles; a wide learned window
      // centered near an endpoint can poke past the sector, so clamp.
      const double theta_d = std::clamp(
          setup.model_d.mean_deg + tg_draw(setup.model_d, rng), 0.0, 180.0);
      const double theta_e = std::clamp(
          setup.model_e.mean_deg + tg_draw(setup.model_e, rng), 0.0, 180.0);

      LinkScenario sc;
      sc.array = cfg;
      sc.theta_d_deg = theta_d;
      sc.theta_e_deg = theta_e;
      sc.power = power;
      sc.noise_d = 1.0;
      sc.noise_e = 1.0;

      sc.beamformer = setup.robust;
      v_sr_r[draw] = secrecy_report(sc).secrecy;
      const BerCount cr = ber_trial(sc, proto.n_bits_per_draw, rng);
      sc.beamformer = setup.aligned;
      v_sr_a[draw] = secrecy_report(sc).secrecy;
      const BerCount ca = ber_trial(sc, proto.n_bits_per_draw, rng);

      v_sr_gap[draw] = v_sr_r[draw] - v_sr_a[draw];
      e_r[draw] = cr.errors_d;
      e_er[draw] = cr.errors_e;
      e_a[draw] = ca.errors_d;
      e_ea[draw] = ca.errors_e;
    });

    sr_r.points.push_back(mean_point(v_sr_r));
    sr_a.points.push_back(mean_point(v_sr_a));
    sr_gap.points.push_back(mean_point(v_sr_gap));

    const auto pooled = [&](const std::vector<long long>& errs) {
      long long total = 0;
      for (long long e : errs) total += e;
      const double bits =
          static_cast<double>(proto.n_bits_per_draw) * static_cast<double>(n);
      SeriesPoint pt;
      pt.n = static_cast<long>(n);
      pt.mean = static_cast<double>(total) / bits;
      pt.std_error = std::sqrt(std::max(pt.mean * (1.0 - pt.mean), 0.0) / bits);
      return pt;
    };
    ber_r.points.push_back(pooled(e_r));
    ber_a.points.push_back(pooled(e_a));
    ber_er.points.push_back(pooled(e_er));
    ber_ea.points.push_back(pooled(e_ea));
    {
      const SeriesPoint pr = ber_r.points.back();
      const SeriesPoint pa = ber_a.points.back();
      SeriesPoint gap;
      gap.n = static_cast<long>(n);
      gap.mean = pr.mean - pa.mean;
      gap.std_error = std::sqrt(pr.std_error * pr.std_error +
                                pa.std_error * pa.std_error);
      ber_gap.points.push_back(gap);
    }
  }

  result.series = {std::move(sr_r),   std::move(sr_a),   std::move(sr_gap),
                   std::move(ber_r),  std::move(ber_a),  std::move(ber_er),
                   std::move(ber_ea), std::move(ber_gap)};
  result.info["sigma_ml_d_deg"] = fmt(std::sqrt(setup.model_d.variance_deg2));
  result.info["sigma_ml_e_deg"] = fmt(std::sqrt(setup.model_e.variance_deg2));
  result.info["beta"] = fmt(proto.beta);
  result.info["n_draws"] = std::to_string(proto.n_draws);
  return result;
}

SweepResult snr_est_experiment(const ArrayConfig& cfg, double theta0_deg,
                               const std::vector<double>& snr_grid_db,
                               int n_snapshots, int n_trials,
                               std::uint64_t seed) {
  if (snr_grid_db.empty())
    throw Error("perf/snr_est_experiment", "empty SNR grid");
  if (n_trials < 2)
    throw Error("perf/snr_est_experiment", "need at least two trials");

  SweepResult result;
  result.axis_name = "snr_db";
  result.axis = snr_grid_db;
  Series est{"per_antenna_snr", {}}, bias{"bias_ratio", {}};

  for (std::size_t p = 0; p < snr_grid_db.size(); ++p) {
    const double truth = db_to_linear(snr_grid_db[p]);
    std::vector<double> values(n_trials), ratios(n_trials);
    parallel_for(n_trials, [&](int t) {
      RngStream rng(derive_seed(
          seed, {0x55E5ULL, static_cast<std::uint64_t>(p),
                 static_cast<std::uint64_t>(t)}));
      const SnapshotSource src =
          monte_carlo_source(cfg, theta0_deg, truth, 1.0, rng);
      // Direction first, from a short batch; then the long calibration.
      const SnapshotBatch batch =
          generate_snapshots(cfg, theta0_deg, truth, 1.0, 64, rng);
      const DoaEstimate doa = estimate_doa(cfg, batch, src, 64);
      const CovarianceEstimate cov =
          sample_covariance(src(zero_phase_analog(cfg), n_snapshots));
      const double floor = debiased_noise_floor(cov.noise_floor,
                                                cfg.n_subarrays, n_snapshots);
      const SnrEstimate snr =
          estimate_snr(cfg, doa.selected_deg, src, floor, n_snapshots);
      values[t] = snr.per_antenna;
      ratios[t] = snr.per_antenna / truth;
    });
    est.points.push_back(mean_point(values));
    bias.points.push_back(mean_point(ratios));
  }

  result.series = {std::move(est), std::move(bias)};
  result.info["theta0_deg"] = fmt(theta0_deg);
  result.info["n_snapshots"] = std::to_string(n_snapshots);
  return result;
}

}  // namespace haddm
