#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "haddm/array.hpp"
#include "haddm/beamformer.hpp"
#include "haddm/density.hpp"
#include "haddm/esprit.hpp"

namespace haddm {

// Point-to-point secrecy link: one desired receiver, one eavesdropper,
// both single antenna, noise variances per receiver.
struct LinkScenario {
  ArrayConfig array;
  HybridBeamformer beamformer;
  double theta_d_deg = 50.0;
  double theta_e_deg = 70.0;
  double power = 1.0;      // total transmit power P_s
  double noise_d = 1.0;    // receiver noise variances
  double noise_e = 1.0;
};

struct RateReport {
  double rate_desired = 0.0;  // bits/s/Hz
  double rate_eave = 0.0;
  double secrecy = 0.0;       // max(0, desired - eave)
};

// log2(1 + beta*P*|h^H V v_bb|^2 / ((1-beta)*P*||h^H V T_bb||^2 + noise)),
// evaluated at an arbitrary angle.
double achievable_rate(const LinkScenario& s, double theta_deg, double noise_var);

RateReport secrecy_report(const LinkScenario& s);

// Gray-mapped unit-energy QPSK; (0,0) -> (1+j)/sqrt(2). First bit drives
// the in-phase sign, second the quadrature sign.
std::complex<double> qpsk_map(int b0, int b1);
std::pair<int, int> qpsk_demap(std::complex<double> symbol);

struct BerCount {
  long long bits = 0;
  long long errors_d = 0;
  long long errors_e = 0;

  double ber_d() const { return bits ? double(errors_d) / double(bits) : 0.0; }
  double ber_e() const { return bits ? double(errors_e) / double(bits) : 0.0; }
};

// Uncoded QPSK over the directional-modulation link. Both receivers use
// genie single-tap equalization by their own composite confidential gain;
// artificial noise is treated as noise. n_bits must be even and >= 1000.
BerCount ber_trial(const LinkScenario& s, long long n_bits, RngStream& rng);

// Monte Carlo sweep output: one axis, several named series, each point a
// mean with its standard error and trial count.
struct SeriesPoint {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
};

struct Series {
  std::string name;
  std::vector<SeriesPoint> points;
};

struct SweepResult {
  std::string axis_name;
  std::vector<double> axis;
  std::vector<Series> series;
  std::map<std::string, std::string> info;  // seed, version, extra scalars
};

struct EstimationProtocol {
  double theta0_deg = 50.0;
  int n_snapshots = 64;
  int n_ambiguity_snapshots = 64;
};

// Direction-finding RMSE versus per-antenna SNR. Per point, n_trials
// independent batches; series "rmse_deg" (delta-method standard error).
SweepResult rmse_sweep(const ArrayConfig& cfg, const EstimationProtocol& proto,
                       const std::vector<double>& snr_grid_db, int n_trials,
                       std::uint64_t seed);

struct DensityProtocol {
  double theta0_deg = 50.0;
  double snr_tds_db = 5.0;   // per-antenna, training stage
  double snr_rts_db = 0.0;   // per-antenna, real-time stage
  int n_tds = 1000;
  int n_rts = 10;
  int n_snapshots = 64;
  int n_ambiguity_snapshots = 64;
  WeightMethod method;
};

struct DensityOutcome {
  MeasurementSet tds, rts;
  double mean_tds = 0.0, var_tds = 0.0;
  double mean_rts = 0.0, var_rts = 0.0;
  double combined_mean = 0.0, combined_variance = 0.0;
  GaussianDoaModel model;
  GaussianityReport gaussianity;  // of the training-stage measurements
};

// Two-stage measurement campaign at one true angle; fuses stages into a
// truncated-Gaussian error model. Per-stage SNR estimates come from the
// estimator chain, not from the configured truth.
DensityOutcome density_experiment(const ArrayConfig& cfg,
                                  const DensityProtocol& proto,
                                  std::uint64_t seed);

// Robust versus plain point-estimate transmitter, swept over transmit SNR
// P_s/noise. Per draw the true directions are sampled from the learned
// models; secrecy rates and BERs are averaged over draws.
struct DmProtocol {
  double theta_d_deg = 50.0;
  double theta_e_deg = 70.0;
  double beta = 0.9;
  int n_streams = 0;  // 0 means K
  std::vector<double> snr_grid_db = {0, 5, 10, 15, 20};
  int n_draws = 500;
  long long n_bits_per_draw = 2000;
  DensityProtocol learning;
};

// Series: secrecy_robust, secrecy_aligned, secrecy_gap (paired difference),
// ber_robust, ber_aligned, ber_eve_robust, ber_eve_aligned, ber_gap.
SweepResult dm_eval_experiment(const ArrayConfig& cfg, const DmProtocol& proto,
                               std::uint64_t seed);

// Mean estimated per-antenna SNR versus the configured truth.
// Series: per_antenna_snr (linear), bias_ratio (estimate/truth).
SweepResult snr_est_experiment(const ArrayConfig& cfg, double theta0_deg,
                               const std::vector<double>& snr_grid_db,
                               int n_snapshots, int n_trials,
                               std::uint64_t seed);

}  // namespace haddm
