#pragma once

#include <span>
#include <string>
#include <vector>

#include "haddm/array.hpp"

namespace haddm {

enum class StageLabel { tds, rts };

// One stage's worth of direction measurements (degrees) plus the
// post-combining SNR estimate that stage ran at.
struct MeasurementSet {
  std::vector<double> angles_deg;
  double snr_hat = 0.0;  // linear
  StageLabel label = StageLabel::tds;
};

// How the two stages are weighted when fused.
//   snr_ratio:          alpha_tds = rho_tds / (rho_tds + rho_rts)
//   sample_count:       alpha_tds = n_tds / (n_tds + n_rts)
//   snr_sample_product: alpha_tds = rho_tds*n_tds / (rho_tds*n_tds + rho_rts*n_rts)
enum class WeightRule { snr_ratio, sample_count, snr_sample_product };

enum class MotionState { stationary, moving };

struct WeightMethod {
  WeightRule rule = WeightRule::snr_sample_product;
  MotionState state = MotionState::stationary;
};

struct WeightPair {
  double tds = 0.0;
  double rts = 0.0;  // tds + rts = 1
};

enum class CombineTarget { mean, variance };

double sample_mean(std::span<const double> xs);

// Unbiased (n-1) estimator; requires n >= 2.
double sample_variance(std::span<const double> xs);

// Stage weights under the chosen rule. A moving source invalidates the
// stale training stage for the mean, so target == mean in the moving state
// forces (0, 1); variance weighting keeps the rule either way.
WeightPair weight_factors(const WeightMethod& method, double rho_tds,
                          double rho_rts, long n_tds, long n_rts,
                          CombineTarget target);

double combine_mean(const MeasurementSet& tds, const MeasurementSet& rts,
                    const WeightMethod& method);

// Projects the training-stage spread onto the real-time SNR,
// var * rho_tds / rho_rts (error variance scales like 1/SNR).
double rescale_tds_variance(double var_tds, double rho_tds, double rho_rts);

// Weighted fusion of the rescaled training variance with the real-time one.
double combine_variance(const MeasurementSet& tds, const MeasurementSet& rts,
                        const WeightMethod& method);

// Mass of N(0, variance) on [-delta_max, delta_max]: erf(delta_max/(sqrt(2)*sigma)).
double truncation_factor(double variance_deg2, double delta_max_deg);

// Zero-mean Gaussian error density truncated to |delta| <= delta_max and
// renormalized by k_d so it integrates to one. variance == 0 marks a point
// mass (noiseless estimate); the pdf is then undefined.
struct GaussianDoaModel {
  double mean_deg = 0.0;       // fused direction estimate
  double variance_deg2 = 0.0;  // fused error variance
  double delta_max_deg = 0.0;
  double k_d = 1.0;

  bool point_mass() const { return variance_deg2 == 0.0; }
};

// Computes k_d from (variance, delta_max); validates ranges.
GaussianDoaModel make_doa_model(double mean_deg, double variance_deg2,
                                double delta_max_deg);

// Error-window default: at least the half beamwidth (lambda/(N*d), in
// degrees), at least 4 sigma, capped at 180.
double default_delta_max(double variance_deg2, const ArrayConfig& cfg);

// Density of the error delta (degrees); zero outside the window.
double truncated_pdf(const GaussianDoaModel& model, double delta_deg);

struct GaussianityReport {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::vector<double> bin_edges;  // Freedman-Diaconis histogram
  std::vector<int> bin_counts;
  bool pass = false;
};

// Moment-based normality screen: |skewness| < skew_tol and
// |excess kurtosis| < kurt_tol. Requires at least 500 samples.
GaussianityReport gaussianity_check(std::span<const double> samples,
                                    double skew_tol = 0.3,
                                    double kurt_tol = 1.0);

// One measurement per data row: "label,snr_hat,angle_deg". label and
// snr_hat must agree across rows.
MeasurementSet read_measurements_csv(const std::string& path);
void write_measurements_csv(const MeasurementSet& set, const std::string& path);

}  // namespace haddm
