#include "haddm/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "haddm/errors.hpp"
#include "haddm/linalg.hpp"

namespace haddm {

namespace {

constexpr double kPi = 3.14159265358979323846;

const char* label_name(StageLabel label) {
  return label == StageLabel::tds ? "TDS" : "RTS";
}

}  // namespace

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw Error("density/sample_mean", "empty sample");
  std::vector<double> copy(xs.begin(), xs.end());
  return compensated_sum(copy) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2)
    throw Error("density/sample_variance", "need at least two samples");
  const double mean = sample_mean(xs);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - mean;
    sq[i] = d * d;
  }
  return compensated_sum(sq) / static_cast<double>(xs.size() - 1);
}

WeightPair weight_factors(const WeightMethod& method, double rho_tds,
                          double rho_rts, long n_tds, long n_rts,
                          CombineTarget target) {
  if (!(rho_tds > 0.0) || !(rho_rts > 0.0))
    throw Error("density/weight_factors", "SNR estimates must be positive");
  if (n_tds <= 0 || n_rts <= 0)
    throw Error("density/weight_factors", "sample counts must be positive");

  // A moving source makes the training-stage direction stale, so its mean
  // weight drops to zero; spreads remain informative and keep the rule.
  if (method.state == MotionState::moving && target == CombineTarget::mean)
    return {0.0, 1.0};

  double a1 = 0.0;
  switch (method.rule) {
    case WeightRule::snr_ratio:
      a1 = rho_tds / (rho_tds + rho_rts);
      break;
    case WeightRule::sample_count:
      a1 = static_cast<double>(n_tds) / static_cast<double>(n_tds + n_rts);
      break;
    case WeightRule::snr_sample_product:
      a1 = rho_tds * n_tds / (rho_tds * n_tds + rho_rts * n_rts);
      break;
  }
  return {a1, 1.0 - a1};
}

double combine_mean(const MeasurementSet& tds, const MeasurementSet& rts,
                    const WeightMethod& method) {
  const WeightPair w = weight_factors(
      method, tds.snr_hat, rts.snr_hat, static_cast<long>(tds.angles_deg.size()),
      static_cast<long>(rts.angles_deg.size()), CombineTarget::mean);
  return w.tds * sample_mean(tds.angles_deg) +
         w.rts * sample_mean(rts.angles_deg);
}

double rescale_tds_variance(double var_tds, double rho_tds, double rho_rts) {
  if (var_tds < 0.0)
    throw Error("density/rescale_tds_variance", "negative variance");
  if (!(rho_tds > 0.0) || !(rho_rts > 0.0))
    throw Error("density/rescale_tds_variance", "SNR estimates must be positive");
  return var_tds * rho_tds / rho_rts;
}

double combine_variance(const MeasurementSet& tds, const MeasurementSet& rts,
                        const WeightMethod& method) {
  const WeightPair w = weight_factors(
      method, tds.snr_hat, rts.snr_hat, static_cast<long>(tds.angles_deg.size()),
      static_cast<long>(rts.angles_deg.size()), CombineTarget::variance);
  const double var_tds = rescale_tds_variance(sample_variance(tds.angles_deg),
                                              tds.snr_hat, rts.snr_hat);
  return w.tds * var_tds + w.rts * sample_variance(rts.angles_deg);
}

double truncation_factor(double variance_deg2, double delta_max_deg) {
  if (variance_deg2 < 0.0)
    throw Error("density/truncation_factor", "negative variance");
  if (!(delta_max_deg > 0.0))
    throw Error("density/truncation_factor", "window must be positive");
  if (variance_deg2 == 0.0) return 1.0;
  return std::erf(delta_max_deg / (std::sqrt(2.0 * variance_deg2)));
}

GaussianDoaModel make_doa_model(double mean_deg, double variance_deg2,
                                double delta_max_deg) {
  if (!(mean_deg >= 0.0 && mean_deg <= 180.0))
    throw Error("density/make_doa_model", "mean outside [0, 180] degrees");
  if (variance_deg2 < 0.0)
    throw Error("density/make_doa_model", "negative variance");
  if (!(delta_max_deg > 0.0) || delta_max_deg > 180.0)
    throw Error("density/make_doa_model", "window must lie in (0, 180]");

  GaussianDoaModel model;
  model.mean_deg = mean_deg;
  model.variance_deg2 = variance_deg2;
  model.delta_max_deg = delta_max_deg;
  model.k_d = truncation_factor(variance_deg2, delta_max_deg);
  return model;
}

double default_delta_max(double variance_deg2, const ArrayConfig& cfg) {
  const double beamwidth_deg =
      (cfg.wavelength / (cfg.n_antennas * cfg.spacing)) * 180.0 / kPi;
  const double four_sigma = 4.0 * std::sqrt(std::max(variance_deg2, 0.0));
  return std::min(180.0, std::max(four_sigma, beamwidth_deg));
}

double truncated_pdf(const GaussianDoaModel& model, double delta_deg) {
  if (model.point_mass())
    throw Error("density/truncated_pdf", "point-mass model has no density");
  if (std::abs(delta_deg) > model.delta_max_deg) return 0.0;
  const double s2 = model.variance_deg2;
  return std::exp(-delta_deg * delta_deg / (2.0 * s2)) /
         (model.k_d * std::sqrt(2.0 * kPi * s2));
}

GaussianityReport gaussianity_check(std::span<const double> samples,
                                    double skew_tol, double kurt_tol) {
  const std::size_t n = samples.size();
  if (n < 500)
    throw Error("density/gaussianity_check", "need at least 500 samples");

  const double mean = sample_mean(samples);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (m2 <= 0.0)
    throw Error("density/gaussianity_check", "degenerate sample, zero spread");

  GaussianityReport rep;
  rep.skewness = m3 / std::pow(m2, 1.5);
  rep.excess_kurtosis = m4 / (m2 * m2) - 3.0;

  // Freedman-Diaconis bin width from the interquartile range.
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double p) {
    const double idx = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double lo = sorted.front(), hi = sorted.back();
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  if (!(width > 0.0)) width = (hi - lo > 0.0 ? hi - lo : 1.0);
  int bins = static_cast<int>(std::ceil((hi - lo) / width));
  bins = std::clamp(bins, 1, 1 << 16);

  rep.bin_edges.resize(bins + 1);
  rep.bin_counts.assign(bins, 0);
  for (int b = 0; b <= bins; ++b)
    rep.bin_edges[b] = lo + (hi - lo) * static_cast<double>(b) / bins;
  for (double x : samples) {
    int b = (hi > lo)
                ? static_cast<int>((x - lo) / (hi - lo) * bins)
                : 0;
    b = std::clamp(b, 0, bins - 1);
    ++rep.bin_counts[b];
  }

  rep.pass = std::abs(rep.skewness) < skew_tol &&
             std::abs(rep.excess_kurtosis) < kurt_tol;
  return rep;
}

void write_measurements_csv(const MeasurementSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("density/write_measurements_csv", "cannot open " + path);
  out << "label,snr_hat,angle_deg\r\n";
  char buf[64];
  for (double a : set.angles_deg) {
    std::snprintf(buf, sizeof(buf), "%.17g", set.snr_hat);
    out << label_name(set.label) << ',' << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", a);
    out << buf << "\r\n";
  }
  if (!out) throw Error("density/write_measurements_csv", "write failed");
}

MeasurementSet read_measurements_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("density/read_measurements_csv", "cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw Error("density/read_measurements_csv", "empty file");
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
    line.pop_back();
  if (line != "label,snr_hat,angle_deg")
    throw Error("density/read_measurements_csv", "unexpected header: " + line);

  MeasurementSet set;
  bool first = true;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string label, snr, angle;
    if (!std::getline(ss, label, ',') || !std::getline(ss, snr, ',') ||
        !std::getline(ss, angle))
      throw Error("density/read_measurements_csv",
                  "malformed row " + std::to_string(row));
    StageLabel parsed;
    if (label == "TDS")
      parsed = StageLabel::tds;
    else if (label == "RTS")
      parsed = StageLabel::rts;
    else
      throw Error("density/read_measurements_csv",
                  "unknown label '" + label + "' in row " + std::to_string(row));
    const double snr_val = std::stod(snr);
    if (first) {
      set.label = parsed;
      set.snr_hat = snr_val;
      first = false;
    } else if (parsed != set.label || snr_val != set.snr_hat) {
      throw Error("density/read_measurements_csv",
                  "inconsistent label or snr_hat in row " + std::to_string(row));
    }
    set.angles_deg.push_back(std::stod(angle));
  }
  if (set.angles_deg.empty())
    throw Error("density/read_measurements_csv", "no measurements in " + path);
  return set;
}

}  // namespace haddm
