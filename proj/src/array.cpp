#include "haddm/array.hpp"

#include <cmath>
#include <string>

#include "haddm/errors.hpp"

namespace haddm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double to_radians(double deg) { return deg * kPi / 180.0; }

void check_angle(double theta_deg, const char* where) {
  if (!(theta_deg >= 0.0 && theta_deg <= 180.0))
    throw Error(where, "angle " + std::to_string(theta_deg) +
                           " outside [0, 180] degrees");
}

}  // namespace

double ArrayConfig::phase_step(double theta_deg) const {
  check_angle(theta_deg, "array/phase_step");
  return 2.0 * kPi * spacing * std::cos(to_radians(theta_deg)) / wavelength;
}

ArrayConfig make_array(int n_antennas, int subarray_size, double spacing,
                       double wavelength) {
  if (n_antennas <= 0 || subarray_size <= 0)
    throw Error("array/make_array", "antenna and subarray counts must be positive");
  if (n_antennas % subarray_size != 0)
    throw Error("array/make_array",
                "N not divisible by M: " + std::to_string(n_antennas) + " / " +
                    std::to_string(subarray_size));
  if (!(wavelength > 0.0))
    throw Error("array/make_array", "wavelength must be positive");
  if (!(spacing > 0.0) || spacing > 0.5 * wavelength + 1e-15)
    throw Error("array/make_array",
                "spacing must satisfy 0 < d <= lambda/2 (no grating lobes)");
  ArrayConfig cfg;
  cfg.n_antennas = n_antennas;
  cfg.subarray_size = subarray_size;
  cfg.n_subarrays = n_antennas / subarray_size;
  cfg.spacing = spacing;
  cfg.wavelength = wavelength;
  return cfg;
}

Eigen::MatrixXcd AnalogMatrix::assemble() const {
  const int m = subarray_size();
  const int k = n_subarrays();
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(m * k, k);
  for (int j = 0; j < k; ++j) f.block(j * m, j, m, 1) = blocks.col(j);
  return f;
}

Eigen::MatrixXcd AnalogMatrix::combine(const Eigen::MatrixXcd& raw) const {
  const int m = subarray_size();
  const int k = n_subarrays();
  if (raw.rows() != m * k)
    throw Error("array/combine", "raw snapshot height does not match N");
  Eigen::MatrixXcd out(k, raw.cols());
  for (int j = 0; j < k; ++j)
    out.row(j) = blocks.col(j).adjoint() * raw.middleRows(j * m, m);
  return out;
}

AnalogMatrix make_analog(const Eigen::MatrixXcd& blocks) {
  if (blocks.rows() == 0 || blocks.cols() == 0)
    throw Error("array/make_analog", "empty weight blocks");
  const double want = 1.0 / std::sqrt(static_cast<double>(blocks.rows()));
  for (Eigen::Index i = 0; i < blocks.rows(); ++i)
    for (Eigen::Index j = 0; j < blocks.cols(); ++j)
      if (std::abs(std::abs(blocks(i, j)) - want) > 1e-9)
        throw Error("array/make_analog",
                    "analog weight modulus must be 1/sqrt(M)");
  return AnalogMatrix{blocks};
}

AnalogMatrix zero_phase_analog(const ArrayConfig& cfg) {
  const double w = 1.0 / std::sqrt(static_cast<double>(cfg.subarray_size));
  return AnalogMatrix{Eigen::MatrixXcd::Constant(cfg.subarray_size,
                                                 cfg.n_subarrays, w)};
}

Eigen::VectorXcd receive_manifold(const ArrayConfig& cfg, double theta_deg) {
  check_angle(theta_deg, "array/receive_manifold");
  const double step = cfg.phase_step(theta_deg);
  Eigen::VectorXcd a(cfg.n_antennas);
  for (int n = 0; n < cfg.n_antennas; ++n)
    a(n) = std::polar(1.0, step * n);
  return a;
}

Eigen::VectorXcd centered_steering(const ArrayConfig& cfg, double theta_deg) {
  check_angle(theta_deg, "array/centered_steering");
  const double step = cfg.phase_step(theta_deg);
  const double center = 0.5 * (cfg.n_antennas + 1);
  const double w = 1.0 / std::sqrt(static_cast<double>(cfg.subarray_size));
  Eigen::VectorXcd h(cfg.n_antennas);
  for (int g = 1; g <= cfg.n_antennas; ++g)
    h(g - 1) = std::polar(w, (g - center) * step);
  return h;
}

std::complex<double> subarray_factor(const ArrayConfig& cfg, double theta_deg) {
  const double step = cfg.phase_step(theta_deg);
  std::complex<double> f = 0.0;
  for (int m = 0; m < cfg.subarray_size; ++m) f += std::polar(1.0, step * m);
  return f;
}

Eigen::VectorXcd effective_steering(const ArrayConfig& cfg, double theta_deg) {
  const double step = cfg.phase_step(theta_deg);
  const std::complex<double> f =
      subarray_factor(cfg, theta_deg) /
      std::sqrt(static_cast<double>(cfg.subarray_size));
  Eigen::VectorXcd a(cfg.n_subarrays);
  for (int k = 0; k < cfg.n_subarrays; ++k)
    a(k) = f * std::polar(1.0, step * cfg.subarray_size * k);
  return a;
}

SnapshotBatch generate_snapshots(const ArrayConfig& cfg, double theta0_deg,
                                 double sigma_s2, double sigma_n2,
                                 int n_snapshots, RngStream& rng,
                                 const AnalogMatrix& analog) {
  if (n_snapshots <= 0)
    throw Error("array/generate_snapshots", "need at least one snapshot");
  if (sigma_s2 < 0.0 || sigma_n2 < 0.0)
    throw Error("array/generate_snapshots", "negative variance");
  if (analog.subarray_size() != cfg.subarray_size ||
      analog.n_subarrays() != cfg.n_subarrays)
    throw Error("array/generate_snapshots", "analog stage does not match array");

  const Eigen::VectorXcd a = receive_manifold(cfg, theta0_deg);
  SnapshotBatch batch;
  batch.raw.resize(cfg.n_antennas, n_snapshots);
  batch.n_snapshots = n_snapshots;
  batch.sigma_s2 = sigma_s2;
  batch.sigma_n2 = sigma_n2;
  for (int n = 0; n < n_snapshots; ++n) {
    const std::complex<double> s = rng.cgaussian(sigma_s2);
    batch.raw.col(n) = a * s;
    if (sigma_n2 > 0.0)
      for (int i = 0; i < cfg.n_antennas; ++i)
        batch.raw(i, n) += rng.cgaussian(sigma_n2);
  }
  batch.combined = analog.combine(batch.raw);
  return batch;
}

SnapshotBatch generate_snapshots(const ArrayConfig& cfg, double theta0_deg,
                                 double sigma_s2, double sigma_n2,
                                 int n_snapshots, RngStream& rng) {
  return generate_snapshots(cfg, theta0_deg, sigma_s2, sigma_n2, n_snapshots,
                            rng, zero_phase_analog(cfg));
}

Eigen::RowVectorXcd combine_with_weights(const Eigen::MatrixXcd& raw,
                                         const AnalogMatrix& analog,
                                         const Eigen::VectorXcd& digital) {
  if (digital.size() != analog.n_subarrays())
    throw Error("array/combine_with_weights",
                "digital weight length does not match subarray count");
  return digital.adjoint() * analog.combine(raw);
}

}  // namespace haddm
