#include "haddm/esprit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "haddm/errors.hpp"
#include "haddm/linalg.hpp"

namespace haddm {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

SnapshotSource monte_carlo_source(const ArrayConfig& cfg, double theta0_deg,
                                  double sigma_s2, double sigma_n2,
                                  RngStream& rng) {
  return [&rng, cfg, theta0_deg, sigma_s2, sigma_n2](
             const AnalogMatrix& analog, int n_snapshots) {
    return generate_snapshots(cfg, theta0_deg, sigma_s2, sigma_n2, n_snapshots,
                              rng, analog);
  };
}

CovarianceEstimate sample_covariance(const SnapshotBatch& batch) {
  const int l = batch.n_snapshots;
  if (l <= 0 || batch.combined.cols() != l)
    throw Error("esprit/sample_covariance", "empty snapshot batch");

  CovarianceEstimate cov;
  cov.r = (batch.combined * batch.combined.adjoint()) / static_cast<double>(l);
  cov.r = 0.5 * (cov.r + cov.r.adjoint()).eval();
  cov.snapshot_deficient = l < batch.combined.rows();

  HermitianEig eig = hermitian_eig(cov.r);
  cov.eigenvalues = eig.values;
  cov.eigenvectors = eig.vectors;
  cov.noise_floor = eig.values(eig.values.size() - 1);
  return cov;
}

SubspacePair tls_rotation(const CovarianceEstimate& cov) {
  const Eigen::Index k = cov.r.rows();
  if (k < 2)
    throw Error("esprit/tls_rotation", "need at least two subarrays");

  SubspacePair sub;
  const Eigen::VectorXcd e = cov.eigenvectors.col(0);
  sub.e1 = e.head(k - 1);
  sub.e2 = e.tail(k - 1);

  Eigen::MatrixXcd b(k - 1, 2);
  b.col(0) = sub.e1;
  b.col(1) = sub.e2;
  sub.c = b.adjoint() * b;

  HermitianEig eig = hermitian_eig(sub.c);
  sub.ec = eig.vectors;
  sub.c_eigenvalues = eig.values;

  // Total-least-squares fit E1 * psi ~= E2: psi = -Ec12 / Ec22 with the
  // right column belonging to the smaller eigenvalue.
  const std::complex<double> ec12 = sub.ec(0, 1);
  const std::complex<double> ec22 = sub.ec(1, 1);
  if (std::abs(ec22) < 1e-14)
    throw Error("esprit/tls_rotation", "degenerate invariance fit, Ec22 ~ 0");
  sub.psi = -ec12 / ec22;
  sub.lambda1 = sub.psi;
  sub.magnitude_suspect = std::abs(std::abs(sub.lambda1) - 1.0) > 0.5;
  return sub;
}

PrincipalAngle principal_angle(std::complex<double> lambda1,
                               const ArrayConfig& cfg) {
  const double denom =
      2.0 * kPi * cfg.subarray_size * cfg.spacing / cfg.wavelength;
  double c = std::arg(lambda1) / denom;
  PrincipalAngle out;
  if (c > 1.0) {
    c = 1.0;
    out.clamped = true;
  } else if (c < -1.0) {
    c = -1.0;
    out.clamped = true;
  }
  out.degrees = std::acos(c) * 180.0 / kPi;
  return out;
}

std::vector<Candidate> candidate_angles(std::complex<double> lambda1,
                                        const ArrayConfig& cfg) {
  // cos_i = (arg/(2*pi) + i) * lambda / (M*d); every integer i with
  // |cos_i| <= 1 is a physically consistent direction.
  const double base = std::arg(lambda1) / (2.0 * kPi);
  const double step =
      cfg.wavelength / (cfg.subarray_size * cfg.spacing);
  const double eps = 1e-12;
  const int i_min = static_cast<int>(std::ceil(-1.0 / step - base - eps));
  const int i_max = static_cast<int>(std::floor(1.0 / step - base + eps));

  std::vector<Candidate> out;
  for (int i = i_min; i <= i_max; ++i) {
    double c = (base + i) * step;
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    out.push_back({std::acos(c) * 180.0 / kPi, i});
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.angle_deg < b.angle_deg;
  });
  return out;
}

AnalogMatrix subarray_aligned_analog(const ArrayConfig& cfg, double theta_deg) {
  const double step = cfg.phase_step(theta_deg);
  const double w = 1.0 / std::sqrt(static_cast<double>(cfg.subarray_size));
  Eigen::MatrixXcd blocks(cfg.subarray_size, cfg.n_subarrays);
  for (int m = 1; m <= cfg.subarray_size; ++m) {
    const std::complex<double> v = std::polar(w, step * (m - 1));
    for (int k = 0; k < cfg.n_subarrays; ++k) blocks(m - 1, k) = v;
  }
  return AnalogMatrix{blocks};
}

AnalogMatrix nominal_probe_analog(const ArrayConfig& cfg,
                                  double theta_nominal_deg) {
  const double step = cfg.phase_step(theta_nominal_deg);
  const int msz = cfg.subarray_size;
  const double w = 1.0 / std::sqrt(static_cast<double>(msz));
  Eigen::MatrixXcd blocks(msz, cfg.n_subarrays);
  for (int m = 0; m < msz; ++m) {
    // Zadoff-Chu quadratic: |sum_m exp(-j*q_m)| = sqrt(M) for either parity,
    // so the steered branch gain at the nominal angle is exactly 1.
    const double q = (msz % 2 == 0) ? kPi * m * m / msz
                                    : kPi * m * (m + 1) / msz;
    const std::complex<double> v = std::polar(w, q + step * m);
    for (int k = 0; k < cfg.n_subarrays; ++k) blocks(m, k) = v;
  }
  return AnalogMatrix{blocks};
}

Eigen::VectorXcd subarray_manifold(const ArrayConfig& cfg, double theta_deg) {
  const double step = cfg.phase_step(theta_deg);
  Eigen::VectorXcd a(cfg.n_subarrays);
  for (int k = 0; k < cfg.n_subarrays; ++k)
    a(k) = std::polar(1.0, step * cfg.subarray_size * k);
  return a;
}

AnalogMatrix element_aligned_analog(const ArrayConfig& cfg, double theta_deg) {
  const double step = cfg.phase_step(theta_deg);
  const double w = 1.0 / std::sqrt(static_cast<double>(cfg.subarray_size));
  Eigen::MatrixXcd blocks(cfg.subarray_size, cfg.n_subarrays);
  for (int k = 1; k <= cfg.n_subarrays; ++k)
    for (int m = 1; m <= cfg.subarray_size; ++m)
      blocks(m - 1, k - 1) =
          std::polar(w, step * ((k - 1) * cfg.subarray_size + m));
  return AnalogMatrix{blocks};
}

double debiased_noise_floor(double raw_floor, int k, int n) {
  if (k < 1 || n <= k)
    throw Error("esprit/debiased_noise_floor",
                "need more snapshots than branches");
  const double edge = 1.0 - std::sqrt(static_cast<double>(k) / n);
  return raw_floor / (edge * edge);
}

AmbiguityResolution resolve_ambiguity(const std::vector<Candidate>& candidates,
                                      const ArrayConfig& cfg,
                                      const SnapshotSource& source,
                                      int n_ambiguity_snapshots) {
  if (candidates.empty())
    throw Error("esprit/resolve_ambiguity", "no candidates");
  if (n_ambiguity_snapshots <= 0)
    throw Error("esprit/resolve_ambiguity", "need at least one snapshot");

  AmbiguityResolution res;
  res.ranked.reserve(candidates.size());
  const double n2 = static_cast<double>(cfg.n_antennas) * cfg.n_antennas;
  for (const Candidate& cand : candidates) {
    const AnalogMatrix analog = subarray_aligned_analog(cfg, cand.angle_deg);
    const Eigen::VectorXcd digital = subarray_manifold(cfg, cand.angle_deg);
    const SnapshotBatch batch = source(analog, n_ambiguity_snapshots);
    const Eigen::RowVectorXcd r = digital.adjoint() * batch.combined;
    const double power =
        r.squaredNorm() / (n2 * static_cast<double>(n_ambiguity_snapshots));
    res.ranked.push_back({cand.angle_deg, cand.wrap_index, power});
  }
  res.selected = 0;
  for (std::size_t i = 1; i < res.ranked.size(); ++i)
    if (res.ranked[i].power > res.ranked[res.selected].power)
      res.selected = static_cast<int>(i);
  return res;
}

DoaEstimate estimate_doa(const ArrayConfig& cfg, const SnapshotBatch& batch,
                         const SnapshotSource& source,
                         int n_ambiguity_snapshots) {
  const CovarianceEstimate cov = sample_covariance(batch);
  const SubspacePair sub = tls_rotation(cov);

  DoaEstimate est;
  est.principal = principal_angle(sub.lambda1, cfg);
  const std::vector<Candidate> cands = candidate_angles(sub.lambda1, cfg);
  const AmbiguityResolution res =
      resolve_ambiguity(cands, cfg, source, n_ambiguity_snapshots);
  est.candidates = res.ranked;
  est.selected_deg = res.ranked[res.selected].angle_deg;
  est.snapshots_used =
      batch.n_snapshots +
      static_cast<int>(cands.size()) * n_ambiguity_snapshots;
  return est;
}

SnrEstimate estimate_snr(const ArrayConfig& cfg, double theta_hat_deg,
                         const SnapshotSource& source, double noise_floor,
                         int n_snapshots) {
  if (!(noise_floor > 0.0))
    throw Error("esprit/estimate_snr", "noise floor must be positive");
  if (n_snapshots <= 0)
    throw Error("esprit/estimate_snr", "need at least one snapshot");

  const AnalogMatrix analog = element_aligned_analog(cfg, theta_hat_deg);
  const SnapshotBatch batch = source(analog, n_snapshots);
  const double k_floor = cfg.n_subarrays * noise_floor;

  std::vector<double> rho(n_snapshots);
  for (int n = 0; n < n_snapshots; ++n) {
    const double energy = batch.combined.col(n).squaredNorm();
    rho[n] = (energy - k_floor) / k_floor;
  }

  SnrEstimate est;
  est.rho = compensated_sum(rho) / static_cast<double>(n_snapshots);
  est.per_antenna = est.rho / cfg.subarray_size;
  est.n_snapshots = n_snapshots;
  return est;
}

}  // namespace haddm
