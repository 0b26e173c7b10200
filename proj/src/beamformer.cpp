#include "haddm/beamformer.hpp"

#include <cmath>

#include "haddm/errors.hpp"
#include "haddm/linalg.hpp"

namespace haddm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double to_radians(double deg) { return deg * kPi / 180.0; }

}  // namespace

ChiMoments chi_moments(double variance_deg2, double delta_max_deg, double k_d) {
  if (variance_deg2 < 0.0)
    throw Error("beamformer/chi_moments", "negative variance");
  if (!(delta_max_deg > 0.0))
    throw Error("beamformer/chi_moments", "window must be positive");
  if (!(k_d > 0.0) || k_d > 1.0 + 1e-12)
    throw Error("beamformer/chi_moments", "truncation factor outside (0, 1]");
  if (variance_deg2 == 0.0) return {0.0, 0.0};

  const double sigma = to_radians(std::sqrt(variance_deg2));
  const double a = to_radians(delta_max_deg);
  const double s2 = sigma * sigma;
  const double gauss = std::exp(-a * a / (2.0 * s2));
  const double erf_term = std::erf(a / (std::sqrt(2.0) * sigma));
  const double front = 2.0 / (k_d * std::sqrt(2.0 * kPi * s2));
  const double half_sqrt_2pi = 0.5 * std::sqrt(2.0 * kPi);

  ChiMoments chi;
  chi.chi2 = front * (-s2 * a * gauss + half_sqrt_2pi * s2 * sigma * erf_term);
  chi.chi1 = front * (-s2 * a * a * a * gauss - 3.0 * s2 * s2 * a * gauss +
                      3.0 * half_sqrt_2pi * s2 * s2 * sigma * erf_term);
  return chi;
}

RobustElementTerms robust_element_terms(int k, int m, double theta_hat_deg,
                                        const GaussianDoaModel& model,
                                        const ArrayConfig& cfg) {
  if (k < 1 || k > cfg.n_subarrays || m < 1 || m > cfg.subarray_size)
    throw Error("beamformer/robust_element_terms", "element index out of range");

  const int g = (k - 1) * cfg.subarray_size + m;
  const double center = 0.5 * (cfg.n_antennas + 1);
  const double theta = to_radians(theta_hat_deg);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);

  RobustElementTerms t;
  t.alpha = 2.0 * kPi * cfg.spacing / cfg.wavelength * (g - center);
  t.xi = std::polar(1.0, t.alpha * ct);
  t.chi = model.point_mass()
              ? ChiMoments{0.0, 0.0}
              : chi_moments(model.variance_deg2, model.delta_max_deg, model.k_d);

  const double a2 = t.alpha * t.alpha;
  const double re = 1.0 - 0.125 * a2 * ct * ct * t.chi.chi1 -
                    0.5 * a2 * st * st * t.chi.chi2;
  const double im = -0.5 * t.alpha * ct * t.chi.chi2;
  t.v_hat = t.xi * std::complex<double>(re, im);
  return t;
}

std::complex<double> robust_analog_element(int k, int m, double theta_hat_deg,
                                           const GaussianDoaModel& model,
                                           const ArrayConfig& cfg) {
  const RobustElementTerms t = robust_element_terms(k, m, theta_hat_deg, model, cfg);
  const double w = 1.0 / std::sqrt(static_cast<double>(cfg.subarray_size));
  return std::polar(w, std::arg(t.v_hat));
}

AnalogMatrix robust_analog_matrix(double theta_hat_deg,
                                  const GaussianDoaModel& model,
                                  const ArrayConfig& cfg) {
  if (model.point_mass()) return phase_aligned_analog(theta_hat_deg, cfg);
  Eigen::MatrixXcd blocks(cfg.subarray_size, cfg.n_subarrays);
  for (int k = 1; k <= cfg.n_subarrays; ++k)
    for (int m = 1; m <= cfg.subarray_size; ++m)
      blocks(m - 1, k - 1) =
          robust_analog_element(k, m, theta_hat_deg, model, cfg);
  return AnalogMatrix{blocks};
}

AnalogMatrix phase_aligned_analog(double theta_hat_deg, const ArrayConfig& cfg) {
  const Eigen::VectorXcd h = centered_steering(cfg, theta_hat_deg);
  Eigen::MatrixXcd blocks(cfg.subarray_size, cfg.n_subarrays);
  for (int k = 0; k < cfg.n_subarrays; ++k)
    blocks.col(k) = h.segment(k * cfg.subarray_size, cfg.subarray_size);
  return AnalogMatrix{blocks};
}

Eigen::VectorXcd expected_steering(double theta_hat_deg,
                                   const GaussianDoaModel& model,
                                   const ArrayConfig& cfg) {
  const double w = 1.0 / std::sqrt(static_cast<double>(cfg.subarray_size));
  Eigen::VectorXcd h(cfg.n_antennas);
  for (int k = 1; k <= cfg.n_subarrays; ++k)
    for (int m = 1; m <= cfg.subarray_size; ++m) {
      const RobustElementTerms t =
          robust_element_terms(k, m, theta_hat_deg, model, cfg);
      h((k - 1) * cfg.subarray_size + m - 1) = w * t.v_hat;
    }
  return h;
}

FdBeamformer fd_nsp_beamformers(double theta_d_deg,
                                const GaussianDoaModel& model_d,
                                double theta_e_deg,
                                const GaussianDoaModel& model_e,
                                const ArrayConfig& cfg, int n_streams) {
  if (n_streams < 1 || n_streams > cfg.n_antennas - 1)
    throw Error("beamformer/fd_nsp_beamformers",
                "stream count must lie in [1, N-1]");

  const Eigen::VectorXcd hd = expected_steering(theta_d_deg, model_d, cfg);
  const Eigen::VectorXcd he = expected_steering(theta_e_deg, model_e, cfg);

  // Deflate the desired steering of its eavesdropper component, then point
  // the artificial noise into the null space of the desired steering.
  const double he2 = he.squaredNorm();
  if (he2 <= 0.0)
    throw Error("beamformer/fd_nsp_beamformers", "degenerate eavesdropper steering");
  Eigen::VectorXcd v = hd - he * (he.dot(hd) / he2);
  const double vn = v.norm();
  if (vn < 1e-9 * hd.norm())
    throw Error("beamformer/fd_nsp_beamformers",
                "desired and eavesdropper steering are parallel");

  FdBeamformer fd;
  fd.v_fd = v / vn;
  const Eigen::MatrixXcd basis = orthogonal_complement(hd);
  fd.t_fd = basis.leftCols(n_streams) /
            std::sqrt(static_cast<double>(n_streams));
  return fd;
}

Eigen::VectorXcd digital_confidential(const Eigen::MatrixXcd& v_rf,
                                      const Eigen::VectorXcd& v_fd) {
  if (v_rf.rows() != v_fd.size())
    throw Error("beamformer/digital_confidential", "dimension mismatch");
  Eigen::VectorXcd x = v_rf.adjoint() * v_fd;
  const double n = x.norm();
  if (n < 1e-14)
    throw Error("beamformer/digital_confidential",
                "analog stage is orthogonal to the target beam");
  return x / n;
}

Eigen::MatrixXcd an_projection(const Eigen::MatrixXcd& v_rf,
                               const Eigen::MatrixXcd& t_fd) {
  if (v_rf.rows() != t_fd.rows())
    throw Error("beamformer/an_projection", "dimension mismatch");
  Eigen::MatrixXcd x = v_rf.adjoint() * t_fd;
  const double n = x.norm();
  if (n < 1e-14)
    throw Error("beamformer/an_projection",
                "analog stage is orthogonal to the noise subspace");
  return x / n;
}

HybridBeamformer assemble_hybrid(const AnalogMatrix& analog,
                                 const Eigen::VectorXcd& v_bb,
                                 const Eigen::MatrixXcd& t_bb, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw Error("beamformer/assemble_hybrid", "beta outside [0, 1]");
  const Eigen::MatrixXcd v = analog.assemble();
  if (v.cols() != v_bb.size() || v.cols() != t_bb.rows())
    throw Error("beamformer/assemble_hybrid", "dimension mismatch");
  if (std::abs((v * v_bb).norm() - 1.0) > 1e-9)
    throw Error("beamformer/assemble_hybrid",
                "confidential stage violates unit transmit power");
  if (std::abs((v * t_bb).norm() - 1.0) > 1e-9)
    throw Error("beamformer/assemble_hybrid",
                "noise stage violates unit transmit power");

  HybridBeamformer bf;
  bf.analog = analog;
  bf.v_bb = v_bb;
  bf.t_bb = t_bb;
  bf.beta = beta;
  return bf;
}

}  // namespace haddm
