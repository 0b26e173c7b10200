#pragma once

#include <Eigen/Dense>
#include <complex>

#include "haddm/array.hpp"
#include "haddm/density.hpp"

namespace haddm {

// Central moments of the truncated direction-error density, in radians:
// chi2 = E[delta^2], chi1 = E[delta^4]. Inputs are in degrees (squared
// degrees for the variance); k_d must match the model window.
struct ChiMoments {
  double chi1 = 0.0;  // rad^4
  double chi2 = 0.0;  // rad^2
};

ChiMoments chi_moments(double variance_deg2, double delta_max_deg, double k_d);

// Intermediate quantities of the expected-steering element
// E[exp(j*alpha*cos(theta_hat - delta))] under the truncated error density,
// exposed so the closed forms can be checked against quadrature term by
// term. With psi = cos(theta_hat)*delta^2/2 - sin(theta_hat)*delta, a
// second-order expansion of exp(-j*alpha*psi) gives
//   v_hat = xi * (1 - (a^2/8)*chi1*cos^2 - (a^2/2)*chi2*sin^2
//                   - j*(a/2)*chi2*cos),   a = alpha.
struct RobustElementTerms {
  double alpha = 0.0;          // (2*pi*d/lambda) * ((k-1)M + m - (N+1)/2)
  std::complex<double> xi;     // exp(j*alpha*cos(theta_hat))
  ChiMoments chi;
  std::complex<double> v_hat;
};

RobustElementTerms robust_element_terms(int k, int m, double theta_hat_deg,
                                        const GaussianDoaModel& model,
                                        const ArrayConfig& cfg);

// Constant-modulus projection of the expected steering element,
// (1/sqrt(M)) * exp(j*arg(v_hat)). Indices k, m are 1-based.
std::complex<double> robust_analog_element(int k, int m, double theta_hat_deg,
                                           const GaussianDoaModel& model,
                                           const ArrayConfig& cfg);

// Per-subarray robust weights; degenerates to phase alignment for a point
// mass model.
AnalogMatrix robust_analog_matrix(double theta_hat_deg,
                                  const GaussianDoaModel& model,
                                  const ArrayConfig& cfg);

// Plain conjugate-phase alignment onto theta_hat, blocks of the centered
// steering vector.
AnalogMatrix phase_aligned_analog(double theta_hat_deg, const ArrayConfig& cfg);

// Expected steering vector under the error density (no constant-modulus
// projection); element (k-1)M+m is v_hat/sqrt(M) from robust_element_terms.
// A point mass reproduces centered_steering(theta_hat) exactly.
Eigen::VectorXcd expected_steering(double theta_hat_deg,
                                   const GaussianDoaModel& model,
                                   const ArrayConfig& cfg);

// Fully digital reference design: confidential beam is the desired expected
// steering deflated of its eavesdropper component, artificial noise lives in
// the null space of the desired steering.
struct FdBeamformer {
  Eigen::VectorXcd v_fd;   // unit norm
  Eigen::MatrixXcd t_fd;   // N x n_streams, unit Frobenius norm
};

FdBeamformer fd_nsp_beamformers(double theta_d_deg,
                                const GaussianDoaModel& model_d,
                                double theta_e_deg,
                                const GaussianDoaModel& model_e,
                                const ArrayConfig& cfg, int n_streams);

// Least-squares digital stage for the confidential beam: V^H v_fd,
// normalized to unit norm.
Eigen::VectorXcd digital_confidential(const Eigen::MatrixXcd& v_rf,
                                      const Eigen::VectorXcd& v_fd);

// Least-squares digital stage for the artificial-noise projection: V^H t_fd
// column-wise, normalized to unit Frobenius norm.
Eigen::MatrixXcd an_projection(const Eigen::MatrixXcd& v_rf,
                               const Eigen::MatrixXcd& t_fd);

// Two-stage transmitter. Power split: beta on the confidential stream,
// 1-beta on artificial noise; ||V*v_bb|| = 1 and ||V*T_bb||_F = 1 keep the
// split exact.
struct HybridBeamformer {
  AnalogMatrix analog;     // N x K blocks
  Eigen::VectorXcd v_bb;   // K
  Eigen::MatrixXcd t_bb;   // K x n_streams
  double beta = 0.9;
};

// Validates the power constraints to 1e-9 and beta in [0, 1].
HybridBeamformer assemble_hybrid(const AnalogMatrix& analog,
                                 const Eigen::VectorXcd& v_bb,
                                 const Eigen::MatrixXcd& t_bb, double beta);

}  // namespace haddm
