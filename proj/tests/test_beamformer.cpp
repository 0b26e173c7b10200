#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "haddm/array.hpp"
#include "haddm/beamformer.hpp"
#include "haddm/density.hpp"
#include "haddm/errors.hpp"
#include "oracles.hpp"

using namespace haddm;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr double kDeg = M_PI / 180.0;

oracle::TruncatedGaussian radians_density(const GaussianDoaModel& m) {
  return oracle::TruncatedGaussian(m.variance_deg2 * kDeg * kDeg,
                                   m.delta_max_deg * kDeg);
}

// Quadrature of the exact expected steering element
// E[exp(j*alpha*cos(theta + delta))] under the truncated error density.
std::complex<double> exact_expected_element(double alpha, double theta_deg,
                                            const GaussianDoaModel& m) {
  const oracle::TruncatedGaussian tg = radians_density(m);
  const double th = theta_deg * kDeg;
  return oracle::integrate_complex(
      [&](double d) {
        return std::polar(1.0, alpha * std::cos(th + d)) * tg.pdf(d);
      },
      -tg.dmax(), tg.dmax(), 1e-12);
}

// Quadrature of the second-order phase expansion of the same element; the
// closed form integrates this series exactly.
std::complex<double> series_expected_element(double alpha, double theta_deg,
                                             const GaussianDoaModel& m) {
  const oracle::TruncatedGaussian tg = radians_density(m);
  const double th = theta_deg * kDeg;
  const double c = std::cos(th), s = std::sin(th);
  const std::complex<double> xi = std::polar(1.0, alpha * c);
  return oracle::integrate_complex(
      [&](double d) {
        const std::complex<double> japsi(0.0,
                                         -alpha * (d * s + d * d / 2 * c));
        return xi * (1.0 + japsi + 0.5 * japsi * japsi) * tg.pdf(d);
      },
      -tg.dmax(), tg.dmax(), 1e-12);
}

}  // namespace

TEST_CASE("error moments match quadrature of the defining integrals") {
  for (double sigma_deg : {0.5, 1.0, 3.0}) {
    for (double span : {2.0, 3.0, 4.0}) {
      const GaussianDoaModel m =
          make_doa_model(50.0, sigma_deg * sigma_deg, span * sigma_deg);
      const ChiMoments chi =
          chi_moments(m.variance_deg2, m.delta_max_deg, m.k_d);

      const oracle::TruncatedGaussian tg = radians_density(m);
      // Quadrature tolerance scaled to the moment's own magnitude so the
      // relative comparison stays meaningful for tiny spreads.
      const double s_rad = sigma_deg * kDeg;
      const double q2 = tg.moment(2, 1e-12 * s_rad * s_rad);
      const double q4 = tg.moment(4, 1e-12 * s_rad * s_rad * s_rad * s_rad);
      CHECK(chi.chi2 == doctest::Approx(q2).epsilon(1e-9));
      CHECK(chi.chi1 == doctest::Approx(q4).epsilon(1e-9));

      // Fourth moment of a bounded variable: E[d^4] <= dmax^2 * E[d^2].
      const double dmax_rad = m.delta_max_deg * kDeg;
      CHECK(chi.chi1 <= dmax_rad * dmax_rad * chi.chi2 * (1 + 1e-12));
    }
  }
}

TEST_CASE("error moments against one pinned reference") {
  // sigma = 1 deg, window 3 deg; values from an independent evaluation of
  // the closed forms in extended precision.
  const GaussianDoaModel m = make_doa_model(50.0, 1.0, 3.0);
  CHECK(m.k_d == doctest::Approx(0.9973002039367398).epsilon(1e-12));
  const ChiMoments chi = chi_moments(1.0, 3.0, m.k_d);
  CHECK(chi.chi2 == doctest::Approx(2.9649538257383337e-04).epsilon(1e-11));
  CHECK(chi.chi1 == doctest::Approx(2.486859490821633e-07).epsilon(1e-11));
}

TEST_CASE("error moments approach the untruncated limits") {
  // A 180 deg window at sigma = 1 deg truncates nothing in practice:
  // chi2 -> sigma^2, chi1 -> 3*sigma^4 (radians).
  const GaussianDoaModel m = make_doa_model(50.0, 1.0, 180.0);
  const ChiMoments chi = chi_moments(1.0, 180.0, m.k_d);
  const double s2 = kDeg * kDeg;
  CHECK(chi.chi2 == doctest::Approx(s2).epsilon(1e-10));
  CHECK(chi.chi1 == doctest::Approx(3 * s2 * s2).epsilon(1e-10));
}

TEST_CASE("point mass collapses the moments") {
  const GaussianDoaModel pm = make_doa_model(50.0, 0.0, 5.0);
  const ChiMoments chi = chi_moments(0.0, 5.0, pm.k_d);
  CHECK(chi.chi1 == 0.0);
  CHECK(chi.chi2 == 0.0);
}

TEST_CASE("expected steering element integrates its series exactly") {
  const ArrayConfig cfg = make_array(16, 4);
  const double theta = 50.0;
  const GaussianDoaModel m = make_doa_model(theta, 1.0, 3.0);

  for (int k = 1; k <= 4; ++k) {
    for (int mm = 1; mm <= 4; ++mm) {
      const RobustElementTerms t = robust_element_terms(k, mm, theta, m, cfg);
      const std::complex<double> want =
          series_expected_element(t.alpha, theta, m);
      CHECK(std::abs(t.v_hat - want) < 1e-9);

      // xi itself is the pure carrier phase.
      CHECK(std::abs(t.xi - std::polar(1.0, t.alpha * std::cos(theta * kDeg)))
            < 1e-12);
    }
  }
}

TEST_CASE("expected steering tracks the exact integrand closely") {
  // The closed form truncates the phase expansion at second order; its
  // distance to the exact expectation grows with the error spread.
  const ArrayConfig cfg = make_array(16, 4);
  const double theta = 50.0;

  for (double sigma : {1.0, 3.0}) {
    const GaussianDoaModel m =
        make_doa_model(theta, sigma * sigma, 3.0 * sigma);
    double num = 0.0, den = 0.0;
    for (int k = 1; k <= 4; ++k) {
      for (int mm = 1; mm <= 4; ++mm) {
        const RobustElementTerms t =
            robust_element_terms(k, mm, theta, m, cfg);
        const std::complex<double> exact =
            exact_expected_element(t.alpha, theta, m);
        num += std::norm(t.v_hat - exact);
        den += std::norm(exact);
      }
    }
    const double rel = std::sqrt(num / den);
    CHECK(rel < (sigma <= 1.0 ? 0.01 : 0.05));
  }
}

TEST_CASE("robust element keeps the constant modulus") {
  const ArrayConfig cfg = make_array(32, 4);
  const GaussianDoaModel m = make_doa_model(50.0, 4.0, 12.0);
  for (int k = 1; k <= 8; ++k) {
    for (int mm = 1; mm <= 4; ++mm) {
      const std::complex<double> w = robust_analog_element(k, mm, 50.0, m, cfg);
      CHECK(std::abs(w) == doctest::Approx(0.5).epsilon(1e-14));
      const RobustElementTerms t = robust_element_terms(k, mm, 50.0, m, cfg);
      CHECK(std::arg(w) == doctest::Approx(std::arg(t.v_hat)).epsilon(1e-12));
    }
  }
}

TEST_CASE("point-mass model degenerates to phase alignment") {
  const ArrayConfig cfg = make_array(16, 4);
  const GaussianDoaModel pm = make_doa_model(50.0, 0.0, 5.0);

  const MatrixXcd robust = robust_analog_matrix(50.0, pm, cfg).assemble();
  const MatrixXcd aligned = phase_aligned_analog(50.0, cfg).assemble();
  CHECK((robust - aligned).norm() < 1e-12);

  const VectorXcd exp_steer = expected_steering(50.0, pm, cfg);
  const VectorXcd plain = centered_steering(cfg, 50.0);
  CHECK((exp_steer - plain).norm() < 1e-12);
}

TEST_CASE("vanishing spread converges to the point-mass design") {
  const ArrayConfig cfg = make_array(16, 4);
  const GaussianDoaModel tiny = make_doa_model(50.0, 1e-12, 1e-3);
  const GaussianDoaModel pm = make_doa_model(50.0, 0.0, 1e-3);
  for (int k = 1; k <= 4; ++k) {
    for (int mm = 1; mm <= 4; ++mm) {
      const std::complex<double> a = robust_analog_element(k, mm, 50.0, tiny, cfg);
      const std::complex<double> b = robust_analog_element(k, mm, 50.0, pm, cfg);
      CHECK(std::abs(std::arg(a * std::conj(b))) < 1e-6);
    }
  }
}

TEST_CASE("phase-aligned analog reproduces centered steering blocks") {
  const ArrayConfig cfg = make_array(32, 4);
  const MatrixXcd v = phase_aligned_analog(70.0, cfg).assemble();
  const VectorXcd h = centered_steering(cfg, 70.0);
  // Column k carries exactly the k-th block of h.
  for (int k = 0; k < 8; ++k)
    for (int m = 0; m < 4; ++m)
      CHECK(std::abs(v(k * 4 + m, k) - h(k * 4 + m)) < 1e-13);
}

TEST_CASE("expected gain under the learned density favors the robust stage") {
  // With the digital stage fixed at 1/sqrt(K), the magnitude of the
  // expected beamforming gain |E[h]^H V 1/sqrt(K)| is maximized elementwise
  // by matching the analog phases to the expected steering phases. The
  // robust stage does exactly that, so it can never lose to plain
  // alignment, and wins strictly once the spread matters.
  const ArrayConfig cfg = make_array(32, 4);
  const double theta = 50.0;
  const GaussianDoaModel m = make_doa_model(theta, 4.0, 12.0);  // sigma 2 deg
  const VectorXcd h_bar = expected_steering(theta, m, cfg);

  const MatrixXcd v_rob = robust_analog_matrix(theta, m, cfg).assemble();
  const MatrixXcd v_ali = phase_aligned_analog(theta, cfg).assemble();
  const VectorXcd ones = VectorXcd::Constant(8, 1.0 / std::sqrt(8.0));

  const double g_rob = std::abs((h_bar.adjoint() * v_rob * ones)(0));
  const double g_ali = std::abs((h_bar.adjoint() * v_ali * ones)(0));
  CHECK(g_rob >= g_ali - 1e-12);
  CHECK(g_rob > g_ali * (1.0 + 1e-6));
}

TEST_CASE("reference transmit designs null the right receivers") {
  const ArrayConfig cfg = make_array(16, 4);
  const GaussianDoaModel md = make_doa_model(50.0, 0.0, 5.0);
  const GaussianDoaModel me = make_doa_model(70.0, 0.0, 5.0);

  const FdBeamformer fd = fd_nsp_beamformers(50.0, md, 70.0, me, cfg, 4);
  CHECK(fd.v_fd.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fd.t_fd.norm() == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(fd.t_fd.cols() == 4);

  const VectorXcd hd = expected_steering(50.0, md, cfg);
  const VectorXcd he = expected_steering(70.0, me, cfg);
  // Confidential beam avoids the eavesdropper, noise avoids the receiver.
  CHECK(std::abs(he.dot(fd.v_fd)) < 1e-9);
  CHECK((hd.adjoint() * fd.t_fd).norm() < 1e-9);
  // And neither is accidentally orthogonal to its own target.
  CHECK(std::abs(hd.dot(fd.v_fd)) > 0.1);

  CHECK_THROWS_AS(fd_nsp_beamformers(50.0, md, 70.0, me, cfg, 16), Error);
  CHECK_THROWS_AS(fd_nsp_beamformers(50.0, md, 70.0, me, cfg, 0), Error);
}

TEST_CASE("digital stages are the normalized least-squares fits") {
  const ArrayConfig cfg = make_array(16, 4);
  const GaussianDoaModel md = make_doa_model(50.0, 1.0, 4.0);
  const GaussianDoaModel me = make_doa_model(70.0, 1.0, 4.0);
  const MatrixXcd v = robust_analog_matrix(50.0, md, cfg).assemble();
  const FdBeamformer fd = fd_nsp_beamformers(50.0, md, 70.0, me, cfg, 4);

  const VectorXcd v_bb = digital_confidential(v, fd.v_fd);
  CHECK(v_bb.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // Up to scale, V^H v_fd solves min ||v_fd - V z||; check the residual
  // identity ||v_fd - V V^H v_fd||^2 = ||v_fd||^2 - ||V^H v_fd||^2 that
  // characterizes the orthogonal projection.
  const VectorXcd z = v.adjoint() * fd.v_fd;
  const double lhs = (fd.v_fd - v * z).squaredNorm();
  const double rhs = fd.v_fd.squaredNorm() - z.squaredNorm();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  const std::complex<double> corr = z.normalized().dot(v_bb);
  CHECK(std::abs(corr) == doctest::Approx(1.0).epsilon(1e-12));

  const MatrixXcd t_bb = an_projection(v, fd.t_fd);
  CHECK(t_bb.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const MatrixXcd z2 = v.adjoint() * fd.t_fd;
  CHECK((t_bb * z2.norm() - z2).norm() < 1e-10);
}

TEST_CASE("aligned transmitter keeps the artificial noise off its receiver") {
  // Point-mass models and an analog stage aligned onto the receiver: the
  // assembled V times the all-ones digital vector rebuilds the steering
  // vector itself, so the projected noise stays exactly orthogonal.
  const ArrayConfig cfg = make_array(16, 4);
  const GaussianDoaModel md = make_doa_model(50.0, 0.0, 5.0);
  const GaussianDoaModel me = make_doa_model(70.0, 0.0, 5.0);
  const MatrixXcd v = phase_aligned_analog(50.0, cfg).assemble();
  const FdBeamformer fd = fd_nsp_beamformers(50.0, md, 70.0, me, cfg, 4);

  const VectorXcd hd = centered_steering(cfg, 50.0);
  const VectorXcd ones = VectorXcd::Ones(4);
  CHECK((v * ones - hd).norm() < 1e-12);

  const MatrixXcd t_bb = an_projection(v, fd.t_fd);
  CHECK((hd.adjoint() * v * t_bb).norm() < 1e-9);
}

TEST_CASE("calibration beam concentrates the full digital gain") {
  // v_fd pointed straight at the receiver (no eavesdropper deflation)
  // yields v_bb = 1/sqrt(K) and |h^H V v_bb|^2 = K.
  const ArrayConfig cfg = make_array(16, 4);
  const MatrixXcd v = phase_aligned_analog(50.0, cfg).assemble();
  const VectorXcd hd = centered_steering(cfg, 50.0);
  const VectorXcd v_fd = hd.normalized();
  const VectorXcd v_bb = digital_confidential(v, v_fd);

  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(v_bb(k) - std::complex<double>(0.5, 0.0)) < 1e-12);
  const double gain2 = std::norm((hd.adjoint() * v * v_bb)(0));
  CHECK(gain2 == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("hybrid assembly enforces the power identities") {
  const ArrayConfig cfg = make_array(16, 4);
  const GaussianDoaModel md = make_doa_model(50.0, 1.0, 4.0);
  const GaussianDoaModel me = make_doa_model(70.0, 1.0, 4.0);
  const AnalogMatrix analog = robust_analog_matrix(50.0, md, cfg);
  const MatrixXcd v = analog.assemble();
  const FdBeamformer fd = fd_nsp_beamformers(50.0, md, 70.0, me, cfg, 4);
  const VectorXcd v_bb = digital_confidential(v, fd.v_fd);
  const MatrixXcd t_bb = an_projection(v, fd.t_fd);

  const HybridBeamformer hb = assemble_hybrid(analog, v_bb, t_bb, 0.9);
  CHECK(hb.beta == 0.9);
  CHECK((v * hb.v_bb).norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK((v * hb.t_bb).norm() == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(assemble_hybrid(analog, 2.0 * v_bb, t_bb, 0.9), Error);
  CHECK_THROWS_AS(assemble_hybrid(analog, v_bb, t_bb, 1.2), Error);
  CHECK_THROWS_AS(assemble_hybrid(analog, v_bb, t_bb, -0.1), Error);
  CHECK_NOTHROW(assemble_hybrid(analog, v_bb, t_bb, 0.0));
  CHECK_NOTHROW(assemble_hybrid(analog, v_bb, t_bb, 1.0));
}
