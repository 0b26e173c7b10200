#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "haddm/array.hpp"
#include "haddm/errors.hpp"
#include "haddm/rng.hpp"

using namespace haddm;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

TEST_CASE("array validation") {
  const ArrayConfig cfg = make_array(32, 4);
  CHECK(cfg.n_subarrays == 8);
  CHECK(cfg.spacing == 0.5);
  CHECK(cfg.wavelength == 1.0);

  CHECK_THROWS_AS(make_array(32, 5), Error);       // 5 does not divide 32
  CHECK_THROWS_AS(make_array(0, 1), Error);
  CHECK_THROWS_AS(make_array(8, 2, 0.6), Error);   // d > lambda/2
  CHECK_THROWS_AS(make_array(8, 2, 0.0), Error);
  CHECK_NOTHROW(make_array(8, 8));                 // single subarray
  CHECK_NOTHROW(make_array(8, 1));                 // fully digital
}

TEST_CASE("phase step endpoints and sign") {
  const ArrayConfig cfg = make_array(16, 4);
  CHECK(cfg.phase_step(90.0) == doctest::Approx(0.0));
  CHECK(cfg.phase_step(0.0) == doctest::Approx(M_PI));
  CHECK(cfg.phase_step(180.0) == doctest::Approx(-M_PI));
  CHECK(cfg.phase_step(60.0) == doctest::Approx(M_PI * 0.5));
}

TEST_CASE("receive manifold norm and structure") {
  const ArrayConfig cfg = make_array(32, 4);
  for (double th : {5.0, 50.0, 90.0, 131.0, 175.0}) {
    const VectorXcd a = receive_manifold(cfg, th);
    REQUIRE(a.size() == 32);
    CHECK(a.squaredNorm() == doctest::Approx(32.0).epsilon(1e-12));
    CHECK(std::abs(a(0) - std::complex<double>(1.0, 0.0)) < 1e-14);
    const double step = cfg.phase_step(th);
    for (int n = 0; n < 32; ++n)
      CHECK(std::abs(a(n) - std::polar(1.0, n * step)) < 1e-12);
  }
}

TEST_CASE("manifold conjugate symmetry about broadside") {
  const ArrayConfig cfg = make_array(32, 8);
  const VectorXcd lhs = receive_manifold(cfg, 60.0);
  const VectorXcd rhs = receive_manifold(cfg, 120.0);
  CHECK((lhs - rhs.conjugate()).norm() < 1e-12);
}

TEST_CASE("centered transmit steering norm and phase center") {
  const ArrayConfig cfg = make_array(16, 4);
  for (double th : {10.0, 50.0, 70.0, 90.0}) {
    const VectorXcd h = centered_steering(cfg, th);
    REQUIRE(h.size() == 16);
    // ||h||^2 = N / M = K
    CHECK(h.squaredNorm() == doctest::Approx(4.0).epsilon(1e-12));
    for (int i = 0; i < 16; ++i)
      CHECK(std::abs(h(i)) == doctest::Approx(0.5).epsilon(1e-12));
    // Phases are antisymmetric about the array center.
    const double step = cfg.phase_step(th);
    const double want0 = (1.0 - (16.0 + 1.0) / 2.0) * step;  // element 1
    CHECK(std::arg(h(0) * std::polar(1.0, -want0)) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(h(0) - std::conj(h(15))) < 1e-12);
  }
}

TEST_CASE("analog stage modulus and orthonormal columns") {
  const ArrayConfig cfg = make_array(32, 4);
  const AnalogMatrix f = zero_phase_analog(cfg);
  REQUIRE(f.subarray_size() == 4);
  REQUIRE(f.n_subarrays() == 8);
  for (int m = 0; m < 4; ++m)
    for (int k = 0; k < 8; ++k)
      CHECK(std::abs(f.blocks(m, k)) == doctest::Approx(0.5).epsilon(1e-14));

  const MatrixXcd big = f.assemble();
  REQUIRE(big.rows() == 32);
  REQUIRE(big.cols() == 8);
  CHECK((big.adjoint() * big - MatrixXcd::Identity(8, 8)).norm() < 1e-12);

  // Wrong modulus is rejected.
  MatrixXcd bad = f.blocks;
  bad(0, 0) *= 2.0;
  CHECK_THROWS_AS(make_analog(bad), Error);
}

TEST_CASE("blockwise combine equals assembled adjoint product") {
  const ArrayConfig cfg = make_array(16, 4);
  RngStream rng(7);
  MatrixXcd raw(16, 5);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 5; ++j) raw(i, j) = rng.cgaussian(1.0);

  MatrixXcd blocks(4, 4);
  for (int m = 0; m < 4; ++m)
    for (int k = 0; k < 4; ++k)
      blocks(m, k) = std::polar(0.5, rng.uniform() * 2 * M_PI);
  const AnalogMatrix f = make_analog(blocks);
  CHECK((f.combine(raw) - f.assemble().adjoint() * raw).norm() < 1e-12);
}

TEST_CASE("subarray factor nulls") {
  // With M = 4 at half-wavelength pitch the within-subarray sum vanishes
  // where cos(theta) = +-1/2: sum of four unit phasors a quarter turn apart.
  const ArrayConfig cfg = make_array(32, 4);
  CHECK(std::abs(subarray_factor(cfg, 60.0)) < 1e-12);
  CHECK(std::abs(subarray_factor(cfg, 120.0)) < 1e-12);
  CHECK(std::abs(subarray_factor(cfg, 90.0)) == doctest::Approx(4.0));

  const ArrayConfig cfg8 = make_array(32, 8);
  CHECK(std::abs(subarray_factor(cfg8, 60.0)) < 1e-12);

  const ArrayConfig cfg2 = make_array(32, 2);
  CHECK(std::abs(subarray_factor(cfg2, 60.0)) > 0.5);
}

TEST_CASE("effective steering matches manifold through the analog stage") {
  const ArrayConfig cfg = make_array(32, 4);
  for (double th : {35.0, 50.0, 90.0}) {
    const VectorXcd direct =
        zero_phase_analog(cfg).assemble().adjoint() * receive_manifold(cfg, th);
    const VectorXcd eff = effective_steering(cfg, th);
    CHECK((direct - eff).norm() < 1e-12);
  }
}

TEST_CASE("noiseless snapshots reproduce the scaled manifold") {
  const ArrayConfig cfg = make_array(16, 4);
  RngStream rng(123);
  const SnapshotBatch b = generate_snapshots(cfg, 50.0, 2.0, 0.0, 8, rng);
  REQUIRE(b.raw.cols() == 8);
  REQUIRE(b.combined.rows() == 4);
  const VectorXcd a = receive_manifold(cfg, 50.0);
  for (int n = 0; n < 8; ++n) {
    const std::complex<double> s = b.raw(0, n);  // a(0) = 1, so raw(0,n) = s(n)
    CHECK((b.raw.col(n) - a * s).norm() < 1e-12);
  }
  CHECK((b.combined -
         zero_phase_analog(cfg).assemble().adjoint() * b.raw).norm() < 1e-12);
}

TEST_CASE("snapshot generation is deterministic in the stream") {
  const ArrayConfig cfg = make_array(16, 4);
  RngStream r1(555), r2(555);
  const SnapshotBatch b1 = generate_snapshots(cfg, 40.0, 1.0, 0.5, 16, r1);
  const SnapshotBatch b2 = generate_snapshots(cfg, 40.0, 1.0, 0.5, 16, r2);
  CHECK((b1.raw - b2.raw).norm() == 0.0);

  RngStream r3(556);
  const SnapshotBatch b3 = generate_snapshots(cfg, 40.0, 1.0, 0.5, 16, r3);
  CHECK((b1.raw - b3.raw).norm() > 1e-6);
}

TEST_CASE("snapshot noise power is calibrated") {
  const ArrayConfig cfg = make_array(16, 4);
  RngStream rng(2024);
  const SnapshotBatch b = generate_snapshots(cfg, 60.0, 0.0, 3.0, 4096, rng);
  const double pw = b.raw.squaredNorm() / (16.0 * 4096.0);
  CHECK(pw == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("matched combining concentrates the full array gain") {
  // Analog aligned per subarray and digital matched to the inter-subarray
  // ramp recover |r| = sqrt(M*K)*|s| from a noiseless snapshot.
  const ArrayConfig cfg = make_array(32, 4);
  const double th = 50.0, step = cfg.phase_step(th);
  RngStream rng(9);
  const SnapshotBatch b = generate_snapshots(cfg, th, 1.0, 0.0, 4, rng);

  MatrixXcd blocks(4, 8);
  for (int k = 0; k < 8; ++k)
    for (int m = 0; m < 4; ++m)
      blocks(m, k) = std::polar(0.5, (k * 4 + m) * step);
  VectorXcd digital(8);
  for (int k = 0; k < 8; ++k) digital(k) = 1.0 / std::sqrt(8.0);

  const Eigen::RowVectorXcd r =
      combine_with_weights(b.raw, make_analog(blocks), digital);
  for (int n = 0; n < 4; ++n) {
    const double want = std::sqrt(32.0) * std::abs(b.raw(0, n));
    CHECK(std::abs(r(n)) == doctest::Approx(want).epsilon(1e-10));
  }
}
