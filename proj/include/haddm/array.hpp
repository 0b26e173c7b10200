#pragma once

#include <Eigen/Dense>

#include "haddm/rng.hpp"

namespace haddm {

// Uniform linear array of N elements split into K contiguous subarrays of
// M elements, one RF chain per subarray. Angles are measured from the array
// axis, theta in [0, 180] degrees; spacing and wavelength share one unit.
struct ArrayConfig {
  int n_antennas = 0;    // N = K * M
  int subarray_size = 0; // M
  int n_subarrays = 0;   // K
  double spacing = 0.5;  // d, element pitch
  double wavelength = 1.0;

  // Phase advance per element index at angle theta: 2*pi*d*cos(theta)/lambda.
  double phase_step(double theta_deg) const;
};

// Validates N = K*M, M >= 1, 0 < d <= lambda/2.
ArrayConfig make_array(int n_antennas, int subarray_size, double spacing = 0.5,
                       double wavelength = 1.0);

// Block-diagonal analog combining/precoding stage. Column k holds the M
// weights of subarray k; every entry has modulus 1/sqrt(M), which makes the
// assembled N x K matrix have orthonormal columns.
struct AnalogMatrix {
  Eigen::MatrixXcd blocks;  // M x K

  int subarray_size() const { return static_cast<int>(blocks.rows()); }
  int n_subarrays() const { return static_cast<int>(blocks.cols()); }

  // Assembled N x K block-diagonal form.
  Eigen::MatrixXcd assemble() const;

  // F^H * raw for raw of shape N x L, computed blockwise. Result is K x L.
  Eigen::MatrixXcd combine(const Eigen::MatrixXcd& raw) const;
};

// Analog matrix from explicit per-subarray weights; enforces the modulus.
AnalogMatrix make_analog(const Eigen::MatrixXcd& blocks);

// All-ones phase analog stage, entries 1/sqrt(M).
AnalogMatrix zero_phase_analog(const ArrayConfig& cfg);

// Receive-side manifold, unit-modulus entries a[n] = exp(j*n*phase_step),
// n = 0..N-1, so ||a||^2 = N.
Eigen::VectorXcd receive_manifold(const ArrayConfig& cfg, double theta_deg);

// Transmit-side steering, centered phase reference and per-element modulus
// 1/sqrt(M): element (k-1)M+m (1-based) carries phase
// ((k-1)M+m - (N+1)/2) * phase_step, so ||h||^2 = K.
Eigen::VectorXcd centered_steering(const ArrayConfig& cfg, double theta_deg);

// Sum of the within-subarray phase ramp, f = sum_{m=0}^{M-1} exp(j*m*step).
std::complex<double> subarray_factor(const ArrayConfig& cfg, double theta_deg);

// Effective K-element manifold seen through the zero-phase analog stage:
// aD[k] = (1/sqrt(M)) * f(theta) * exp(j*k*M*phase_step), k = 0..K-1.
Eigen::VectorXcd effective_steering(const ArrayConfig& cfg, double theta_deg);

// One coherent block of narrowband snapshots from a single far-field source.
// raw(:,n) = a(theta0)*s(n) + w(n) with s ~ CN(0, sigma_s2) and w i.i.d.
// CN(0, sigma_n2); combined = F^H * raw for the analog stage used at
// generation time.
struct SnapshotBatch {
  Eigen::MatrixXcd raw;       // N x L
  Eigen::MatrixXcd combined;  // K x L
  int n_snapshots = 0;
  double sigma_s2 = 0.0;
  double sigma_n2 = 0.0;
};

// Draw order per snapshot is s(n) first, then the N noise entries, so a
// given stream always produces the same batch.
SnapshotBatch generate_snapshots(const ArrayConfig& cfg, double theta0_deg,
                                 double sigma_s2, double sigma_n2,
                                 int n_snapshots, RngStream& rng,
                                 const AnalogMatrix& analog);

// Same with the zero-phase analog stage.
SnapshotBatch generate_snapshots(const ArrayConfig& cfg, double theta0_deg,
                                 double sigma_s2, double sigma_n2,
                                 int n_snapshots, RngStream& rng);

// r(n) = digital^H * analog^H * raw(:,n); length-L row.
Eigen::RowVectorXcd combine_with_weights(const Eigen::MatrixXcd& raw,
                                         const AnalogMatrix& analog,
                                         const Eigen::VectorXcd& digital);

}  // namespace haddm
