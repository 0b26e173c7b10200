#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "haddm/array.hpp"

namespace haddm {

struct CovarianceEstimate {
  Eigen::MatrixXcd r;          // K x K, (1/L) * Y * Y^H, Hermitian
  Eigen::VectorXd eigenvalues; // descending
  Eigen::MatrixXcd eigenvectors;
  double noise_floor = 0.0;    // smallest eigenvalue
  bool snapshot_deficient = false;  // L < K
};

// Rotational-invariance fit between the leading and trailing K-1 entries of
// the principal covariance eigenvector. For one source the invariance
// operator collapses to the scalar lambda1 with arg(lambda1) equal to the
// inter-subarray phase advance M*phase_step(theta0), modulo 2*pi.
struct SubspacePair {
  Eigen::VectorXcd e1, e2;     // leading / trailing K-1 rows
  Eigen::Matrix2cd c;          // [E1 E2]^H [E1 E2]
  Eigen::Matrix2cd ec;         // eigenvectors of c, descending eigenvalues
  Eigen::Vector2d c_eigenvalues;
  std::complex<double> psi;    // -Ec(0,1) / Ec(1,1)
  std::complex<double> lambda1;
  bool magnitude_suspect = false;  // | |lambda1| - 1 | > 0.5
};

struct PrincipalAngle {
  double degrees = 0.0;
  bool clamped = false;  // arccos argument fell outside [-1, 1]
};

struct Candidate {
  double angle_deg = 0.0;
  int wrap_index = 0;  // the 2*pi*i branch that produced this angle
};

struct RankedCandidate {
  double angle_deg = 0.0;
  int wrap_index = 0;
  double power = 0.0;  // (1/(L*N^2)) * sum |r(n)|^2 under the matched weights
};

struct DoaEstimate {
  PrincipalAngle principal;
  std::vector<RankedCandidate> candidates;
  double selected_deg = 0.0;
  int snapshots_used = 0;
};

struct SnrEstimate {
  double rho = 0.0;          // post-combining estimate, E[rho] = M*sigma_s2/sigma_n2
  double per_antenna = 0.0;  // rho / M
  int n_snapshots = 0;
};

// Produces a fresh batch for a requested analog configuration; stands in
// for re-steering the hardware and re-collecting snapshots.
using SnapshotSource =
    std::function<SnapshotBatch(const AnalogMatrix&, int n_snapshots)>;

// Source that draws from one far-field emitter; consumes rng sequentially,
// so a given stream yields one reproducible sequence of batches.
SnapshotSource monte_carlo_source(const ArrayConfig& cfg, double theta0_deg,
                                  double sigma_s2, double sigma_n2,
                                  RngStream& rng);

CovarianceEstimate sample_covariance(const SnapshotBatch& batch);

SubspacePair tls_rotation(const CovarianceEstimate& cov);

// theta = arccos(lambda * arg(lambda1) / (2*pi*M*d)), in degrees.
PrincipalAngle principal_angle(std::complex<double> lambda1,
                               const ArrayConfig& cfg);

// All angles consistent with arg(lambda1) up to whole 2*pi wraps of the
// inter-subarray phase: cos_i = lambda*(arg + 2*pi*i)/(2*pi*M*d), |cos_i|<=1.
// Sorted ascending by angle; count is M or M+1 at half-wavelength pitch.
std::vector<Candidate> candidate_angles(std::complex<double> lambda1,
                                        const ArrayConfig& cfg);

// Within-subarray alignment onto theta: every subarray gets the local ramp
// (1/sqrt(M)) * exp(j*(m-1)*phase_step), m = 1..M.
AnalogMatrix subarray_aligned_analog(const ArrayConfig& cfg, double theta_deg);

// Measurement-campaign stage: a Zadoff-Chu ramp steered onto the nominal
// direction, identical in every subarray. Branch gain is exactly 1 at the
// nominal angle for any M, and the quadratic phase keeps the response free
// of nulls near it, unlike a plain aligned stage whose gain collapses a
// fraction of a beamwidth away. Shared blocks preserve the inter-subarray
// rotation the estimator needs.
AnalogMatrix nominal_probe_analog(const ArrayConfig& cfg,
                                  double theta_nominal_deg);

// Inter-subarray ramp a_K[k] = exp(j*k*M*phase_step), k = 0..K-1; the
// matched digital weights for a subarray-aligned analog stage.
Eigen::VectorXcd subarray_manifold(const ArrayConfig& cfg, double theta_deg);

// Global-index alignment, subarray k gets (1/sqrt(M))*exp(j*((k-1)M+m)*step);
// used by the SNR estimator.
AnalogMatrix element_aligned_analog(const ArrayConfig& cfg, double theta_deg);

// Corrects the smallest-eigenvalue noise floor of a k-branch covariance
// estimated from n snapshots: at finite n the smallest eigenvalue of a
// white-noise covariance concentrates near sigma^2 * (1 - sqrt(k/n))^2, so
// the raw floor reads low and inflates SNR estimates at low SNR.
double debiased_noise_floor(double raw_floor, int k, int n);

struct AmbiguityResolution {
  std::vector<RankedCandidate> ranked;  // input order (ascending angle)
  int selected = 0;                     // index of the largest power
};

// Steers analog + digital weights onto each candidate, collects a fresh
// batch per candidate, and ranks candidates by received power. Power is
// invariant to scaling all snapshots by c > 0 up to the common factor c^2,
// so the argmax is scale-free.
AmbiguityResolution resolve_ambiguity(const std::vector<Candidate>& candidates,
                                      const ArrayConfig& cfg,
                                      const SnapshotSource& source,
                                      int n_ambiguity_snapshots);

// Full chain: covariance, rotation fit, candidate enumeration, ambiguity
// resolution by received power.
DoaEstimate estimate_doa(const ArrayConfig& cfg, const SnapshotBatch& batch,
                         const SnapshotSource& source,
                         int n_ambiguity_snapshots);

// Aligns each subarray onto theta_hat and averages the per-snapshot branch
// energy: rho(n) = (||y(n)||^2 - K*noise_floor) / (K*noise_floor).
// noise_floor must be positive (typically CovarianceEstimate::noise_floor).
SnrEstimate estimate_snr(const ArrayConfig& cfg, double theta_hat_deg,
                         const SnapshotSource& source, double noise_floor,
                         int n_snapshots);

}  // namespace haddm
