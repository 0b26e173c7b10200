#pragma once

#include <Eigen/Dense>
#include <vector>

namespace haddm {

struct HermitianEig {
  Eigen::VectorXd values;    // descending
  Eigen::MatrixXcd vectors;  // orthonormal columns, vectors.col(i) <-> values(i)
  int sweeps = 0;
};

// Cyclic Jacobi eigendecomposition for Hermitian matrices. Iterates until
// the off-diagonal Frobenius norm drops below tol * ||A||_F or max_sweeps
// is hit (throws Error with the sweep count in the latter case). Input is
// symmetrized as (A + A^H)/2 before iterating.
HermitianEig hermitian_eig(const Eigen::MatrixXcd& a, double tol = 1e-12,
                           int max_sweeps = 100);

// Orthonormal basis of the orthogonal complement of v, as the N x (N-1)
// trailing columns of the Householder reflector that maps v/||v|| onto e1.
Eigen::MatrixXcd orthogonal_complement(const Eigen::VectorXcd& v);

// Neumaier compensated sum; keeps long reductions stable.
double compensated_sum(const std::vector<double>& xs);

}  // namespace haddm
