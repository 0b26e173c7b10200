#include "haddm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include "haddm/errors.hpp"

namespace haddm {

namespace {

double off_diagonal_norm(const Eigen::MatrixXcd& a) {
  double s = 0.0;
  for (Eigen::Index p = 0; p < a.rows(); ++p)
    for (Eigen::Index q = 0; q < a.cols(); ++q)
      if (p != q) s += std::norm(a(p, q));
  return std::sqrt(s);
}

}  // namespace

HermitianEig hermitian_eig(const Eigen::MatrixXcd& a, double tol,
                           int max_sweeps) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n)
    throw Error("linalg/hermitian_eig", "matrix must be square and non-empty");

  Eigen::MatrixXcd w = 0.5 * (a + a.adjoint());
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  const double scale = std::max(w.norm(), 1e-300);

  int sweep = 0;
  while (off_diagonal_norm(w) > tol * scale) {
    if (++sweep > max_sweeps)
      throw Error("linalg/hermitian_eig",
                  "no convergence after " + std::to_string(max_sweeps) +
                      " sweeps");
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const std::complex<double> apq = w(p, q);
        const double mag = std::abs(apq);
        if (mag <= tol * scale * 1e-3) continue;
        // Rotate the (p,q) plane: first a phase that makes w(p,q) real,
        // then a real Jacobi rotation that zeroes it.
        const std::complex<double> ph = apq / mag;
        const double app = w(p, p).real();
        const double aqq = w(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * mag, app - aqq);
        const double c = std::cos(theta);
        const double st = std::sin(theta);

        // J = [[c, -st], [st*conj(ph), c*conj(ph)]] on the (p,q) plane is
        // unitary and J^H w J zeroes w(p,q); phase first, then real rotation.
        Eigen::VectorXcd wp = w.col(p), wq = w.col(q);
        w.col(p) = c * wp + (st * std::conj(ph)) * wq;
        w.col(q) = -st * wp + (c * std::conj(ph)) * wq;
        Eigen::RowVectorXcd rp = w.row(p), rq = w.row(q);
        w.row(p) = c * rp + (st * ph) * rq;
        w.row(q) = -st * rp + (c * ph) * rq;
        w(p, q) = 0.0;
        w(q, p) = 0.0;

        Eigen::VectorXcd vp = v.col(p), vq = v.col(q);
        v.col(p) = c * vp + (st * std::conj(ph)) * vq;
        v.col(q) = -st * vp + (c * std::conj(ph)) * vq;
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return w(i, i).real() > w(j, j).real();
  });

  HermitianEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = w(order[i], order[i]).real();
    out.vectors.col(i) = v.col(order[i]);
  }
  out.sweeps = sweep;
  return out;
}

Eigen::MatrixXcd orthogonal_complement(const Eigen::VectorXcd& v) {
  const Eigen::Index n = v.size();
  if (n < 2)
    throw Error("linalg/orthogonal_complement", "need dimension >= 2");
  const double nv = v.norm();
  if (nv <= 0.0)
    throw Error("linalg/orthogonal_complement", "zero vector");

  Eigen::VectorXcd w = v / nv;
  // Householder u = w + rho*e1 with rho = w(0)/|w(0)| (or 1), so the
  // reflector is well conditioned; H = I - 2*u*u^H/||u||^2 sends w to
  // -rho*e1 and its trailing columns span the complement of w.
  std::complex<double> rho(1.0, 0.0);
  if (std::abs(w(0)) > 0.0) rho = w(0) / std::abs(w(0));
  Eigen::VectorXcd u = w;
  u(0) += rho;
  const double uu = u.squaredNorm();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(n, n) -
                       (2.0 / uu) * (u * u.adjoint());
  return h.rightCols(n - 1);
}

double compensated_sum(const std::vector<double>& xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace haddm
