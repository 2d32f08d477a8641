#pragma once

// Dense two-phase tableau simplex with Bland's rule, used as an independent
// reference for l1 minimization on tiny problems.

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace ssr::test {

// min c^T x s.t. A x = b, x >= 0. Returns the optimal value.
inline double simplex_min(Eigen::MatrixXd A, Eigen::VectorXd b, const Eigen::VectorXd& c) {
  const Eigen::Index m = A.rows(), n = A.cols();
  for (Eigen::Index i = 0; i < m; ++i)
    if (b[i] < 0) {
      A.row(i) *= -1;
      b[i] *= -1;
    }
  // Columns: n originals, m artificials, then the rhs.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.col(n + m).head(m) = b;
  Eigen::VectorXi basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = static_cast<int>(n + i);
  const double eps = 1e-11;

  auto pivot = [&](Eigen::Index r, Eigen::Index col) {
    T.row(r) /= T(r, col);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != r && T(i, col) != 0.0) T.row(i) -= T(i, col) * T.row(r);
    basis[r] = static_cast<int>(col);
  };
  auto run = [&](Eigen::Index ncols) {
    for (int guard = 0; guard < 100000; ++guard) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < ncols; ++j)
        if (T(m, j) < -eps) {
          enter = j;
          break;
        }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i)
        if (T(i, enter) > eps) {
          double ratio = T(i, n + m) / T(i, enter);
          if (leave < 0 || ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      if (leave < 0) throw std::runtime_error("simplex: unbounded");
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: cycling guard hit");
  };

  // Phase 1: minimize the artificial sum.
  T.row(m).setZero();
  for (Eigen::Index i = 0; i < m; ++i) T.row(m) -= T.row(i);
  for (Eigen::Index i = 0; i < m; ++i) T(m, n + i) = 0.0;
  run(n);
  if (-T(m, n + m) > 1e-8) throw std::runtime_error("simplex: infeasible");
  // Drive remaining artificials out of the basis where possible.
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] >= n)
      for (Eigen::Index j = 0; j < n; ++j)
        if (std::abs(T(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }

  // Phase 2 over the original columns only.
  T.row(m).setZero();
  T.row(m).head(n) = c.transpose();
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] < n) T.row(m) -= c[basis[i]] * T.row(i);
  T.block(0, n, m + 1, m).setZero();
  run(n);
  return -T(m, n + m);
}

// min ||x||_1 s.t. A x = y via the split x = u - v.
inline double l1_min(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  const Eigen::Index p = A.cols();
  Eigen::MatrixXd S(A.rows(), 2 * p);
  S << A, -A;
  return simplex_min(S, y, Eigen::VectorXd::Ones(2 * p));
}

}  // namespace ssr::test
