#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "ssr/errors.hpp"
#include "ssr/simd.hpp"
#include "ssr/solvers.hpp"

namespace ssr {

Eigen::MatrixXd real_moment_rows(const HarmonicBasis& basis, const std::vector<SpherePoint>& pts) {
  const int N = basis.degree();
  const Eigen::Index P = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd A(num_harmonics(N), P);
  Eigen::VectorXcd v(basis.size());
  for (Eigen::Index j = 0; j < P; ++j) {
    basis.eval(pts[j], v.data());
    int r = 0;
    for (int l = 0; l <= N; ++l) {
      // conj(Y): real part, and minus the imaginary part
      A(r++, j) = v[harmonic_index(l, 0)].real();
      for (int m = 1; m <= l; ++m) {
        A(r++, j) = v[harmonic_index(l, m)].real();
        A(r++, j) = -v[harmonic_index(l, m)].imag();
      }
    }
  }
  return A;
}

Eigen::VectorXd real_moment_data(const MomentVector& y) {
  Eigen::VectorXd b(num_harmonics(y.N));
  int r = 0;
  for (int l = 0; l <= y.N; ++l) {
    b[r++] = y(l, 0).real();
    for (int m = 1; m <= l; ++m) {
      b[r++] = y(l, m).real();
      b[r++] = y(l, m).imag();
    }
  }
  return b;
}

namespace {

class RowSpaceSolver {
 public:
  // Factor A A^T + shift I.
  RowSpaceSolver(const Eigen::MatrixXd& A, double shift) {
    Eigen::MatrixXd G = A * A.transpose();
    G.diagonal().array() += shift;
    llt_.compute(G);
    if (llt_.info() != Eigen::Success) throw RankError("basis pursuit: A A^T is not positive definite");
    if (shift == 0.0) {
      Eigen::VectorXd d = llt_.matrixLLT().diagonal();
      if (d.minCoeff() <= 1e-10 * d.maxCoeff()) throw RankError("basis pursuit: A is row-rank deficient");
    }
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// min 1^T (u + v) s.t. A (u - v) = y, u, v >= 0 by Mehrotra predictor-corrector.
// The normal matrix is A (D_u + D_v) A^T, so each step factors a rows x rows system.
BasisPursuitResult basis_pursuit_ipm(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const SolverOptions& opts) {
  const Eigen::Index m = A.rows(), p = A.cols(), n = 2 * p;
  const double ynorm = y.norm();
  const double cnorm = std::sqrt(double(n));
  auto Amul = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * (x.head(p) - x.tail(p)); };
  auto Atmul = [&](const Eigen::VectorXd& l) -> Eigen::VectorXd {
    Eigen::VectorXd a = A.transpose() * l, out(n);
    out << a, -a;
    return out;
  };

  // Mehrotra's starting point around the least-norm split; here A~ c = 0 so lambda starts at 0.
  Eigen::LLT<Eigen::MatrixXd> llt0(A * A.transpose());
  if (llt0.info() != Eigen::Success) throw RankError("basis pursuit: A A^T is not positive definite");
  Eigen::VectorXd c0 = 0.5 * (A.transpose() * llt0.solve(y));
  Eigen::VectorXd x(n), s = Eigen::VectorXd::Ones(n), lam = Eigen::VectorXd::Zero(m);
  x << c0, -c0;
  x.array() += std::max(-1.5 * x.minCoeff(), 0.0);
  double xs = 0.5 * x.dot(s);
  double dx0 = xs / s.sum(), ds0 = xs / x.sum();
  x.array() += dx0;
  s.array() += ds0;

  auto step_to_boundary = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
  };

  BasisPursuitResult res;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  double err = best, best_err = best;
  Eigen::VectorXd best_x = x, best_lam = lam, best_s = s;
  for (int it = 0; it < opts.ipm_max_iters; ++it) {
    Eigen::VectorXd rp = y - Amul(x);
    Eigen::VectorXd rd = Eigen::VectorXd::Ones(n) - Atmul(lam) - s;
    double pobj = x.sum(), dobj = y.dot(lam);
    double pinf = rp.norm() / (1.0 + ynorm), dinf = rd.norm() / (1.0 + cnorm);
    double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    err = std::max({pinf, dinf, gap});
    res.stats.iterations = it;
    res.stats.history.push_back(pinf);
    if (opts.verbose && opts.trace) *opts.trace << it << ',' << pinf << ',' << dinf << ',' << pobj << '\n';
    if (err <= opts.ipm_tol) {
      res.stats.converged = true;
      break;
    }
    if (err < best_err) {
      best_err = err;
      best_x = x;
      best_lam = lam;
      best_s = s;
    }
    // Near the optimum the normal matrix loses accuracy; stop once progress stalls.
    if (err < 0.5 * best || best > 1e-6) {
      best = std::min(best, err);
      since_best = 0;
    } else if (++since_best >= 6) {
      break;
    }

    Eigen::VectorXd d = x.cwiseQuotient(s);
    Eigen::VectorXd dsum = d.head(p) + d.tail(p);
    Eigen::MatrixXd M = A * dsum.asDiagonal() * A.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    double mu = x.dot(s) / double(n);

    auto direction = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dx, Eigen::VectorXd& dl, Eigen::VectorXd& ds) {
      Eigen::VectorXd t = (rc - x.cwiseProduct(rd)).cwiseQuotient(s);
      dl = ldlt.solve(rp - Amul(t));
      dx = t + d.cwiseProduct(Atmul(dl));
      ds = rd - Atmul(dl);
    };
    Eigen::VectorXd dxa, dla, dsa;
    direction(-x.cwiseProduct(s), dxa, dla, dsa);
    double ap = step_to_boundary(x, dxa), ad = step_to_boundary(s, dsa);
    double mu_aff = (x + ap * dxa).dot(s + ad * dsa) / double(n);
    double sigma = std::pow(mu_aff / mu, 3);
    Eigen::VectorXd dx, dl, ds;
    direction(Eigen::VectorXd::Constant(n, sigma * mu) - x.cwiseProduct(s) - dxa.cwiseProduct(dsa), dx, dl, ds);
    ap = std::min(1.0, 0.99 * step_to_boundary(x, dx));
    ad = std::min(1.0, 0.99 * step_to_boundary(s, ds));
    x += ap * dx;
    lam += ad * dl;
    s += ad * ds;
  }
  if (!res.stats.converged) {
    x = best_x;
    lam = best_lam;
    s = best_s;
    res.stats.converged = best_err <= 100.0 * opts.ipm_tol;
  }
  res.c = x.head(p) - x.tail(p);
  res.constraint_residual = (A * res.c - y).norm();
  res.stats.primal_residual = res.constraint_residual;
  res.stats.dual_residual = (Eigen::VectorXd::Ones(n) - Atmul(lam) - s).norm();
  res.stats.objective = res.c.lpNorm<1>();
  if (!res.stats.converged && res.constraint_residual > std::sqrt(opts.abs_tol) * (1.0 + ynorm))
    throw InfeasibleError("basis pursuit: interior point did not converge");
  return res;
}

}  // namespace

BasisPursuitResult solve_basis_pursuit(const BasisPursuitProblem& prob, const SolverOptions& opts) {
  const Eigen::MatrixXd& A = prob.A;
  const Eigen::VectorXd& y = prob.y;
  if (A.rows() != y.size()) throw std::invalid_argument("basis pursuit: dimension mismatch");
  const Eigen::Index p = A.cols();
  const double sqp = std::sqrt(double(p));
  const double ynorm = y.norm();
  const bool lasso = prob.mode == BpMode::Lasso;

  BasisPursuitResult res;
  res.c = Eigen::VectorXd::Zero(p);
  if (ynorm == 0.0) {
    res.stats.converged = true;
    return res;
  }
  if (!lasso && opts.bp_engine == BpEngine::InteriorPoint) return basis_pursuit_ipm(A, y, opts);

  double rho = opts.rho;
  int rho_changes = 0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p), z = x, u = x, zold, v, w(p);
  Eigen::VectorXd Aty = A.transpose() * y;
  auto solver = std::make_unique<RowSpaceSolver>(A, lasso ? rho : 0.0);
  // Equality mode: x = v - A^T (A A^T)^{-1} (A v - y) is the projection onto Ac = y.
  for (int it = 0; it < opts.max_iters; ++it) {
    v = z - u;
    if (lasso) {
      Eigen::VectorXd q = Aty + rho * v;
      x = (q - A.transpose() * solver->solve(A * q)) / rho;
    } else {
      x = v - A.transpose() * solver->solve(A * v - y);
    }
    zold = z;
    w = x + u;
    simd::soft_threshold(w.data(), (lasso ? prob.tau : 1.0) / rho, z.data(), static_cast<std::size_t>(p));
    u += x - z;

    double r = (x - z).norm();
    double s = rho * (z - zold).norm();
    double eps_pri = sqp * opts.abs_tol + opts.rel_tol * std::max(x.norm(), z.norm());
    double eps_dual = sqp * opts.abs_tol + opts.rel_tol * rho * u.norm();
    double feas = (A * z - y).norm();
    res.stats.iterations = it + 1;
    res.stats.primal_residual = r;
    res.stats.dual_residual = s;
    res.stats.history.push_back(r);
    if (opts.verbose && opts.trace) {
      double obj = z.lpNorm<1>();
      if (lasso) obj = 0.5 * feas * feas + prob.tau * obj;
      *opts.trace << it << ',' << r << ',' << s << ',' << obj << '\n';
    }
    bool feas_ok = lasso || feas <= opts.abs_tol * (1.0 + ynorm);
    if (r <= eps_pri && s <= eps_dual && feas_ok) {
      res.stats.converged = true;
      break;
    }
    // Residual balancing, with a budget so rho cannot cycle forever.
    if (it % 10 == 9 && rho_changes < 50) {
      double scale = 0.0;
      if (r > 10.0 * s) scale = 2.0;
      if (s > 10.0 * r) scale = 0.5;
      if (scale != 0.0) {
        ++rho_changes;
        rho *= scale;
        u /= scale;
        if (lasso) solver = std::make_unique<RowSpaceSolver>(A, rho);
      }
    }
  }
  res.c = z;
  res.constraint_residual = (A * z - y).norm();
  res.stats.objective = z.lpNorm<1>();
  if (lasso) res.stats.objective = 0.5 * res.constraint_residual * res.constraint_residual + prob.tau * res.stats.objective;
  if (!res.stats.converged && !lasso && res.constraint_residual > std::sqrt(opts.abs_tol) * (1.0 + ynorm))
    throw InfeasibleError("basis pursuit: constraint residual too large after max_iters");
  return res;
}

}  // namespace ssr
