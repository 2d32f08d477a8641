#include <cmath>

#include "ssr/errors.hpp"
#include "ssr/solvers.hpp"

namespace ssr {

SdpProblem::SdpProblem(const MomentVector& y) : N_(y.N), y_(y) {
  if (N_ < 0) throw std::invalid_argument("SdpProblem: negative degree");
  const int D = grid_side();
  const int D2 = D * D;
  // h(r, theta) = e^{iN(r+theta)} f(r + pi, theta + pi); with
  // f = sum F_{mk} e^{-ikr} e^{im theta} this gives
  // h_{a = m+N, b = N-k} = (-1)^{m+k} F_{mk}.
  L_ = Eigen::MatrixXcd::Zero(D2, num_harmonics(N_));
  for (int l = 0; l <= N_; ++l)
    for (int m = -l; m <= l; ++m) {
      std::vector<cplx> p = harmonic_to_fourier(l, m);
      for (int k = -l; k <= l; ++k) {
        double sign = ((m + k) % 2 == 0) ? 1.0 : -1.0;
        L_((m + N_) * D + (N_ - k), harmonic_index(l, m)) += sign * p[k + l];
      }
    }
  const int W = 4 * N_ + 1;
  num_classes_ = W * W;
  zero_class_ = 2 * N_ * W + 2 * N_;
  cls_.resize(static_cast<size_t>(D2) * D2);
  for (int p = 0; p < D2; ++p)
    for (int q = 0; q < D2; ++q) {
      int ka = p / D - q / D, kb = p % D - q % D;
      cls_[static_cast<size_t>(p) * D2 + q] = (ka + 2 * N_) * W + (kb + 2 * N_);
    }
}

std::vector<std::pair<int, int>> SdpProblem::halfspace_window() const {
  std::vector<std::pair<int, int>> out;
  const int K = 2 * N_;
  for (int k2 = 0; k2 <= K; ++k2)
    for (int k1 = -K; k1 <= K; ++k1)
      if (k2 > 0 || k1 >= 0) out.emplace_back(k1, k2);
  return out;
}

Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd& W) {
  Eigen::MatrixXcd H = 0.5 * (W + W.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXcd& V = es.eigenvectors();
  return V * ev.asDiagonal() * V.adjoint();
}

PsdAdmmResult psd_admm(const PsdAdmmSpec& spec, const SolverOptions& opts) {
  const int n = spec.dim;
  PsdAdmmResult res;
  Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(n, n), U = Z, X, Zold;
  double rho = opts.rho;
  for (int it = 0; it < opts.max_iters; ++it) {
    X = spec.affine_step(Z - U, rho);
    Zold = Z;
    Z = project_psd(X + U);
    U += X - Z;
    double r = (X - Z).norm();
    double s = rho * (Z - Zold).norm();
    double eps_pri = n * opts.abs_tol + opts.rel_tol * std::max(X.norm(), Z.norm());
    double eps_dual = n * opts.abs_tol + opts.rel_tol * rho * U.norm();
    res.stats.iterations = it + 1;
    res.stats.primal_residual = r;
    res.stats.dual_residual = s;
    res.stats.history.push_back(r);
    if (opts.verbose && opts.trace)
      *opts.trace << it << ',' << r << ',' << s << ',' << (spec.objective ? spec.objective(X) : 0.0) << '\n';
    if (r <= eps_pri && s <= eps_dual) {
      res.stats.converged = true;
      break;
    }
    if (it % 20 == 19) {
      double scale = 0.0;
      if (r > 10.0 * s) scale = 2.0;
      if (s > 10.0 * r) scale = 0.5;
      if (scale != 0.0) {
        rho *= scale;
        U /= scale;
      }
    }
  }
  res.X = X;
  res.Z = Z;
  if (spec.objective) res.stats.objective = spec.objective(X);
  return res;
}

namespace {

double trace_residual(const SdpProblem& prob, const Eigen::MatrixXcd& Q) {
  const int D2 = prob.grid_side() * prob.grid_side();
  std::vector<cplx> sums(prob.num_classes(), cplx(0.0));
  for (int q = 0; q < D2; ++q)
    for (int p = 0; p < D2; ++p) sums[prob.constraint_class(p, q)] += Q(p, q);
  sums[prob.zero_class()] -= 1.0;
  double r = 0.0;
  for (const auto& s : sums) r = std::max(r, std::abs(s));
  return r;
}

// f-update for the bordered block: minimize rho f^H G f - Re(f^H b) + tau ||f||
// with G = L^H L, through the eigendecomposition of G.
class BorderSolver {
 public:
  explicit BorderSolver(const Eigen::MatrixXcd& L) {
    Eigen::MatrixXcd G = L.adjoint() * L;
    es_.compute(0.5 * (G + G.adjoint()));
    if (es_.eigenvalues().minCoeff() <= 0.0) throw RankError("SDP lift map is rank deficient");
  }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& b, double rho, double tau) const {
    const Eigen::MatrixXcd& V = es_.eigenvectors();
    const Eigen::VectorXd& lam = es_.eigenvalues();
    Eigen::VectorXcd beta = V.adjoint() * b;
    if (tau <= 0.0) {
      Eigen::VectorXcd g = beta.array() / (2.0 * rho * lam.array());
      return V * g;
    }
    double bn = beta.norm();
    if (bn <= tau) return Eigen::VectorXcd::Zero(b.size());
    // s = ||f|| solves s = ||(2 rho Lambda + tau/s)^{-1} beta||.
    auto norm_at = [&](double s) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < beta.size(); ++i) {
        double d = 2.0 * rho * lam[i] + tau / s;
        acc += std::norm(beta[i]) / (d * d);
      }
      return std::sqrt(acc);
    };
    double lo = 0.0, hi = bn / (2.0 * rho * lam.minCoeff());
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      if (norm_at(mid) > mid)
        lo = mid;
      else
        hi = mid;
    }
    double s = 0.5 * (lo + hi);
    Eigen::VectorXcd g(beta.size());
    for (Eigen::Index i = 0; i < beta.size(); ++i) g[i] = beta[i] / (2.0 * rho * lam[i] + tau / s);
    return V * g;
  }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_;
};

SdpResult solve_bordered_admm(const SdpProblem& prob, double tau, const SolverOptions& opts) {
  const int D = prob.grid_side();
  const int D2 = D * D;
  const int n = D2 + 1;
  const Eigen::MatrixXcd& L = prob.lift();
  const Eigen::VectorXcd& y = prob.data().values;
  BorderSolver border(L);
  const int C = prob.num_classes();
  std::vector<double> counts(C, 0.0);
  for (int p = 0; p < D2; ++p)
    for (int q = 0; q < D2; ++q) counts[prob.constraint_class(p, q)] += 1.0;

  Eigen::VectorXcd f_last = Eigen::VectorXcd::Zero(y.size());
  PsdAdmmSpec spec;
  spec.dim = n;
  spec.affine_step = [&](const Eigen::MatrixXcd& V, double rho) {
    Eigen::MatrixXcd X(n, n);
    // Q block: subtract the per-class mean violation.
    std::vector<cplx> sums(C, cplx(0.0));
    for (int q = 0; q < D2; ++q)
      for (int p = 0; p < D2; ++p) sums[prob.constraint_class(p, q)] += V(p, q);
    sums[prob.zero_class()] -= 1.0;
    for (int c = 0; c < C; ++c) sums[c] /= counts[c];
    for (int q = 0; q < D2; ++q)
      for (int p = 0; p < D2; ++p) X(p, q) = V(p, q) - sums[prob.constraint_class(p, q)];
    // Border: column holds conj(h), row holds h^T, both equal to h = L f.
    Eigen::VectorXcd w = 0.5 * (V.col(D2).head(D2).conjugate() + V.row(D2).head(D2).transpose());
    Eigen::VectorXcd b = 2.0 * rho * (L.adjoint() * w) + y;
    // Two copies of the border double the quadratic weight.
    f_last = border.solve(b, rho, tau);
    Eigen::VectorXcd h = L * f_last;
    X.col(D2).head(D2) = h.conjugate();
    X.row(D2).head(D2) = h.transpose();
    X(D2, D2) = 1.0;
    return X;
  };
  spec.objective = [&](const Eigen::MatrixXcd&) {
    return (y.adjoint() * f_last)(0).real() - tau * f_last.norm();
  };

  PsdAdmmResult r = psd_admm(spec, opts);
  SdpResult out;
  out.f = f_last;
  out.Q = r.X.topLeftCorner(D2, D2);
  out.objective = spec.objective(r.X);
  out.stats = r.stats;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (r.X + r.X.adjoint()), Eigen::EigenvaluesOnly);
  out.min_eig_bordered = es.eigenvalues().minCoeff();
  out.trace_residual = trace_residual(prob, out.Q);
  if (!r.stats.converged) throw NonConvergedError("SDP ADMM did not converge", r.stats.history);
  return out;
}

// Interior-point form. Block 0 is the bordered matrix [[Q, conj h], [h^T, 1]];
// the border must lie in the range of the lift L (orthogonal complement
// constraints). With tau > 0 a second block [[s, f^H], [f, S]] with
// tr S = s and f = L^+ h encodes s >= ||f||.
SdpResult solve_bordered_ipm(const SdpProblem& prob, double tau, const SolverOptions& opts) {
  using Entry = HermitianSdp::Entry;
  using Part = HermitianSdp::Part;
  const int D = prob.grid_side();
  const int D2 = D * D;
  const int n = D2 + 1;
  const int corner = D2;
  const Eigen::MatrixXcd& L = prob.lift();
  const Eigen::VectorXcd& y = prob.data().values;
  const int nf = static_cast<int>(L.cols());

  Eigen::MatrixXcd G = L.adjoint() * L;
  Eigen::LLT<Eigen::MatrixXcd> gl(G);
  if (gl.info() != Eigen::Success) throw RankError("SDP lift map is rank deficient");
  Eigen::MatrixXcd Lp = gl.solve(L.adjoint());  // (N+1)^2 x D2
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(L);
  Eigen::MatrixXcd Qfull = qr.householderQ() * Eigen::MatrixXcd::Identity(D2, D2);
  Eigen::MatrixXcd U = Qfull.rightCols(D2 - nf);

  HermitianSdp sdp;
  sdp.block_dims = {n};
  auto add = [&](HermitianSdp::Atom atom, std::initializer_list<std::pair<Part, double>> parts) {
    sdp.atoms.push_back(std::move(atom));
    for (const auto& [part, rhs] : parts)
      sdp.constraints.push_back({static_cast<int>(sdp.atoms.size()) - 1, part, rhs});
  };

  // Trace classes: sum of Q_pq over p - q = k equals delta_k, k in the half-space window.
  for (auto [k1, k2] : prob.halfspace_window()) {
    HermitianSdp::Atom atom;
    for (int a = 0; a < D; ++a)
      for (int bb = 0; bb < D; ++bb) {
        int a2 = a - k1, b2 = bb - k2;
        if (a2 < 0 || a2 >= D || b2 < 0 || b2 >= D) continue;
        int p = a * D + bb, q = a2 * D + b2;
        atom.entries.push_back(Entry{0, q, p, 1.0});
      }
    if (k1 == 0 && k2 == 0)
      add(std::move(atom), {{Part::Herm, 1.0}});
    else
      add(std::move(atom), {{Part::Re, 0.0}, {Part::Im, 0.0}});
  }
  add(HermitianSdp::Atom{{Entry{0, corner, corner, 1.0}}}, {{Part::Herm, 1.0}});
  // h_p = X(corner, p) must be orthogonal to null(L^H).
  for (int j = 0; j < D2 - nf; ++j) {
    HermitianSdp::Atom atom;
    for (int p = 0; p < D2; ++p)
      if (U(p, j) != 0.0) atom.entries.push_back(Entry{0, p, corner, std::conj(U(p, j))});
    add(std::move(atom), {{Part::Re, 0.0}, {Part::Im, 0.0}});
  }
  // Objective: maximize Re(y^H L^+ h).
  Eigen::RowVectorXcd w = y.adjoint() * Lp;
  Eigen::MatrixXcd C0 = Eigen::MatrixXcd::Zero(n, n);
  for (int p = 0; p < D2; ++p) {
    C0(p, corner) -= 0.5 * w[p];
    C0(corner, p) -= 0.5 * std::conj(w[p]);
  }
  sdp.C = {C0};

  if (tau > 0.0) {
    sdp.block_dims.push_back(nf + 1);
    for (int k = 0; k < nf; ++k) {
      HermitianSdp::Atom atom;
      atom.entries.push_back(Entry{1, 0, k + 1, 1.0});
      for (int p = 0; p < D2; ++p)
        if (Lp(k, p) != 0.0) atom.entries.push_back(Entry{0, p, corner, -Lp(k, p)});
      add(std::move(atom), {{Part::Re, 0.0}, {Part::Im, 0.0}});
    }
    HermitianSdp::Atom tr;
    tr.entries.push_back(Entry{1, 0, 0, 1.0});
    for (int k = 1; k <= nf; ++k) tr.entries.push_back(Entry{1, k, k, -1.0});
    add(std::move(tr), {{Part::Herm, 0.0}});
    Eigen::MatrixXcd C1 = Eigen::MatrixXcd::Zero(nf + 1, nf + 1);
    C1(0, 0) = tau;
    sdp.C.push_back(C1);
  }

  HermitianSdpResult r = solve_hermitian_sdp(sdp, opts);
  const Eigen::MatrixXcd& X = r.X[0];
  SdpResult out;
  Eigen::VectorXcd h = X.row(corner).head(D2).transpose();
  out.f = Lp * h;
  out.Q = X.topLeftCorner(D2, D2);
  out.objective = (y.adjoint() * out.f)(0).real() - tau * out.f.norm();
  out.stats = r.stats;
  out.stats.objective = out.objective;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (X + X.adjoint()), Eigen::EigenvaluesOnly);
  out.min_eig_bordered = es.eigenvalues().minCoeff();
  out.trace_residual = trace_residual(prob, out.Q);
  if (!r.stats.converged) throw NonConvergedError("SDP interior point did not converge", r.stats.history);
  return out;
}

SdpResult solve_bordered(const SdpProblem& prob, double tau, const SolverOptions& opts) {
  if (opts.sdp_engine == SdpEngine::Admm) return solve_bordered_admm(prob, tau, opts);
  return solve_bordered_ipm(prob, tau, opts);
}

}  // namespace

SdpResult solve_sdp(const SdpProblem& prob, const SolverOptions& opts) { return solve_bordered(prob, 0.0, opts); }

SdpResult solve_sdp_tikhonov(const SdpProblem& prob, double tau, const SolverOptions& opts) {
  if (!(tau > 0.0)) throw std::invalid_argument("solve_sdp_tikhonov: tau must be positive");
  return solve_bordered(prob, tau, opts);
}

}  // namespace ssr
