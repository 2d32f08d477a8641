#include <algorithm>
#include <cmath>
#include <limits>

#include "ssr/errors.hpp"
#include "ssr/solvers.hpp"

namespace ssr {

namespace {

using Mat = Eigen::MatrixXcd;
using Part = HermitianSdp::Part;

struct BlockPiece {
  int block;
  std::vector<int> rows, cols;
  std::vector<cplx> vals;
};

// Atom split per block, with the data needed for X B W products.
struct AtomData {
  std::vector<BlockPiece> pieces;
  bool needs_adjoint = false;
};

void coefficients(Part p, cplx& alpha, cplx& beta) {
  switch (p) {
    case Part::Re:
      alpha = 0.5;
      beta = 0.5;
      break;
    case Part::Im:
      alpha = cplx(0.0, -0.5);
      beta = cplx(0.0, 0.5);
      break;
    case Part::Herm:
      alpha = 1.0;
      beta = 0.0;
      break;
  }
}

// G = X B W for sparse B given as (rows, cols, vals); uses whichever side has
// fewer distinct indices so the product is a thin gemm.
Mat sandwich(const Mat& X, const Mat& W, const std::vector<int>& rows, const std::vector<int>& cols,
             const std::vector<cplx>& vals, bool adjoint) {
  const Eigen::Index n = X.rows();
  const std::vector<int>& r = adjoint ? cols : rows;
  const std::vector<int>& c = adjoint ? rows : cols;
  std::vector<int> ur(r), uc(c);
  std::sort(ur.begin(), ur.end());
  ur.erase(std::unique(ur.begin(), ur.end()), ur.end());
  std::sort(uc.begin(), uc.end());
  uc.erase(std::unique(uc.begin(), uc.end()), uc.end());
  auto pos = [](const std::vector<int>& u, int v) {
    return static_cast<Eigen::Index>(std::lower_bound(u.begin(), u.end(), v) - u.begin());
  };
  if (ur.size() <= uc.size()) {
    Mat Xr(n, ur.size()), Zr = Mat::Zero(ur.size(), n);
    for (size_t i = 0; i < ur.size(); ++i) Xr.col(i) = X.col(ur[i]);
    for (size_t e = 0; e < vals.size(); ++e) {
      cplx v = adjoint ? std::conj(vals[e]) : vals[e];
      Zr.row(pos(ur, r[e])) += v * W.row(c[e]);
    }
    return Xr * Zr;
  }
  Mat Yc = Mat::Zero(n, uc.size()), Wc(uc.size(), n);
  for (size_t j = 0; j < uc.size(); ++j) Wc.row(j) = W.row(uc[j]);
  for (size_t e = 0; e < vals.size(); ++e) {
    cplx v = adjoint ? std::conj(vals[e]) : vals[e];
    Yc.col(pos(uc, c[e])) += v * X.col(r[e]);
  }
  return Yc * Wc;
}

class Operator {
 public:
  explicit Operator(const HermitianSdp& sdp) : sdp_(sdp) {
    atoms_.resize(sdp.atoms.size());
    for (size_t a = 0; a < sdp.atoms.size(); ++a) {
      for (const auto& e : sdp.atoms[a].entries) {
        if (e.block < 0 || e.block >= static_cast<int>(sdp.block_dims.size()))
          throw std::invalid_argument("HermitianSdp: bad block index");
        auto& ps = atoms_[a].pieces;
        auto it = std::find_if(ps.begin(), ps.end(), [&](const BlockPiece& p) { return p.block == e.block; });
        if (it == ps.end()) {
          ps.push_back(BlockPiece{e.block, {}, {}, {}});
          it = ps.end() - 1;
        }
        it->rows.push_back(e.row);
        it->cols.push_back(e.col);
        it->vals.push_back(e.value);
      }
    }
    for (const auto& c : sdp.constraints) {
      if (c.atom < 0 || c.atom >= static_cast<int>(atoms_.size()))
        throw std::invalid_argument("HermitianSdp: bad atom index");
      if (c.part != Part::Herm) atoms_[c.atom].needs_adjoint = true;
    }
    for (int b = 0; b < static_cast<int>(sdp.block_dims.size()); ++b) {
      std::vector<int> list;
      for (size_t a = 0; a < atoms_.size(); ++a)
        for (const auto& p : atoms_[a].pieces)
          if (p.block == b) list.push_back(static_cast<int>(a));
      by_block_.push_back(std::move(list));
    }
  }

  int m() const { return static_cast<int>(sdp_.constraints.size()); }

  // t_a = tr(B_a Y) for all atoms.
  std::vector<cplx> atom_traces(const std::vector<Mat>& Y) const {
    std::vector<cplx> t(atoms_.size(), cplx(0.0));
    for (size_t a = 0; a < atoms_.size(); ++a)
      for (const auto& p : atoms_[a].pieces)
        for (size_t e = 0; e < p.vals.size(); ++e) t[a] += p.vals[e] * Y[p.block](p.cols[e], p.rows[e]);
    return t;
  }

  // A(Y) for Hermitian Y.
  Eigen::VectorXd apply(const std::vector<Mat>& Y) const {
    std::vector<cplx> t = atom_traces(Y);
    Eigen::VectorXd out(m());
    for (int i = 0; i < m(); ++i) {
      const auto& c = sdp_.constraints[i];
      cplx al, be;
      coefficients(c.part, al, be);
      out[i] = (al * t[c.atom] + be * std::conj(t[c.atom])).real();
    }
    return out;
  }

  std::vector<Mat> adjoint(const Eigen::VectorXd& lam) const {
    std::vector<Mat> Y;
    for (int n : sdp_.block_dims) Y.push_back(Mat::Zero(n, n));
    for (int i = 0; i < m(); ++i) {
      const auto& c = sdp_.constraints[i];
      cplx al, be;
      coefficients(c.part, al, be);
      for (const auto& p : atoms_[c.atom].pieces)
        for (size_t e = 0; e < p.vals.size(); ++e) {
          Y[p.block](p.rows[e], p.cols[e]) += lam[i] * al * p.vals[e];
          Y[p.block](p.cols[e], p.rows[e]) += lam[i] * be * std::conj(p.vals[e]);
        }
    }
    return Y;
  }

  // Schur complement M_ij = Re tr(A_i X A_j W).
  Eigen::MatrixXd schur(const std::vector<Mat>& X, const std::vector<Mat>& W) const {
    const size_t na = atoms_.size();
    // T[k](a, a'): k = 0 tr(B G), 1 tr(B G*), 2 tr(B^H G), 3 tr(B^H G*)
    std::vector<Mat> T(4, Mat::Zero(na, na));
    for (size_t ap = 0; ap < na; ++ap) {
      for (const auto& pp : atoms_[ap].pieces) {
        const int b = pp.block;
        for (int adj = 0; adj < (atoms_[ap].needs_adjoint ? 2 : 1); ++adj) {
          Mat G = sandwich(X[b], W[b], pp.rows, pp.cols, pp.vals, adj == 1);
          for (int a : by_block_[b]) {
            for (const auto& p : atoms_[a].pieces) {
              if (p.block != b) continue;
              cplx t0 = 0.0, t2 = 0.0;
              for (size_t e = 0; e < p.vals.size(); ++e) {
                t0 += p.vals[e] * G(p.cols[e], p.rows[e]);
                t2 += std::conj(p.vals[e]) * G(p.rows[e], p.cols[e]);
              }
              T[adj](a, ap) += t0;
              T[2 + adj](a, ap) += t2;
            }
          }
        }
      }
    }
    const int mm = m();
    Eigen::MatrixXd M(mm, mm);
    for (int j = 0; j < mm; ++j) {
      const auto& cj = sdp_.constraints[j];
      cplx aj, bj;
      coefficients(cj.part, aj, bj);
      for (int i = 0; i < mm; ++i) {
        const auto& ci = sdp_.constraints[i];
        cplx ai, bi;
        coefficients(ci.part, ai, bi);
        const int a = ci.atom, ap = cj.atom;
        cplx v = ai * aj * T[0](a, ap) + bi * aj * T[2](a, ap);
        if (bj != 0.0) v += ai * bj * T[1](a, ap) + bi * bj * T[3](a, ap);
        M(i, j) = v.real();
      }
    }
    return 0.5 * (M + M.transpose());
  }

 private:
  const HermitianSdp& sdp_;
  std::vector<AtomData> atoms_;
  std::vector<std::vector<int>> by_block_;
};

Mat herm(const Mat& A) { return 0.5 * (A + A.adjoint()); }

double inner(const std::vector<Mat>& A, const std::vector<Mat>& B) {
  double s = 0.0;
  for (size_t b = 0; b < A.size(); ++b) s += (A[b].adjoint() * B[b]).trace().real();
  return s;
}

double frob(const std::vector<Mat>& A) {
  double s = 0.0;
  for (const auto& M : A) s += M.squaredNorm();
  return std::sqrt(s);
}

// Largest alpha with X + alpha dX PSD (infinity if unbounded).
double max_step(const Mat& X, const Mat& dX) {
  Eigen::LLT<Mat> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  Mat Li = llt.matrixL().solve(Mat::Identity(X.rows(), X.cols()));
  Mat S = herm(Li * dX * Li.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

Mat inverse_pd(const Mat& Z) {
  Eigen::LLT<Mat> llt(Z);
  if (llt.info() != Eigen::Success) throw NonConvergedError("interior point: slack lost definiteness");
  return herm(llt.solve(Mat::Identity(Z.rows(), Z.cols())));
}

}  // namespace

HermitianSdpResult solve_hermitian_sdp(const HermitianSdp& sdp, const SolverOptions& opts) {
  const size_t nb = sdp.block_dims.size();
  if (sdp.C.size() != nb) throw std::invalid_argument("HermitianSdp: objective block count mismatch");
  Operator A(sdp);
  const int m = A.m();
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) b[i] = sdp.constraints[i].rhs;
  std::vector<Mat> C(nb);
  for (size_t k = 0; k < nb; ++k) C[k] = herm(sdp.C[k]);

  int ntot = 0;
  for (int n : sdp.block_dims) ntot += n;
  double normC = frob(C), normb = b.norm();
  double maxA = 0.0;
  {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      e[i] = 1.0;
      maxA = std::max(maxA, frob(A.adjoint(e)));
      e[i] = 0.0;
    }
  }
  double xi_x = std::max({10.0, std::sqrt(double(ntot)), std::sqrt(double(ntot)) * (1.0 + normb) / (1.0 + maxA)});
  double xi_z = std::max({10.0, std::sqrt(double(ntot)), maxA, normC});

  HermitianSdpResult res;
  std::vector<Mat>& X = res.X;
  std::vector<Mat>& Z = res.Z;
  for (int n : sdp.block_dims) {
    X.push_back(xi_x * Mat::Identity(n, n));
    Z.push_back(xi_z * Mat::Identity(n, n));
  }
  Eigen::VectorXd& lam = res.lambda;
  lam = Eigen::VectorXd::Zero(m);

  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  const int max_it = std::min(opts.max_iters, opts.ipm_max_iters);
  for (int it = 0; it < max_it; ++it) {
    std::vector<Mat> W(nb), Rd(nb);
    std::vector<Mat> Astar = A.adjoint(lam);
    for (size_t k = 0; k < nb; ++k) {
      W[k] = inverse_pd(Z[k]);
      Rd[k] = C[k] - Z[k] - Astar[k];
    }
    Eigen::VectorXd rp = b - A.apply(X);
    double pobj = inner(C, X), dobj = b.dot(lam);
    double mu = inner(X, Z) / ntot;
    res.primal_objective = pobj;
    res.dual_objective = dobj;
    res.primal_infeasibility = rp.norm() / (1.0 + normb);
    res.dual_infeasibility = frob(Rd) / (1.0 + normC);
    res.rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    double err = std::max({res.rel_gap, res.primal_infeasibility, res.dual_infeasibility});
    res.stats.iterations = it;
    res.stats.primal_residual = res.primal_infeasibility;
    res.stats.dual_residual = res.dual_infeasibility;
    res.stats.objective = pobj;
    res.stats.history.push_back(err);
    if (opts.verbose && opts.trace)
      *opts.trace << it << ',' << res.primal_infeasibility << ',' << res.dual_infeasibility << ',' << pobj << '\n';
    if (err <= opts.ipm_tol) {
      res.stats.converged = true;
      return res;
    }
    if (err < 0.5 * best) {
      best = err;
      stall = 0;
    } else if (++stall >= 6) {
      break;
    }

    Eigen::MatrixXd M = A.schur(X, W);
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    bool use_llt = llt.info() == Eigen::Success;
    if (!use_llt) ldlt.compute(M);
    auto solveM = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd { if (use_llt) return llt.solve(r);
      return ldlt.solve(r);
    };

    std::vector<Mat> XRdW(nb);
    for (size_t k = 0; k < nb; ++k) XRdW[k] = X[k] * Rd[k] * W[k];

    auto direction = [&](double sigma, const std::vector<Mat>* dXa, const std::vector<Mat>* dZa,
                         std::vector<Mat>& dX, std::vector<Mat>& dZ) {
      std::vector<Mat> K(nb);
      for (size_t k = 0; k < nb; ++k) {
        Mat Kk = sigma * mu * W[k] - X[k] - XRdW[k];
        if (dXa) Kk -= (*dXa)[k] * (*dZa)[k] * W[k];
        K[k] = herm(Kk);
      }
      Eigen::VectorXd dlam = solveM(rp - A.apply(K));
      std::vector<Mat> Ad = A.adjoint(dlam);
      dX.assign(nb, Mat());
      dZ.assign(nb, Mat());
      for (size_t k = 0; k < nb; ++k) {
        dZ[k] = herm(Rd[k] - Ad[k]);
        dX[k] = herm(K[k] + X[k] * Ad[k] * W[k]);
      }
      return dlam;
    };
    auto steps = [&](const std::vector<Mat>& dX, const std::vector<Mat>& dZ, double gamma, double& ap, double& ad) {
      ap = ad = 1.0;
      for (size_t k = 0; k < nb; ++k) {
        ap = std::min(ap, gamma * max_step(X[k], dX[k]));
        ad = std::min(ad, gamma * max_step(Z[k], dZ[k]));
      }
    };

    std::vector<Mat> dXa, dZa, dX, dZ;
    direction(0.0, nullptr, nullptr, dXa, dZa);
    double ap, ad;
    steps(dXa, dZa, 1.0, ap, ad);
    double mu_aff = 0.0;
    for (size_t k = 0; k < nb; ++k)
      mu_aff += ((X[k] + ap * dXa[k]).adjoint() * (Z[k] + ad * dZa[k])).trace().real();
    mu_aff /= ntot;
    double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
    Eigen::VectorXd dlam = direction(sigma, &dXa, &dZa, dX, dZ);
    double gamma = 0.9 + 0.09 * std::min(ap, ad);
    steps(dX, dZ, gamma, ap, ad);
    for (size_t k = 0; k < nb; ++k) {
      X[k] = herm(X[k] + ap * dX[k]);
      Z[k] = herm(Z[k] + ad * dZ[k]);
    }
    lam += ad * dlam;
  }
  double err = res.stats.history.empty() ? 1.0 : res.stats.history.back();
  res.stats.converged = err <= 100.0 * opts.ipm_tol;
  return res;
}

}  // namespace ssr
