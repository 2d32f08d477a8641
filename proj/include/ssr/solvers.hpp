#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "ssr/harmonics.hpp"
#include "ssr/sphere_geom.hpp"

namespace ssr {

enum class SdpEngine { InteriorPoint, Admm };
// Equality-mode basis pursuit only; lasso always runs ADMM.
enum class BpEngine { InteriorPoint, Admm };

struct SolverOptions {
  int max_iters = 50000;
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  double rho = 1.0;
  bool verbose = false;
  std::ostream* trace = nullptr;  // CSV rows iter,primal,dual,objective when verbose
  SdpEngine sdp_engine = SdpEngine::InteriorPoint;
  BpEngine bp_engine = BpEngine::InteriorPoint;
  double ipm_tol = 1e-10;  // relative gap and infeasibility target of the interior-point engine
  int ipm_max_iters = 100;
};

struct SolverStats {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
  std::vector<double> history;  // primal residual per iteration
};

// ---------------------------------------------------------------- basis pursuit

enum class BpMode { Equality, Lasso };

struct BasisPursuitProblem {
  Eigen::MatrixXd A;  // real rows, see real_moment_rows
  Eigen::VectorXd y;
  BpMode mode = BpMode::Equality;
  double tau = 0.0;  // lasso weight: min 0.5 ||Ac - y||^2 + tau ||c||_1
};

// Real-row form of the conj-harmonic evaluation system for real amplitudes:
// one row per Re/Im part of value(l, m), m >= 0 (m = 0 imaginary rows are
// identically zero and dropped). Row count equals (N+1)^2.
Eigen::MatrixXd real_moment_rows(const HarmonicBasis& basis, const std::vector<SpherePoint>& pts);
Eigen::VectorXd real_moment_data(const MomentVector& y);

struct BasisPursuitResult {
  Eigen::VectorXd c;
  SolverStats stats;
  double constraint_residual = 0.0;  // ||Ac - y||_2
};

BasisPursuitResult solve_basis_pursuit(const BasisPursuitProblem& prob, const SolverOptions& opts = {});

// ---------------------------------------------------------------------- SDP

// Bounded Real Lemma relaxation of max Re<f, y> s.t. sup |f| <= 1 for a
// degree-N harmonic expansion f. The PSD block is ((2N+1)^2 + 1) square.
class SdpProblem {
 public:
  explicit SdpProblem(const MomentVector& y);

  int degree() const { return N_; }
  int grid_side() const { return 2 * N_ + 1; }
  int psd_dim() const { return grid_side() * grid_side() + 1; }
  const MomentVector& data() const { return y_; }
  // Map from harmonic coefficients to the positive-orthant trigonometric
  // coefficients h (row-major over (a, b), a for theta and b for r).
  const Eigen::MatrixXcd& lift() const { return L_; }
  // Trace-constraint class of entry (p, q) of Q; class of the zero shift.
  int constraint_class(int p, int q) const { return cls_[p * grid_side() * grid_side() + q]; }
  int num_classes() const { return num_classes_; }
  int zero_class() const { return zero_class_; }
  // Half-space representatives of the constraint window |k_i| <= 2N.
  std::vector<std::pair<int, int>> halfspace_window() const;

 private:
  int N_;
  MomentVector y_;
  Eigen::MatrixXcd L_;
  std::vector<int> cls_;
  int num_classes_ = 0;
  int zero_class_ = 0;
};

struct SdpResult {
  Eigen::VectorXcd f;  // harmonic coefficients of the dual polynomial
  Eigen::MatrixXcd Q;
  double objective = 0.0;
  double min_eig_bordered = 0.0;
  double trace_residual = 0.0;
  SolverStats stats;
};

SdpResult solve_sdp(const SdpProblem& prob, const SolverOptions& opts = {});
// Adds -tau ||f||_2 to the objective.
SdpResult solve_sdp_tikhonov(const SdpProblem& prob, double tau, const SolverOptions& opts = {});

// Generic splitting used by both SDP entry points and small test problems:
// minimize <C, X> over Hermitian X subject to X in an affine set (given as a
// projection-like step) and X PSD.
struct PsdAdmmSpec {
  int dim = 0;
  // Returns argmin over the affine set of (rho/2)||X - V||^2 + linear terms.
  std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd& V, double rho)> affine_step;
  std::function<double(const Eigen::MatrixXcd& X)> objective;
};

struct PsdAdmmResult {
  Eigen::MatrixXcd X;  // affine iterate
  Eigen::MatrixXcd Z;  // PSD iterate
  SolverStats stats;
};

PsdAdmmResult psd_admm(const PsdAdmmSpec& spec, const SolverOptions& opts);
Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd& W);

// Block-diagonal Hermitian SDP in standard form:
//   minimize sum_b Re tr(C_b X_b)  s.t.  Re tr(A_i X) = rhs_i,  X_b PSD.
// Each A_i is built from a sparse complex "atom" B: Part::Re gives
// Re tr(BX), Part::Im gives Im tr(BX), Part::Herm uses B itself (B Hermitian).
struct HermitianSdp {
  struct Entry {
    int block, row, col;
    cplx value;
  };
  struct Atom {
    std::vector<Entry> entries;
  };
  enum class Part { Re, Im, Herm };
  struct Constraint {
    int atom;
    Part part;
    double rhs;
  };
  std::vector<int> block_dims;
  std::vector<Atom> atoms;
  std::vector<Constraint> constraints;
  std::vector<Eigen::MatrixXcd> C;
};

struct HermitianSdpResult {
  std::vector<Eigen::MatrixXcd> X, Z;
  Eigen::VectorXd lambda;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double rel_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  SolverStats stats;
};

// Infeasible primal-dual path following, HKM direction with Mehrotra
// predictor-corrector. Stops at opts.ipm_tol or when progress stalls.
HermitianSdpResult solve_hermitian_sdp(const HermitianSdp& sdp, const SolverOptions& opts);

// ----------------------------------------------------------- local search

struct ScalarField {
  // Value and ambient gradient at x; only the tangential part is used.
  std::function<double(const SpherePoint& x, Vec3* grad)> eval;
};

struct LocalMinResult {
  SpherePoint x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Polak-Ribiere conjugate gradient with tangent projection and
// renormalization retraction; restarts every 20 steps.
LocalMinResult local_minimize_on_sphere(const ScalarField& f, const SpherePoint& x0, double tol,
                                        int max_iters = 500);

// ------------------------------------------------------------ least squares

struct AmplitudeFit {
  Eigen::VectorXd weights;
  double residual = 0.0;
  bool rank_deficient = false;
};

AmplitudeFit least_squares_amplitudes(const std::vector<SpherePoint>& points, const MomentVector& y);

}  // namespace ssr
