#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ssr/harmonics.hpp"
#include "ssr/solvers.hpp"

namespace ssr {

// Nodes at r_j = pi (2j+1) / (4n), theta_k = 2 pi k / (2n), j, k = 0..2n-1.
struct SphericalGrid {
  int n = 0;
  std::vector<SpherePoint> nodes;

  static SphericalGrid make(int n);
  // Covering radius measured at cell centres and at the poles.
  double fill_distance() const;
  Eigen::MatrixXcd Y_matrix(int N) const;
};

struct NoiseModel {
  enum class Kind { None, Deterministic };
  Kind kind = Kind::None;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

struct RecoveryDiagnostics {
  std::string method;
  SolverStats solver;
  double sdp_objective = 0.0;
  double sdp_min_eig = 0.0;
  double sdp_trace_residual = 0.0;
  int restarts = 0;
  int accepted_minima = 0;
  int failed_descents = 0;
  double tol = 0.0;
  double thresh = 0.0;
  double bandwidth = 0.0;
  std::vector<int> cluster_sizes;
  std::vector<double> abs_f_at_atoms;   // |f*| at recovered atoms (SDP)
  std::vector<double> sign_f_at_atoms;  // sign of Re f*
  double ls_residual = 0.0;
  bool rank_deficient = false;
  double off_cluster_mass = 0.0;  // l1 mass below the threshold over total l1 mass (grid)
  int grid_nodes = 0;
};

struct RecoveryResult {
  AtomicMeasure measure;
  std::optional<double> eps_x;
  std::optional<double> eps_c;
  std::optional<int> spurious_atoms;
  RecoveryDiagnostics diagnostics;
};

struct SdpRecoveryOptions {
  int restarts = 20000;
  double tol = 1e-8;
  std::optional<double> tau;
  std::uint64_t seed = 0;
  double bandwidth = 0.0;  // 0 selects pi / (6 (N+1))
  double cg_tol = 1e-10;
  int cg_max_iters = 500;
  SolverOptions solver;
};

struct DiscreteRecoveryOptions {
  int grid_n = 40;
  double thresh = 0.1;
  double bandwidth = 0.0;  // 0 selects twice the grid fill distance
  double tol = 1e-10;      // mean-shift movement tolerance
  SolverOptions solver;
};

RecoveryResult recover_sdp(const MomentVector& y, const SdpRecoveryOptions& opts,
                           const AtomicMeasure* truth = nullptr);
RecoveryResult recover_discrete(const MomentVector& y, const DiscreteRecoveryOptions& opts,
                                const AtomicMeasure* truth = nullptr);

// Weighted mean shift in R^3 with a normal kernel on chordal distance and
// renormalization each step; modes closer than h are merged. cluster_sizes
// receives the number of inputs assigned to each returned mode.
std::vector<SpherePoint> mean_shift_cluster(const std::vector<SpherePoint>& points, const std::vector<double>& weights,
                                            double h, double tol, std::vector<int>* cluster_sizes = nullptr);

MomentVector add_noise(const MomentVector& y, const NoiseModel& model);

// Fills eps_x (max over true atoms of the distance to the nearest recovered
// atom), eps_c (amplitude error after nearest matching) and the count of
// recovered atoms that are nobody's nearest match.
void score_recovery(RecoveryResult& result, const AtomicMeasure& truth);

struct SweepBin {
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int trials = 0;
  int successes = 0;
  double rate() const { return trials ? double(successes) / trials : 0.0; }
};

struct SweepOptions {
  int trials_per_bin = 5;
  int N = 6;
  int restarts = 200;
  int bins = 20;
  double success_eps = 1.056e-4;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

std::vector<SweepBin> superres_constant_sweep(const SweepOptions& opts);

// True when the majority-success indicator never drops from one bin to the next.
bool majority_monotone(const std::vector<SweepBin>& bins);

struct ConvergenceRow {
  int n = 0;
  double eps_x = 0.0;
  double eps_c = 0.0;
  double off_cluster_mass = 0.0;
  int atoms = 0;
  int spurious = 0;
};

std::vector<ConvergenceRow> grid_convergence_study(const MomentVector& y, const AtomicMeasure& truth,
                                                   const std::vector<int>& grid_ns,
                                                   const DiscreteRecoveryOptions& base);

// Uniform point on the sphere from a normalized Gaussian triple.
SpherePoint random_sphere_point(std::mt19937_64& rng);
// Independent generator for stream i of a seeded run.
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t i);

}  // namespace ssr
