#include "ssr/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ssr/errors.hpp"
#include "ssr/parallel.hpp"

namespace ssr {

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
  return std::mt19937_64(seq);
}

SpherePoint random_sphere_point(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    Vec3 v(g(rng), g(rng), g(rng));
    if (v.norm() > 1e-12) return SpherePoint(v);
  }
}

SphericalGrid SphericalGrid::make(int n) {
  if (n < 1) throw std::invalid_argument("SphericalGrid: n must be >= 1");
  SphericalGrid g;
  g.n = n;
  g.nodes.reserve(4 * n * n);
  for (int j = 0; j < 2 * n; ++j)
    for (int k = 0; k < 2 * n; ++k)
      g.nodes.push_back(SpherePoint::from_spherical(std::numbers::pi * (2 * j + 1) / (4.0 * n),
                                                    2.0 * std::numbers::pi * k / (2.0 * n)));
  return g;
}

double SphericalGrid::fill_distance() const {
  const double pi = std::numbers::pi;
  const double dt = pi / n;
  double worst = pi / (4.0 * n);  // pole to the first ring
  for (int j = 0; j + 1 < 2 * n; ++j) {
    double r0 = pi * (2 * j + 1) / (4.0 * n), r1 = pi * (2 * j + 3) / (4.0 * n);
    // The farthest point of a cell lies on its mid-azimuth meridian; scan it.
    for (int s = 0; s <= 16; ++s) {
      SpherePoint c = SpherePoint::from_spherical(r0 + (r1 - r0) * s / 16.0, 0.5 * dt);
      double d = std::numeric_limits<double>::infinity();
      for (double r : {r0, r1})
        for (double t : {0.0, dt}) d = std::min(d, geodesic_distance(c, SpherePoint::from_spherical(r, t)));
      worst = std::max(worst, d);
    }
  }
  return worst;
}

Eigen::MatrixXcd SphericalGrid::Y_matrix(int N) const { return HarmonicBasis(N).matrix(nodes); }

std::vector<SpherePoint> mean_shift_cluster(const std::vector<SpherePoint>& points, const std::vector<double>& weights,
                                            double h, double tol, std::vector<int>* cluster_sizes) {
  if (!(h > 0.0)) throw std::invalid_argument("mean_shift_cluster: bandwidth must be positive");
  if (weights.size() != points.size()) throw std::invalid_argument("mean_shift_cluster: weight count mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("mean_shift_cluster: weights must be positive");
  // Near-duplicates (within 1e-4 h) are pooled first so repeated descents
  // onto one minimum cost a single kernel term.
  std::vector<Vec3> pos;
  std::vector<double> pw;
  std::vector<int> count;
  for (size_t i = 0; i < points.size(); ++i) {
    size_t c = pos.size();
    for (size_t r = 0; r < pos.size(); ++r)
      if ((pos[r] / pw[r] - points[i].xyz()).norm() < 1e-4 * h) {
        c = r;
        break;
      }
    if (c == pos.size()) {
      pos.push_back(Vec3::Zero());
      pw.push_back(0.0);
      count.push_back(0);
    }
    pos[c] += weights[i] * points[i].xyz();
    pw[c] += weights[i];
    count[c] += 1;
  }
  const size_t K = pos.size();
  std::vector<Vec3> base(K);
  for (size_t r = 0; r < K; ++r) base[r] = (pos[r] / pw[r]).normalized();

  std::vector<Vec3> modes(K);
  parallel_for(K, [&](size_t i) {
    Vec3 x = base[i];
    for (int it = 0; it < 1000; ++it) {
      Vec3 num = Vec3::Zero();
      double den = 0.0;
      for (size_t j = 0; j < K; ++j) {
        double d = (x - base[j]).norm() / h;
        double k = pw[j] * std::exp(-0.5 * d * d);
        num += k * base[j];
        den += k;
      }
      if (den <= 0.0) break;
      Vec3 xn = (num / den).normalized();
      double move = (xn - x).norm();
      x = xn;
      if (move < tol) break;
    }
    modes[i] = x;
  });
  // Merge modes closer than h, in input order.
  std::vector<Vec3> sums;
  std::vector<double> mass;
  std::vector<Vec3> reps;
  std::vector<int> sizes;
  for (size_t i = 0; i < K; ++i) {
    size_t c = reps.size();
    for (size_t r = 0; r < reps.size(); ++r)
      if ((reps[r] - modes[i]).norm() < h) {
        c = r;
        break;
      }
    if (c == reps.size()) {
      reps.push_back(modes[i]);
      sums.push_back(Vec3::Zero());
      mass.push_back(0.0);
      sizes.push_back(0);
    }
    sums[c] += pw[i] * modes[i];
    mass[c] += pw[i];
    sizes[c] += count[i];
  }
  std::vector<SpherePoint> out;
  for (size_t c = 0; c < reps.size(); ++c) out.push_back(mass[c] > 0.0 ? SpherePoint(Vec3(sums[c])) : SpherePoint(reps[c]));
  if (cluster_sizes) *cluster_sizes = sizes;
  return out;
}

MomentVector add_noise(const MomentVector& y, const NoiseModel& model) {
  if (model.delta < 0.0) throw std::invalid_argument("add_noise: delta must be >= 0");
  if (model.kind == NoiseModel::Kind::None || model.delta == 0.0) return y;
  std::mt19937_64 rng = stream_rng(model.seed, 0);
  std::normal_distribution<double> g;
  MomentVector e(y.N);
  for (int l = 0; l <= y.N; ++l) {
    e(l, 0) = g(rng);
    for (int m = 1; m <= l; ++m) {
      e(l, m) = cplx(g(rng), g(rng));
      e(l, -m) = ((m % 2) ? -1.0 : 1.0) * std::conj(e(l, m));
    }
  }
  MomentVector out = y;
  out.values += e.values * (model.delta / e.values.norm());
  return out;
}

void score_recovery(RecoveryResult& result, const AtomicMeasure& truth) {
  const auto& rec = result.measure.atoms;
  if (rec.empty() || truth.atoms.empty()) {
    result.eps_x = std::numbers::pi;
    result.eps_c = std::numeric_limits<double>::infinity();
    result.spurious_atoms = static_cast<int>(rec.size());
    return;
  }
  double ex = 0.0, ec = 0.0;
  std::vector<bool> matched(rec.size(), false);
  for (const auto& t : truth.atoms) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < rec.size(); ++j) {
      double d = geodesic_distance(t.point, rec[j].point);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    matched[best] = true;
    ex = std::max(ex, bd);
    ec = std::max(ec, std::abs(t.weight - rec[best].weight));
  }
  result.eps_x = ex;
  result.eps_c = ec;
  result.spurious_atoms = static_cast<int>(std::count(matched.begin(), matched.end(), false));
}

namespace {

void fit_amplitudes(RecoveryResult& res, const std::vector<SpherePoint>& pts, const MomentVector& y) {
  AmplitudeFit fit = least_squares_amplitudes(pts, y);
  res.diagnostics.ls_residual = fit.residual;
  res.diagnostics.rank_deficient = fit.rank_deficient;
  for (size_t i = 0; i < pts.size(); ++i) res.measure.atoms.push_back(Atom{pts[i], fit.weights[i]});
}

}  // namespace

RecoveryResult recover_sdp(const MomentVector& y, const SdpRecoveryOptions& opts, const AtomicMeasure* truth) {
  if (y.N < 1) throw std::invalid_argument("recover_sdp: degree must be >= 1");
  if (opts.restarts < 1 || !(opts.tol > 0.0)) throw std::invalid_argument("recover_sdp: need restarts >= 1, tol > 0");
  const int N = y.N;
  SdpProblem prob(y);
  SdpResult sdp = opts.tau ? solve_sdp_tikhonov(prob, *opts.tau, opts.solver) : solve_sdp(prob, opts.solver);

  RecoveryResult res;
  auto& dg = res.diagnostics;
  dg.method = "sdp";
  dg.solver = sdp.stats;
  dg.sdp_objective = sdp.objective;
  dg.sdp_min_eig = sdp.min_eig_bordered;
  dg.sdp_trace_residual = sdp.trace_residual;
  dg.restarts = opts.restarts;
  dg.tol = opts.tol;
  dg.bandwidth = opts.bandwidth > 0.0 ? opts.bandwidth : std::numbers::pi / (6.0 * (N + 1));

  HarmonicBasis basis(N);
  const Eigen::VectorXcd& f = sdp.f;
  ScalarField field;
  field.eval = [&](const SpherePoint& x, Vec3* grad) {
    if (!grad) {
      cplx v = eval_expansion(basis, f, x);
      return 1.0 - std::norm(v);
    }
    Eigen::VectorXcd Y, dx, dy, dz;
    basis.eval_with_gradient(x, Y, dx, dy, dz);
    cplx v = f.dot(Y.conjugate());
    Eigen::Vector3cd g(f.dot(dx.conjugate()), f.dot(dy.conjugate()), f.dot(dz.conjugate()));
    for (int k = 0; k < 3; ++k) (*grad)[k] = -2.0 * (std::conj(v) * g[k]).real();
    return 1.0 - std::norm(v);
  };

  std::vector<SpherePoint> minima(opts.restarts);
  std::vector<char> ok(opts.restarts, 0), failed(opts.restarts, 0);
  parallel_for(static_cast<size_t>(opts.restarts), [&](size_t i) {
    std::mt19937_64 rng = stream_rng(opts.seed, i);
    SpherePoint x0 = random_sphere_point(rng);
    try {
      LocalMinResult lm = local_minimize_on_sphere(field, x0, opts.cg_tol, opts.cg_max_iters);
      minima[i] = lm.x;
      ok[i] = 1.0 - std::abs(eval_expansion(basis, f, lm.x)) <= opts.tol;
    } catch (const MaxIterError&) {
      failed[i] = 1;
    }
  });
  std::vector<SpherePoint> accepted;
  for (int i = 0; i < opts.restarts; ++i)
    if (ok[i]) accepted.push_back(minima[i]);
  dg.accepted_minima = static_cast<int>(accepted.size());
  dg.failed_descents = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  if (accepted.empty()) throw EmptySupportError("recover_sdp: no minimum of 1 - |f|^2 passed the tolerance");

  std::vector<SpherePoint> pts =
      mean_shift_cluster(accepted, std::vector<double>(accepted.size(), 1.0), dg.bandwidth, 1e-13, &dg.cluster_sizes);
  fit_amplitudes(res, pts, y);
  for (const auto& p : pts) {
    cplx v = eval_expansion(basis, f, p);
    dg.abs_f_at_atoms.push_back(std::abs(v));
    dg.sign_f_at_atoms.push_back(v.real() >= 0.0 ? 1.0 : -1.0);
  }
  if (truth) score_recovery(res, *truth);
  return res;
}

RecoveryResult recover_discrete(const MomentVector& y, const DiscreteRecoveryOptions& opts, const AtomicMeasure* truth) {
  if (opts.grid_n < 1 || !(opts.thresh > 0.0)) throw std::invalid_argument("recover_discrete: need grid_n >= 1, thresh > 0");
  SphericalGrid grid = SphericalGrid::make(opts.grid_n);
  HarmonicBasis basis(y.N);
  BasisPursuitProblem bp;
  bp.A = real_moment_rows(basis, grid.nodes);
  bp.y = real_moment_data(y);
  BasisPursuitResult sol = solve_basis_pursuit(bp, opts.solver);

  RecoveryResult res;
  auto& dg = res.diagnostics;
  dg.method = "grid";
  dg.solver = sol.stats;
  dg.thresh = opts.thresh;
  dg.grid_nodes = static_cast<int>(grid.nodes.size());
  dg.bandwidth = opts.bandwidth > 0.0 ? opts.bandwidth : 2.0 * grid.fill_distance();

  std::vector<SpherePoint> kept;
  std::vector<double> w;
  double total = 0.0, dropped = 0.0;
  for (Eigen::Index j = 0; j < sol.c.size(); ++j) {
    double a = std::abs(sol.c[j]);
    total += a;
    if (a > opts.thresh) {
      kept.push_back(grid.nodes[j]);
      w.push_back(a);
    } else {
      dropped += a;
    }
  }
  dg.off_cluster_mass = total > 0.0 ? dropped / total : 0.0;
  if (kept.empty()) throw EmptySupportError("recover_discrete: no coefficient above the threshold");
  std::vector<SpherePoint> pts = mean_shift_cluster(kept, w, dg.bandwidth, opts.tol, &dg.cluster_sizes);
  fit_amplitudes(res, pts, y);
  if (truth) score_recovery(res, *truth);
  return res;
}

std::vector<SweepBin> superres_constant_sweep(const SweepOptions& opts) {
  if (opts.N < 4) throw std::invalid_argument("superres_constant_sweep: N must be >= 4");
  if (opts.trials_per_bin < 1 || opts.bins < 1) throw std::invalid_argument("superres_constant_sweep: empty sweep");
  std::vector<SweepBin> bins(opts.bins);
  for (int i = 0; i < opts.bins; ++i) {
    bins[i].center = (i + 1) / 10.0;
    bins[i].lower = bins[i].center - 0.05;
    bins[i].upper = bins[i].center + 0.05;
    bins[i].trials = opts.trials_per_bin;
  }
  const size_t total = static_cast<size_t>(opts.bins) * opts.trials_per_bin;
  std::vector<char> success(total, 0);
  parallel_for(total, [&](size_t t) {
    const SweepBin& bin = bins[t / opts.trials_per_bin];
    std::mt19937_64 rng = stream_rng(opts.seed, t);
    std::uniform_real_distribution<double> sep(bin.lower, bin.upper), amp(-1.0, 1.0);
    std::normal_distribution<double> g;
    SpherePoint x1 = random_sphere_point(rng);
    Vec3 v;
    do {
      v = project_tangent(x1, Vec3(g(rng), g(rng), g(rng)));
    } while (v.norm() < 1e-12);
    SpherePoint x2 = exp_map(x1, sep(rng) * v.normalized());
    AtomicMeasure mu;
    for (const SpherePoint& p : {x1, x2}) {
      double c = 0.0;
      while (c == 0.0) c = amp(rng);
      mu.atoms.push_back(Atom{p, c});
    }
    SdpRecoveryOptions ro;
    ro.restarts = opts.restarts;
    ro.seed = opts.seed + 1000003ull * (t + 1);
    ro.solver = opts.solver;
    try {
      RecoveryResult r = recover_sdp(moments(opts.N, mu), ro, &mu);
      success[t] = r.eps_x && *r.eps_x < opts.success_eps;
    } catch (const EmptySupportError&) {
    } catch (const std::invalid_argument&) {
      // more clusters than moments: counts as a failure
    }
  });
  for (size_t t = 0; t < total; ++t) bins[t / opts.trials_per_bin].successes += success[t];
  return bins;
}

bool majority_monotone(const std::vector<SweepBin>& bins) {
  bool seen = false;
  for (const auto& b : bins) {
    bool maj = 2 * b.successes > b.trials;
    if (seen && !maj) return false;
    seen = seen || maj;
  }
  return true;
}

std::vector<ConvergenceRow> grid_convergence_study(const MomentVector& y, const AtomicMeasure& truth,
                                                   const std::vector<int>& grid_ns,
                                                   const DiscreteRecoveryOptions& base) {
  if (grid_ns.empty() || !std::is_sorted(grid_ns.begin(), grid_ns.end()))
    throw std::invalid_argument("grid_convergence_study: grid sizes must be nonempty and ascending");
  std::vector<ConvergenceRow> rows;
  for (int n : grid_ns) {
    DiscreteRecoveryOptions o = base;
    o.grid_n = n;
    RecoveryResult r = recover_discrete(y, o, &truth);
    ConvergenceRow row;
    row.n = n;
    row.eps_x = *r.eps_x;
    row.eps_c = *r.eps_c;
    row.off_cluster_mass = r.diagnostics.off_cluster_mass;
    row.atoms = static_cast<int>(r.measure.size());
    row.spurious = *r.spurious_atoms;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ssr
