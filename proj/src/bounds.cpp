#include "ssr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "ssr/errors.hpp"
#include "ssr/harmonics.hpp"

namespace ssr {

namespace {

constexpr double kPi = std::numbers::pi;
const double kPi4 = std::pow(kPi, 4);

using Rng = std::mt19937_64;

Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> g;
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-8);
  return v.normalized();
}

TangentFrame random_frame(const SpherePoint& x, Rng& rng) {
  Vec3 a = project_tangent(x, random_unit(rng));
  while (a.norm() < 1e-6) a = project_tangent(x, random_unit(rng));
  Vec3 e1 = a.normalized();
  return TangentFrame{x, e1, x.xyz().cross(e1)};
}

SpherePoint at_distance(const SpherePoint& x, double d, Rng& rng) {
  Vec3 v = project_tangent(x, random_unit(rng));
  while (v.norm() < 1e-6) v = project_tangent(x, random_unit(rng));
  return exp_map(x, d * v.normalized());
}

// Mixture of uniform and log-scaled distances so both the near field and the
// decay region get samples.
double sample_distance(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double d;
  if (u(rng) < 0.5) {
    d = kPi * u(rng);
  } else {
    d = kPi / (n + 1.0) * std::pow(10.0, -3.0 + 4.0 * u(rng));
  }
  return std::clamp(d, 1e-6, kPi - 1e-6);
}

double sample_small(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double cap = kPi / (4.0 * (n + 1.0));
  double d = (u(rng) < 0.5) ? cap * u(rng) : cap * std::pow(10.0, -4.0 * u(rng));
  return std::clamp(d, 1e-7, cap);
}

struct Ctx {
  const JacksonKernel& ker;
  int n;
  double np1;
  Rng& rng;
};

// Each evaluator draws one configuration and returns (omega, lhs, rhs) for
// the worst index combination at that configuration.
using Eval = std::function<BoundSample(Ctx&)>;

BoundSample worst(double omega, std::initializer_list<std::pair<double, double>> pairs) {
  BoundSample s{omega, 0.0, 1.0};
  double best = -1.0;
  for (auto [l, r] : pairs) {
    double q = std::abs(l) / r;
    if (q > best) {
      best = q;
      s.lhs = std::abs(l);
      s.rhs = r;
    }
  }
  return s;
}

Eval lemma_generic(int which) {
  return [which](Ctx& c) {
    double w = sample_distance(c.n, c.rng);
    double B = kPi4 / std::pow(w, 4);
    const JacksonKernel& k = c.ker;
    switch (which) {
      case 0: return worst(w, {{k.eval(w), B / std::pow(c.np1, 4)}});
      case 1: return worst(w, {{k.derivative(w, 1), 3.0 * B / std::pow(c.np1, 3)}});
      case 2: return worst(w, {{k.derivative(w, 2), 12.5 * B / std::pow(c.np1, 2)}});
      case 3: return worst(w, {{k.g_functions(w).G1, 2.0 * B / std::pow(c.np1, 2)}});
      case 4: return worst(w, {{k.g_functions(w).G2, 14.5 * B / std::pow(c.np1, 2)}});
      case 5: return worst(w, {{k.g_functions(w).G3, 8.0 * B / c.np1}});
      default: return worst(w, {{k.derivative(w, 3), 50.5 * B / c.np1}});
    }
  };
}

Eval lemma_small(int which) {
  return [which](Ctx& c) {
    double w = sample_small(c.n, c.rng);
    const JacksonKernel& k = c.ker;
    double J4 = k.fourth_at_zero();
    double s = std::sin(w), co = std::cos(w);
    double j1 = k.derivative(w, 1), j2 = k.derivative(w, 2);
    GValues g = k.g_functions(w);
    switch (which) {
      case 0: return worst(w, {{j2 - co * g.G1, J4 / 2.0 * w * w}});
      case 1: {
        // J''(0) - J''(w) as -int_0^w J''' to avoid cancelling two O(n^2) values.
        std::vector<double> t, wt;
        gauss_legendre(12, t, wt);
        double acc = 0.0;
        for (size_t i = 0; i < t.size(); ++i) acc += wt[i] * k.derivative(0.5 * w * (t[i] + 1.0), 3);
        return worst(w, {{-0.5 * w * acc, J4 / 2.0 * w * w}});
      }
      case 2: return worst(w, {{g.G2, J4 / 2.0 * w * w}});
      case 3: return worst(w, {{g.G3, 0.52 * J4 * w}});
      case 4: return worst(w, {{(j1 - co * s * j2) / (s * s), 0.52 * J4 * w}});
      default: return worst(w, {{k.derivative(w, 3), J4 * w}});
    }
  };
}

Eval theorem_general(int which) {
  return [which](Ctx& c) {
    SpherePoint x(random_unit(c.rng));
    double d = sample_distance(c.n, c.rng);
    SpherePoint y = at_distance(x, d, c.rng);
    d = geodesic_distance(x, y);
    TangentFrame fx = random_frame(x, c.rng), fy = random_frame(y, c.rng);
    KernelDerivatives kd = c.ker.derivatives(fx, fy);
    double B = kPi4 / std::pow(d, 4);
    switch (which) {
      case 0: return worst(d, {{kd.value, B / std::pow(c.np1, 4)}});
      case 1: {
        double r = 3.0 * B / std::pow(c.np1, 3);
        return worst(d, {{kd.grad_y[0], r}, {kd.grad_y[1], r}});
      }
      case 2: {
        double r = 16.5 * B / std::pow(c.np1, 2);
        return worst(d, {{kd.hess_xy(0, 0), r}, {kd.hess_xy(0, 1), r}, {kd.hess_xy(1, 0), r}, {kd.hess_xy(1, 1), r}});
      }
      case 3: {
        double r = 16.5 * B / std::pow(c.np1, 2);
        return worst(d, {{kd.hess_xx(0, 0), r}, {kd.hess_xx(0, 1), r}, {kd.hess_xx(1, 1), r}});
      }
      default: {
        double r = 101.0 * B / c.np1;
        BoundSample s = worst(d, {{kd.third[0](0, 0), r}, {kd.third[0](0, 1), r}, {kd.third[0](1, 0), r},
                                  {kd.third[0](1, 1), r}});
        BoundSample t = worst(d, {{kd.third[1](0, 0), r}, {kd.third[1](0, 1), r}, {kd.third[1](1, 0), r},
                                  {kd.third[1](1, 1), r}});
        return (s.lhs / s.rhs >= t.lhs / t.rhs) ? s : t;
      }
    }
  };
}

struct PolarConfig {
  PolarHessians h;
  double d;
};

PolarConfig polar_generic(Ctx& c) {
  for (;;) {
    SpherePoint z(random_unit(c.rng)), x(random_unit(c.rng));
    double d = sample_distance(c.n, c.rng);
    SpherePoint y = at_distance(x, d, c.rng);
    double dxz = geodesic_distance(x, z), dyz = geodesic_distance(y, z);
    d = geodesic_distance(x, y);
    if (dxz < 1e-6 || dxz > kPi - 1e-6 || dyz < 1e-6 || d < 1e-6 || d > kPi - 1e-6) continue;
    PolarChart chart{z, random_frame(z, c.rng)};
    return {c.ker.polar_hessians(chart, x, y, random_frame(y, c.rng)), d};
  }
}

PolarConfig polar_small(Ctx& c) {
  SpherePoint z(random_unit(c.rng));
  TangentFrame fz = random_frame(z, c.rng);
  double d = sample_small(c.n, c.rng);
  SpherePoint x = at_distance(z, d, c.rng);
  d = geodesic_distance(x, z);
  PolarChart chart{z, fz};
  return {c.ker.polar_hessians(chart, x, z, fz), d};
}

Eval theorem_polar(int which) {
  return [which](Ctx& c) {
    PolarConfig p = polar_generic(c);
    double B = kPi4 / std::pow(p.d, 4);
    const auto& H = p.h.H_J;
    const auto& X = p.h.H_XJ;
    switch (which) {
      case 0: {
        double r = 16.5 * B / std::pow(c.np1, 2);
        return worst(p.d, {{H(0, 0), r}, {H(1, 1), r}});
      }
      case 1: return worst(p.d, {{H(0, 1), 14.5 * B / std::pow(c.np1, 2)}});
      case 2: {
        double r = 103.0 * B / c.np1;
        return worst(p.d, {{X[0](0, 0), r}, {X[0](1, 1), r}, {X[1](0, 0), r}, {X[1](1, 1), r}});
      }
      default: {
        double r = 93.5 * B / c.np1;
        return worst(p.d, {{X[0](0, 1), r}, {X[1](0, 1), r}});
      }
    }
  };
}

Eval theorem_polar_small(int which) {
  return [which](Ctx& c) {
    PolarConfig p = polar_small(c);
    double delta = c.np1 * p.d;
    const auto& H = p.h.H_J;
    const auto& X = p.h.H_XJ;
    double j2 = c.ker.second_at_zero();
    double r2 = 3.0 / 20.0 * delta * delta * c.np1 * c.np1;
    double n3 = std::pow(c.np1, 3);
    switch (which) {
      case 0: return worst(p.d, {{j2 - H(0, 0), r2}, {j2 - H(1, 1), r2}});
      case 1: return worst(p.d, {{H(0, 1), r2}});
      case 2: return worst(p.d, {{X[0](0, 0), 0.3 * delta * n3}, {X[1](0, 0), 0.3 * delta * n3}});
      case 3: return worst(p.d, {{X[0](1, 1), 0.2 * delta * n3}, {X[1](1, 1), 0.2 * delta * n3}});
      default: return worst(p.d, {{X[0](0, 1), 0.2 * delta * n3}, {X[1](0, 1), 0.2 * delta * n3}});
    }
  };
}

const std::map<std::string, Eval>& registry() {
  static const std::map<std::string, Eval> reg = [] {
    std::map<std::string, Eval> r;
    const char* lg[] = {"L32.J", "L32.dJ", "L32.d2J", "L32.G1", "L32.G2", "L32.G3", "L32.d3J"};
    for (int i = 0; i < 7; ++i) r[lg[i]] = lemma_generic(i);
    const char* ls[] = {"L32s.d2J-cosG1", "L32s.d2J0-d2J", "L32s.G2", "L32s.G3", "L32s.mixed", "L32s.d3J"};
    for (int i = 0; i < 6; ++i) r[ls[i]] = lemma_small(i);
    const char* tg[] = {"T33.J", "T33.Xy", "T33.XxXy", "T33.XxXx", "T33.XxXxXy"};
    for (int i = 0; i < 5; ++i) r[tg[i]] = theorem_general(i);
    const char* tp[] = {"T34.HJ_ii", "T34.HJ_ij", "T34.HXJ_ii", "T34.HXJ_ij"};
    for (int i = 0; i < 4; ++i) r[tp[i]] = theorem_polar(i);
    const char* ts[] = {"T34s.HJ_ii", "T34s.HJ_ij", "T34s.HXJ_11", "T34s.HXJ_22", "T34s.HXJ_ij"};
    for (int i = 0; i < 5; ++i) r[ts[i]] = theorem_polar_small(i);
    return r;
  }();
  return reg;
}

std::string resolve(const std::string& id) {
  if (registry().count(id)) return id;
  std::string alt = "L32." + id;
  if (registry().count(alt)) return alt;
  return {};
}

}  // namespace

const std::vector<std::string>& bound_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return ids;
}

bool is_bound_id(const std::string& id) { return !resolve(id).empty(); }

BoundAudit audit_bound(const std::string& id, int N, std::size_t samples, std::uint64_t seed, bool keep_trace,
                       double slack) {
  std::string key = resolve(id);
  if (key.empty()) throw std::invalid_argument("unknown bound id: " + id);
  JacksonKernel ker(N);
  Rng rng(seed ^ (std::hash<std::string>{}(key) + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(N)));
  Ctx ctx{ker, ker.n(), ker.n() + 1.0, rng};
  const Eval& ev = registry().at(key);
  BoundAudit a;
  a.id = key;
  a.N = N;
  a.samples = samples;
  a.pass = true;
  a.worst_margin = INFINITY;
  for (std::size_t s = 0; s < samples; ++s) {
    BoundSample b = ev(ctx);
    double ratio = b.lhs / b.rhs;
    if (ratio > a.worst_ratio) {
      a.worst_ratio = ratio;
      a.worst_omega = b.omega;
    }
    a.worst_margin = std::min(a.worst_margin, b.rhs - b.lhs);
    if (!(b.lhs <= b.rhs + slack * std::max(1.0, b.rhs))) a.pass = false;
    if (keep_trace) a.trace.push_back(b);
  }
  return a;
}

const std::vector<RingQuantity>& ring_quantities() {
  static const std::vector<RingQuantity> q = {RingQuantity::Kernel,      RingQuantity::GradY,
                                              RingQuantity::HessXX,      RingQuantity::PolarHJDiag,
                                              RingQuantity::Third,       RingQuantity::PolarHJOff,
                                              RingQuantity::PolarHXJDiag, RingQuantity::PolarHXJOff};
  return q;
}

const char* ring_quantity_name(RingQuantity q) {
  switch (q) {
    case RingQuantity::Kernel: return "J";
    case RingQuantity::GradY: return "Xy";
    case RingQuantity::HessXX: return "XxXx";
    case RingQuantity::PolarHJDiag: return "HJ_ii";
    case RingQuantity::Third: return "XxXxXy";
    case RingQuantity::PolarHJOff: return "HJ_ij";
    case RingQuantity::PolarHXJDiag: return "HXJ_ii";
    case RingQuantity::PolarHXJOff: return "HXJ_ij";
  }
  return "?";
}

double ring_constant(double eps) {
  double p = std::pow(1.0 - eps, -4.0);
  return riemann_zeta(3.0) * std::min(9.0 * p + 25.0, 25.0 * p);
}

RingSumResult ring_sum_bound_check(const JacksonKernel& ker, const std::vector<SpherePoint>& points,
                                   const SpherePoint& x, double nu, RingQuantity quantity) {
  const double np1 = ker.n() + 1.0;
  if (points.empty()) throw SeparationError("ring_sum_bound_check: empty point set");
  if (points.size() > 1 && min_separation(points) < nu / np1 * (1.0 - 1e-12))
    throw SeparationError("ring_sum_bound_check: point set violates the separation condition");
  size_t m = 0;
  double dm = INFINITY;
  for (size_t k = 0; k < points.size(); ++k) {
    double d = geodesic_distance(x, points[k]);
    if (d < dm) {
      dm = d;
      m = k;
    }
  }
  double eps = dm * np1 / nu;
  if (eps > 0.5 + 1e-12) throw SeparationError("ring_sum_bound_check: x is not within nu/(2(n+1)) of a point");

  RingSumResult res;
  res.eps = eps;
  double scale = kPi4 * ring_constant(eps) / std::pow(nu, 4);
  const bool polar = quantity == RingQuantity::PolarHJDiag || quantity == RingQuantity::PolarHJOff ||
                     quantity == RingQuantity::PolarHXJDiag || quantity == RingQuantity::PolarHXJOff;
  // Chart centered at the nearest point as in the near-atom analysis; fall
  // back to a perpendicular center when x sits on that point.
  PolarChart chart{points[m], some_frame(points[m])};
  if (dm < 1e-9) {
    SpherePoint c(some_frame(x).eta1);
    chart = PolarChart{c, some_frame(c)};
  }
  TangentFrame fx = some_frame(x);
  // Max over the free indices of the sum over k.
  double acc[2][2] = {{0, 0}, {0, 0}};
  for (size_t k = 0; k < points.size(); ++k) {
    if (k == m) continue;
    TangentFrame fk = some_frame(points[k]);
    if (!polar) {
      KernelDerivatives d = ker.derivatives(fx, fk);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double v = 0.0;
          switch (quantity) {
            case RingQuantity::Kernel: v = d.value; break;
            case RingQuantity::GradY: v = d.grad_y[j]; break;
            case RingQuantity::HessXX: v = d.hess_xx(i, i); break;
            default: v = d.third[i](i, j); break;
          }
          acc[i][j] += std::abs(v);
        }
    } else {
      PolarHessians h = ker.polar_hessians(chart, x, points[k], fk);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double v = 0.0;
          switch (quantity) {
            case RingQuantity::PolarHJDiag: v = h.H_J(i, i); break;
            case RingQuantity::PolarHJOff: v = h.H_J(0, 1); break;
            case RingQuantity::PolarHXJDiag: v = h.H_XJ[j](i, i); break;
            default: v = h.H_XJ[j](0, 1); break;
          }
          acc[i][j] += std::abs(v);
        }
    }
  }
  res.lhs = std::max({acc[0][0], acc[0][1], acc[1][0], acc[1][1]});
  switch (quantity) {
    case RingQuantity::Kernel: res.rhs = scale; break;
    case RingQuantity::GradY: res.rhs = 3.0 * scale * np1; break;
    case RingQuantity::HessXX:
    case RingQuantity::PolarHJDiag: res.rhs = 16.5 * scale * np1 * np1; break;
    case RingQuantity::Third: res.rhs = 101.0 * scale * std::pow(np1, 3); break;
    case RingQuantity::PolarHJOff: res.rhs = 14.5 * scale * np1 * np1; break;
    case RingQuantity::PolarHXJDiag: res.rhs = 103.5 * scale * std::pow(np1, 3); break;
    case RingQuantity::PolarHXJOff: res.rhs = 93.5 * scale * std::pow(np1, 3); break;
  }
  return res;
}

}  // namespace ssr
