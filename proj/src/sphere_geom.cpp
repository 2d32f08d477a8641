#include "ssr/sphere_geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace ssr {

namespace {
constexpr double kPoleRadius = 1e-9;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

void check_off_poles(const PolarChart& chart, const SpherePoint& x) {
  double d = geodesic_distance(chart.center, x);
  if (d < kPoleRadius || d > std::numbers::pi - kPoleRadius)
    throw PoleError("polar chart evaluated at a pole");
}
}  // namespace

SpherePoint::SpherePoint(const Vec3& v) {
  double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("SpherePoint from zero vector");
  xyz_ = v / n;
}

SpherePoint SpherePoint::from_spherical(double r, double theta) {
  return SpherePoint(Vec3(std::sin(r) * std::cos(theta), std::sin(r) * std::sin(theta), std::cos(r)));
}

double SpherePoint::inclination() const { return std::acos(clamp_unit(xyz_.z())); }

double SpherePoint::azimuth() const { return wrap_angle(std::atan2(xyz_.y(), xyz_.x())); }

bool TangentFrame::is_valid(double tol) const {
  const Vec3& x = base.xyz();
  return std::abs(eta1.dot(x)) < tol && std::abs(eta2.dot(x)) < tol && std::abs(eta1.dot(eta2)) < tol &&
         std::abs(eta1.norm() - 1.0) < tol && (eta2 - x.cross(eta1)).norm() < tol;
}

PolarChart PolarChart::standard() { return PolarChart{SpherePoint(0, 0, 1), standard_frame()}; }

double clamp_unit(double t) { return std::clamp(t, -1.0, 1.0); }

double geodesic_distance(const SpherePoint& x, const SpherePoint& y) {
  // atan2 form keeps full precision near 0 and pi where acos loses digits.
  double s = x.xyz().cross(y.xyz()).norm();
  double c = x.xyz().dot(y.xyz());
  return std::atan2(s, c);
}

double chordal_distance(const SpherePoint& x, const SpherePoint& y) { return (x.xyz() - y.xyz()).norm(); }

Vec3 project_tangent(const SpherePoint& x, const Vec3& v) { return v - v.dot(x.xyz()) * x.xyz(); }

SpherePoint exp_map(const SpherePoint& x, const Vec3& v) {
  if (std::abs(v.dot(x.xyz())) > 1e-9 * std::max(1.0, v.norm()))
    throw std::invalid_argument("exp_map: vector not tangent");
  double nv = v.norm();
  if (nv < 1e-14) return x;
  return SpherePoint(std::cos(nv) * x.xyz() + std::sin(nv) * v / nv);
}

Vec3 log_map(const SpherePoint& x, const SpherePoint& y) {
  Vec3 p = project_tangent(x, y.xyz());
  double np = p.norm();
  if (np < 1e-300) return Vec3::Zero();
  return geodesic_distance(x, y) * p / np;
}

TangentFrame standard_frame() { return TangentFrame{SpherePoint(0, 0, 1), Vec3::UnitX(), Vec3::UnitY()}; }

TangentFrame some_frame(const SpherePoint& x) {
  const Vec3& v = x.xyz();
  Vec3 a = std::abs(v.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 e1 = (a - a.dot(v) * v).normalized();
  return TangentFrame{x, e1, v.cross(e1)};
}

TangentFrame transported_frame(const SpherePoint& z, const TangentFrame& frame_z, const SpherePoint& x) {
  const Vec3& zv = z.xyz();
  const Vec3& xv = x.xyz();
  Vec3 axis = zv.cross(xv);
  double s = axis.norm();
  double c = zv.dot(xv);
  if (s < 1e-15) {
    if (c > 0) return TangentFrame{x, frame_z.eta1, frame_z.eta2};
    return TangentFrame{x, -frame_z.eta1, -frame_z.eta2};
  }
  axis /= s;
  // Rodrigues rotation by angle d(z,x) about z x x / sin d.
  auto rot = [&](const Vec3& v) { return c * v + s * axis.cross(v) + (1.0 - c) * axis.dot(v) * axis; };
  Vec3 e1 = rot(frame_z.eta1);
  e1 = (e1 - e1.dot(xv) * xv).normalized();
  return TangentFrame{x, e1, xv.cross(e1)};
}

std::pair<double, double> polar_coords(const PolarChart& chart, const SpherePoint& x) {
  check_off_poles(chart, x);
  double r = geodesic_distance(chart.center, x);
  double th = std::atan2(x.xyz().dot(chart.frame.eta2), x.xyz().dot(chart.frame.eta1));
  return {r, wrap_angle(th)};
}

SpherePoint polar_point(const PolarChart& chart, double r, double theta) {
  Vec3 v = std::cos(r) * chart.center.xyz() +
           std::sin(r) * (std::cos(theta) * chart.frame.eta1 + std::sin(theta) * chart.frame.eta2);
  return SpherePoint(v);
}

std::pair<Vec3, Vec3> polar_tangent_basis(const PolarChart& chart, const SpherePoint& x) {
  auto [r, th] = polar_coords(chart, x);
  Vec3 dir = std::cos(th) * chart.frame.eta1 + std::sin(th) * chart.frame.eta2;
  Vec3 g1 = -std::sin(r) * chart.center.xyz() + std::cos(r) * dir;
  Vec3 g2 = -std::sin(th) * chart.frame.eta1 + std::cos(th) * chart.frame.eta2;
  return {g1, g2};
}

bool cross_identities_check(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, double rel_tol) {
  auto near = [rel_tol](double lhs, double rhs, double scale) {
    return std::abs(lhs - rhs) <= rel_tol * std::max(1.0, scale);
  };
  auto nearv = [rel_tol](const Vec3& lhs, const Vec3& rhs, double scale) {
    return (lhs - rhs).norm() <= rel_tol * std::max(1.0, scale);
  };
  double na = a.norm(), nb = b.norm(), nc = c.norm(), nd = d.norm();
  bool ok = true;
  // (i) a x b = -(b x a)
  ok &= nearv(a.cross(b), -b.cross(a), na * nb);
  // (ii) a . (b x c) = b . (c x a) = c . (a x b)
  double t = a.dot(b.cross(c));
  ok &= near(t, b.dot(c.cross(a)), na * nb * nc) && near(t, c.dot(a.cross(b)), na * nb * nc);
  // (iii) a x (b x c) = b (a.c) - c (a.b)
  ok &= nearv(a.cross(b.cross(c)), b * a.dot(c) - c * a.dot(b), na * nb * nc);
  // (iv) (a x b) x (a x c) = (a . (b x c)) a
  ok &= nearv(a.cross(b).cross(a.cross(c)), t * a, na * na * nb * nc);
  // (v) (a x b) . (c x d) = (a.c)(b.d) - (a.d)(b.c)
  ok &= near(a.cross(b).dot(c.cross(d)), a.dot(c) * b.dot(d) - a.dot(d) * b.dot(c), na * nb * nc * nd);
  return ok;
}

double min_separation(const std::vector<SpherePoint>& pts) {
  double best = std::numbers::pi;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, geodesic_distance(pts[i], pts[j]));
  return best;
}

}  // namespace ssr
