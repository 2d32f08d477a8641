#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ssr {

using Vec3 = Eigen::Vector3d;

class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Unit vector in R^3. Construction always normalizes.
class SpherePoint {
 public:
  SpherePoint() : xyz_(0.0, 0.0, 1.0) {}
  explicit SpherePoint(const Vec3& v);
  SpherePoint(double x, double y, double z) : SpherePoint(Vec3(x, y, z)) {}

  // Inclination r from e3 and azimuth theta from e1 toward e2.
  static SpherePoint from_spherical(double r, double theta);

  const Vec3& xyz() const { return xyz_; }
  double operator[](int i) const { return xyz_[i]; }
  SpherePoint antipode() const { return SpherePoint(Vec3(-xyz_)); }

  // Inclination in [0, pi] and azimuth in [0, 2pi) w.r.t. the standard frame.
  double inclination() const;
  double azimuth() const;

 private:
  Vec3 xyz_;
};

// Orthonormal tangent basis at base with eta2 = base x eta1.
struct TangentFrame {
  SpherePoint base;
  Vec3 eta1;
  Vec3 eta2;

  bool is_valid(double tol = 1e-12) const;
};

struct PolarChart {
  SpherePoint center;
  TangentFrame frame;

  static PolarChart standard();
};

double clamp_unit(double t);
double geodesic_distance(const SpherePoint& x, const SpherePoint& y);
double chordal_distance(const SpherePoint& x, const SpherePoint& y);

Vec3 project_tangent(const SpherePoint& x, const Vec3& v);
SpherePoint exp_map(const SpherePoint& x, const Vec3& v);
// Inverse of exp_map for y != -x.
Vec3 log_map(const SpherePoint& x, const SpherePoint& y);

// Frame at e3 given by (e1, e2).
TangentFrame standard_frame();
// Any orthonormal frame at x; deterministic in x.
TangentFrame some_frame(const SpherePoint& x);
TangentFrame transported_frame(const SpherePoint& z, const TangentFrame& frame_z,
                               const SpherePoint& x);

std::pair<double, double> polar_coords(const PolarChart& chart, const SpherePoint& x);
SpherePoint polar_point(const PolarChart& chart, double r, double theta);
std::pair<Vec3, Vec3> polar_tangent_basis(const PolarChart& chart, const SpherePoint& x);

bool cross_identities_check(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                            double rel_tol = 1e-10);

double min_separation(const std::vector<SpherePoint>& pts);

}  // namespace ssr
