#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ssr/sphere_geom.hpp"
#include "test_support.hpp"

using namespace ssr;
using std::numbers::pi;

namespace {
const SpherePoint e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);
}

TEST_CASE("geodesic distance endpoints") {
  CHECK(geodesic_distance(e3, e3) == doctest::Approx(0.0));
  CHECK(geodesic_distance(e3, SpherePoint(0, 0, -1)) == doctest::Approx(pi));
  CHECK(geodesic_distance(e1, e2) == doctest::Approx(pi / 2));
}

TEST_CASE("table 1 support is separated") {
  // The quoted separation and the tabulated coordinates agree to four digits.
  CHECK(min_separation(test::table1().points()) == doctest::Approx(0.549335).epsilon(2e-4));
}

TEST_CASE("exp map basics and distance property") {
  CHECK((exp_map(e3, Vec3::Zero()).xyz() - e3.xyz()).norm() < 1e-15);
  CHECK((exp_map(e3, (pi / 2) * e1.xyz()).xyz() - e1.xyz()).norm() < 1e-15);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> len(0.0, pi - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    SpherePoint x = test::random_point(rng);
    Vec3 v = project_tangent(x, test::gaussian3(rng));
    v = len(rng) * v.normalized();
    SpherePoint y = exp_map(x, v);
    REQUIRE(geodesic_distance(x, y) == doctest::Approx(v.norm()).epsilon(1e-9));
    if (v.norm() < pi - 1e-3) REQUIRE((log_map(x, y) - v).norm() < 1e-8);
  }
}

TEST_CASE("transported frames") {
  TangentFrame F = standard_frame();
  TangentFrame same = transported_frame(e3, F, e3);
  CHECK((same.eta1 - F.eta1).norm() < 1e-14);
  CHECK((same.eta2 - F.eta2).norm() < 1e-14);
  TangentFrame anti = transported_frame(e3, F, SpherePoint(0, 0, -1));
  CHECK((anti.eta1 + F.eta1).norm() < 1e-14);
  CHECK((anti.eta2 + F.eta2).norm() < 1e-14);

  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    SpherePoint z = test::random_point(rng), x = test::random_point(rng);
    TangentFrame t = transported_frame(z, some_frame(z), x);
    REQUIRE(t.is_valid(1e-12));
    REQUIRE((t.base.xyz() - x.xyz()).norm() < 1e-15);
  }
}

TEST_CASE("polar chart coordinates") {
  PolarChart c = PolarChart::standard();
  auto [r1, t1] = polar_coords(c, e1);
  CHECK(r1 == doctest::Approx(pi / 2));
  CHECK(t1 == doctest::Approx(0.0));
  auto [r2, t2] = polar_coords(c, e2);
  CHECK(r2 == doctest::Approx(pi / 2));
  CHECK(t2 == doctest::Approx(pi / 2));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    SpherePoint x = test::random_point(rng);
    auto [r, t] = polar_coords(c, x);
    REQUIRE((polar_point(c, r, t).xyz() - x.xyz()).norm() < 1e-12);
  }
}

TEST_CASE("polar tangent basis") {
  PolarChart c = PolarChart::standard();
  auto [g1, g2] = polar_tangent_basis(c, e1);
  CHECK((g1 - Vec3(0, 0, -1)).norm() < 1e-12);
  CHECK((g2 - Vec3(0, 1, 0)).norm() < 1e-12);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    SpherePoint x = test::random_point(rng);
    if (std::abs(x[2]) > 0.999) continue;
    auto [a, b] = polar_tangent_basis(c, x);
    REQUIRE(std::abs(a.dot(x.xyz())) < 1e-12);
    REQUIRE((b - x.xyz().cross(a)).norm() < 1e-12);
  }
}

TEST_CASE("cross product identities") {
  Vec3 a = e1.xyz();
  CHECK(cross_identities_check(a, a, a, a));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    Vec3 p = test::gaussian3(rng), q = test::gaussian3(rng), r = test::gaussian3(rng), s = test::gaussian3(rng);
    REQUIRE(cross_identities_check(p, q, r, s));
    Vec3 lhs = p.cross(q).cross(p.cross(r));
    Vec3 rhs = p.dot(q.cross(r)) * p;
    REQUIRE((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
  }
}

TEST_CASE("tangent basis at the chart pole is rejected") {
  CHECK_THROWS_AS(polar_tangent_basis(PolarChart::standard(), e3), PoleError);
}
