#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ssr/bounds.hpp"
#include "ssr/certificate.hpp"
#include "ssr/errors.hpp"
#include "ssr/kernels.hpp"
#include "test_support.hpp"

using namespace ssr;
using std::numbers::pi;

namespace {

// Fejer kernel as its cosine sum, normalized to 1 at zero.
double fejer_normalized(int n, double w) {
  double s = 1.0;
  for (int k = 1; k <= n; ++k) s += 2.0 * (1.0 - k / (n + 1.0)) * std::cos(k * w);
  return s / (n + 1.0);
}

TangentFrame random_frame(const SpherePoint& x, std::mt19937_64& rng) {
  Vec3 a = project_tangent(x, test::gaussian3(rng)).normalized();
  return TangentFrame{x, a, x.xyz().cross(a)};
}

}  // namespace

TEST_CASE("Jackson kernel values") {
  for (int N : {10, 11, 20, 41}) {
    JacksonKernel k(N);
    CHECK(k.eval(0.0) == doctest::Approx(1.0));
    CHECK(k.n() == N / 2);
  }
  JacksonKernel k(20);
  double w = pi / 11.0;
  double f = fejer_normalized(10, w);
  CHECK(k.eval(w) == doctest::Approx(f * f).epsilon(1e-12));

  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> u(0.0, pi);
  for (int N : {10, 20, 41}) {
    JacksonKernel kk(N);
    for (int i = 0; i < 200; ++i) {
      double om = u(rng);
      REQUIRE(std::abs(kk.series(std::cos(om))[0] - kk.eval(om)) < 1e-9);
    }
  }
}

TEST_CASE("Jackson kernel derivatives") {
  JacksonKernel k(20);
  CHECK(k.derivative(0.0, 2) == doctest::Approx(-40.0).epsilon(1e-12));
  CHECK(k.second_at_zero() == doctest::Approx(-40.0).epsilon(1e-12));
  CHECK(std::abs(k.derivative(pi, 1)) < 1e-12);
  CHECK(k.fourth_at_zero() == doctest::Approx(10.0 * 12 * (9.0 * 120 - 2) / 30.0).epsilon(1e-10));

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, pi - 0.05);
  const double h = 1e-4;
  for (int i = 0; i < 100; ++i) {
    double w = u(rng);
    for (int order = 1; order <= 3; ++order) {
      double fd = (k.derivative(w + h, order - 1) - k.derivative(w - h, order - 1)) / (2 * h);
      double an = k.derivative(w, order);
      REQUIRE(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("G functions") {
  std::mt19937_64 rng(22);
  for (int N : {20, 30, 41}) {
    JacksonKernel k(N);
    const double np1 = k.n() + 1.0;
    std::uniform_real_distribution<double> u(1e-4, pi - 1e-4);
    std::uniform_real_distribution<double> small(1e-6, pi / (4 * np1));
    for (int i = 0; i < 10000; ++i) {
      double w = u(rng);
      GValues g = k.g_functions(w);
      REQUIRE(std::abs(g.G1) <= 2 * std::pow(pi, 4) / (np1 * np1 * std::pow(w, 4)));
      REQUIRE(std::abs(g.G3 - g.G2 / std::sin(w)) <= 1e-10 * std::max(1.0, std::abs(g.G3)));
      REQUIRE(std::abs(k.eval(w)) <= std::pow(pi, 4) / std::pow(np1 * w, 4) * (1 + 1e-9));
      double ws = small(rng);
      REQUIRE(std::abs(k.g_functions(ws).G3) <= 0.52 * k.fourth_at_zero() * ws);
    }
  }
  CHECK_THROWS(JacksonKernel(20).g_functions(0.0));
}

TEST_CASE("kernel derivatives on the diagonal and antipodes") {
  JacksonKernel k(20);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    SpherePoint x = test::random_point(rng);
    TangentFrame f = random_frame(x, rng);
    KernelDerivatives d = k.derivatives(f, f);
    REQUIRE(d.value == doctest::Approx(1.0));
    REQUIRE(d.grad_y.norm() < 1e-10);
    REQUIRE((d.hess_xy - 40.0 * Eigen::Matrix2d::Identity()).norm() < 1e-9);

    TangentFrame g = random_frame(x.antipode(), rng);
    KernelDerivatives a = k.derivatives(f, g);
    REQUIRE(a.grad_y.norm() < 1e-10);
    REQUIRE(a.third[0].norm() + a.third[1].norm() < 1e-8);
  }
}

TEST_CASE("kernel derivatives match finite differences") {
  JacksonKernel k(20);
  std::mt19937_64 rng(24);
  const double h = 1e-4;
  auto J = [&](const SpherePoint& a, const SpherePoint& b) { return k.eval(geodesic_distance(a, b)); };
  for (int i = 0; i < 100; ++i) {
    SpherePoint x = test::random_point(rng);
    std::uniform_real_distribution<double> dist(0.1, pi - 0.1);
    Vec3 v = project_tangent(x, test::gaussian3(rng)).normalized();
    SpherePoint y = exp_map(x, dist(rng) * v);
    TangentFrame fx = random_frame(x, rng), fy = random_frame(y, rng);
    KernelDerivatives d = k.derivatives(fx, fy);
    Vec3 ex[2] = {fx.eta1, fx.eta2}, ey[2] = {fy.eta1, fy.eta2};
    double scale = 1.0 + d.hess_xy.cwiseAbs().maxCoeff();
    for (int n = 0; n < 2; ++n) {
      double fd = (J(x, exp_map(y, h * ey[n])) - J(x, exp_map(y, -h * ey[n]))) / (2 * h);
      REQUIRE(std::abs(fd - d.grad_y[n]) < 1e-5 * scale);
      for (int m = 0; m < 2; ++m) {
        double pp = J(exp_map(x, h * ex[m]), exp_map(y, h * ey[n]));
        double pm = J(exp_map(x, h * ex[m]), exp_map(y, -h * ey[n]));
        double mp = J(exp_map(x, -h * ex[m]), exp_map(y, h * ey[n]));
        double mm = J(exp_map(x, -h * ex[m]), exp_map(y, -h * ey[n]));
        double mixed = (pp - pm - mp + mm) / (4 * h * h);
        REQUIRE(std::abs(mixed - d.hess_xy(m, n)) < 1e-4 * scale);
      }
    }
  }
}

TEST_CASE("kernel positivity and zonality") {
  JacksonKernel k(20);
  std::mt19937_64 rng(25);
  for (int i = 0; i < 100000; ++i) {
    SpherePoint x = test::random_point(rng), y = test::random_point(rng);
    REQUIRE(k.eval(geodesic_distance(x, y)) >= 0.0);
  }
  for (int i = 0; i < 100; ++i) {
    SpherePoint x = test::random_point(rng), y = test::random_point(rng);
    Eigen::Matrix3d R = Eigen::Quaterniond::UnitRandom().toRotationMatrix();
    double a = k.eval(geodesic_distance(x, y));
    double b = k.eval(geodesic_distance(SpherePoint(R * x.xyz()), SpherePoint(R * y.xyz())));
    REQUIRE(std::abs(a - b) < 1e-12);
  }
}

TEST_CASE("zeta constant") {
  CHECK(std::abs(riemann_zeta(3.0) - 1.2020569031595942) < 1e-12);
  CHECK(ring_constant(0.0) == doctest::Approx(riemann_zeta(3.0) * 25.0));
}

TEST_CASE("ring sums") {
  JacksonKernel k(41);
  SpherePoint x(0.3, 0.2, 0.9);
  for (RingQuantity q : ring_quantities()) {
    RingSumResult r = ring_sum_bound_check(k, {x}, x, 9.6 * pi, q);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs > 0.0);
  }

  // A 50-point spiral is 9.6 pi / (n+1) separated only once n is large
  // enough, so the degree is chosen from the lattice.
  std::vector<SpherePoint> pts = fibonacci_lattice(50);
  const double nu = 9.6 * pi;
  int n = static_cast<int>(std::ceil(nu / min_separation(pts))) - 1;
  JacksonKernel big(2 * n);
  REQUIRE(big.n() == n);
  std::mt19937_64 rng(26);
  int checked = 0;
  for (int t = 0; t < 200 && checked < 20; ++t) {
    SpherePoint c = pts[t % pts.size()];
    Vec3 v = project_tangent(c, test::gaussian3(rng)).normalized();
    std::uniform_real_distribution<double> r(0.0, 0.5 * nu / (n + 1.0));
    SpherePoint p = exp_map(c, r(rng) * v);
    for (RingQuantity q : ring_quantities()) {
      RingSumResult res = ring_sum_bound_check(big, pts, p, nu, q);
      INFO(ring_quantity_name(q));
      REQUIRE(res.lhs <= res.rhs);
    }
    ++checked;
  }
  CHECK(checked == 20);
  CHECK_THROWS_AS(ring_sum_bound_check(k, pts, x, nu, RingQuantity::Kernel), SeparationError);
}

TEST_CASE("bound audits") {
  for (int N : {20, 30, 41}) {
    for (const std::string& id : bound_ids()) {
      BoundAudit a = audit_bound(id, N, 2000, 7);
      INFO(id << " N=" << N);
      REQUIRE(a.pass);
      REQUIRE(a.worst_ratio < 1.0);
    }
  }
  BoundAudit g1 = audit_bound("G1", 20, 1000, 1);
  CHECK(g1.pass);
  CHECK(g1.worst_ratio < 1.0);
  CHECK_FALSE(is_bound_id("nope"));
}
