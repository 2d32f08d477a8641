#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ssr/errors.hpp"
#include "ssr/recovery.hpp"
#include "test_support.hpp"

using namespace ssr;
using std::numbers::pi;

TEST_CASE("spherical grid") {
  SphericalGrid g = SphericalGrid::make(5);
  CHECK(g.nodes.size() == 100);
  CHECK(g.Y_matrix(3).rows() == 16);
  CHECK(g.Y_matrix(3).cols() == 100);
  double h = g.fill_distance();
  CHECK(h > 0.0);
  CHECK(h < pi / 5);
  // Every random point lies within the fill distance of some node.
  std::mt19937_64 rng(50);
  for (int i = 0; i < 2000; ++i) {
    SpherePoint x = test::random_point(rng);
    double d = INFINITY;
    for (const auto& p : g.nodes) d = std::min(d, geodesic_distance(x, p));
    REQUIRE(d <= h + 1e-12);
  }
}

TEST_CASE("mean shift clustering") {
  SpherePoint a(0.2, 0.1, 0.9);
  std::vector<int> sizes;
  auto one = mean_shift_cluster({a}, {1.0}, 0.1, 1e-12, &sizes);
  REQUIRE(one.size() == 1);
  CHECK((one[0].xyz() - a.xyz()).norm() < 1e-12);
  CHECK(sizes == std::vector<int>{1});

  std::mt19937_64 rng(51);
  SpherePoint c1(1, 0, 0), c2 = exp_map(c1, Vec3(0, 1.0, 0));
  std::vector<SpherePoint> pts;
  std::vector<double> w;
  Vec3 m1 = Vec3::Zero(), m2 = Vec3::Zero();
  std::uniform_real_distribution<double> wt(0.5, 2.0);
  for (int i = 0; i < 20; ++i) {
    const SpherePoint& c = i % 2 ? c2 : c1;
    SpherePoint p = exp_map(c, 1e-4 * project_tangent(c, test::gaussian3(rng)));
    double v = wt(rng);
    pts.push_back(p);
    w.push_back(v);
    (i % 2 ? m2 : m1) += v * p.xyz();
  }
  auto modes = mean_shift_cluster(pts, w, 0.1, 1e-14, &sizes);
  REQUIRE(modes.size() == 2);
  CHECK(sizes[0] + sizes[1] == 20);
  for (const Vec3& m : {m1.normalized(), m2.normalized()}) {
    double d = std::min((modes[0].xyz() - m).norm(), (modes[1].xyz() - m).norm());
    CHECK(d < 1e-6);
  }

  auto anti = mean_shift_cluster({a, a.antipode()}, {1.0, 1.0}, 0.1, 1e-12);
  CHECK(anti.size() == 2);
}

TEST_CASE("noise model") {
  MomentVector y = moments(6, test::table1());
  MomentVector same = add_noise(y, NoiseModel{NoiseModel::Kind::Deterministic, 0.0, 3});
  CHECK(same.values == y.values);
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    for (double delta : {1e-3, 1e-1}) {
      MomentVector z = add_noise(y, NoiseModel{NoiseModel::Kind::Deterministic, delta, seed});
      CHECK(std::abs((z.values - y.values).norm() - delta) < 1e-12);
      CHECK(z.conjugate_symmetry_defect() < 1e-13);
    }
  }
  MomentVector a = add_noise(y, NoiseModel{NoiseModel::Kind::Deterministic, 0.1, 5});
  MomentVector b = add_noise(y, NoiseModel{NoiseModel::Kind::Deterministic, 0.1, 5});
  CHECK(a.values == b.values);
}

TEST_CASE("scoring against a ground truth") {
  AtomicMeasure truth = test::table1();
  RecoveryResult r;
  r.measure = truth;
  r.measure.atoms.push_back(Atom{SpherePoint(0.0, 0.0, -1.0), 0.01});
  score_recovery(r, truth);
  REQUIRE(r.eps_x);
  CHECK(*r.eps_x < 1e-12);
  CHECK(*r.eps_c < 1e-12);
  CHECK(*r.spurious_atoms == 1);
}

TEST_CASE("SDP pipeline") {
  SdpRecoveryOptions o;
  o.restarts = 300;
  o.seed = 5;
  CHECK_THROWS_AS(recover_sdp(MomentVector(4), o), EmptySupportError);

  std::mt19937_64 rng(52);
  for (int t = 0; t < 2; ++t) {
    AtomicMeasure mu;
    mu.atoms.push_back(Atom{test::random_point(rng), t ? -0.8 : 2.5});
    RecoveryResult r = recover_sdp(moments(6, mu), o, &mu);
    REQUIRE(r.measure.size() == 1);
    CHECK(*r.eps_x < 1e-6);
    CHECK(*r.eps_c < 1e-6);
  }

  // Without ground truth no error metrics are produced.
  AtomicMeasure mu;
  mu.atoms.push_back(Atom{SpherePoint(0.3, 0.3, 0.3), 1.0});
  RecoveryResult plain = recover_sdp(moments(4, mu), o);
  CHECK_FALSE(plain.eps_x.has_value());
  CHECK(plain.diagnostics.method == "sdp");
}

TEST_CASE("two-point separation extremes") {
  SdpRecoveryOptions o;
  o.restarts = 200;
  auto trial = [&](double sep, std::uint64_t seed) {
    std::mt19937_64 rng = stream_rng(seed, 0);
    SpherePoint x = random_sphere_point(rng);
    SpherePoint y = exp_map(x, sep * project_tangent(x, test::gaussian3(rng)).normalized());
    AtomicMeasure mu;
    mu.atoms = {Atom{x, 0.7}, Atom{y, -0.4}};
    o.seed = seed;
    try {
      RecoveryResult r = recover_sdp(moments(6, mu), o, &mu);
      return *r.eps_x < 1.056e-4;
    } catch (const std::exception&) {
      return false;
    }
  };
  int wide = 0, narrow = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    wide += trial(2.0, s);
    narrow += trial(0.1, s);
  }
  CHECK(wide == 3);
  CHECK(narrow <= 1);
}

TEST_CASE("majority monotone indicator") {
  auto bins = [](std::vector<int> s) {
    std::vector<SweepBin> b;
    for (int v : s) b.push_back(SweepBin{0, 0, 0, 5, v});
    return b;
  };
  CHECK(majority_monotone(bins({0, 1, 2, 3, 5, 5})));
  CHECK(majority_monotone(bins({0, 0, 0})));
  CHECK_FALSE(majority_monotone(bins({0, 3, 2, 5})));
  CHECK(majority_monotone(bins({0, 3, 4, 3, 5})));
}

TEST_CASE("grid pipeline") {
  // Atoms placed on grid nodes are recovered exactly.
  SphericalGrid g = SphericalGrid::make(20);
  AtomicMeasure mu;
  mu.atoms = {Atom{g.nodes[130], 1.5}, Atom{g.nodes[1011], -2.0}};
  DiscreteRecoveryOptions o;
  o.grid_n = 20;
  RecoveryResult r = recover_discrete(moments(6, mu), o, &mu);
  CHECK(r.measure.size() == 2);
  CHECK(*r.eps_x < 1e-12);  // zero up to acos rounding
  CHECK(*r.eps_c < 1e-6);
  CHECK(r.diagnostics.grid_nodes == 1600);

  CHECK_THROWS_AS(recover_discrete(MomentVector(6), o), EmptySupportError);
}

TEST_CASE("grid refinement on the reference measure") {
  AtomicMeasure mu = test::table1();
  MomentVector y = moments(6, mu);
  std::vector<ConvergenceRow> rows = grid_convergence_study(y, mu, {20, 40, 80}, DiscreteRecoveryOptions{});
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].eps_x < rows[1].eps_x);
  CHECK(rows[1].eps_x < rows[0].eps_x);
  CHECK(rows[2].off_cluster_mass < rows[1].off_cluster_mass);
  CHECK(rows[1].off_cluster_mass < rows[0].off_cluster_mass);
  // Reference grid errors, accepted within a factor of five.
  CHECK(rows[1].eps_x >= 0.020896 / 5);
  CHECK(rows[1].eps_x <= 0.020896 * 5);
  CHECK(rows[1].eps_c >= 0.018803 / 5);
  CHECK(rows[1].eps_c <= 0.018803 * 5);
}

TEST_CASE("coarse grid error matches the reference order") {
  AtomicMeasure mu = test::table1();
  DiscreteRecoveryOptions o;
  o.grid_n = 20;
  RecoveryResult r = recover_discrete(moments(6, mu), o, &mu);
  CHECK(*r.eps_x >= 0.568226 / 5);
  CHECK(*r.eps_x <= 0.568226 * 5);
}
