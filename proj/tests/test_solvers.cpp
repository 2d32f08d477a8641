#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lp_oracle.hpp"
#include "ssr/certificate.hpp"
#include "ssr/errors.hpp"
#include "ssr/recovery.hpp"
#include "ssr/solvers.hpp"
#include "test_support.hpp"

using namespace ssr;
using std::numbers::pi;

namespace {

SolverOptions engine(BpEngine e) {
  SolverOptions o;
  o.bp_engine = e;
  return o;
}

}  // namespace

TEST_CASE("basis pursuit matches the simplex oracle") {
  std::mt19937_64 rng(40);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> rows(2, 10);
  for (int t = 0; t < 25; ++t) {
    int m = rows(rng);
    int p = std::uniform_int_distribution<int>(m + 1, 30)(rng);
    Eigen::MatrixXd A(m, p);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j) A(i, j) = g(rng);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) y[i] = g(rng);
    double ref = test::l1_min(A, y);
    for (BpEngine e : {BpEngine::InteriorPoint, BpEngine::Admm}) {
      BasisPursuitResult r = solve_basis_pursuit({A, y}, engine(e));
      INFO("instance " << t << " engine " << int(e));
      REQUIRE(std::abs(r.stats.objective - ref) <= 1e-6 * std::max(1.0, ref));
      REQUIRE(r.constraint_residual <= 1e-8 * (1.0 + y.norm()));
    }
  }
}

TEST_CASE("basis pursuit edge cases") {
  HarmonicBasis basis(6);
  SphericalGrid grid = SphericalGrid::make(10);
  Eigen::MatrixXd A = real_moment_rows(basis, grid.nodes);
  CHECK(A.rows() == 49);
  CHECK(A.cols() == 400);

  BasisPursuitResult zero = solve_basis_pursuit({A, Eigen::VectorXd::Zero(49)});
  CHECK(zero.c.cwiseAbs().maxCoeff() == 0.0);

  // Data equal to one grid column is a 1-sparse solution.
  for (int j : {0, 57, 233}) {
    BasisPursuitResult r = solve_basis_pursuit({A, A.col(j)});
    Eigen::VectorXd c = r.c;
    CHECK(std::abs(c[j] - 1.0) < 1e-6);
    c[j] = 0.0;
    CHECK(c.cwiseAbs().maxCoeff() < 1e-6);
  }

  BasisPursuitProblem lasso{A, A.col(5), BpMode::Lasso, 0.1};
  BasisPursuitResult lr = solve_basis_pursuit(lasso);
  CHECK(lr.stats.converged);
  CHECK(lr.c[5] > 0.5);
}

TEST_CASE("nearest PSD matrix through the splitting solver") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (int dim = 2; dim <= 6; ++dim) {
    Eigen::MatrixXcd G(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) G(i, j) = cplx(g(rng), g(rng));
    Eigen::MatrixXcd U = G.householderQr().householderQ();
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d[i] = g(rng);
    Eigen::MatrixXcd W = U * d.cast<cplx>().asDiagonal() * U.adjoint();
    Eigen::MatrixXcd expected = U * d.cwiseMax(0.0).cast<cplx>().asDiagonal() * U.adjoint();
    double best = 0.5 * (d - d.cwiseMax(0.0)).squaredNorm();

    CHECK((project_psd(W) - expected).norm() < 1e-10);

    PsdAdmmSpec spec;
    spec.dim = dim;
    spec.affine_step = [&](const Eigen::MatrixXcd& V, double rho) -> Eigen::MatrixXcd { return (rho * V + W) / (rho + 1.0); };
    spec.objective = [&](const Eigen::MatrixXcd& X) { return 0.5 * (X - W).squaredNorm(); };
    SolverOptions o;
    o.abs_tol = 1e-10;
    o.rel_tol = 1e-10;
    PsdAdmmResult r = psd_admm(spec, o);
    CHECK(std::abs(spec.objective(r.Z) - best) < 1e-6);
  }
}

TEST_CASE("interior point on small Hermitian SDPs") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  for (int dim = 2; dim <= 6; ++dim) {
    // min tr(C X) s.t. tr X = 1 has value lambda_min(C).
    Eigen::MatrixXcd B(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) B(i, j) = cplx(g(rng), g(rng));
    Eigen::MatrixXcd C = 0.5 * (B + B.adjoint());
    HermitianSdp sdp;
    sdp.block_dims = {dim};
    sdp.C = {C};
    HermitianSdp::Atom tr;
    for (int i = 0; i < dim; ++i) tr.entries.push_back({0, i, i, 1.0});
    sdp.atoms = {tr};
    sdp.constraints = {{0, HermitianSdp::Part::Herm, 1.0}};
    HermitianSdpResult r = solve_hermitian_sdp(sdp, SolverOptions{});
    double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(C).eigenvalues()[0];
    CHECK(r.stats.converged);
    CHECK(std::abs(r.primal_objective - lmin) < 1e-6);
    CHECK(std::abs(r.dual_objective - lmin) < 1e-6);
  }

  // Fixing a complex off-diagonal entry through Re and Im constraints.
  HermitianSdp sdp;
  sdp.block_dims = {2};
  sdp.C = {Eigen::MatrixXcd::Identity(2, 2)};
  HermitianSdp::Atom off;
  off.entries.push_back({0, 1, 0, 1.0});  // tr(B X) = X(0, 1)
  sdp.atoms = {off};
  sdp.constraints = {{0, HermitianSdp::Part::Re, 0.6}, {0, HermitianSdp::Part::Im, 0.8}};
  HermitianSdpResult r = solve_hermitian_sdp(sdp, SolverOptions{});
  // min X00 + X11 with |X01| = 1 is 2.
  CHECK(std::abs(r.primal_objective - 2.0) < 1e-6);
  CHECK(std::abs(r.X[0](0, 1) - cplx(0.6, 0.8)) < 1e-6);
}

TEST_CASE("trigonometric SDP strong duality") {
  std::mt19937_64 rng(43);
  for (SdpEngine e : {SdpEngine::InteriorPoint, SdpEngine::Admm}) {
    AtomicMeasure mu;
    mu.atoms.push_back(Atom{test::random_point(rng), -1.7});
    SdpProblem prob(moments(2, mu));
    CHECK(prob.psd_dim() == 26);
    SolverOptions o;
    o.sdp_engine = e;
    SdpResult r = solve_sdp(prob, o);
    INFO("engine " << int(e));
    CHECK(std::abs(r.objective - 1.7) < 1e-4 * 1.7);
  }

  SdpResult z = solve_sdp(SdpProblem(MomentVector(3)));
  CHECK(std::abs(z.objective) < 1e-8);
  CHECK(z.f.norm() < 1e-6);
}

TEST_CASE("Tikhonov term") {
  AtomicMeasure mu = test::table1();
  SdpProblem prob(moments(4, mu));
  double ynorm = prob.data().values.norm();
  SdpResult big = solve_sdp_tikhonov(prob, 1.01 * ynorm);
  CHECK(big.f.norm() < 1e-5);
  double last = INFINITY;
  for (double tau : {1e-3, 1e-2, 1e-1}) {
    SdpResult r = solve_sdp_tikhonov(prob, tau);
    CHECK(r.objective <= last + 1e-7);
    last = r.objective;
  }
  CHECK_THROWS_AS(solve_sdp_tikhonov(prob, 0.0), std::invalid_argument);
}

TEST_CASE("local minimization on the sphere") {
  const SpherePoint e3(0, 0, 1);
  ScalarField height{[&](const SpherePoint& x, Vec3* grad) {
    if (grad) *grad = -e3.xyz();
    return -x[2];
  }};
  std::mt19937_64 rng(44);
  for (int i = 0; i < 50; ++i) {
    SpherePoint x0 = test::random_point(rng);
    if (x0[2] < -0.99) continue;
    LocalMinResult r = local_minimize_on_sphere(height, x0, 1e-12);
    REQUIRE(geodesic_distance(r.x, e3) < 1e-6);
  }

  ScalarField flat{[](const SpherePoint&, Vec3* grad) {
    if (grad) grad->setZero();
    return 2.0;
  }};
  SpherePoint x0(0.3, 0.4, 0.5);
  LocalMinResult r = local_minimize_on_sphere(flat, x0, 1e-12);
  CHECK((r.x.xyz() - x0.xyz()).norm() < 1e-15);
  CHECK(r.converged);

  // 1 - q^2 for an interpolating certificate vanishes at the atoms.
  JacksonKernel k(20);
  std::vector<SpherePoint> pts = test::separated_points(3, 1.2, rng);
  DualCertificate cert = solve_certificate(k, SupportConfig::make(pts, {1.0, -1.0, 1.0}));
  ScalarField gap{[&](const SpherePoint& x, Vec3* grad) {
    double q = cert.eval(x);
    if (grad) {
      TangentFrame f = some_frame(x);
      Eigen::Vector2d dq = cert.gradient(f);
      *grad = -2.0 * q * (dq[0] * f.eta1 + dq[1] * f.eta2);
    }
    return 1.0 - q * q;
  }};
  for (const auto& p : pts) {
    Vec3 v = project_tangent(p, test::gaussian3(rng)).normalized();
    LocalMinResult m = local_minimize_on_sphere(gap, exp_map(p, 0.03 * v), 1e-14);
    CHECK(geodesic_distance(m.x, p) < 1e-7);
  }
}

TEST_CASE("least squares amplitudes") {
  AtomicMeasure mu = test::table1();
  MomentVector y = moments(6, mu);
  AmplitudeFit fit = least_squares_amplitudes(mu.points(), y);
  CHECK_FALSE(fit.rank_deficient);
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(std::abs(fit.weights[i] - mu.atoms[i].weight) < 1e-9);

  std::vector<SpherePoint> dup = mu.points();
  dup.push_back(dup[0]);
  CHECK(least_squares_amplitudes(dup, y).rank_deficient);
}
