#include <cmath>

#include "ssr/errors.hpp"
#include "ssr/solvers.hpp"

namespace ssr {

namespace {

SpherePoint retract(const SpherePoint& x, const Vec3& d, double t) { return SpherePoint(Vec3(x.xyz() + t * d)); }

}  // namespace

LocalMinResult local_minimize_on_sphere(const ScalarField& f, const SpherePoint& x0, double tol, int max_iters) {
  LocalMinResult res;
  SpherePoint x = x0;
  Vec3 ga;
  double fx = f.eval(x, &ga);
  Vec3 g = project_tangent(x, ga);
  Vec3 d = -g;
  double step = 0.1;
  for (int it = 0; it < max_iters; ++it) {
    res.iterations = it;
    double gn = g.norm();
    if (gn <= tol * (1.0 + std::abs(fx))) {
      res.converged = true;
      break;
    }
    double slope = g.dot(d);
    if (slope >= 0.0 || it % 20 == 0) {
      d = -g;
      slope = -gn * gn;
    }
    // Armijo backtracking along the retraction; step is the trial arc length.
    double dn = d.norm();
    double t = step / dn;
    double fn = 0.0;
    SpherePoint xn;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = retract(x, d, t);
      fn = f.eval(xn, nullptr);
      if (fn < fx && fn <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No decrease possible at working precision.
      res.converged = gn <= std::sqrt(tol) * (1.0 + std::abs(fx));
      break;
    }
    step = std::min(1.0, 2.0 * t * dn);
    Vec3 gan;
    fn = f.eval(xn, &gan);
    Vec3 gnew = project_tangent(xn, gan);
    // Transport the old direction and gradient by projection.
    Vec3 dold = project_tangent(xn, d);
    Vec3 gold = project_tangent(xn, g);
    double beta = std::max(0.0, gnew.dot(gnew - gold) / std::max(gn * gn, 1e-300));
    d = -gnew + beta * dold;
    x = xn;
    fx = fn;
    g = gnew;
  }
  res.x = x;
  res.value = fx;
  res.grad_norm = g.norm();
  if (!res.converged && res.grad_norm <= tol * (1.0 + std::abs(fx))) res.converged = true;
  if (!res.converged && res.iterations >= max_iters - 1)
    throw MaxIterError("local_minimize_on_sphere: iteration limit reached");
  return res;
}

AmplitudeFit least_squares_amplitudes(const std::vector<SpherePoint>& points, const MomentVector& y) {
  const int N = y.N;
  const Eigen::Index K = static_cast<Eigen::Index>(points.size());
  if (K > num_harmonics(N)) throw std::invalid_argument("least_squares_amplitudes: too many points");
  HarmonicBasis basis(N);
  const Eigen::Index R = num_harmonics(N);
  Eigen::MatrixXd B(2 * R, K);
  Eigen::VectorXd b(2 * R);
  Eigen::VectorXcd v(R);
  for (Eigen::Index j = 0; j < K; ++j) {
    basis.eval(points[j], v.data());
    B.col(j).head(R) = v.real();
    B.col(j).tail(R) = -v.imag();
  }
  b.head(R) = y.values.real();
  b.tail(R) = y.values.imag();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  qr.setThreshold(1e-10);
  AmplitudeFit fit;
  fit.rank_deficient = qr.rank() < K;
  fit.weights = qr.solve(b);
  fit.residual = (B * fit.weights - b).norm();
  return fit;
}

}  // namespace ssr
