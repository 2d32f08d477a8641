#include "ssr/kernels.hpp"

#include <cmath>
#include <numbers>

#include "ssr/harmonics.hpp"
#include "ssr/simd.hpp"

namespace ssr {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSmallOmega = 1e-4;
}  // namespace

JacksonKernel::JacksonKernel(int N) : N_(N), n_(N / 2) {
  if (N < 1) throw std::invalid_argument("JacksonKernel: N must be >= 1");
  // Jt(arccos t) is a polynomial of degree 2n <= N in t, so N+2 nodes are exact.
  std::vector<double> nodes, w;
  gauss_legendre(N + 2, nodes, w);
  std::vector<double> jt(nodes.size());
  for (size_t q = 0; q < nodes.size(); ++q) jt[q] = fejer_derivative(std::acos(nodes[q]), 0);
  for (size_t q = 0; q < nodes.size(); ++q) jt[q] = jt[q] * jt[q];
  weights_.assign(N + 1, 0.0);
  coeffs_.assign(N + 1, 0.0);
  for (size_t q = 0; q < nodes.size(); ++q) {
    double t = nodes[q], p0 = 1.0, p1 = t;
    for (int l = 0; l <= N; ++l) {
      double pl = (l == 0) ? 1.0 : p1;
      weights_[l] += 2.0 * kPi * w[q] * pl * jt[q];
      if (l >= 1) {
        double p2 = ((2.0 * l + 1.0) * t * p1 - l * p0) / (l + 1.0);
        p0 = p1;
        p1 = p2;
      }
    }
  }
  for (int l = 0; l <= N; ++l) coeffs_[l] = (2.0 * l + 1.0) / (4.0 * kPi) * weights_[l];
}

double JacksonKernel::fejer_derivative(double omega, int order) const {
  // F(w) = (1/(n+1)^2) [ (n+1) + 2 sum_k (n+1-k) cos(k w) ]
  const double np1 = n_ + 1.0;
  double s = (order == 0) ? np1 : 0.0;
  for (int k = 1; k <= n_; ++k) {
    double kw = k * omega, kp = std::pow(double(k), order), term;
    switch (order % 4) {
      case 0: term = std::cos(kw); break;
      case 1: term = -std::sin(kw); break;
      case 2: term = -std::cos(kw); break;
      default: term = std::sin(kw); break;
    }
    s += 2.0 * (np1 - k) * kp * term;
  }
  return s / (np1 * np1);
}

double JacksonKernel::eval(double omega) const {
  if (omega < kSmallOmega) return series(std::cos(omega))[0];
  const double np1 = n_ + 1.0;
  double r = std::sin(np1 * omega / 2.0) / (np1 * std::sin(omega / 2.0));
  double r2 = r * r;
  return r2 * r2;
}

double JacksonKernel::derivative(double omega, int order) const {
  if (order < 0 || order > 4) throw std::invalid_argument("derivative order must be in 0..4");
  if (order == 0) return eval(omega);
  double f0 = fejer_derivative(omega, 0), f1 = fejer_derivative(omega, 1), f2 = fejer_derivative(omega, 2);
  switch (order) {
    case 1: return 2.0 * f0 * f1;
    case 2: return 2.0 * (f1 * f1 + f0 * f2);
    case 3: return 2.0 * (3.0 * f1 * f2 + f0 * fejer_derivative(omega, 3));
    default: {
      double f3 = fejer_derivative(omega, 3), f4 = fejer_derivative(omega, 4);
      return 2.0 * (3.0 * f2 * f2 + 4.0 * f1 * f3 + f0 * f4);
    }
  }
}

GValues JacksonKernel::g_functions(double omega) const {
  if (!(omega > 0.0 && omega < kPi)) throw std::domain_error("g_functions: omega must lie in (0, pi)");
  double s = std::sin(omega), c = std::cos(omega);
  double j1 = derivative(omega, 1), j2 = derivative(omega, 2);
  GValues g;
  g.G1 = j1 / s;
  g.G2 = j2 - j1 * c / s;
  g.G3 = (j2 * s - j1 * c) / (s * s);
  return g;
}

std::array<double, 4> JacksonKernel::series(double t) const {
  double out[4];
  simd::scalar::legendre_series(coeffs_.data(), N_, &t, 1, 3, out);
  return {out[0], out[1], out[2], out[3]};
}

void JacksonKernel::series_batch(const double* t, std::size_t n, int max_order, double* out) const {
  simd::legendre_series(coeffs_.data(), N_, t, n, max_order, out);
}

double JacksonKernel::second_at_zero() const { return derivative(0.0, 2); }

double JacksonKernel::fourth_at_zero() const { return derivative(0.0, 4); }

KernelDerivatives JacksonKernel::derivatives(const TangentFrame& fx, const TangentFrame& fy) const {
  const Vec3& x = fx.base.xyz();
  const Vec3& y = fy.base.xyz();
  const double t = clamp_unit(x.dot(y));
  auto j = series(t);
  const Vec3 ex[2] = {fx.eta1, fx.eta2};
  const Vec3 ey[2] = {fy.eta1, fy.eta2};
  double exy[2], xey[2], exey[2][2];
  for (int i = 0; i < 2; ++i) {
    exy[i] = ex[i].dot(y);
    xey[i] = x.dot(ey[i]);
    for (int k = 0; k < 2; ++k) exey[i][k] = ex[i].dot(ey[k]);
  }
  KernelDerivatives d;
  d.value = j[0];
  for (int i = 0; i < 2; ++i) {
    d.grad_x[i] = j[1] * exy[i];
    d.grad_y[i] = j[1] * xey[i];
  }
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      d.hess_xy(i, k) = j[2] * exy[i] * xey[k] + j[1] * exey[i][k];
      d.hess_xx(i, k) = j[2] * exy[i] * exy[k] - (i == k ? j[1] * t : 0.0);
    }
  for (int jj = 0; jj < 2; ++jj)
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) {
        double v = j[3] * xey[k] * exy[i] * exy[jj] + j[2] * (exy[i] * exey[jj][k] + exy[jj] * exey[i][k]);
        if (i == jj) v -= (j[2] * t + j[1]) * xey[k];
        d.third[jj](i, k) = v;
      }
  return d;
}

Eigen::Matrix2d riemannian_hessian(const Vec3& x, const Vec3& grad, const Eigen::Matrix3d& hess, const Vec3& g1,
                                   const Vec3& g2) {
  // P hess P - <grad, x> P, evaluated on tangent vectors so P drops out.
  double gx = grad.dot(x);
  const Vec3 g[2] = {g1, g2};
  Eigen::Matrix2d H;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) H(i, k) = g[i].dot(hess * g[k]) - gx * g[i].dot(g[k]);
  return H;
}

PolarHessians JacksonKernel::polar_hessians(const PolarChart& chart, const SpherePoint& x, const SpherePoint& y,
                                            const TangentFrame& fy) const {
  double dxy = geodesic_distance(x, y);
  if (dxy < 1e-9 || dxy > kPi - 1e-9) throw DegenerateError("polar_hessians: x too close to +-y");
  auto [g1, g2] = polar_tangent_basis(chart, x);
  const Vec3& xv = x.xyz();
  const Vec3& yv = y.xyz();
  auto j = series(clamp_unit(xv.dot(yv)));
  PolarHessians out;
  out.H_J = riemannian_hessian(xv, j[1] * yv, j[2] * yv * yv.transpose(), g1, g2);
  const Vec3 ey[2] = {fy.eta1, fy.eta2};
  for (int k = 0; k < 2; ++k) {
    const Vec3& xi = ey[k];
    double s = xv.dot(xi);
    Vec3 grad = j[2] * s * yv + j[1] * xi;
    Eigen::Matrix3d hess = j[3] * s * yv * yv.transpose() + j[2] * (yv * xi.transpose() + xi * yv.transpose());
    out.H_XJ[k] = riemannian_hessian(xv, grad, hess, g1, g2);
  }
  return out;
}

double jackson_eval(const JacksonKernel& ker, double omega) { return ker.eval(omega); }

double jackson_derivatives_1d(const JacksonKernel& ker, double omega, int order) {
  return ker.derivative(omega, order);
}

GValues g_functions(const JacksonKernel& ker, double omega) { return ker.g_functions(omega); }

KernelDerivatives kernel_derivatives(const JacksonKernel& ker, const SpherePoint& x, const TangentFrame& fx,
                                     const SpherePoint& y, const TangentFrame& fy) {
  TangentFrame a = fx, b = fy;
  a.base = x;
  b.base = y;
  return ker.derivatives(a, b);
}

PolarHessians polar_hessians(const JacksonKernel& ker, const PolarChart& chart, const SpherePoint& x,
                             const SpherePoint& y, const TangentFrame& fy) {
  return ker.polar_hessians(chart, x, y, fy);
}

double riemann_zeta(double s) {
  // Partial sum plus Euler-Maclaurin tail, exact to rounding for s >= 2.
  const int K = 1000;
  double sum = 0.0;
  for (int k = K - 1; k >= 1; --k) sum += std::pow(double(k), -s);
  double Kd = K;
  sum += std::pow(Kd, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(Kd, -s) + s / 12.0 * std::pow(Kd, -s - 1.0);
  return sum;
}

}  // namespace ssr
