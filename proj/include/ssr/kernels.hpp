#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ssr/sphere_geom.hpp"

namespace ssr {

class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct GValues {
  double G1 = 0.0;
  double G2 = 0.0;
  double G3 = 0.0;
};

// Derivatives of J_N(x, y) w.r.t. the frames at x and y.
// grad_x[i] = X_i^x J, grad_y[n] = X_n^y J, hess_xy(i,n) = X_i^x X_n^y J,
// hess_xx(i,j) = X_i^x X_j^x J, third[j](i,n) = X_j^x X_i^x X_n^y J.
struct KernelDerivatives {
  double value = 0.0;
  Eigen::Vector2d grad_x = Eigen::Vector2d::Zero();
  Eigen::Vector2d grad_y = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess_xy = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d hess_xx = Eigen::Matrix2d::Zero();
  std::array<Eigen::Matrix2d, 2> third{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
};

struct PolarHessians {
  Eigen::Matrix2d H_J;
  std::array<Eigen::Matrix2d, 2> H_XJ;
};

// Squared, renormalized Fejer kernel of order n = floor(N/2), as a zonal
// kernel J_N(x, y) = Jt(d(x, y)) = j(<x, y>) with j a Legendre series.
class JacksonKernel {
 public:
  explicit JacksonKernel(int N);

  int N() const { return N_; }
  int n() const { return n_; }
  // w_l with Jt(w) = sum_l (2l+1)/(4 pi) w_l P_l(cos w)
  const std::vector<double>& legendre_weights() const { return weights_; }
  // a_l = (2l+1)/(4 pi) w_l
  const std::vector<double>& legendre_coeffs() const { return coeffs_; }

  double eval(double omega) const;
  double derivative(double omega, int order) const;
  GValues g_functions(double omega) const;

  // j^{(k)}(t) for k = 0..3.
  std::array<double, 4> series(double t) const;
  // Batched j^{(k)}(t[i]) into out[k*n + i].
  void series_batch(const double* t, std::size_t n, int max_order, double* out) const;

  double second_at_zero() const;  // Jt''(0)
  double fourth_at_zero() const;  // Jt''''(0)

  KernelDerivatives derivatives(const TangentFrame& fx, const TangentFrame& fy) const;
  PolarHessians polar_hessians(const PolarChart& chart, const SpherePoint& x, const SpherePoint& y,
                               const TangentFrame& fy) const;

 private:
  double fejer_derivative(double omega, int order) const;

  int N_;
  int n_;
  std::vector<double> weights_;
  std::vector<double> coeffs_;
};

// Free-function views of the class methods.
double jackson_eval(const JacksonKernel& ker, double omega);
double jackson_derivatives_1d(const JacksonKernel& ker, double omega, int order);
GValues g_functions(const JacksonKernel& ker, double omega);
KernelDerivatives kernel_derivatives(const JacksonKernel& ker, const SpherePoint& x, const TangentFrame& fx,
                                     const SpherePoint& y, const TangentFrame& fy);
PolarHessians polar_hessians(const JacksonKernel& ker, const PolarChart& chart, const SpherePoint& x,
                             const SpherePoint& y, const TangentFrame& fy);

// Riemannian Hessian of an ambient function restricted to S^2, in the
// basis (g1, g2) of T_x S^2.
Eigen::Matrix2d riemannian_hessian(const Vec3& x, const Vec3& grad, const Eigen::Matrix3d& hess, const Vec3& g1,
                                   const Vec3& g2);

double riemann_zeta(double s);

}  // namespace ssr
