#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssr/kernels.hpp"
#include "ssr/sphere_geom.hpp"

namespace ssr {

struct SupportConfig {
  std::vector<SpherePoint> points;
  std::vector<TangentFrame> frames;
  std::vector<double> signs;
  double separation = 0.0;

  // Frames transported from the standard frame at e3.
  static SupportConfig make(const std::vector<SpherePoint>& points, const std::vector<double>& signs);
  size_t size() const { return points.size(); }
};

struct CertificateCoefficients {
  Eigen::VectorXd alpha0, alpha1, alpha2;

  Eigen::VectorXd stacked() const;
  static CertificateCoefficients from_stacked(const Eigen::VectorXd& a, int M);
};

// Corollary-style coefficient bounds, evaluated only when rho >= 19.2 pi / N
// and N >= 20.
struct CoefficientBoundReport {
  bool hypothesis = false;
  double alpha0_max = 0.0;
  double alpha0_min = 0.0;
  double alpha12_max_scaled = 0.0;  // (n+1) * max(|alpha1|, |alpha2|)
  bool pass = true;
};

class DualCertificate {
 public:
  DualCertificate(JacksonKernel kernel, SupportConfig support, CertificateCoefficients coeffs);

  const JacksonKernel& kernel() const { return kernel_; }
  const SupportConfig& support() const { return support_; }
  const CertificateCoefficients& coeffs() const { return coeffs_; }

  double eval(const SpherePoint& x) const;
  // Batched evaluation, SIMD on the inner kernel sums.
  std::vector<double> eval_many(const std::vector<SpherePoint>& xs) const;
  // Tangential derivatives X_1 q, X_2 q and Hessian X_i X_j q in frame fx.
  Eigen::Vector2d gradient(const TangentFrame& fx) const;
  Eigen::Matrix2d hessian(const TangentFrame& fx) const;

  double interpolation_residual() const;  // max |q(x_i) - u_i|
  double stationarity_residual() const;   // max |X_k q(x_i)|
  double system_residual = 0.0;           // ||K alpha - (u,0,0)||_inf
  double condition = 0.0;
  bool separation_warning = false;
  CoefficientBoundReport coefficient_bounds;

 private:
  JacksonKernel kernel_;
  SupportConfig support_;
  CertificateCoefficients coeffs_;
};

Eigen::MatrixXd assemble_system(const JacksonKernel& ker, const SupportConfig& support);
Eigen::VectorXd certificate_rhs(const SupportConfig& support);

// Dense pivoted LU on the full 3M x 3M system.
DualCertificate solve_certificate(const JacksonKernel& ker, const SupportConfig& support, double cond_cap = 1e12);

// Schur-complement block elimination: alpha0 = S^{-1} u, then the tangential
// blocks from K2^{-1}. Used as an independent route in tests.
CertificateCoefficients solve_certificate_blocks(const JacksonKernel& ker, const SupportConfig& support);

CoefficientBoundReport check_coefficient_bounds(const JacksonKernel& ker, const SupportConfig& support,
                                                const CertificateCoefficients& c);

std::vector<SpherePoint> fibonacci_lattice(std::size_t count);

struct RegimeStats {
  std::string name;
  double lower = 0.0;  // distance band in units of 1/(n+1)
  double upper = 0.0;
  double bound = 0.0;  // analytic constant, 0 when none
  std::size_t samples = 0;
  double max_abs_q = 0.0;
  double margin = 0.0;  // bound - max_abs_q
  bool pass = true;
};

struct AtomHessian {
  double sign = 0.0;
  Eigen::Vector2d eigenvalues = Eigen::Vector2d::Zero();
  double trace = 0.0;
  double det = 0.0;
  bool sign_ok = false;
  bool constant_bounds_ok = true;  // trace/det constants under the hypothesis
};

struct VerificationReport {
  int N = 0;
  int n = 0;
  std::size_t M = 0;
  double separation = 0.0;
  double separation_threshold = 0.0;  // 19.2 pi / N
  bool hypothesis = false;
  std::size_t sample_count = 0;
  double interpolation_residual = 0.0;
  double stationarity_residual = 0.0;
  double system_residual = 0.0;
  double max_off_cap_q = 0.0;
  double min_cap_signed_q = 0.0;
  CoefficientBoundReport coefficients;
  std::vector<RegimeStats> regimes;
  std::vector<AtomHessian> hessians;
  bool pass = false;

  std::string to_json() const;
};

// sampling: lattice size is max(5000, sampling * N^2).
VerificationReport verify_certificate(const DualCertificate& cert, double sampling = 50.0);

}  // namespace ssr
