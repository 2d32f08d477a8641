#include "ssr/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "ssr/errors.hpp"
#include "ssr/parallel.hpp"
#include "ssr/simd.hpp"

namespace ssr {

namespace {
constexpr double kPi = std::numbers::pi;
}

SupportConfig SupportConfig::make(const std::vector<SpherePoint>& points, const std::vector<double>& signs) {
  if (points.size() != signs.size()) throw std::invalid_argument("support: points and signs differ in length");
  if (points.empty()) throw std::invalid_argument("support: empty");
  SupportConfig s;
  s.points = points;
  s.signs = signs;
  TangentFrame ref = standard_frame();
  for (const auto& p : points) s.frames.push_back(transported_frame(ref.base, ref, p));
  s.separation = points.size() > 1 ? min_separation(points) : kPi;
  if (s.separation <= 0.0) throw std::invalid_argument("support: coincident points");
  return s;
}

Eigen::VectorXd CertificateCoefficients::stacked() const {
  Eigen::VectorXd a(alpha0.size() * 3);
  a << alpha0, alpha1, alpha2;
  return a;
}

CertificateCoefficients CertificateCoefficients::from_stacked(const Eigen::VectorXd& a, int M) {
  return {a.segment(0, M), a.segment(M, M), a.segment(2 * M, M)};
}

Eigen::MatrixXd assemble_system(const JacksonKernel& ker, const SupportConfig& s) {
  const int M = static_cast<int>(s.size());
  Eigen::MatrixXd K(3 * M, 3 * M);
  // Row (cond c, point j), column (basis b, point i):
  //   c = 0: q(x_j); c = 1, 2: X_c^x q(x_j)
  //   b = 0: J(., x_i); b = 1, 2: X_b^y J(., x_i)
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) {
      KernelDerivatives d = ker.derivatives(s.frames[j], s.frames[i]);
      K(j, i) = d.value;
      for (int b = 0; b < 2; ++b) K(j, (b + 1) * M + i) = d.grad_y[b];
      for (int c = 0; c < 2; ++c) {
        K((c + 1) * M + j, i) = d.grad_x[c];
        for (int b = 0; b < 2; ++b) K((c + 1) * M + j, (b + 1) * M + i) = d.hess_xy(c, b);
      }
    }
  return K;
}

Eigen::VectorXd certificate_rhs(const SupportConfig& s) {
  const int M = static_cast<int>(s.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * M);
  for (int j = 0; j < M; ++j) rhs[j] = s.signs[j];
  return rhs;
}

CoefficientBoundReport check_coefficient_bounds(const JacksonKernel& ker, const SupportConfig& s,
                                                const CertificateCoefficients& c) {
  CoefficientBoundReport r;
  const double np1 = ker.n() + 1.0;
  r.hypothesis = ker.N() >= 20 && s.separation >= 19.2 * kPi / ker.N();
  r.alpha0_max = c.alpha0.cwiseAbs().maxCoeff();
  r.alpha0_min = c.alpha0.cwiseAbs().minCoeff();
  r.alpha12_max_scaled = np1 * std::max(c.alpha1.cwiseAbs().maxCoeff(), c.alpha2.cwiseAbs().maxCoeff());
  if (r.hypothesis)
    r.pass = r.alpha0_max <= 1.0 + 6.3e-3 && r.alpha0_min >= 1.0 - 6.3e-3 && r.alpha12_max_scaled <= 6.3e-2;
  return r;
}

DualCertificate::DualCertificate(JacksonKernel kernel, SupportConfig support, CertificateCoefficients coeffs)
    : kernel_(std::move(kernel)), support_(std::move(support)), coeffs_(std::move(coeffs)) {}

double DualCertificate::eval(const SpherePoint& x) const {
  double q = 0.0;
  for (size_t i = 0; i < support_.size(); ++i) {
    const TangentFrame& f = support_.frames[i];
    auto j = kernel_.series(clamp_unit(x.xyz().dot(f.base.xyz())));
    q += coeffs_.alpha0[i] * j[0] +
         j[1] * (coeffs_.alpha1[i] * x.xyz().dot(f.eta1) + coeffs_.alpha2[i] * x.xyz().dot(f.eta2));
  }
  return q;
}

std::vector<double> DualCertificate::eval_many(const std::vector<SpherePoint>& xs) const {
  const std::size_t P = xs.size();
  std::vector<double> q(P, 0.0);
  std::vector<double> X(P), Y(P), Z(P), t(P), e1(P), e2(P), js(2 * P);
  for (std::size_t p = 0; p < P; ++p) {
    X[p] = xs[p][0];
    Y[p] = xs[p][1];
    Z[p] = xs[p][2];
  }
  for (size_t i = 0; i < support_.size(); ++i) {
    const TangentFrame& f = support_.frames[i];
    simd::dot3(X.data(), Y.data(), Z.data(), f.base.xyz().data(), t.data(), P);
    simd::dot3(X.data(), Y.data(), Z.data(), f.eta1.data(), e1.data(), P);
    simd::dot3(X.data(), Y.data(), Z.data(), f.eta2.data(), e2.data(), P);
    for (auto& v : t) v = clamp_unit(v);
    kernel_.series_batch(t.data(), P, 1, js.data());
    const double a0 = coeffs_.alpha0[i], a1 = coeffs_.alpha1[i], a2 = coeffs_.alpha2[i];
    for (std::size_t p = 0; p < P; ++p) q[p] += a0 * js[p] + js[P + p] * (a1 * e1[p] + a2 * e2[p]);
  }
  return q;
}

Eigen::Vector2d DualCertificate::gradient(const TangentFrame& fx) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (size_t i = 0; i < support_.size(); ++i) {
    KernelDerivatives d = kernel_.derivatives(fx, support_.frames[i]);
    for (int c = 0; c < 2; ++c)
      g[c] += coeffs_.alpha0[i] * d.grad_x[c] + coeffs_.alpha1[i] * d.hess_xy(c, 0) +
              coeffs_.alpha2[i] * d.hess_xy(c, 1);
  }
  return g;
}

Eigen::Matrix2d DualCertificate::hessian(const TangentFrame& fx) const {
  Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
  for (size_t i = 0; i < support_.size(); ++i) {
    KernelDerivatives d = kernel_.derivatives(fx, support_.frames[i]);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        H(a, b) += coeffs_.alpha0[i] * d.hess_xx(a, b) + coeffs_.alpha1[i] * d.third[a](b, 0) +
                   coeffs_.alpha2[i] * d.third[a](b, 1);
  }
  return H;
}

double DualCertificate::interpolation_residual() const {
  double r = 0.0;
  for (size_t i = 0; i < support_.size(); ++i)
    r = std::max(r, std::abs(eval(support_.points[i]) - support_.signs[i]));
  return r;
}

double DualCertificate::stationarity_residual() const {
  double r = 0.0;
  for (size_t i = 0; i < support_.size(); ++i) r = std::max(r, gradient(support_.frames[i]).cwiseAbs().maxCoeff());
  return r;
}

DualCertificate solve_certificate(const JacksonKernel& ker, const SupportConfig& support, double cond_cap) {
  const int M = static_cast<int>(support.size());
  Eigen::MatrixXd K = assemble_system(ker, support);
  Eigen::VectorXd rhs = certificate_rhs(support);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
  const auto& sv = svd.singularValues();
  double cond = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
  if (!(cond < cond_cap)) throw SingularSystemError("interpolation system is numerically singular", cond);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd a = lu.solve(rhs);
  CertificateCoefficients c = CertificateCoefficients::from_stacked(a, M);
  DualCertificate cert(ker, support, c);
  cert.system_residual = (K * a - rhs).cwiseAbs().maxCoeff();
  cert.condition = cond;
  cert.separation_warning = support.size() > 1 && support.separation < 19.2 * kPi / ker.N();
  cert.coefficient_bounds = check_coefficient_bounds(ker, support, c);
  return cert;
}

CertificateCoefficients solve_certificate_blocks(const JacksonKernel& ker, const SupportConfig& support) {
  const int M = static_cast<int>(support.size());
  Eigen::MatrixXd K = assemble_system(ker, support);
  // K = [[K0, Kt1], [K1, K2]] with K0 = J00 (M x M), K2 the 2M x 2M tangential block.
  Eigen::MatrixXd K0 = K.topLeftCorner(M, M);
  Eigen::MatrixXd Kt1 = K.topRightCorner(M, 2 * M);
  Eigen::MatrixXd K1 = K.bottomLeftCorner(2 * M, M);
  Eigen::MatrixXd K2 = K.bottomRightCorner(2 * M, 2 * M);
  // K2 = [[J11, J12], [J21, J22]]; T = K2 / J22 = J11 - J12 J22^{-1} J21.
  Eigen::MatrixXd J11 = K2.topLeftCorner(M, M), J12 = K2.topRightCorner(M, M);
  Eigen::MatrixXd J21 = K2.bottomLeftCorner(M, M), J22 = K2.bottomRightCorner(M, M);
  Eigen::PartialPivLU<Eigen::MatrixXd> J22lu(J22);
  Eigen::MatrixXd T = J11 - J12 * J22lu.solve(J21);
  Eigen::PartialPivLU<Eigen::MatrixXd> Tlu(T);
  auto K2_solve = [&](const Eigen::MatrixXd& B) {
    // Block inverse of K2 through T and J22.
    Eigen::MatrixXd B1 = B.topRows(M), B2 = B.bottomRows(M);
    Eigen::MatrixXd X1 = Tlu.solve(B1 - J12 * J22lu.solve(B2));
    Eigen::MatrixXd X2 = J22lu.solve(B2 - J21 * X1);
    Eigen::MatrixXd X(2 * M, B.cols());
    X << X1, X2;
    return X;
  };
  Eigen::MatrixXd S = K0 - Kt1 * K2_solve(K1);
  Eigen::VectorXd u = certificate_rhs(support).head(M);
  CertificateCoefficients c;
  c.alpha0 = S.partialPivLu().solve(u);
  Eigen::MatrixXd tang = -K2_solve(K1 * c.alpha0);
  c.alpha1 = tang.col(0).head(M);
  c.alpha2 = tang.col(0).tail(M);
  return c;
}

std::vector<SpherePoint> fibonacci_lattice(std::size_t count) {
  std::vector<SpherePoint> pts;
  pts.reserve(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / double(count);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * double(i);
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

VerificationReport verify_certificate(const DualCertificate& cert, double sampling) {
  const JacksonKernel& ker = cert.kernel();
  const SupportConfig& s = cert.support();
  const double np1 = ker.n() + 1.0;
  const double t0 = std::sqrt(20.0 * 0.99 / 3.0);

  VerificationReport rep;
  rep.N = ker.N();
  rep.n = ker.n();
  rep.M = s.size();
  rep.separation = s.separation;
  rep.separation_threshold = 19.2 * kPi / ker.N();
  rep.hypothesis = cert.coefficient_bounds.hypothesis;
  rep.coefficients = cert.coefficient_bounds;
  rep.interpolation_residual = cert.interpolation_residual();
  rep.stationarity_residual = cert.stationarity_residual();
  rep.system_residual = cert.system_residual;

  rep.regimes = {
      {"cap", 0.0, kPi / 6.0, 0.0},
      {"near", kPi / 6.0, t0, 0.9902},
      {"mid", t0, 1.1 * kPi, 0.9682},
      {"ring", 1.1 * kPi, 4.0 * kPi, 0.9618},
      {"far", 4.0 * kPi, INFINITY, 0.1618},
  };

  std::size_t count = static_cast<std::size_t>(std::max(5000.0, sampling * ker.N() * ker.N()));
  std::vector<SpherePoint> pts = fibonacci_lattice(count);
  rep.sample_count = count;

  std::vector<double> q = cert.eval_many(pts);
  rep.min_cap_signed_q = INFINITY;
  for (std::size_t p = 0; p < count; ++p) {
    double dm = INFINITY;
    size_t m = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      double d = geodesic_distance(pts[p], s.points[i]);
      if (d < dm) {
        dm = d;
        m = i;
      }
    }
    double t = dm * np1;
    for (auto& r : rep.regimes)
      if (t >= r.lower && t < r.upper) {
        ++r.samples;
        r.max_abs_q = std::max(r.max_abs_q, std::abs(q[p]));
        break;
      }
    if (t < kPi / 6.0) {
      rep.min_cap_signed_q = std::min(rep.min_cap_signed_q, s.signs[m] * q[p]);
    } else {
      rep.max_off_cap_q = std::max(rep.max_off_cap_q, std::abs(q[p]));
    }
  }
  if (!std::isfinite(rep.min_cap_signed_q)) rep.min_cap_signed_q = 1.0;

  bool ok = rep.max_off_cap_q < 1.0 && rep.interpolation_residual < 1e-9;
  // Within caps |q| may not exceed 1 either.
  ok = ok && rep.regimes[0].max_abs_q <= 1.0 + 1e-9;
  for (auto& r : rep.regimes) {
    r.margin = r.bound > 0.0 ? r.bound - r.max_abs_q : 1.0 - r.max_abs_q;
    if (r.name == "cap") {
      r.pass = r.max_abs_q <= 1.0 + 1e-9 && (!rep.hypothesis || rep.min_cap_signed_q >= 0.92);
    } else {
      r.pass = r.max_abs_q < 1.0 && (!rep.hypothesis || r.samples == 0 || r.max_abs_q <= r.bound);
    }
    ok = ok && r.pass;
  }

  for (size_t i = 0; i < s.size(); ++i) {
    AtomHessian h;
    h.sign = s.signs[i];
    Eigen::Matrix2d H = cert.hessian(s.frames[i]);
    Eigen::Matrix2d Hs = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Hs);
    h.eigenvalues = es.eigenvalues();
    h.trace = Hs.trace();
    h.det = Hs.determinant();
    h.sign_ok = h.sign * h.trace < 0.0 && h.det > 0.0;
    if (rep.hypothesis)
      h.constant_bounds_ok = h.sign * h.trace <= -0.4496 * np1 * np1 && h.det >= 0.0398 * std::pow(np1, 4);
    ok = ok && h.sign_ok && h.constant_bounds_ok;
    rep.hessians.push_back(h);
  }
  if (rep.hypothesis) ok = ok && rep.coefficients.pass;
  rep.pass = ok;
  return rep;
}

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  j["N"] = N;
  j["n"] = n;
  j["M"] = M;
  j["separation"] = separation;
  j["separation_threshold"] = separation_threshold;
  j["hypothesis"] = hypothesis;
  j["sample_count"] = sample_count;
  j["interpolation_residual"] = interpolation_residual;
  j["stationarity_residual"] = stationarity_residual;
  j["system_residual"] = system_residual;
  j["max_off_cap_q"] = max_off_cap_q;
  j["min_cap_signed_q"] = min_cap_signed_q;
  j["coefficients"] = {{"hypothesis", coefficients.hypothesis},
                       {"alpha0_max", coefficients.alpha0_max},
                       {"alpha0_min", coefficients.alpha0_min},
                       {"alpha12_max_scaled", coefficients.alpha12_max_scaled},
                       {"pass", coefficients.pass}};
  for (const auto& r : regimes) {
    j["regimes"].push_back({{"name", r.name},
                            {"lower", r.lower},
                            {"upper", std::isfinite(r.upper) ? nlohmann::json(r.upper) : nlohmann::json("inf")},
                            {"bound", r.bound},
                            {"samples", r.samples},
                            {"max_abs_q", r.max_abs_q},
                            {"margin", r.margin},
                            {"pass", r.pass}});
  }
  for (const auto& h : hessians) {
    j["hessians"].push_back({{"sign", h.sign},
                             {"eigenvalues", {h.eigenvalues[0], h.eigenvalues[1]}},
                             {"trace", h.trace},
                             {"det", h.det},
                             {"sign_ok", h.sign_ok},
                             {"constant_bounds_ok", h.constant_bounds_ok}});
  }
  j["pass"] = pass;
  return j.dump(2);
}

}  // namespace ssr
