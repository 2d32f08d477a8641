#include "ssr/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ssr {

namespace {
constexpr double kPi = std::numbers::pi;

inline int tri(int l, int m) { return l * (l + 1) / 2 + m; }

double log_factorial_ratio(int l, int m) {
  // log((l-m)!/(l+m)!)
  return std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0);
}

double normalization(int l, int m) {
  return std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * std::exp(log_factorial_ratio(l, m)));
}
}  // namespace

HarmonicIndex harmonic_from_index(int k) {
  int l = static_cast<int>(std::sqrt(static_cast<double>(k)));
  while (l * l > k) --l;
  while ((l + 1) * (l + 1) <= k) ++l;
  return {l, k - l * l - l};
}

std::vector<SpherePoint> AtomicMeasure::points() const {
  std::vector<SpherePoint> p;
  p.reserve(atoms.size());
  for (const auto& a : atoms) p.push_back(a.point);
  return p;
}

std::vector<double> AtomicMeasure::weights() const {
  std::vector<double> w;
  w.reserve(atoms.size());
  for (const auto& a : atoms) w.push_back(a.weight);
  return w;
}

double AtomicMeasure::tv_norm() const {
  double s = 0.0;
  for (const auto& a : atoms) s += std::abs(a.weight);
  return s;
}

void AtomicMeasure::validate() const {
  for (const auto& a : atoms)
    if (a.weight == 0.0) throw std::invalid_argument("atomic measure has a zero weight");
  if (atoms.size() > 1 && min_separation(points()) <= 0.0)
    throw std::invalid_argument("atomic measure has coincident points");
}

double MomentVector::conjugate_symmetry_defect() const {
  double worst = 0.0;
  for (int l = 0; l <= N; ++l)
    for (int m = 1; m <= l; ++m) {
      cplx expect = ((m % 2) ? -1.0 : 1.0) * std::conj((*this)(l, m));
      worst = std::max(worst, std::abs((*this)(l, -m) - expect));
    }
  return worst;
}

double assoc_legendre(int l, int m, double t) {
  if (m < 0 || m > l) throw std::invalid_argument("assoc_legendre: need 0 <= m <= l");
  if (std::abs(t) > 1.0) throw std::domain_error("assoc_legendre: |t| > 1");
  double s = std::sqrt((1.0 - t) * (1.0 + t));
  double pmm = 1.0;
  for (int i = 1; i <= m; ++i) pmm *= -(2.0 * i - 1.0) * s;
  if (l == m) return pmm;
  double pm1 = t * (2.0 * m + 1.0) * pmm;
  for (int ll = m + 2; ll <= l; ++ll) {
    double p = ((2.0 * ll - 1.0) * t * pm1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pm1;
    pm1 = p;
  }
  return pm1;
}

double assoc_legendre_trig(int l, int m, double r) {
  double t = std::cos(r), s = std::sin(r);
  double pmm = 1.0;
  for (int i = 1; i <= m; ++i) pmm *= -(2.0 * i - 1.0) * s;
  if (l == m) return pmm;
  double pm1 = t * (2.0 * m + 1.0) * pmm;
  for (int ll = m + 2; ll <= l; ++ll) {
    double p = ((2.0 * ll - 1.0) * t * pm1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pm1;
    pm1 = p;
  }
  return pm1;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

HarmonicBasis::HarmonicBasis(int N) : N_(N) {
  if (N < 0) throw std::invalid_argument("HarmonicBasis: negative degree");
  int T = tri(N + 1, 0) + 1;
  a_.assign(T, 0.0);
  b_.assign(T, 0.0);
  diag_.assign(N + 2, 0.0);
  sub_.assign(N + 2, 0.0);
  for (int m = 1; m <= N; ++m) diag_[m] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
  for (int m = 0; m <= N; ++m) sub_[m] = std::sqrt(2.0 * m + 3.0);
  for (int l = 2; l <= N; ++l)
    for (int m = 0; m <= l - 2; ++m) {
      double l2 = double(l) * l, m2 = double(m) * m, lm1 = l - 1.0;
      a_[tri(l, m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      b_[tri(l, m)] = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
    }
}

void HarmonicBasis::legendre_table(double z, std::vector<double>& q) const {
  // q[tri(l,m)] = N_lm * P_l^m(z) / sin^m, the factor sin^m e^{im theta} = (x+iy)^m is applied by callers.
  q.assign(tri(N_, N_) + 1, 0.0);
  q[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= N_; ++m) {
    if (m > 0) q[tri(m, m)] = diag_[m] * q[tri(m - 1, m - 1)];
    if (m + 1 <= N_) q[tri(m + 1, m)] = sub_[m] * z * q[tri(m, m)];
    for (int l = m + 2; l <= N_; ++l) {
      int k = tri(l, m);
      q[k] = a_[k] * (z * q[tri(l - 1, m)] - b_[k] * q[tri(l - 2, m)]);
    }
  }
}

void HarmonicBasis::eval(const SpherePoint& x, cplx* out) const {
  thread_local std::vector<double> q;
  legendre_table(x[2], q);
  cplx w(x[0], x[1]);
  cplx wm(1.0, 0.0);
  for (int m = 0; m <= N_; ++m) {
    double sign = (m % 2) ? -1.0 : 1.0;
    for (int l = m; l <= N_; ++l) {
      cplx v = q[tri(l, m)] * wm;
      out[harmonic_index(l, m)] = v;
      if (m > 0) out[harmonic_index(l, -m)] = sign * std::conj(v);
    }
    wm *= w;
  }
}

Eigen::VectorXcd HarmonicBasis::eval(const SpherePoint& x) const {
  Eigen::VectorXcd out(size());
  eval(x, out.data());
  return out;
}

void HarmonicBasis::eval_with_gradient(const SpherePoint& x, Eigen::VectorXcd& y, Eigen::VectorXcd& dx,
                                       Eigen::VectorXcd& dy, Eigen::VectorXcd& dz) const {
  thread_local std::vector<double> q;
  legendre_table(x[2], q);
  y.resize(size());
  dx.resize(size());
  dy.resize(size());
  dz.resize(size());
  const cplx w(x[0], x[1]);
  const cplx I(0.0, 1.0);
  cplx wm(1.0, 0.0), wm1(0.0, 0.0);  // w^m and w^(m-1)
  for (int m = 0; m <= N_; ++m) {
    double sign = (m % 2) ? -1.0 : 1.0;
    for (int l = m; l <= N_; ++l) {
      double qv = q[tri(l, m)];
      // d/dz (N_lm Q_l^m) = -sqrt((l-m)(l+m+1)) * (N_l,m+1 Q_l^{m+1})
      double qz = (m < l) ? -std::sqrt((l - m) * (l + m + 1.0)) * q[tri(l, m + 1)] : 0.0;
      cplx v = qv * wm;
      cplx gx = (m > 0) ? qv * double(m) * wm1 : cplx(0.0);
      cplx gy = I * gx;
      cplx gz = qz * wm;
      int kp = harmonic_index(l, m);
      y[kp] = v;
      dx[kp] = gx;
      dy[kp] = gy;
      dz[kp] = gz;
      if (m > 0) {
        int kn = harmonic_index(l, -m);
        y[kn] = sign * std::conj(v);
        dx[kn] = sign * std::conj(gx);
        dy[kn] = sign * std::conj(gy);
        dz[kn] = sign * std::conj(gz);
      }
    }
    wm1 = wm;
    wm *= w;
  }
}

Eigen::MatrixXcd HarmonicBasis::matrix(const std::vector<SpherePoint>& pts) const {
  Eigen::MatrixXcd A(size(), static_cast<Eigen::Index>(pts.size()));
  for (size_t j = 0; j < pts.size(); ++j) eval(pts[j], A.col(static_cast<Eigen::Index>(j)).data());
  return A;
}

cplx spherical_harmonic(int l, int m, const SpherePoint& x) {
  if (l < 0 || std::abs(m) > l) throw std::invalid_argument("spherical_harmonic: invalid index");
  int am = std::abs(m);
  double r = x.inclination();
  double th = std::atan2(x[1], x[0]);
  cplx v = normalization(l, am) * assoc_legendre(l, am, std::cos(r)) * std::polar(1.0, am * th);
  if (m < 0) v = ((am % 2) ? -1.0 : 1.0) * std::conj(v);
  return v;
}

double dirichlet_kernel(int N, const SpherePoint& x, const SpherePoint& y) {
  double t = clamp_unit(x.xyz().dot(y.xyz()));
  double p0 = 1.0, p1 = t;
  double s = 1.0 / (4.0 * kPi);
  if (N >= 1) s += 3.0 * t / (4.0 * kPi);
  for (int l = 2; l <= N; ++l) {
    double p2 = ((2.0 * l - 1.0) * t * p1 - (l - 1.0) * p0) / l;
    s += (2.0 * l + 1.0) / (4.0 * kPi) * p2;
    p0 = p1;
    p1 = p2;
  }
  return s;
}

MomentVector moments(int N, const AtomicMeasure& mu) {
  HarmonicBasis basis(N);
  MomentVector y(N);
  Eigen::VectorXcd v(basis.size());
  for (const auto& a : mu.atoms) {
    basis.eval(a.point, v.data());
    y.values += a.weight * v.conjugate();
  }
  return y;
}

namespace {
std::vector<cplx> trig_dft(int l, const std::vector<double>& samples) {
  const int M = static_cast<int>(samples.size());
  std::vector<cplx> p(2 * l + 1);
  for (int k = -l; k <= l; ++k) {
    cplx s(0.0);
    for (int j = 0; j < M; ++j) s += samples[j] * std::polar(1.0, 2.0 * kPi * k * j / M);
    p[k + l] = s / double(M);
  }
  return p;
}
}  // namespace

std::vector<cplx> legendre_to_fourier(int l, int m) {
  if (l < 0 || std::abs(m) > l) throw std::invalid_argument("legendre_to_fourier: invalid index");
  int am = std::abs(m);
  double scale = 1.0;
  if (m < 0) scale = ((am % 2) ? -1.0 : 1.0) * std::exp(log_factorial_ratio(l, am));
  const int M = 4 * l + 4;
  std::vector<double> v(M);
  for (int j = 0; j < M; ++j) v[j] = scale * assoc_legendre_trig(l, am, 2.0 * kPi * j / M);
  return trig_dft(l, v);
}

std::vector<cplx> harmonic_to_fourier(int l, int m) {
  int am = std::abs(m);
  double scale = normalization(l, am) * ((m < 0 && (am % 2)) ? -1.0 : 1.0);
  const int M = 4 * l + 4;
  std::vector<double> v(M);
  for (int j = 0; j < M; ++j) v[j] = scale * assoc_legendre_trig(l, am, 2.0 * kPi * j / M);
  return trig_dft(l, v);
}

cplx eval_expansion(const HarmonicBasis& basis, const Eigen::VectorXcd& coeffs, const SpherePoint& x) {
  thread_local Eigen::VectorXcd v;
  v.resize(basis.size());
  basis.eval(x, v.data());
  return (coeffs.array() * v.array()).sum();
}

}  // namespace ssr
