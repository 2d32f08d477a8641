#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ssr/sphere_geom.hpp"

namespace ssr {

using cplx = std::complex<double>;

// Degree l, order m with |m| <= l. Flat position l*l + l + m.
struct HarmonicIndex {
  int l = 0;
  int m = 0;
};

inline int harmonic_index(int l, int m) { return l * l + l + m; }
inline int num_harmonics(int N) { return (N + 1) * (N + 1); }
HarmonicIndex harmonic_from_index(int k);

struct Atom {
  SpherePoint point;
  double weight = 0.0;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;

  size_t size() const { return atoms.size(); }
  std::vector<SpherePoint> points() const;
  std::vector<double> weights() const;
  double tv_norm() const;
  // Throws if a weight is zero or two points coincide.
  void validate() const;
};

struct MomentVector {
  int N = 0;
  Eigen::VectorXcd values;

  MomentVector() = default;
  explicit MomentVector(int degree) : N(degree), values(Eigen::VectorXcd::Zero(num_harmonics(degree))) {}

  cplx& operator()(int l, int m) { return values[harmonic_index(l, m)]; }
  cplx operator()(int l, int m) const { return values[harmonic_index(l, m)]; }
  // max |value(l,-m) - (-1)^m conj(value(l,m))|
  double conjugate_symmetry_defect() const;
};

// P_l^m(t) including the Condon-Shortley phase, 0 <= m <= l, |t| <= 1.
double assoc_legendre(int l, int m, double t);
// r -> P_l^m(cos r) continued analytically with sin r taking its sign.
double assoc_legendre_trig(int l, int m, double r);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Precomputed normalized recurrences for all Y_l^m with l <= N.
class HarmonicBasis {
 public:
  explicit HarmonicBasis(int N);

  int degree() const { return N_; }
  int size() const { return num_harmonics(N_); }

  Eigen::VectorXcd eval(const SpherePoint& x) const;
  void eval(const SpherePoint& x, cplx* out) const;
  // Values plus gradients of the polynomial extension Q(z)(x+iy)^m in R^3.
  void eval_with_gradient(const SpherePoint& x, Eigen::VectorXcd& y, Eigen::VectorXcd& dx, Eigen::VectorXcd& dy,
                          Eigen::VectorXcd& dz) const;

  // Rows = harmonics, columns = points.
  Eigen::MatrixXcd matrix(const std::vector<SpherePoint>& pts) const;

 private:
  void legendre_table(double z, std::vector<double>& q) const;

  int N_;
  std::vector<double> a_, b_, diag_, sub_;
};

cplx spherical_harmonic(int l, int m, const SpherePoint& x);
inline cplx spherical_harmonic(HarmonicIndex idx, const SpherePoint& x) {
  return spherical_harmonic(idx.l, idx.m, x);
}

double dirichlet_kernel(int N, const SpherePoint& x, const SpherePoint& y);

// value(l,m) = sum_i c_i conj(Y_l^m(x_i))
MomentVector moments(int N, const AtomicMeasure& mu);

// p_k, k = -l..l, with P_l^m(cos r) = sum_k p_k e^{-ikr}. Negative m uses
// P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m.
std::vector<cplx> legendre_to_fourier(int l, int m);

// Same expansion for r -> Y_l^m(r, 0).
std::vector<cplx> harmonic_to_fourier(int l, int m);

// Evaluate f(x) = sum f_lm Y_lm(x).
cplx eval_expansion(const HarmonicBasis& basis, const Eigen::VectorXcd& coeffs, const SpherePoint& x);

}  // namespace ssr
