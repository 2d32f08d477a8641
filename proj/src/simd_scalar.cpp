#include <algorithm>
#include <cmath>

#include "ssr/simd.hpp"

namespace ssr::simd::scalar {

void legendre_series(const double* coeffs, int degree, const double* t, std::size_t n, int max_order,
                     double* out) {
  const int K = std::min(max_order, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = t[i];
    // prev[k] = P_{l-1}^{(k)}, cur[k] = P_l^{(k)}
    double prev[4] = {0.0, 0.0, 0.0, 0.0};
    double cur[4] = {1.0, 0.0, 0.0, 0.0};
    double acc[4] = {coeffs[0], 0.0, 0.0, 0.0};
    for (int l = 0; l < degree; ++l) {
      double next[4];
      const double c1 = 2.0 * l + 1.0, c0 = double(l), inv = 1.0 / (l + 1.0);
      next[0] = (c1 * x * cur[0] - c0 * prev[0]) * inv;
      for (int k = 1; k <= K; ++k) next[k] = (c1 * (x * cur[k] + k * cur[k - 1]) - c0 * prev[k]) * inv;
      const double a = coeffs[l + 1];
      for (int k = 0; k <= K; ++k) {
        prev[k] = cur[k];
        cur[k] = next[k];
        acc[k] += a * cur[k];
      }
    }
    for (int k = 0; k <= K; ++k) out[k * n + i] = acc[k];
  }
}

void soft_threshold(const double* x, double kappa, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::abs(x[i]) - kappa;
    out[i] = a > 0.0 ? std::copysign(a, x[i]) : 0.0;
  }
}

void dot3(const double* xs, const double* ys, const double* zs, const double* v, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = xs[i] * v[0] + ys[i] * v[1] + zs[i] * v[2];
}

}  // namespace ssr::simd::scalar
