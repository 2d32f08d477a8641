// Compiled with -mavx2 -mfma. Only reached through the dispatcher after a
// CPUID check, so nothing here may run on hosts without AVX2.

#include <immintrin.h>

#include <algorithm>

#include "ssr/simd.hpp"

namespace ssr::simd::avx2 {

bool compiled() { return true; }

void legendre_series(const double* coeffs, int degree, const double* t, std::size_t n, int max_order,
                     double* out) {
  const int K = std::min(max_order, 3);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(t + i);
    __m256d prev[4], cur[4], acc[4];
    for (int k = 0; k < 4; ++k) {
      prev[k] = _mm256_setzero_pd();
      cur[k] = _mm256_setzero_pd();
      acc[k] = _mm256_setzero_pd();
    }
    cur[0] = _mm256_set1_pd(1.0);
    acc[0] = _mm256_set1_pd(coeffs[0]);
    for (int l = 0; l < degree; ++l) {
      const __m256d c1 = _mm256_set1_pd(2.0 * l + 1.0);
      const __m256d c0 = _mm256_set1_pd(double(l));
      const __m256d inv = _mm256_set1_pd(1.0 / (l + 1.0));
      const __m256d a = _mm256_set1_pd(coeffs[l + 1]);
      __m256d next[4];
      next[0] = _mm256_mul_pd(_mm256_fmsub_pd(_mm256_mul_pd(c1, x), cur[0], _mm256_mul_pd(c0, prev[0])), inv);
      for (int k = 1; k <= K; ++k) {
        __m256d inner = _mm256_fmadd_pd(x, cur[k], _mm256_mul_pd(_mm256_set1_pd(double(k)), cur[k - 1]));
        next[k] = _mm256_mul_pd(_mm256_fmsub_pd(c1, inner, _mm256_mul_pd(c0, prev[k])), inv);
      }
      for (int k = 0; k <= K; ++k) {
        prev[k] = cur[k];
        cur[k] = next[k];
        acc[k] = _mm256_fmadd_pd(a, cur[k], acc[k]);
      }
    }
    for (int k = 0; k <= K; ++k) _mm256_storeu_pd(out + k * n + i, acc[k]);
  }
  if (i < n) {
    // Tail through the reference path; it writes with stride n, so offset
    // the base pointers and remap into a small buffer.
    const std::size_t rem = n - i;
    double buf[4 * 4];
    scalar::legendre_series(coeffs, degree, t + i, rem, K, buf);
    for (int k = 0; k <= K; ++k)
      for (std::size_t j = 0; j < rem; ++j) out[k * n + i + j] = buf[k * rem + j];
  }
}

void soft_threshold(const double* x, double kappa, double* out, std::size_t n) {
  const __m256d kap = _mm256_set1_pd(kappa);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d mag = _mm256_andnot_pd(sign_mask, v);
    __m256d shrunk = _mm256_max_pd(_mm256_sub_pd(mag, kap), zero);
    __m256d sgn = _mm256_and_pd(sign_mask, v);
    // Mask keeps +0 for shrunk-to-zero negatives, matching the scalar path.
    __m256d live = _mm256_cmp_pd(shrunk, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(live, _mm256_or_pd(shrunk, sgn)));
  }
  if (i < n) scalar::soft_threshold(x + i, kappa, out + i, n - i);
}

void dot3(const double* xs, const double* ys, const double* zs, const double* v, double* out, std::size_t n) {
  const __m256d v0 = _mm256_set1_pd(v[0]), v1 = _mm256_set1_pd(v[1]), v2 = _mm256_set1_pd(v[2]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(xs + i), v0);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(ys + i), v1, acc);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(zs + i), v2, acc);
    _mm256_storeu_pd(out + i, acc);
  }
  if (i < n) scalar::dot3(xs + i, ys + i, zs + i, v, out + i, n - i);
}

}  // namespace ssr::simd::avx2
