#pragma once

// Hot numeric loops with a scalar reference and an AVX2/FMA variant.
// The variant is chosen once at runtime from CPUID; tests pin both and
// compare them element by element.

#include <cstddef>

namespace ssr::simd {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool avx2_supported();
Isa active_isa();
// Override the dispatch target; requesting Avx2 on a machine without it
// falls back to Scalar. Returns the ISA actually selected.
Isa force_isa(Isa isa);

// For each t[i], out[k*n + i] = sum_l coeffs[l] * d^k/dt^k P_l(t[i]),
// k = 0..max_order (max_order <= 3).
void legendre_series(const double* coeffs, int degree, const double* t, std::size_t n, int max_order,
                     double* out);

// out[i] = sign(x[i]) * max(|x[i]| - kappa, 0)
void soft_threshold(const double* x, double kappa, double* out, std::size_t n);

// out[i] = xs[i]*v[0] + ys[i]*v[1] + zs[i]*v[2]
void dot3(const double* xs, const double* ys, const double* zs, const double* v, double* out, std::size_t n);

namespace scalar {
void legendre_series(const double* coeffs, int degree, const double* t, std::size_t n, int max_order,
                     double* out);
void soft_threshold(const double* x, double kappa, double* out, std::size_t n);
void dot3(const double* xs, const double* ys, const double* zs, const double* v, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool compiled();
void legendre_series(const double* coeffs, int degree, const double* t, std::size_t n, int max_order,
                     double* out);
void soft_threshold(const double* x, double kappa, double* out, std::size_t n);
void dot3(const double* xs, const double* ys, const double* zs, const double* v, double* out, std::size_t n);
}  // namespace avx2

}  // namespace ssr::simd
