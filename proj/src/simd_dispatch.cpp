#include <atomic>

#include "ssr/simd.hpp"

namespace ssr::simd {

#ifndef SSR_HAVE_AVX2_TU
namespace avx2 {
bool compiled() { return false; }
void legendre_series(const double* c, int d, const double* t, std::size_t n, int k, double* o) {
  scalar::legendre_series(c, d, t, n, k, o);
}
void soft_threshold(const double* x, double k, double* o, std::size_t n) { scalar::soft_threshold(x, k, o, n); }
void dot3(const double* a, const double* b, const double* c, const double* v, double* o, std::size_t n) {
  scalar::dot3(a, b, c, v, o, n);
}
}  // namespace avx2
#endif

namespace {

Isa detect() { return avx2_supported() ? Isa::Avx2 : Isa::Scalar; }

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_supported() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  if (!avx2::compiled()) return false;
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

void legendre_series(const double* coeffs, int degree, const double* t, std::size_t n, int max_order,
                     double* out) {
  if (active_isa() == Isa::Avx2)
    avx2::legendre_series(coeffs, degree, t, n, max_order, out);
  else
    scalar::legendre_series(coeffs, degree, t, n, max_order, out);
}

void soft_threshold(const double* x, double kappa, double* out, std::size_t n) {
  if (active_isa() == Isa::Avx2)
    avx2::soft_threshold(x, kappa, out, n);
  else
    scalar::soft_threshold(x, kappa, out, n);
}

void dot3(const double* xs, const double* ys, const double* zs, const double* v, double* out, std::size_t n) {
  if (active_isa() == Isa::Avx2)
    avx2::dot3(xs, ys, zs, v, out, n);
  else
    scalar::dot3(xs, ys, zs, v, out, n);
}

}  // namespace ssr::simd
