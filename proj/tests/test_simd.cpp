#include <doctest.h>

#include <random>
#include <vector>

#include "ssr/kernels.hpp"
#include "ssr/simd.hpp"

using namespace ssr;

namespace {

std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
  return worst;
}

// Per derivative order, error relative to the largest magnitude of that
// order; FMA contraction changes rounding in the recurrences.
double max_block_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  double worst = 0.0;
  for (std::size_t k = 0; k * n < a.size(); ++k) {
    double scale = 1.0, err = 0.0;
    for (std::size_t i = k * n; i < (k + 1) * n; ++i) {
      scale = std::max(scale, std::abs(a[i]));
      err = std::max(err, std::abs(a[i] - b[i]));
    }
    worst = std::max(worst, err / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("dispatch selects a supported ISA") {
  simd::Isa active = simd::active_isa();
  if (!simd::avx2_supported()) CHECK(active == simd::Isa::Scalar);
  CHECK(simd::force_isa(simd::Isa::Scalar) == simd::Isa::Scalar);
  simd::Isa back = simd::force_isa(simd::Isa::Avx2);
  CHECK(back == (simd::avx2_supported() && simd::avx2::compiled() ? simd::Isa::Avx2 : simd::Isa::Scalar));
  simd::force_isa(active);
}

TEST_CASE("AVX2 variants match the scalar reference") {
  if (!(simd::avx2_supported() && simd::avx2::compiled())) {
    MESSAGE("AVX2 not available, equivalence not exercised");
    return;
  }
  // Odd lengths cover the vector tail.
  for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
    std::vector<double> t = uniform(n, -1.0, 1.0, n);
    t[0] = 1.0;
    for (int N : {0, 1, 6, 41}) {
      JacksonKernel k(std::max(N, 1));
      std::vector<double> coeffs = k.legendre_coeffs();
      coeffs.resize(N + 1);
      for (int order = 0; order <= 3; ++order) {
        std::vector<double> a((order + 1) * n), b((order + 1) * n);
        simd::scalar::legendre_series(coeffs.data(), N, t.data(), n, order, a.data());
        simd::avx2::legendre_series(coeffs.data(), N, t.data(), n, order, b.data());
        REQUIRE(max_block_diff(a, b, n) < 1e-12);
      }
    }

    std::vector<double> x = uniform(n, -2.0, 2.0, n + 1), a(n), b(n);
    for (double kappa : {0.0, 0.5, 3.0}) {
      simd::scalar::soft_threshold(x.data(), kappa, a.data(), n);
      simd::avx2::soft_threshold(x.data(), kappa, b.data(), n);
      REQUIRE(a == b);
    }

    std::vector<double> xs = uniform(n, -1, 1, 2 * n), ys = uniform(n, -1, 1, 3 * n), zs = uniform(n, -1, 1, 4 * n);
    double v[3] = {0.3, -0.5, 0.8};
    simd::scalar::dot3(xs.data(), ys.data(), zs.data(), v, a.data(), n);
    simd::avx2::dot3(xs.data(), ys.data(), zs.data(), v, b.data(), n);
    REQUIRE(max_rel_diff(a, b) < 1e-15);
  }
}

TEST_CASE("soft threshold reference") {
  std::vector<double> x = {-3.0, -0.5, 0.0, 0.5, 3.0}, out(5);
  simd::soft_threshold(x.data(), 1.0, out.data(), x.size());
  CHECK(out == std::vector<double>{-2.0, 0.0, 0.0, 0.0, 2.0});
}
