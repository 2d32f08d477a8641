#pragma once

// Executable versions of the kernel localization inequalities. Each bound id
// names one inequality lhs <= rhs; an audit samples random configurations and
// records the worst ratio lhs/rhs.

#include <cstdint>
#include <string>
#include <vector>

#include "ssr/kernels.hpp"

namespace ssr {

struct BoundSample {
  double omega = 0.0;  // distance parameter of the configuration
  double lhs = 0.0;
  double rhs = 0.0;
};

struct BoundAudit {
  std::string id;
  int N = 0;
  std::size_t samples = 0;
  double worst_ratio = 0.0;
  double worst_omega = 0.0;
  double worst_margin = 0.0;  // min over samples of rhs - lhs
  bool pass = false;          // lhs <= rhs + slack everywhere
  std::vector<BoundSample> trace;
};

const std::vector<std::string>& bound_ids();
bool is_bound_id(const std::string& id);

// keep_trace stores every sample for CSV export.
BoundAudit audit_bound(const std::string& id, int N, std::size_t samples, std::uint64_t seed,
                       bool keep_trace = false, double slack = 1e-9);

enum class RingQuantity {
  Kernel,        // sum |J|
  GradY,         // sum |X_n^y J|
  HessXX,        // sum |X_i^x X_i^x J|
  PolarHJDiag,   // sum |(H J)_ii|
  Third,         // sum |X_i^x X_i^x X_j^y J|
  PolarHJOff,    // sum |(H J)_ij|
  PolarHXJDiag,  // sum |(H X_i^y J)_ii|
  PolarHXJOff,   // sum |(H X_i^y J)_ij|
};

const std::vector<RingQuantity>& ring_quantities();
const char* ring_quantity_name(RingQuantity q);

struct RingSumResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double eps = 0.0;
};

// a_eps = zeta(3) * min(9 (1-eps)^-4 + 25, 25 (1-eps)^-4)
double ring_constant(double eps);

// Sum over points other than the one nearest to x. Throws SeparationError
// when the set is not nu/(n+1) separated or x is farther than nu/(2(n+1))
// from its nearest point.
RingSumResult ring_sum_bound_check(const JacksonKernel& ker, const std::vector<SpherePoint>& points,
                                   const SpherePoint& x, double nu, RingQuantity quantity);

}  // namespace ssr
