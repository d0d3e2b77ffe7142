#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace stremon {

// Extended reals are plain doubles; +/-infinity are legal values everywhere
// in the robust semantics. NaN is never a legal value.
inline constexpr double kPlusInf = std::numeric_limits<double>::infinity();
inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

// sup over an empty set.
inline constexpr double kSupEmpty = kMinusInf;
// inf over an empty set.
inline constexpr double kInfEmpty = kPlusInf;

inline bool is_finite(double v) { return std::isfinite(v); }

// Difference a - b that never produces NaN: equal infinities cancel to 0.
// Used for nonconformity scores where both sides may be infinite.
inline double sub_scored(double a, double b) {
  if (std::isinf(a) && std::isinf(b)) {
    if (a == b) return 0.0;
    return a > b ? kPlusInf : kMinusInf;
  }
  if (std::isinf(a)) return a;
  if (std::isinf(b)) return b > 0 ? kMinusInf : kPlusInf;
  return a - b;
}

inline double sup_of(const std::vector<double>& vs) {
  double r = kSupEmpty;
  for (double v : vs) r = std::max(r, v);
  return r;
}

inline double inf_of(const std::vector<double>& vs) {
  double r = kInfEmpty;
  for (double v : vs) r = std::min(r, v);
  return r;
}

}  // namespace stremon
