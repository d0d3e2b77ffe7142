#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stremon/ext_real.hpp"

namespace stremon {

// ceil with a small downward nudge so values a hair above an integer (from
// accumulated rounding) do not jump to the next rank
inline int ceil_index(double v) { return static_cast<int>(std::ceil(v - 1e-9)); }

inline constexpr double kFeasibilitySlack = 1e-12;

// An f-divergence ball of radius epsilon. TotalVariation uses closed forms;
// Generic runs bisections against the supplied convex generator f (f(1)=0).
struct DivergenceSpec {
  enum class Kind { TotalVariation, Generic };
  Kind kind = Kind::TotalVariation;
  double epsilon = 0.0;
  std::function<double(double)> f;
  double f_inf = std::numeric_limits<double>::quiet_NaN();  // lim f(t)/t

  static DivergenceSpec total_variation(double eps) {
    if (eps < 0) throw std::invalid_argument("epsilon must be nonnegative");
    DivergenceSpec d;
    d.kind = Kind::TotalVariation;
    d.epsilon = eps;
    return d;
  }
  static DivergenceSpec generic(double eps, std::function<double(double)> f,
                                double f_inf = std::numeric_limits<double>::quiet_NaN()) {
    if (eps < 0) throw std::invalid_argument("epsilon must be nonnegative");
    DivergenceSpec d;
    d.kind = Kind::Generic;
    d.epsilon = eps;
    d.f = std::move(f);
    d.f_inf = f_inf;
    return d;
  }
};

namespace detail {

inline constexpr int kBisectionCap = 200;
inline constexpr double kBisectionTol = 1e-9;

inline double fdiv_slope_at_infinity(const DivergenceSpec& d) {
  if (!std::isnan(d.f_inf)) return d.f_inf;
  double t = 1e12;
  return d.f(t) / t;
}

// f-divergence between Bernoulli(z) and Bernoulli(beta), with the standard
// 0 * f(x/0) = x * lim f(t)/t convention at the endpoints.
inline double bernoulli_fdiv(const DivergenceSpec& d, double z, double beta) {
  double slope = fdiv_slope_at_infinity(d);
  double a = beta > 0 ? beta * d.f(z / beta) : z * slope;
  double b = (1 - beta) > 0 ? (1 - beta) * d.f((1 - z) / (1 - beta)) : (1 - z) * slope;
  return a + b;
}

}  // namespace detail

// g(beta): smallest z whose Bernoulli f-divergence from Bernoulli(beta) stays
// within epsilon. Nondecreasing in beta; g(beta) <= beta.
inline double g_of(const DivergenceSpec& d, double beta) {
  beta = std::clamp(beta, 0.0, 1.0);
  if (d.kind == DivergenceSpec::Kind::TotalVariation) return std::max(0.0, beta - d.epsilon);
  if (detail::bernoulli_fdiv(d, 0.0, beta) <= d.epsilon) return 0.0;
  // the divergence is convex in z with minimum 0 at z = beta, so it is
  // nonincreasing on [0, beta]; bisect for the boundary and return the
  // feasible side
  double lo = 0.0, hi = beta;
  for (int i = 0; i < detail::kBisectionCap && hi - lo > detail::kBisectionTol; ++i) {
    double mid = 0.5 * (lo + hi);
    if (detail::bernoulli_fdiv(d, mid, beta) <= d.epsilon)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// g_inverse(tau): largest beta with g(beta) <= tau.
inline double g_inverse(const DivergenceSpec& d, double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  if (d.kind == DivergenceSpec::Kind::TotalVariation) return std::min(1.0, tau + d.epsilon);
  if (g_of(d, 1.0) <= tau) return 1.0;
  double lo = 0.0, hi = 1.0;  // g(0) = 0 <= tau, g(1) > tau
  for (int i = 0; i < detail::kBisectionCap && hi - lo > detail::kBisectionTol; ++i) {
    double mid = 0.5 * (lo + hi);
    if (g_of(d, mid) <= tau)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

struct QuantileResult {
  double value = kPlusInf;
  bool feasible = false;
  int rank = 0;        // 1-based position in the sorted scores, 0 if infeasible
  double level = 1.0;  // empirical quantile level the rank was derived from
};

// C := Quantile_{(1+1/K)(1-delta)} of the scores; +inf when the corrected
// level exceeds what K samples support.
inline QuantileResult vanilla_quantile(std::vector<double> scores, double delta) {
  if (scores.empty()) throw std::invalid_argument("need at least one calibration score");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0,1)");
  int k = static_cast<int>(scores.size());
  QuantileResult r;
  r.level = (1.0 + 1.0 / k) * (1.0 - delta);
  int p = std::max(1, ceil_index((k + 1) * (1.0 - delta)));
  if (p > k) return r;  // infeasible: value +inf
  std::sort(scores.begin(), scores.end());
  r.value = scores[p - 1];
  r.feasible = true;
  r.rank = p;
  return r;
}

// Distribution-shift-robust quantile: inflates the level through g/g_inverse
// before taking the empirical quantile.
inline QuantileResult robust_quantile(std::vector<double> scores, double delta,
                                      const DivergenceSpec& div) {
  if (scores.empty()) throw std::invalid_argument("need at least one calibration score");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0,1)");
  int k = static_cast<int>(scores.size());
  QuantileResult r;

  double q = (1.0 + 1.0 / k) * g_inverse(div, 1.0 - delta);
  if (q > 1.0 + kFeasibilitySlack) return r;  // not enough calibration data
  q = std::min(q, 1.0);
  double delta_n = 1.0 - g_of(div, q);
  double level = g_inverse(div, 1.0 - delta_n);  // = 1 - delta_tilde
  r.level = level;

  int p = std::max(1, ceil_index(k * level));
  if (p > k) return r;
  std::sort(scores.begin(), scores.end());
  r.value = scores[p - 1];
  r.feasible = true;
  r.rank = p;
  return r;
}

// Smallest K for which the robust quantile is finite; nullopt when no finite
// K works (the shift budget swallows the miscoverage budget).
inline std::optional<int> min_calibration_size(double delta, const DivergenceSpec& div) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0,1)");
  double r = g_inverse(div, 1.0 - delta);
  if (r >= 1.0 - kFeasibilitySlack) return std::nullopt;
  return std::max(1, ceil_index(r / (1.0 - r)));
}

}  // namespace stremon
