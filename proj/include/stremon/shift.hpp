#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stremon/rprv.hpp"

namespace stremon {

// Gaussian kernel density estimate over a fixed sample set.
struct KdeDensity {
  std::vector<double> samples;
  double bandwidth = 1e-6;

  double operator()(double x) const {
    constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
    double s = 0;
    for (double c : samples) {
      double z = (x - c) / bandwidth;
      s += std::exp(-0.5 * z * z);
    }
    return s * kInvSqrt2Pi / (static_cast<double>(samples.size()) * bandwidth);
  }
};

// Silverman's rule 1.06 * sigma_hat * m^(-1/5), floored at 1e-6 so degenerate
// samples still give a usable density.
inline KdeDensity kde_pdf(const std::vector<double>& samples,
                          std::optional<double> bandwidth = std::nullopt) {
  if (samples.empty()) throw std::invalid_argument("kde needs at least one sample");
  for (double v : samples)
    if (!std::isfinite(v)) throw std::invalid_argument("kde samples must be finite");
  KdeDensity k;
  k.samples = samples;
  if (bandwidth) {
    k.bandwidth = *bandwidth;
  } else {
    double m = static_cast<double>(samples.size());
    double mean = 0;
    for (double v : samples) mean += v;
    mean /= m;
    double var = 0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var = samples.size() > 1 ? var / (m - 1) : 0.0;
    k.bandwidth = 1.06 * std::sqrt(var) * std::pow(m, -0.2);
  }
  k.bandwidth = std::max(k.bandwidth, 1e-6);
  return k;
}

struct GridSpec {
  double lo = 0;
  double hi = 1;
  int points = 4096;
};

namespace detail {

struct TvDetails {
  double tv = 0;
  double bw_a = 0, bw_b = 0;
  GridSpec grid;
};

inline TvDetails tv_details(const std::vector<double>& a, const std::vector<double>& b,
                            int grid_points) {
  if (a.empty() || b.empty()) throw std::invalid_argument("tv needs two nonempty sample sets");
  if (grid_points < 2) throw std::invalid_argument("tv grid needs at least two points");
  KdeDensity pa = kde_pdf(a);
  KdeDensity pb = kde_pdf(b);

  TvDetails out;
  out.bw_a = pa.bandwidth;
  out.bw_b = pb.bandwidth;
  double lo = std::min(*std::min_element(a.begin(), a.end()),
                       *std::min_element(b.begin(), b.end()));
  double hi = std::max(*std::max_element(a.begin(), a.end()),
                       *std::max_element(b.begin(), b.end()));
  double pad = 3.0 * std::max(pa.bandwidth, pb.bandwidth);
  out.grid = {lo - pad, hi + pad, grid_points};

  double step = (out.grid.hi - out.grid.lo) / (grid_points - 1);
  double sum = 0;
  double prev = 0;
  for (int i = 0; i < grid_points; ++i) {
    double x = out.grid.lo + i * step;
    double d = std::abs(pa(x) - pb(x));
    if (i > 0) sum += 0.5 * (prev + d) * step;
    prev = d;
  }
  out.tv = std::clamp(0.5 * sum, 0.0, 1.0);
  return out;
}

}  // namespace detail

// Total variation distance between the KDE densities of two sample sets,
// integrated on a grid spanning the union of supports +- 3 max bandwidths.
inline double tv_between(const std::vector<double>& a, const std::vector<double>& b,
                         int grid_points = 4096) {
  return detail::tv_details(a, b, grid_points).tv;
}

struct ShiftComponent {
  std::string score_type;  // method name the scores came from
  double tv = 0;
  double bw_train = 0, bw_test = 0;
  GridSpec grid;
  int train_count = 0, test_count = 0;
};

struct ShiftEstimate {
  std::vector<ShiftComponent> components;
  double epsilon = 0;  // max over components
};

// Estimate the shift between two trajectory pools as the largest TV distance
// between their nonconformity-score distributions, one component per method.
// The alpha set (from the training distribution) fixes the normalization so
// both pools are scored on the same scale.
inline ShiftEstimate estimate_epsilon(const CalibrationInputs& in,
                                      const std::vector<Method>& methods,
                                      const std::vector<Trajectory>& train_pool,
                                      const std::vector<Trajectory>& test_pool,
                                      const std::vector<Trajectory>& alpha_set,
                                      const PredictorModel& predictor, int grid_points = 4096) {
  if (methods.empty()) throw std::invalid_argument("estimate_epsilon needs at least one method");
  if (train_pool.empty() || test_pool.empty())
    throw std::invalid_argument("estimate_epsilon needs nonempty train and test pools");
  ShiftEstimate est;
  for (Method m : methods) {
    NonconformityScorer sc(m, in, alpha_set, predictor);
    std::vector<double> rs_train, rs_test;
    rs_train.reserve(train_pool.size());
    rs_test.reserve(test_pool.size());
    for (const auto& x : train_pool) rs_train.push_back(sc.score(x));
    for (const auto& x : test_pool) rs_test.push_back(sc.score(x));
    detail::TvDetails d = detail::tv_details(rs_train, rs_test, grid_points);
    ShiftComponent c;
    c.score_type = method_name(m);
    c.tv = d.tv;
    c.bw_train = d.bw_a;
    c.bw_test = d.bw_b;
    c.grid = d.grid;
    c.train_count = static_cast<int>(rs_train.size());
    c.test_count = static_cast<int>(rs_test.size());
    est.components.push_back(std::move(c));
    est.epsilon = std::max(est.epsilon, d.tv);
  }
  return est;
}

}  // namespace stremon
