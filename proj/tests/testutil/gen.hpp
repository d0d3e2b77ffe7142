#pragma once

// Seeded random instances for property tests: affine predicates, formulas of
// bounded depth, trajectories, and weighted graphs.

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "stremon/formula.hpp"
#include "stremon/graph.hpp"
#include "stremon/predicate.hpp"
#include "stremon/rng.hpp"
#include "stremon/trajectory.hpp"

namespace testutil {

inline stremon::PredExprPtr random_affine(stremon::Rng& rng, int dims) {
  using PE = stremon::PredExpr;
  stremon::PredExprPtr e = PE::constant(rng.uniform(-4.0, 4.0));
  int terms = rng.uniform_int(1, 2);
  for (int i = 0; i < terms; ++i) {
    auto term = PE::scale(rng.uniform(-2.0, 2.0), PE::state(rng.uniform_int(0, dims - 1)));
    e = PE::binary(rng.uniform() < 0.5 ? stremon::ExprKind::Add : stremon::ExprKind::Sub, e,
                   term);
  }
  return e;
}

struct FormulaGenConfig {
  int max_depth = 3;
  int dims = 1;           // state indices a predicate may reference
  int max_time_bound = 10;
  int max_dist_bound = 8;
  bool spatial = false;
  double leaf_prob = 0.3;
  double truth_prob = 0.08;
  double dist_inf_prob = 0.25;
};

inline stremon::FormulaPtr random_formula(stremon::Rng& rng, const FormulaGenConfig& cfg,
                                          int depth, int& next_id) {
  using stremon::Formula;
  if (depth >= cfg.max_depth || rng.uniform() < cfg.leaf_prob) {
    if (rng.uniform() < cfg.truth_prob) return Formula::truth();
    return Formula::pred(random_affine(rng, cfg.dims), next_id++);
  }
  auto sub = [&] { return random_formula(rng, cfg, depth + 1, next_id); };
  auto ti = [&] {
    int lo = rng.uniform_int(0, cfg.max_time_bound);
    int hi = rng.uniform_int(lo, cfg.max_time_bound);
    return stremon::TimeInterval{static_cast<double>(lo), static_cast<double>(hi)};
  };
  auto di = [&] {
    int lo = rng.uniform_int(0, cfg.max_dist_bound);
    double hi = rng.uniform() < cfg.dist_inf_prob
                    ? stremon::kPlusInf
                    : static_cast<double>(rng.uniform_int(lo, cfg.max_dist_bound));
    return stremon::DistInterval{static_cast<double>(lo), hi};
  };
  // two-child cases sequence the sub() calls so predicate ids always follow
  // left-to-right order, matching the parser's assignment
  int choices = cfg.spatial ? 11 : 6;
  switch (rng.uniform_int(0, choices - 1)) {
    case 0:
      return Formula::negation(sub());
    case 1: {
      auto a = sub(), b = sub();
      return Formula::conj(a, b);
    }
    case 2: {
      auto a = sub(), b = sub();
      return Formula::disj(a, b);
    }
    case 3:
      return Formula::eventually(ti(), sub());
    case 4:
      return Formula::always(ti(), sub());
    case 5: {
      auto w = ti();
      auto a = sub(), b = sub();
      return Formula::until(w, a, b);
    }
    case 6: {
      auto w = di();
      auto a = sub(), b = sub();
      return Formula::reach(w, a, b);
    }
    case 7:
      return Formula::escape(di(), sub());
    case 8:
      return Formula::somewhere(di(), sub());
    case 9:
      return Formula::everywhere(di(), sub());
    default: {
      double d = rng.uniform_int(0, cfg.max_dist_bound);
      auto a = sub(), b = sub();
      return Formula::surround(d, a, b);
    }
  }
}

inline stremon::FormulaPtr random_formula(stremon::Rng& rng, const FormulaGenConfig& cfg) {
  int next_id = 0;
  return random_formula(rng, cfg, 0, next_id);
}

inline stremon::Trajectory random_trajectory(stremon::Rng& rng, int agents, int dims, int steps,
                                             int trial = 1) {
  stremon::Trajectory x = stremon::Trajectory::zeros(agents, dims, steps);
  x.trial_id = trial;
  for (int t = 0; t < steps; ++t)
    for (int l = 0; l < agents; ++l)
      for (int d = 0; d < dims; ++d) x.at(t, l, d) = rng.uniform(-5.0, 5.0);
  return x;
}

// Symmetric non-reflexive graph with strictly positive integer weights.
inline stremon::GraphSnapshot random_graph(stremon::Rng& rng, int agents, int max_weight = 3,
                                           double edge_prob = 0.55) {
  auto g = stremon::GraphSnapshot::empty(agents);
  for (int a = 0; a < agents; ++a)
    for (int b = a + 1; b < agents; ++b)
      if (rng.uniform() < edge_prob)
        g.set(a, b, static_cast<double>(rng.uniform_int(1, max_weight)));
  return g;
}

inline std::vector<stremon::GraphSnapshot> random_graph_sequence(stremon::Rng& rng, int agents,
                                                                 int steps, int max_weight = 3) {
  std::vector<stremon::GraphSnapshot> gs;
  gs.reserve(steps);
  for (int t = 0; t < steps; ++t) gs.push_back(random_graph(rng, agents, max_weight));
  return gs;
}

inline stremon::WeightSpec explicit_weights(int trial,
                                            const std::vector<stremon::GraphSnapshot>& graphs) {
  auto table = std::make_shared<std::map<int, std::map<int, stremon::GraphSnapshot>>>();
  auto& per = (*table)[trial];
  for (int t = 0; t < static_cast<int>(graphs.size()); ++t) per[t] = graphs[t];
  return stremon::WeightSpec::explicit_table(table);
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v), s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (static_cast<double>(v.size()) - 1.0) /
                   static_cast<double>(v.size()));
}

}  // namespace testutil
