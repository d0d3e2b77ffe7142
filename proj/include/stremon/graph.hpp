#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stremon/ext_real.hpp"
#include "stremon/trajectory.hpp"

namespace stremon {

// Symmetric weighted proximity graph over the agents at one time instant.
// +inf marks a missing edge; the diagonal is always +inf (no self loops).
struct GraphSnapshot {
  int agents = 0;
  std::vector<double> w;  // row-major agents x agents

  static GraphSnapshot empty(int agents) {
    GraphSnapshot g;
    g.agents = agents;
    g.w.assign(static_cast<size_t>(agents) * agents, kPlusInf);
    return g;
  }

  double wt(int a, int b) const { return w[static_cast<size_t>(a) * agents + b]; }
  void set(int a, int b, double v) {
    w[static_cast<size_t>(a) * agents + b] = v;
    w[static_cast<size_t>(b) * agents + a] = v;
  }

  void validate() const {
    for (int a = 0; a < agents; ++a) {
      if (!std::isinf(wt(a, a)))
        throw std::invalid_argument("agent " + std::to_string(a + 1) + " has a self loop");
      for (int b = 0; b < agents; ++b) {
        double v = wt(a, b);
        if (std::isnan(v) || v < 0)
          throw std::invalid_argument("edge weights must be nonnegative");
        if (v != wt(b, a)) throw std::invalid_argument("edge weights must be symmetric");
      }
    }
  }

  double max_finite_weight() const {
    double m = 0;
    for (double v : w)
      if (std::isfinite(v)) m = std::max(m, v);
    return m;
  }

  bool has_edges() const {
    for (double v : w)
      if (std::isfinite(v)) return true;
    return false;
  }
};

namespace detail {

// Single-source shortest path over the finite edges. dist[source] stays 0.
inline std::vector<double> dijkstra(const GraphSnapshot& g, int source) {
  int n = g.agents;
  std::vector<double> dist(n, kPlusInf);
  dist[source] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (int v = 0; v < n; ++v) {
      double w = g.wt(u, v);
      if (!std::isfinite(w)) continue;
      double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  return dist;
}

}  // namespace detail

// Pairwise minimum accumulated route distance. Off the diagonal this is the
// shortest path; D[l][l] is the shortest strictly positive cycle through l
// (+inf when none), since a route must take at least one hop to come back.
inline std::vector<std::vector<double>> min_distance(const GraphSnapshot& g) {
  int n = g.agents;
  std::vector<std::vector<double>> d(n);
  for (int l = 0; l < n; ++l) d[l] = detail::dijkstra(g, l);
  for (int l = 0; l < n; ++l) {
    double cyc = kPlusInf;
    for (int u = 0; u < n; ++u) {
      double w = g.wt(u, l);
      if (std::isfinite(w) && std::isfinite(d[l][u])) cyc = std::min(cyc, d[l][u] + w);
    }
    d[l][l] = cyc;
  }
  return d;
}

enum class WeightRule { Unit, ScaledDistance };

// Recipe for deriving the communication graph from agent positions, or a
// table of explicit per-(trial,time) weights.
struct WeightSpec {
  enum class Mode { Proximity, FixedAdjacency, Explicit } mode = Mode::Proximity;

  // Proximity: agents within `threshold` (Euclidean, over the full agent
  // state) are connected.
  double threshold = kPlusInf;
  WeightRule rule = WeightRule::Unit;
  double scale = 1.0;  // weight = scale * distance under ScaledDistance

  // FixedAdjacency: only the listed pairs (0-based) may connect.
  std::vector<std::pair<int, int>> edges;

  // Explicit: weights[trial][time] holds the full matrix.
  std::shared_ptr<const std::map<int, std::map<int, GraphSnapshot>>> table;

  static WeightSpec proximity(double threshold, WeightRule rule = WeightRule::Unit,
                              double scale = 1.0) {
    WeightSpec s;
    s.mode = Mode::Proximity;
    s.threshold = threshold;
    s.rule = rule;
    s.scale = scale;
    return s;
  }
  static WeightSpec fixed_adjacency(std::vector<std::pair<int, int>> edges,
                                    WeightRule rule = WeightRule::Unit, double scale = 1.0) {
    WeightSpec s;
    s.mode = Mode::FixedAdjacency;
    s.edges = std::move(edges);
    s.rule = rule;
    s.scale = scale;
    return s;
  }
  static WeightSpec explicit_table(
      std::shared_ptr<const std::map<int, std::map<int, GraphSnapshot>>> table) {
    WeightSpec s;
    s.mode = Mode::Explicit;
    s.table = std::move(table);
    return s;
  }
};

inline double agent_distance(const Trajectory& x, int t, int a, int b) {
  double s = 0;
  const double* pa = x.state(t, a);
  const double* pb = x.state(t, b);
  for (int d = 0; d < x.dims; ++d) {
    double diff = pa[d] - pb[d];
    s += diff * diff;
  }
  return std::sqrt(s);
}

inline GraphSnapshot graph_at(const WeightSpec& spec, const Trajectory& x, int t) {
  x.check_time(t);
  if (spec.mode == WeightSpec::Mode::Explicit) {
    if (!spec.table) throw std::invalid_argument("explicit weight spec has no table");
    auto trial = spec.table->find(x.trial_id);
    if (trial == spec.table->end())
      throw std::out_of_range("no explicit weights for trial " + std::to_string(x.trial_id));
    auto at = trial->second.find(t);
    if (at == trial->second.end())
      throw std::out_of_range("no explicit weights for trial " + std::to_string(x.trial_id) +
                              " at time " + std::to_string(t));
    if (at->second.agents != x.agents)
      throw std::invalid_argument("explicit weight matrix size does not match the agent count");
    return at->second;
  }

  GraphSnapshot g = GraphSnapshot::empty(x.agents);
  auto connect = [&](int a, int b) {
    double dist = agent_distance(x, t, a, b);
    if (spec.mode == WeightSpec::Mode::Proximity && dist > spec.threshold) return;
    g.set(a, b, spec.rule == WeightRule::Unit ? 1.0 : spec.scale * dist);
  };
  if (spec.mode == WeightSpec::Mode::Proximity) {
    for (int a = 0; a < x.agents; ++a)
      for (int b = a + 1; b < x.agents; ++b) connect(a, b);
  } else {
    for (auto [a, b] : spec.edges) {
      if (a == b) continue;
      if (a < 0 || b < 0 || a >= x.agents || b >= x.agents)
        throw std::out_of_range("adjacency pair references a missing agent");
      connect(a, b);
    }
  }
  return g;
}

}  // namespace stremon
