#pragma once

// Reference implementations used only by the tests. The temporal operators
// are evaluated by direct recursion over their defining sup/inf expressions,
// and the spatial operators by explicit enumeration of walks and simple
// paths. Nothing here shares code with the library evaluators beyond the
// formula AST and predicate evaluation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stremon/formula.hpp"
#include "stremon/graph.hpp"
#include "stremon/predicate.hpp"
#include "stremon/trajectory.hpp"

namespace testutil {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- temporal-only robustness by literal recursion ------------------------

inline double oracle_stl(const stremon::Formula& f, const stremon::Trajectory& x, int tau) {
  using stremon::NodeKind;
  switch (f.kind) {
    case NodeKind::True:
      return kInf;
    case NodeKind::Predicate:
      return stremon::eval_expr(*f.h, x.flat_state(tau), x.flat_dims());
    case NodeKind::Not:
      return -oracle_stl(*f.a, x, tau);
    case NodeKind::And:
      return std::min(oracle_stl(*f.a, x, tau), oracle_stl(*f.b, x, tau));
    case NodeKind::Or:
      return std::max(oracle_stl(*f.a, x, tau), oracle_stl(*f.b, x, tau));
    case NodeKind::Eventually: {
      int lo = tau + static_cast<int>(std::ceil(f.ti.lo));
      int hi = tau + static_cast<int>(std::floor(f.ti.hi));
      double best = -kInf;
      for (int tpp = lo; tpp <= hi; ++tpp) best = std::max(best, oracle_stl(*f.a, x, tpp));
      return best;
    }
    case NodeKind::Always: {
      int lo = tau + static_cast<int>(std::ceil(f.ti.lo));
      int hi = tau + static_cast<int>(std::floor(f.ti.hi));
      double worst = kInf;
      for (int tpp = lo; tpp <= hi; ++tpp) worst = std::min(worst, oracle_stl(*f.a, x, tpp));
      return worst;
    }
    case NodeKind::Until: {
      int lo = tau + static_cast<int>(std::ceil(f.ti.lo));
      int hi = tau + static_cast<int>(std::floor(f.ti.hi));
      double best = -kInf;
      for (int tpp = lo; tpp <= hi; ++tpp) {
        double v = oracle_stl(*f.b, x, tpp);
        for (int tp = tau + 1; tp <= tpp - 1; ++tp) v = std::min(v, oracle_stl(*f.a, x, tp));
        best = std::max(best, v);
      }
      return best;
    }
    default:
      throw std::logic_error("oracle_stl: spatial node");
  }
}

// ---- spatial reference pieces ---------------------------------------------

// Best over walks from `start` whose accumulated distance lands in [d1, d2]
// of min(prefix s1 values, endpoint s2 value). Walks may revisit nodes; for
// an unbounded upper bound the search depth is capped by the fact that an
// optimal walk is a shortest prefix into the window plus a simple path.
inline double walk_reach(int start, double d1, double d2, const std::vector<double>& s1,
                         const std::vector<double>& s2, const stremon::GraphSnapshot& g) {
  int n = g.agents;
  bool unbounded = std::isinf(d2);
  int edge_cap = unbounded ? static_cast<int>(std::ceil(d1)) + n + 1
                           : std::numeric_limits<int>::max();
  double best = -kInf;
  // m = min of s1 over the nodes strictly before the current one
  auto dfs = [&](auto&& self, int u, double cum, double m, int edges) -> void {
    if (cum >= d1 && cum <= d2) best = std::max(best, std::min(m, s2[u]));
    double m_ext = std::min(m, s1[u]);
    if (m_ext <= best) return;  // extensions cannot beat the incumbent
    if (edges >= edge_cap) return;
    for (int v = 0; v < n; ++v) {
      double w = g.wt(u, v);
      if (!std::isfinite(w)) continue;
      if (cum + w > d2) continue;
      self(self, v, cum + w, m_ext, edges + 1);
    }
  };
  dfs(dfs, start, 0.0, kInf, 0);
  return best;
}

// Minimum walk distances; the diagonal holds the shortest strictly positive
// round trip (returning walks only), +inf when no cycle through the node
// exists. Enumerates simple paths; a shortest walk never repeats a node
// except to close the round trip.
inline std::vector<std::vector<double>> walk_min_distance(const stremon::GraphSnapshot& g) {
  int n = g.agents;
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (int l = 0; l < n; ++l) {
    std::vector<char> visited(n, 0);
    visited[l] = 1;
    auto dfs = [&](auto&& self, int u, double cum) -> void {
      for (int v = 0; v < n; ++v) {
        double w = g.wt(u, v);
        if (!std::isfinite(w)) continue;
        if (v == l) {
          d[l][l] = std::min(d[l][l], cum + w);
        } else if (!visited[v]) {
          if (cum + w >= d[l][v]) continue;
          d[l][v] = cum + w;
          visited[v] = 1;
          self(self, v, cum + w);
          visited[v] = 0;
        }
      }
    };
    dfs(dfs, l, 0.0);
  }
  return d;
}

// Best over simple paths from `start` to each node of the min s1 value along
// the whole path, endpoints included. The single-node path counts.
inline std::vector<double> path_maxmin(int start, const std::vector<double>& s1,
                                       const stremon::GraphSnapshot& g) {
  int n = g.agents;
  std::vector<double> best(n, -kInf);
  std::vector<char> visited(n, 0);
  visited[start] = 1;
  auto dfs = [&](auto&& self, int u, double m) -> void {
    best[u] = std::max(best[u], m);
    for (int v = 0; v < n; ++v) {
      if (!std::isfinite(g.wt(u, v)) || visited[v]) continue;
      visited[v] = 1;
      self(self, v, std::min(m, s1[v]));
      visited[v] = 0;
    }
  };
  dfs(dfs, start, s1[start]);
  return best;
}

// Escape: best over nodes whose minimum distance from `start` falls in the
// window (and is finite) of the max-min path value from `start` to that node.
inline double walk_escape(int start, double d1, double d2, const std::vector<double>& s1,
                          const stremon::GraphSnapshot& g) {
  auto dist = walk_min_distance(g);
  auto value = path_maxmin(start, s1, g);
  int n = g.agents;
  double best = -kInf;
  for (int l = 0; l < n; ++l) {
    double d = dist[start][l];
    if (std::isfinite(d) && d >= d1 && d <= d2) best = std::max(best, value[l]);
  }
  return best;
}

// ---- full STREL robustness by literal recursion ---------------------------

inline double oracle_strel(const stremon::Formula& f, const stremon::Trajectory& x,
                           const std::vector<stremon::GraphSnapshot>& graphs, int tau, int l);

inline std::vector<double> oracle_strel_all(const stremon::Formula& f,
                                            const stremon::Trajectory& x,
                                            const std::vector<stremon::GraphSnapshot>& graphs,
                                            int tau) {
  std::vector<double> s(x.agents);
  for (int l = 0; l < x.agents; ++l) s[l] = oracle_strel(f, x, graphs, tau, l);
  return s;
}

inline double oracle_strel(const stremon::Formula& f, const stremon::Trajectory& x,
                           const std::vector<stremon::GraphSnapshot>& graphs, int tau, int l) {
  using stremon::NodeKind;
  switch (f.kind) {
    case NodeKind::True:
      return kInf;
    case NodeKind::Predicate:
      return stremon::eval_expr(*f.h, x.state(tau, l), x.dims);
    case NodeKind::Not:
      return -oracle_strel(*f.a, x, graphs, tau, l);
    case NodeKind::And:
      return std::min(oracle_strel(*f.a, x, graphs, tau, l),
                      oracle_strel(*f.b, x, graphs, tau, l));
    case NodeKind::Or:
      return std::max(oracle_strel(*f.a, x, graphs, tau, l),
                      oracle_strel(*f.b, x, graphs, tau, l));
    case NodeKind::Eventually: {
      int lo = tau + static_cast<int>(std::ceil(f.ti.lo));
      int hi = tau + static_cast<int>(std::floor(f.ti.hi));
      double best = -kInf;
      for (int tpp = lo; tpp <= hi; ++tpp)
        best = std::max(best, oracle_strel(*f.a, x, graphs, tpp, l));
      return best;
    }
    case NodeKind::Always: {
      int lo = tau + static_cast<int>(std::ceil(f.ti.lo));
      int hi = tau + static_cast<int>(std::floor(f.ti.hi));
      double worst = kInf;
      for (int tpp = lo; tpp <= hi; ++tpp)
        worst = std::min(worst, oracle_strel(*f.a, x, graphs, tpp, l));
      return worst;
    }
    case NodeKind::Until: {
      int lo = tau + static_cast<int>(std::ceil(f.ti.lo));
      int hi = tau + static_cast<int>(std::floor(f.ti.hi));
      double best = -kInf;
      for (int tpp = lo; tpp <= hi; ++tpp) {
        double v = oracle_strel(*f.b, x, graphs, tpp, l);
        for (int tp = tau + 1; tp <= tpp - 1; ++tp)
          v = std::min(v, oracle_strel(*f.a, x, graphs, tp, l));
        best = std::max(best, v);
      }
      return best;
    }
    case NodeKind::Reach: {
      auto s1 = oracle_strel_all(*f.a, x, graphs, tau);
      auto s2 = oracle_strel_all(*f.b, x, graphs, tau);
      return walk_reach(l, f.di.lo, f.di.hi, s1, s2, graphs[tau]);
    }
    case NodeKind::Escape: {
      auto s1 = oracle_strel_all(*f.a, x, graphs, tau);
      return walk_escape(l, f.di.lo, f.di.hi, s1, graphs[tau]);
    }
    case NodeKind::Somewhere: {
      auto s2 = oracle_strel_all(*f.a, x, graphs, tau);
      std::vector<double> top(x.agents, kInf);
      return walk_reach(l, f.di.lo, f.di.hi, top, s2, graphs[tau]);
    }
    case NodeKind::Everywhere: {
      auto s2 = oracle_strel_all(*f.a, x, graphs, tau);
      for (double& v : s2) v = -v;
      std::vector<double> top(x.agents, kInf);
      return -walk_reach(l, f.di.lo, f.di.hi, top, s2, graphs[tau]);
    }
    case NodeKind::Surround: {
      // phi1 and not(phi1 reach[0,d] not(phi1 or phi2)) and not(escape[d,inf] phi1)
      double a = oracle_strel(*f.a, x, graphs, tau, l);
      auto s1 = oracle_strel_all(*f.a, x, graphs, tau);
      auto s2 = oracle_strel_all(*f.b, x, graphs, tau);
      std::vector<double> not_either(x.agents);
      for (int i = 0; i < x.agents; ++i) not_either[i] = -std::max(s1[i], s2[i]);
      double leak = walk_reach(l, 0.0, f.di.hi, s1, not_either, graphs[tau]);
      double flee = walk_escape(l, f.di.hi, kInf, s1, graphs[tau]);
      return std::min({a, -leak, -flee});
    }
  }
  throw std::logic_error("oracle_strel: unknown node");
}

}  // namespace testutil
