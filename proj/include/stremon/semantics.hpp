#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "stremon/ext_real.hpp"
#include "stremon/formula.hpp"
#include "stremon/graph.hpp"
#include "stremon/trajectory.hpp"
#include "stremon/transform.hpp"

namespace stremon {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer time window tau + [lo, hi]; empty when first > last. Bounds within
// 1e-9 of an integer are treated as that integer.
struct NatWindow {
  int first, last;
};
inline NatWindow nat_window(const TimeInterval& i, int tau) {
  int first = tau + static_cast<int>(std::ceil(i.lo - 1e-9));
  int last = tau + static_cast<int>(std::floor(i.hi + 1e-9));
  return {first, last};
}

inline bool in_dist_window(double d, const DistInterval& w) {
  return std::isfinite(d) && d >= w.lo && d <= w.hi;
}

// ---- spatial fixpoints over the robust value lattice --------------------

namespace detail {

inline constexpr int kMaxFixpointRounds = 1000000;
inline constexpr long long kMaxFixpointWork = 50000000;

[[noreturn]] inline void fixpoint_overrun(const char* which) {
  throw std::logic_error(std::string(which) +
                         " exceeded its iteration budget; this indicates an internal error");
}

struct ReachPair {
  double dist;
  int agent;
  double value;
};
struct ReachLater {
  // priority queue comparator: nearest first, then largest value
  bool operator()(const ReachPair& a, const ReachPair& b) const {
    if (a.dist != b.dist) return a.dist > b.dist;
    return a.value < b.value;
  }
};

}  // namespace detail

// Best value over routes whose accumulated distance lands inside [d1, d2],
// d2 finite. s1 scores the route prefix, s2 the endpoint.
//
// Routes are flooded backwards from their endpoints in order of accumulated
// distance. Once a route has crossed d1 only the d2 cap still binds, so among
// such pairs a shorter distance with a value at least as large dominates and
// each agent only keeps a small Pareto frontier (at most one entry per
// distinct value). Below d1 exact distances are kept, since a longer route
// may be the one that lands in the window.
inline std::vector<double> bounded_reach(double d1, double d2, const std::vector<double>& s1,
                                         const std::vector<double>& s2, const GraphSnapshot& g) {
  int n = g.agents;
  std::vector<double> s(n, kMinusInf);
  if (d1 == 0.0)
    for (int l = 0; l < n; ++l) s[l] = s2[l];

  // frontier: dist >= d1, strictly increasing distance -> strictly increasing
  // value; exact: dist < d1, distance -> best value seen
  std::vector<std::map<double, double>> frontier(n), exact(n);
  auto admit = [&](int l, double dist, double value) {
    if (dist >= d1) {
      auto& f = frontier[l];
      auto up = f.upper_bound(dist);
      if (up != f.begin() && std::prev(up)->second >= value) return false;
      while (up != f.end() && up->second <= value) up = f.erase(up);
      f.insert_or_assign(dist, value);
    } else {
      auto [it, inserted] = exact[l].try_emplace(dist, value);
      if (!inserted) {
        if (it->second >= value) return false;
        it->second = value;
      }
    }
    return true;
  };
  auto current = [&](int l, double dist, double value) {
    const auto& m = dist >= d1 ? frontier[l] : exact[l];
    auto it = m.find(dist);
    return it != m.end() && it->second == value;
  };

  std::priority_queue<detail::ReachPair, std::vector<detail::ReachPair>, detail::ReachLater>
      queue;
  for (int l = 0; l < n; ++l)
    if (s2[l] > kMinusInf && admit(l, 0.0, s2[l])) queue.push({0.0, l, s2[l]});

  long long work = 0;
  while (!queue.empty()) {
    auto [dist, agent, value] = queue.top();
    queue.pop();
    if (!current(agent, dist, value)) continue;  // superseded after being queued
    if (++work > detail::kMaxFixpointWork) detail::fixpoint_overrun("bounded reach");
    for (int lp = 0; lp < n; ++lp) {
      double w = g.wt(lp, agent);
      if (!std::isfinite(w)) continue;
      double vp = std::min(value, s1[lp]);
      if (vp == kMinusInf) continue;
      double dp = dist + w;
      if (dp >= d1 && dp <= d2) s[lp] = std::max(s[lp], vp);
      if (dp < d2 && admit(lp, dp, vp)) queue.push({dp, lp, vp});
    }
  }
  return s;
}

// Reach with an unbounded upper distance bound: a bounded pass catches the
// first window entry, then prefix extensions propagate without limit.
inline std::vector<double> unbounded_reach(double d1, const std::vector<double>& s1,
                                           const std::vector<double>& s2,
                                           const GraphSnapshot& g) {
  int n = g.agents;
  std::vector<double> s;
  if (d1 == 0.0)
    s = s2;
  else
    s = bounded_reach(d1, d1 + g.max_finite_weight(), s1, s2, g);

  std::vector<char> in_work(n, 1);
  std::vector<int> work(n);
  for (int l = 0; l < n; ++l) work[l] = l;
  int rounds = 0;
  while (!work.empty()) {
    if (++rounds > detail::kMaxFixpointRounds) detail::fixpoint_overrun("unbounded reach");
    std::vector<int> next;
    std::vector<char> queued(n, 0);
    for (int l : work) in_work[l] = 0;
    for (int l : work) {
      for (int lp = 0; lp < n; ++lp) {
        if (!std::isfinite(g.wt(lp, l))) continue;
        double vp = std::max(std::min(s[l], s1[lp]), s[lp]);
        if (vp != s[lp]) {
          s[lp] = vp;
          if (!queued[lp]) {
            queued[lp] = 1;
            next.push_back(lp);
          }
        }
      }
    }
    work = std::move(next);
  }
  return s;
}

inline std::vector<double> reach(const DistInterval& d, const std::vector<double>& s1,
                                 const std::vector<double>& s2, const GraphSnapshot& g) {
  if (std::isinf(d.hi)) return unbounded_reach(d.lo, s1, s2, g);
  return bounded_reach(d.lo, d.hi, s1, s2, g);
}

// Best over agents l' whose minimum route distance from l falls in the
// window, of the best route from l to l' scored by s1 along the whole route.
inline std::vector<double> escape(const DistInterval& dw, const std::vector<double>& s1,
                                  const GraphSnapshot& g) {
  int n = g.agents;
  auto dmin = min_distance(g);

  std::vector<std::vector<double>> e(n, std::vector<double>(n, kMinusInf));
  std::vector<std::pair<int, int>> work;
  for (int l = 0; l < n; ++l) {
    e[l][l] = s1[l];
    work.emplace_back(l, l);
  }
  int rounds = 0;
  while (!work.empty()) {
    if (++rounds > detail::kMaxFixpointRounds) detail::fixpoint_overrun("escape");
    auto e_next = e;
    std::vector<std::pair<int, int>> next;
    std::sort(work.begin(), work.end());
    for (auto [l1, l2] : work) {
      for (int lp = 0; lp < n; ++lp) {
        if (!std::isfinite(g.wt(lp, l1))) continue;
        double v = std::max(e[lp][l2], std::min(s1[lp], e[l1][l2]));
        if (v != e[lp][l2] && v > e_next[lp][l2]) {
          e_next[lp][l2] = v;
          next.emplace_back(lp, l2);
        }
      }
    }
    e = std::move(e_next);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    work = std::move(next);
  }

  std::vector<double> s(n, kMinusInf);
  for (int l = 0; l < n; ++l)
    for (int lp = 0; lp < n; ++lp)
      if (in_dist_window(dmin[l][lp], dw)) s[l] = std::max(s[l], e[l][lp]);
  return s;
}

// ---- robust evaluation ---------------------------------------------------

// Value of a predicate node at (time, agent).
using PredicateSource = std::function<double(const Formula&, int, int)>;
// Communication graph at a time instant.
using GraphSource = std::function<const GraphSnapshot&(int)>;

namespace detail {

inline FormulaPtr rewrite_surrounds(const FormulaPtr& f) {
  if (!contains_kind(*f, NodeKind::Surround)) return f;
  if (f->kind == NodeKind::Surround) {
    auto g = std::make_shared<Formula>(*expand_surround(*f));
    return rewrite_surrounds(g);
  }
  auto g = std::make_shared<Formula>(*f);
  if (g->a) g->a = rewrite_surrounds(g->a);
  if (g->b) g->b = rewrite_surrounds(g->b);
  return g;
}

}  // namespace detail

// Quantitative semantics evaluator over an abstract predicate source. One
// instance serves all (time, agent) queries for one trajectory; intermediate
// per-node vectors are memoized.
class RobustEvaluator {
 public:
  RobustEvaluator(FormulaPtr f, int agents, int steps, PredicateSource pred, GraphSource graph)
      : root_(detail::rewrite_surrounds(f)),
        agents_(agents),
        steps_(steps),
        pred_(std::move(pred)),
        graph_(std::move(graph)) {}

  const FormulaPtr& root() const { return root_; }

  double at(int tau, int agent) {
    if (agent < 0 || agent >= agents_) throw EvalError("agent index out of range");
    return eval(root_.get(), tau)[agent];
  }

  const std::vector<double>& values(int tau) { return eval(root_.get(), tau); }

 private:
  const std::vector<double>& eval(const Formula* f, int tau) {
    if (tau < 0 || tau >= steps_)
      throw EvalError("evaluation reads time " + std::to_string(tau) +
                      " outside the trajectory (length " + std::to_string(steps_) +
                      "); the trajectory is too short for this formula");
    auto key = std::make_pair(f, tau);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<double> v = compute(f, tau);
    return memo_.emplace(std::move(key), std::move(v)).first->second;
  }

  std::vector<double> compute(const Formula* f, int tau) {
    switch (f->kind) {
      case NodeKind::True:
        return std::vector<double>(agents_, kPlusInf);
      case NodeKind::Predicate: {
        std::vector<double> v(agents_);
        for (int l = 0; l < agents_; ++l) v[l] = pred_(*f, tau, l);
        return v;
      }
      case NodeKind::Not: {
        std::vector<double> v = eval(f->a.get(), tau);
        for (double& x : v) x = -x;
        return v;
      }
      case NodeKind::And:
      case NodeKind::Or: {
        std::vector<double> v = eval(f->a.get(), tau);
        const auto& w = eval(f->b.get(), tau);
        for (int l = 0; l < agents_; ++l)
          v[l] = f->kind == NodeKind::And ? std::min(v[l], w[l]) : std::max(v[l], w[l]);
        return v;
      }
      case NodeKind::Until: {
        auto win = nat_window(f->ti, tau);
        std::vector<double> best(agents_, kSupEmpty);
        std::vector<double> prefix(agents_, kInfEmpty);
        for (int tpp = tau; tpp <= win.last; ++tpp) {
          if (tpp - 1 >= tau + 1) {
            const auto& a = eval(f->a.get(), tpp - 1);
            for (int l = 0; l < agents_; ++l) prefix[l] = std::min(prefix[l], a[l]);
          }
          if (tpp >= win.first) {
            const auto& b = eval(f->b.get(), tpp);
            for (int l = 0; l < agents_; ++l)
              best[l] = std::max(best[l], std::min(b[l], prefix[l]));
          }
        }
        return best;
      }
      case NodeKind::Eventually:
      case NodeKind::Always: {
        auto win = nat_window(f->ti, tau);
        bool ev = f->kind == NodeKind::Eventually;
        std::vector<double> acc(agents_, ev ? kSupEmpty : kInfEmpty);
        for (int tpp = std::max(win.first, tau); tpp <= win.last; ++tpp) {
          const auto& a = eval(f->a.get(), tpp);
          for (int l = 0; l < agents_; ++l)
            acc[l] = ev ? std::max(acc[l], a[l]) : std::min(acc[l], a[l]);
        }
        return acc;
      }
      case NodeKind::Reach:
        return reach(f->di, eval(f->a.get(), tau), eval(f->b.get(), tau), graph_at_time(tau));
      case NodeKind::Escape:
        return escape(f->di, eval(f->a.get(), tau), graph_at_time(tau));
      case NodeKind::Somewhere:
        return reach(f->di, std::vector<double>(agents_, kPlusInf), eval(f->a.get(), tau),
                     graph_at_time(tau));
      case NodeKind::Everywhere: {
        std::vector<double> neg = eval(f->a.get(), tau);
        for (double& x : neg) x = -x;
        std::vector<double> r =
            reach(f->di, std::vector<double>(agents_, kPlusInf), neg, graph_at_time(tau));
        for (double& x : r) x = -x;
        return r;
      }
      case NodeKind::Surround:
        break;  // rewritten away in the constructor
    }
    throw std::logic_error("unreachable node kind");
  }

  const GraphSnapshot& graph_at_time(int tau) {
    if (!graph_) throw EvalError("spatial operator evaluated without a weight specification");
    return graph_(tau);
  }

  struct KeyHash {
    size_t operator()(const std::pair<const Formula*, int>& k) const {
      return std::hash<const Formula*>()(k.first) * 1000003u + std::hash<int>()(k.second);
    }
  };

  FormulaPtr root_;
  int agents_, steps_;
  PredicateSource pred_;
  GraphSource graph_;
  std::unordered_map<std::pair<const Formula*, int>, std::vector<double>, KeyHash> memo_;
};

// Caches one GraphSnapshot per time instant for a fixed trajectory.
class GraphCache {
 public:
  GraphCache(WeightSpec spec, const Trajectory& x) : spec_(std::move(spec)), x_(x) {}
  const GraphSnapshot& operator()(int tau) {
    auto it = cache_.find(tau);
    if (it == cache_.end()) {
      GraphSnapshot g = graph_at(spec_, x_, tau);
      g.validate();
      it = cache_.emplace(tau, std::move(g)).first;
    }
    return it->second;
  }

 private:
  WeightSpec spec_;  // by value: callers often hand in a temporary
  const Trajectory& x_;
  std::map<int, GraphSnapshot> cache_;
};

namespace detail {

inline void check_horizon(const Formula& f, const Trajectory& x, int tau0) {
  if (tau0 < 0) throw EvalError("tau0 must be nonnegative");
  int need = tau0 + formula_length(f);
  if (need >= x.steps)
    throw EvalError("formula needs the trajectory up to time " + std::to_string(need) +
                    " but it ends at " + std::to_string(x.steps - 1));
}

}  // namespace detail

// STL robust semantics over the flattened state (all agents stacked).
inline double eval_robust_stl(const FormulaPtr& f, const Trajectory& x, int tau0) {
  if (contains_spatial(*f)) throw EvalError("spatial operators require strel evaluation");
  detail::check_horizon(*f, x, tau0);
  RobustEvaluator ev(
      f, 1, x.steps,
      [&x](const Formula& p, int t, int) { return eval_expr(*p.h, x.flat_state(t), x.flat_dims()); },
      nullptr);
  return ev.at(tau0, 0);
}

// STREL robust semantics at one agent (0-based).
inline double eval_robust_strel(const FormulaPtr& f, const Trajectory& x, const WeightSpec& w,
                                int tau0, int agent) {
  detail::check_horizon(*f, x, tau0);
  if (agent < 0 || agent >= x.agents) throw EvalError("agent index out of range");
  GraphCache graphs(w, x);
  RobustEvaluator ev(
      f, x.agents, x.steps,
      [&x](const Formula& p, int t, int l) { return eval_expr(*p.h, x.state(t, l), x.dims); },
      [&graphs](int t) -> const GraphSnapshot& { return graphs(t); });
  return ev.at(tau0, agent);
}

// ---- Boolean evaluation ---------------------------------------------------
// Deliberately a separate recursion over {true,false}: reach is a search over
// (agent, accumulated distance) states and escape a reachability pass inside
// the satisfying subgraph, so the quantitative fixpoints get a genuine
// cross-check rather than a sign readout.

namespace detail {

inline bool bool_reach_from(int l, double d1, double d2, const std::vector<char>& sat1,
                            const std::vector<char>& sat2, const GraphSnapshot& g) {
  int n = g.agents;
  if (d1 == 0.0 && sat2[l]) return true;

  bool unbounded = std::isinf(d2);
  // completes[b]: from b, one or more hops through sat1 nodes end at a sat2
  // node; used once the accumulated distance has already entered the window
  std::vector<char> completes(n, 0);
  if (unbounded) {
    std::vector<int> stack;
    for (int b = 0; b < n; ++b) {
      if (completes[b] || !sat1[b]) continue;
      for (int c = 0; c < n && !completes[b]; ++c)
        if (std::isfinite(g.wt(b, c)) && sat2[c]) completes[b] = 1;
      if (completes[b]) stack.push_back(b);
    }
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      for (int b = 0; b < n; ++b) {
        if (completes[b] || !sat1[b] || !std::isfinite(g.wt(b, c))) continue;
        completes[b] = 1;
        stack.push_back(b);
      }
    }
  }

  std::vector<std::pair<int, double>> frontier{{l, 0.0}};
  std::map<std::pair<int, double>, char> visited{{{l, 0.0}, 1}};
  long long work = 0;
  while (!frontier.empty()) {
    auto [a, d] = frontier.back();
    frontier.pop_back();
    if (++work > kMaxFixpointWork) fixpoint_overrun("boolean reach");
    if (!sat1[a]) continue;  // a would have to join the route prefix
    for (int b = 0; b < n; ++b) {
      double w = g.wt(a, b);
      if (!std::isfinite(w)) continue;
      double nd = d + w;
      if (nd > d2) continue;
      if (nd >= d1) {
        if (sat2[b]) return true;
        if (unbounded) {
          if (completes[b]) return true;
          continue;  // window entered; only completion can help now
        }
      }
      auto key = std::make_pair(b, nd);
      if (!visited.emplace(key, 1).second) continue;
      frontier.push_back(key);
    }
  }
  return false;
}

inline std::vector<char> bool_reach(const DistInterval& dw, const std::vector<char>& sat1,
                                    const std::vector<char>& sat2, const GraphSnapshot& g) {
  std::vector<char> out(g.agents, 0);
  for (int l = 0; l < g.agents; ++l)
    out[l] = bool_reach_from(l, dw.lo, dw.hi, sat1, sat2, g) ? 1 : 0;
  return out;
}

inline std::vector<char> bool_escape(const DistInterval& dw, const std::vector<char>& sat1,
                                     const GraphSnapshot& g) {
  int n = g.agents;
  auto dmin = min_distance(g);
  std::vector<char> out(n, 0);
  for (int l = 0; l < n; ++l) {
    if (!sat1[l]) continue;
    // agents reachable from l through sat1 nodes only (endpoints included)
    std::vector<char> seen(n, 0);
    seen[l] = 1;
    std::vector<int> stack{l};
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < n; ++b) {
        if (seen[b] || !sat1[b] || !std::isfinite(g.wt(a, b))) continue;
        seen[b] = 1;
        stack.push_back(b);
      }
    }
    for (int lp = 0; lp < n && !out[l]; ++lp)
      if (seen[lp] && in_dist_window(dmin[l][lp], dw)) out[l] = 1;
  }
  return out;
}

}  // namespace detail

// Boolean semantics evaluator, mirroring RobustEvaluator's interface.
class BoolEvaluator {
 public:
  BoolEvaluator(FormulaPtr f, int agents, int steps, PredicateSource pred, GraphSource graph)
      : root_(detail::rewrite_surrounds(f)),
        agents_(agents),
        steps_(steps),
        pred_(std::move(pred)),
        graph_(std::move(graph)) {}

  bool at(int tau, int agent) {
    if (agent < 0 || agent >= agents_) throw EvalError("agent index out of range");
    return eval(root_.get(), tau)[agent] != 0;
  }

 private:
  const std::vector<char>& eval(const Formula* f, int tau) {
    if (tau < 0 || tau >= steps_) throw EvalError("trajectory too short for this formula");
    auto key = std::make_pair(f, tau);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<char> v = compute(f, tau);
    return memo_.emplace(std::move(key), std::move(v)).first->second;
  }

  std::vector<char> compute(const Formula* f, int tau) {
    switch (f->kind) {
      case NodeKind::True:
        return std::vector<char>(agents_, 1);
      case NodeKind::Predicate: {
        std::vector<char> v(agents_);
        for (int l = 0; l < agents_; ++l) v[l] = pred_(*f, tau, l) >= 0 ? 1 : 0;
        return v;
      }
      case NodeKind::Not: {
        std::vector<char> v = eval(f->a.get(), tau);
        for (char& x : v) x = !x;
        return v;
      }
      case NodeKind::And:
      case NodeKind::Or: {
        std::vector<char> v = eval(f->a.get(), tau);
        const auto& w = eval(f->b.get(), tau);
        for (int l = 0; l < agents_; ++l)
          v[l] = f->kind == NodeKind::And ? (v[l] && w[l]) : (v[l] || w[l]);
        return v;
      }
      case NodeKind::Until: {
        auto win = nat_window(f->ti, tau);
        std::vector<char> best(agents_, 0);
        std::vector<char> prefix(agents_, 1);
        for (int tpp = tau; tpp <= win.last; ++tpp) {
          if (tpp - 1 >= tau + 1) {
            const auto& a = eval(f->a.get(), tpp - 1);
            for (int l = 0; l < agents_; ++l) prefix[l] = prefix[l] && a[l];
          }
          if (tpp >= win.first) {
            const auto& b = eval(f->b.get(), tpp);
            for (int l = 0; l < agents_; ++l) best[l] = best[l] || (b[l] && prefix[l]);
          }
        }
        return best;
      }
      case NodeKind::Eventually:
      case NodeKind::Always: {
        auto win = nat_window(f->ti, tau);
        bool ev = f->kind == NodeKind::Eventually;
        std::vector<char> acc(agents_, ev ? 0 : 1);
        for (int tpp = std::max(win.first, tau); tpp <= win.last; ++tpp) {
          const auto& a = eval(f->a.get(), tpp);
          for (int l = 0; l < agents_; ++l) acc[l] = ev ? (acc[l] || a[l]) : (acc[l] && a[l]);
        }
        return acc;
      }
      case NodeKind::Reach:
        return detail::bool_reach(f->di, eval(f->a.get(), tau), eval(f->b.get(), tau),
                                  graph_at_time(tau));
      case NodeKind::Escape:
        return detail::bool_escape(f->di, eval(f->a.get(), tau), graph_at_time(tau));
      case NodeKind::Somewhere:
        return detail::bool_reach(f->di, std::vector<char>(agents_, 1), eval(f->a.get(), tau),
                                  graph_at_time(tau));
      case NodeKind::Everywhere: {
        std::vector<char> neg = eval(f->a.get(), tau);
        for (char& x : neg) x = !x;
        std::vector<char> r =
            detail::bool_reach(f->di, std::vector<char>(agents_, 1), neg, graph_at_time(tau));
        for (char& x : r) x = !x;
        return r;
      }
      case NodeKind::Surround:
        break;  // rewritten away in the constructor
    }
    throw std::logic_error("unreachable node kind");
  }

  const GraphSnapshot& graph_at_time(int tau) {
    if (!graph_) throw EvalError("spatial operator evaluated without a weight specification");
    return graph_(tau);
  }

  struct KeyHash {
    size_t operator()(const std::pair<const Formula*, int>& k) const {
      return std::hash<const Formula*>()(k.first) * 1000003u + std::hash<int>()(k.second);
    }
  };

  FormulaPtr root_;
  int agents_, steps_;
  PredicateSource pred_;
  GraphSource graph_;
  std::unordered_map<std::pair<const Formula*, int>, std::vector<char>, KeyHash> memo_;
};

inline bool eval_bool_stl(const FormulaPtr& f, const Trajectory& x, int tau0) {
  if (contains_spatial(*f)) throw EvalError("spatial operators require strel evaluation");
  detail::check_horizon(*f, x, tau0);
  BoolEvaluator ev(
      f, 1, x.steps,
      [&x](const Formula& p, int t, int) { return eval_expr(*p.h, x.flat_state(t), x.flat_dims()); },
      nullptr);
  return ev.at(tau0, 0);
}

inline bool eval_bool_strel(const FormulaPtr& f, const Trajectory& x, const WeightSpec& w,
                            int tau0, int agent) {
  detail::check_horizon(*f, x, tau0);
  if (agent < 0 || agent >= x.agents) throw EvalError("agent index out of range");
  GraphCache graphs(w, x);
  BoolEvaluator ev(
      f, x.agents, x.steps,
      [&x](const Formula& p, int t, int l) { return eval_expr(*p.h, x.state(t, l), x.dims); },
      [&graphs](int t) -> const GraphSnapshot& { return graphs(t); });
  return ev.at(tau0, agent);
}

}  // namespace stremon
