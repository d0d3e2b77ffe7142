#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "stremon/predicate.hpp"

namespace stremon {

enum class NodeKind {
  True,
  Predicate,
  Not,
  And,
  Or,
  Until,       // a U[I] b
  Eventually,  // F[I] a
  Always,      // G[I] a
  Reach,       // a R[D] b
  Escape,      // E[D] a
  Somewhere,   // somewhere[D] a
  Everywhere,  // everywhere[D] a
  Surround,    // a surround[d] b, bound stored as [0, d]
};

inline bool is_spatial(NodeKind k) {
  return k == NodeKind::Reach || k == NodeKind::Escape || k == NodeKind::Somewhere ||
         k == NodeKind::Everywhere || k == NodeKind::Surround;
}

// Closed time window [lo, hi], both finite, 0 <= lo <= hi.
struct TimeInterval {
  double lo = 0.0, hi = 0.0;
};

// Closed distance window [lo, hi]; lo finite, hi may be +inf.
struct DistInterval {
  double lo = 0.0, hi = kPlusInf;
};

inline bool operator==(const TimeInterval& a, const TimeInterval& b) {
  return a.lo == b.lo && a.hi == b.hi;
}
inline bool operator==(const DistInterval& a, const DistInterval& b) {
  return a.lo == b.lo && a.hi == b.hi;
}

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula {
 public:
  NodeKind kind;
  TimeInterval ti;   // temporal operators
  DistInterval di;   // spatial operators
  FormulaPtr a, b;   // unary: a; binary: a op b
  PredExprPtr h;     // Predicate: satisfaction margin, h(state) >= 0
  int pred_id = -1;  // Predicate: position in left-to-right parse order

  static FormulaPtr truth() { return mk(NodeKind::True); }
  static FormulaPtr pred(PredExprPtr h, int id) {
    auto f = mk(NodeKind::Predicate);
    f->h = std::move(h);
    f->pred_id = id;
    return f;
  }
  static FormulaPtr negation(FormulaPtr a) {
    auto f = mk(NodeKind::Not);
    f->a = std::move(a);
    return f;
  }
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return bin(NodeKind::And, a, b); }
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return bin(NodeKind::Or, a, b); }
  static FormulaPtr until(TimeInterval i, FormulaPtr a, FormulaPtr b) {
    auto f = bin(NodeKind::Until, a, b);
    f->ti = check_ti(i);
    return f;
  }
  static FormulaPtr eventually(TimeInterval i, FormulaPtr a) {
    auto f = un(NodeKind::Eventually, a);
    f->ti = check_ti(i);
    return f;
  }
  static FormulaPtr always(TimeInterval i, FormulaPtr a) {
    auto f = un(NodeKind::Always, a);
    f->ti = check_ti(i);
    return f;
  }
  static FormulaPtr reach(DistInterval d, FormulaPtr a, FormulaPtr b) {
    auto f = bin(NodeKind::Reach, a, b);
    f->di = check_di(d);
    return f;
  }
  static FormulaPtr escape(DistInterval d, FormulaPtr a) {
    auto f = un(NodeKind::Escape, a);
    f->di = check_di(d);
    return f;
  }
  static FormulaPtr somewhere(DistInterval d, FormulaPtr a) {
    auto f = un(NodeKind::Somewhere, a);
    f->di = check_di(d);
    return f;
  }
  static FormulaPtr everywhere(DistInterval d, FormulaPtr a) {
    auto f = un(NodeKind::Everywhere, a);
    f->di = check_di(d);
    return f;
  }
  static FormulaPtr surround(double d, FormulaPtr a, FormulaPtr b) {
    auto f = bin(NodeKind::Surround, a, b);
    f->di = check_di({0.0, d});
    return f;
  }

 private:
  static std::shared_ptr<Formula> mk(NodeKind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
  }
  static std::shared_ptr<Formula> un(NodeKind k, FormulaPtr a) {
    auto f = mk(k);
    f->a = std::move(a);
    return f;
  }
  static std::shared_ptr<Formula> bin(NodeKind k, FormulaPtr a, FormulaPtr b) {
    auto f = mk(k);
    f->a = std::move(a);
    f->b = std::move(b);
    return f;
  }
  static TimeInterval check_ti(TimeInterval i) {
    if (!(i.lo >= 0) || !(i.hi >= i.lo) || std::isinf(i.hi))
      throw std::invalid_argument("time interval must satisfy 0 <= lo <= hi < inf");
    return i;
  }
  static DistInterval check_di(DistInterval d) {
    if (!(d.lo >= 0) || !(d.hi >= d.lo) || std::isinf(d.lo))
      throw std::invalid_argument("distance interval must satisfy 0 <= lo <= hi, lo finite");
    return d;
  }
};

inline bool operator==(const Formula& x, const Formula& y) {
  if (x.kind != y.kind || !(x.ti == y.ti) || !(x.di == y.di) || x.pred_id != y.pred_id)
    return false;
  if ((x.a == nullptr) != (y.a == nullptr) || (x.b == nullptr) != (y.b == nullptr) ||
      (x.h == nullptr) != (y.h == nullptr))
    return false;
  if (x.h && !(*x.h == *y.h)) return false;
  if (x.a && !(*x.a == *y.a)) return false;
  if (x.b && !(*x.b == *y.b)) return false;
  return true;
}
inline bool operator!=(const Formula& x, const Formula& y) { return !(x == y); }

// Largest integer offset inside the window, 0 when the window holds none.
inline int max_nat_in(const TimeInterval& i) {
  int hi = static_cast<int>(std::floor(i.hi + 1e-9));
  if (hi < 0 || hi < std::ceil(i.lo - 1e-9)) return 0;
  return hi;
}

// Number of future steps needed past the evaluation instant. Temporal
// operators add their largest integer offset; spatial operators roam over
// agents at a fixed instant and add nothing of their own.
inline int formula_length(const Formula& f) {
  switch (f.kind) {
    case NodeKind::True:
    case NodeKind::Predicate:
      return 0;
    case NodeKind::Not:
    case NodeKind::Escape:
    case NodeKind::Somewhere:
    case NodeKind::Everywhere:
      return formula_length(*f.a);
    case NodeKind::And:
    case NodeKind::Or:
    case NodeKind::Reach:
    case NodeKind::Surround:
      return std::max(formula_length(*f.a), formula_length(*f.b));
    case NodeKind::Until:
      return max_nat_in(f.ti) + std::max(formula_length(*f.a), formula_length(*f.b));
    case NodeKind::Eventually:
    case NodeKind::Always:
      return max_nat_in(f.ti) + formula_length(*f.a);
  }
  throw std::logic_error("unreachable node kind");
}

inline bool contains_kind(const Formula& f, NodeKind k) {
  if (f.kind == k) return true;
  if (f.a && contains_kind(*f.a, k)) return true;
  if (f.b && contains_kind(*f.b, k)) return true;
  return false;
}

inline bool contains_spatial(const Formula& f) {
  if (is_spatial(f.kind)) return true;
  if (f.a && contains_spatial(*f.a)) return true;
  if (f.b && contains_spatial(*f.b)) return true;
  return false;
}

// Predicates in left-to-right order.
inline void collect_predicates(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (f->kind == NodeKind::Predicate) out.push_back(f);
  if (f->a) collect_predicates(f->a, out);
  if (f->b) collect_predicates(f->b, out);
}
inline std::vector<FormulaPtr> collect_predicates(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  collect_predicates(f, out);
  return out;
}

inline int max_pred_id(const Formula& f) {
  int m = f.kind == NodeKind::Predicate ? f.pred_id : -1;
  if (f.a) m = std::max(m, max_pred_id(*f.a));
  if (f.b) m = std::max(m, max_pred_id(*f.b));
  return m;
}

// ---- printing ----------------------------------------------------------
// precedence: or 1, and 2, until 3, reach/surround 4, unary 5, atoms 6

namespace detail {
inline std::string print_ti(const TimeInterval& i) {
  return "[" + format_double(i.lo) + "," + format_double(i.hi) + "]";
}
inline std::string print_di(const DistInterval& d) {
  return "[" + format_double(d.lo) + "," + format_double(d.hi) + "]";
}
}  // namespace detail

inline std::string print_formula(const Formula& f, int parent_prec = 0) {
  auto wrap = [&](int prec, std::string s) {
    if (parent_prec >= prec) return "(" + std::move(s) + ")";
    return s;
  };
  switch (f.kind) {
    case NodeKind::True:
      return "true";
    case NodeKind::Predicate:
      return wrap(6, print_expr(*f.h, 0) + " >= 0");
    case NodeKind::Not:
      return wrap(5, "not " + print_formula(*f.a, 4));
    case NodeKind::And:
      return wrap(2, print_formula(*f.a, 1) + " and " + print_formula(*f.b, 2));
    case NodeKind::Or:
      return wrap(1, print_formula(*f.a, 0) + " or " + print_formula(*f.b, 1));
    case NodeKind::Until:
      return wrap(3, print_formula(*f.a, 3) + " U" + detail::print_ti(f.ti) + " " +
                         print_formula(*f.b, 3));
    case NodeKind::Eventually:
      return wrap(5, "F" + detail::print_ti(f.ti) + " " + print_formula(*f.a, 4));
    case NodeKind::Always:
      return wrap(5, "G" + detail::print_ti(f.ti) + " " + print_formula(*f.a, 4));
    case NodeKind::Reach:
      return wrap(4, print_formula(*f.a, 4) + " R" + detail::print_di(f.di) + " " +
                         print_formula(*f.b, 4));
    case NodeKind::Escape:
      return wrap(5, "E" + detail::print_di(f.di) + " " + print_formula(*f.a, 4));
    case NodeKind::Somewhere:
      return wrap(5, "somewhere" + detail::print_di(f.di) + " " + print_formula(*f.a, 4));
    case NodeKind::Everywhere:
      return wrap(5, "everywhere" + detail::print_di(f.di) + " " + print_formula(*f.a, 4));
    case NodeKind::Surround:
      return wrap(4, print_formula(*f.a, 4) + " surround[" + format_double(f.di.hi) + "] " +
                         print_formula(*f.b, 4));
  }
  throw std::logic_error("unreachable node kind");
}

}  // namespace stremon
