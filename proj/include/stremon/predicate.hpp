#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stremon/ext_real.hpp"

namespace stremon {

// Prints a double so that parsing the text recovers the exact same value.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  for (int prec = 15; prec <= 17; ++prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return "0";
}

enum class ExprKind {
  StateRef,    // s[i]
  Const,
  Add,
  Sub,
  Scale,       // constant * expr
  Min,         // min(e, e, ...)
  Max,
  Norm2,       // norm2(e, ...)
  NormInf,     // norminf(e, ...)
  MinDistInf,  // mindist_inf(s, {(c,...), ...})
};

struct PredExpr;
using PredExprPtr = std::shared_ptr<const PredExpr>;

// Arithmetic expression over one state vector; the h function of a predicate
// h(state) >= 0. Immutable after construction.
struct PredExpr {
  ExprKind kind;
  double value = 0.0;                       // Const payload or Scale factor
  int index = -1;                           // StateRef payload
  std::vector<PredExprPtr> args;
  std::vector<std::vector<double>> points;  // MinDistInf anchors, equal arity

  static PredExprPtr state(int i) {
    PredExpr e;
    e.kind = ExprKind::StateRef;
    e.index = i;
    return std::make_shared<PredExpr>(std::move(e));
  }
  static PredExprPtr constant(double c) {
    PredExpr e;
    e.kind = ExprKind::Const;
    e.value = c;
    return std::make_shared<PredExpr>(std::move(e));
  }
  static PredExprPtr binary(ExprKind k, PredExprPtr a, PredExprPtr b) {
    PredExpr e;
    e.kind = k;
    e.args = {std::move(a), std::move(b)};
    return std::make_shared<PredExpr>(std::move(e));
  }
  static PredExprPtr scale(double c, PredExprPtr a) {
    PredExpr e;
    e.kind = ExprKind::Scale;
    e.value = c;
    e.args = {std::move(a)};
    return std::make_shared<PredExpr>(std::move(e));
  }
  static PredExprPtr nary(ExprKind k, std::vector<PredExprPtr> as) {
    PredExpr e;
    e.kind = k;
    e.args = std::move(as);
    return std::make_shared<PredExpr>(std::move(e));
  }
  static PredExprPtr mindist_inf(std::vector<std::vector<double>> pts) {
    PredExpr e;
    e.kind = ExprKind::MinDistInf;
    e.points = std::move(pts);
    return std::make_shared<PredExpr>(std::move(e));
  }
};

inline bool operator==(const PredExpr& a, const PredExpr& b) {
  if (a.kind != b.kind || a.value != b.value || a.index != b.index) return false;
  if (a.args.size() != b.args.size() || a.points != b.points) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!(*a.args[i] == *b.args[i])) return false;
  return true;
}

// Largest state index referenced, -1 if none.
inline int max_state_index(const PredExpr& e) {
  int m = e.kind == ExprKind::StateRef ? e.index : -1;
  if (e.kind == ExprKind::MinDistInf && !e.points.empty())
    m = static_cast<int>(e.points[0].size()) - 1;
  for (const auto& a : e.args) m = std::max(m, max_state_index(*a));
  return m;
}

inline void referenced_indices(const PredExpr& e, std::vector<int>& out) {
  if (e.kind == ExprKind::StateRef) out.push_back(e.index);
  if (e.kind == ExprKind::MinDistInf && !e.points.empty())
    for (size_t d = 0; d < e.points[0].size(); ++d) out.push_back(static_cast<int>(d));
  for (const auto& a : e.args) referenced_indices(*a, out);
}

inline double eval_expr(const PredExpr& e, const double* state, int dims) {
  switch (e.kind) {
    case ExprKind::StateRef:
      if (e.index < 0 || e.index >= dims)
        throw std::out_of_range("predicate references s[" + std::to_string(e.index) +
                                "] but the state has " + std::to_string(dims) + " dimensions");
      return state[e.index];
    case ExprKind::Const:
      return e.value;
    case ExprKind::Add:
      return eval_expr(*e.args[0], state, dims) + eval_expr(*e.args[1], state, dims);
    case ExprKind::Sub:
      return eval_expr(*e.args[0], state, dims) - eval_expr(*e.args[1], state, dims);
    case ExprKind::Scale:
      return e.value * eval_expr(*e.args[0], state, dims);
    case ExprKind::Min: {
      double r = kPlusInf;
      for (const auto& a : e.args) r = std::min(r, eval_expr(*a, state, dims));
      return r;
    }
    case ExprKind::Max: {
      double r = kMinusInf;
      for (const auto& a : e.args) r = std::max(r, eval_expr(*a, state, dims));
      return r;
    }
    case ExprKind::Norm2: {
      double s = 0;
      for (const auto& a : e.args) {
        double v = eval_expr(*a, state, dims);
        s += v * v;
      }
      return std::sqrt(s);
    }
    case ExprKind::NormInf: {
      double r = 0;
      for (const auto& a : e.args) r = std::max(r, std::fabs(eval_expr(*a, state, dims)));
      return r;
    }
    case ExprKind::MinDistInf: {
      double best = kPlusInf;
      for (const auto& p : e.points) {
        if (static_cast<int>(p.size()) > dims)
          throw std::out_of_range("mindist_inf anchor arity exceeds state dimension");
        double d = 0;
        for (size_t k = 0; k < p.size(); ++k) d = std::max(d, std::fabs(state[k] - p[k]));
        best = std::min(best, d);
      }
      return best;
    }
  }
  throw std::logic_error("unreachable expression kind");
}

// ---- affine analysis --------------------------------------------------

struct AffineForm {
  double c0 = 0.0;
  std::map<int, double> coeffs;  // state index -> coefficient
};

inline std::optional<AffineForm> affine_form(const PredExpr& e) {
  switch (e.kind) {
    case ExprKind::StateRef: {
      AffineForm f;
      f.coeffs[e.index] = 1.0;
      return f;
    }
    case ExprKind::Const:
      return AffineForm{e.value, {}};
    case ExprKind::Add:
    case ExprKind::Sub: {
      auto a = affine_form(*e.args[0]);
      auto b = affine_form(*e.args[1]);
      if (!a || !b) return std::nullopt;
      double sgn = e.kind == ExprKind::Add ? 1.0 : -1.0;
      a->c0 += sgn * b->c0;
      for (auto& [i, c] : b->coeffs) {
        a->coeffs[i] += sgn * c;
        if (a->coeffs[i] == 0.0) a->coeffs.erase(i);
      }
      return a;
    }
    case ExprKind::Scale: {
      auto a = affine_form(*e.args[0]);
      if (!a) return std::nullopt;
      a->c0 *= e.value;
      for (auto& [i, c] : a->coeffs) c *= e.value;
      return a;
    }
    default:
      return std::nullopt;
  }
}

enum class BallNorm { L2, Linf };

inline double dual_norm(const std::map<int, double>& g, BallNorm ball) {
  if (ball == BallNorm::L2) {
    double s = 0;
    for (auto& [i, c] : g) s += c * c;
    return std::sqrt(s);
  }
  double s = 0;  // dual of the max norm is the 1-norm
  for (auto& [i, c] : g) s += std::fabs(c);
  return s;
}

namespace detail {
inline double row_norm(const AffineForm& f, BallNorm ball) {
  // |g . u| <= row_norm(g) * ||u||_ball, per row of the Jacobian
  double s = 0;
  if (ball == BallNorm::L2) {
    for (auto& [i, c] : f.coeffs) s += c * c;
    return std::sqrt(s);
  }
  for (auto& [i, c] : f.coeffs) s += std::fabs(c);
  return s;
}
}  // namespace detail

// Upper bound on the Lipschitz constant of e with respect to the given norm
// on the state space. nullopt when no bound is derivable.
inline std::optional<double> lipschitz_bound(const PredExpr& e, BallNorm ball) {
  if (auto f = affine_form(e)) return dual_norm(f->coeffs, ball);
  switch (e.kind) {
    case ExprKind::Scale: {
      auto l = lipschitz_bound(*e.args[0], ball);
      if (!l) return std::nullopt;
      return std::fabs(e.value) * *l;
    }
    case ExprKind::Add:
    case ExprKind::Sub: {
      auto a = lipschitz_bound(*e.args[0], ball);
      auto b = lipschitz_bound(*e.args[1], ball);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case ExprKind::Min:
    case ExprKind::Max: {
      double m = 0;
      for (const auto& a : e.args) {
        auto l = lipschitz_bound(*a, ball);
        if (!l) return std::nullopt;
        m = std::max(m, *l);
      }
      return m;
    }
    case ExprKind::Norm2: {
      // rows of the Jacobian are the children's gradients
      bool single_disjoint = true;
      std::map<int, int> seen;
      double max_abs = 0, frob = 0;
      for (const auto& a : e.args) {
        auto f = affine_form(*a);
        if (!f) return std::nullopt;
        double rn = detail::row_norm(*f, ball);
        frob += rn * rn;
        if (f->coeffs.size() == 1) {
          auto [i, c] = *f->coeffs.begin();
          if (seen.count(i)) single_disjoint = false;
          seen[i] = 1;
          max_abs = std::max(max_abs, std::fabs(c));
        } else if (!f->coeffs.empty()) {
          single_disjoint = false;
        }
      }
      if (single_disjoint && ball == BallNorm::L2) return max_abs;
      return std::sqrt(frob);
    }
    case ExprKind::NormInf: {
      double m = 0;
      for (const auto& a : e.args) {
        auto f = affine_form(*a);
        if (!f) return std::nullopt;
        m = std::max(m, detail::row_norm(*f, ball));
      }
      return m;
    }
    case ExprKind::MinDistInf:
      // each anchor term is a max-norm distance in a subset of coordinates
      return 1.0;
    default:
      return std::nullopt;
  }
}

// Sound lower bound for inf { e(z) : ||z - center|| <= radius }.
// Exact for affine e; Lipschitz bound otherwise.
inline double ball_lower_bound(const PredExpr& e, const double* center, int dims,
                               double radius, BallNorm ball) {
  if (radius == 0.0) return eval_expr(e, center, dims);
  if (std::isinf(radius)) return kMinusInf;
  if (auto f = affine_form(e)) {
    double at = eval_expr(e, center, dims);
    return at - radius * dual_norm(f->coeffs, ball);
  }
  auto lip = lipschitz_bound(e, ball);
  if (!lip)
    throw std::runtime_error(
        "predicate is neither affine nor of a bounded-slope form; cannot bound it over a ball");
  return eval_expr(e, center, dims) - radius * *lip;
}

// ---- printing ----------------------------------------------------------

inline std::string print_expr(const PredExpr& e, int parent_prec = 0);

namespace detail {
inline std::string print_args(const PredExpr& e) {
  std::string s;
  for (size_t i = 0; i < e.args.size(); ++i) {
    if (i) s += ", ";
    s += print_expr(*e.args[i], 0);
  }
  return s;
}
}  // namespace detail

// precedence: additive 1, scale 2, atoms 3
inline std::string print_expr(const PredExpr& e, int parent_prec) {
  switch (e.kind) {
    case ExprKind::StateRef:
      return "s[" + std::to_string(e.index) + "]";
    case ExprKind::Const: {
      std::string s = format_double(e.value);
      if (e.value < 0 && parent_prec > 0) return "(" + s + ")";
      return s;
    }
    case ExprKind::Add:
    case ExprKind::Sub: {
      std::string s = print_expr(*e.args[0], 1) +
                      (e.kind == ExprKind::Add ? " + " : " - ") +
                      print_expr(*e.args[1], 2);
      if (parent_prec >= 2) return "(" + s + ")";
      return s;
    }
    case ExprKind::Scale: {
      std::string s = format_double(e.value);
      if (e.value < 0) s = "(" + s + ")";
      s += " * " + print_expr(*e.args[0], 3);
      if (parent_prec >= 3) return "(" + s + ")";
      return s;
    }
    case ExprKind::Min:
      return "min(" + detail::print_args(e) + ")";
    case ExprKind::Max:
      return "max(" + detail::print_args(e) + ")";
    case ExprKind::Norm2:
      return "norm2(" + detail::print_args(e) + ")";
    case ExprKind::NormInf:
      return "norminf(" + detail::print_args(e) + ")";
    case ExprKind::MinDistInf: {
      std::string s = "mindist_inf(s, {";
      for (size_t i = 0; i < e.points.size(); ++i) {
        if (i) s += ", ";
        s += "(";
        for (size_t k = 0; k < e.points[i].size(); ++k) {
          if (k) s += ", ";
          s += format_double(e.points[i][k]);
        }
        s += ")";
      }
      return s + "})";
    }
  }
  throw std::logic_error("unreachable expression kind");
}

}  // namespace stremon
