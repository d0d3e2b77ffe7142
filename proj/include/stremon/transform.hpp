#pragma once

#include <stdexcept>
#include <string>

#include "stremon/formula.hpp"

namespace stremon {

struct NegationNotEliminable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a surround[d] b  :=  a and not (a R[0,d] not (a or b)) and not (E[d,inf] a)
inline FormulaPtr expand_surround(const Formula& f) {
  double d = f.di.hi;
  auto inner = Formula::negation(Formula::disj(f.a, f.b));
  auto no_outside_reach = Formula::negation(Formula::reach({0.0, d}, f.a, inner));
  auto no_escape = Formula::negation(Formula::escape({d, kPlusInf}, f.a));
  return Formula::conj(Formula::conj(f.a, no_outside_reach), no_escape);
}

// Rewrites every derived operator to the core set
// {true, predicate, not, and, U, R, E}.
inline FormulaPtr desugar(const FormulaPtr& f) {
  switch (f->kind) {
    case NodeKind::True:
    case NodeKind::Predicate:
      return f;
    case NodeKind::Not:
      return Formula::negation(desugar(f->a));
    case NodeKind::And:
      return Formula::conj(desugar(f->a), desugar(f->b));
    case NodeKind::Or:
      return Formula::negation(
          Formula::conj(Formula::negation(desugar(f->a)), Formula::negation(desugar(f->b))));
    case NodeKind::Until:
      return Formula::until(f->ti, desugar(f->a), desugar(f->b));
    case NodeKind::Eventually:
      return Formula::until(f->ti, Formula::truth(), desugar(f->a));
    case NodeKind::Always:
      return Formula::negation(
          Formula::until(f->ti, Formula::truth(), Formula::negation(desugar(f->a))));
    case NodeKind::Reach:
      return Formula::reach(f->di, desugar(f->a), desugar(f->b));
    case NodeKind::Escape:
      return Formula::escape(f->di, desugar(f->a));
    case NodeKind::Somewhere:
      return Formula::reach(f->di, Formula::truth(), desugar(f->a));
    case NodeKind::Everywhere:
      return Formula::negation(
          Formula::reach(f->di, Formula::truth(), Formula::negation(desugar(f->a))));
    case NodeKind::Surround:
      return desugar(expand_surround(*f));
  }
  throw std::logic_error("unreachable node kind");
}

namespace detail {

inline FormulaPtr pnf_pos(const FormulaPtr& f, int& next_id);

inline FormulaPtr pnf_neg(const FormulaPtr& f, int& next_id) {
  switch (f->kind) {
    case NodeKind::True:
      throw NegationNotEliminable(
          "'not true' has no negation-free form: the syntax has no false literal");
    case NodeKind::Predicate:
      return Formula::pred(PredExpr::scale(-1.0, f->h), next_id++);
    case NodeKind::Not:
      return pnf_pos(f->a, next_id);
    case NodeKind::And:
      return Formula::disj(pnf_neg(f->a, next_id), pnf_neg(f->b, next_id));
    case NodeKind::Or:
      return Formula::conj(pnf_neg(f->a, next_id), pnf_neg(f->b, next_id));
    case NodeKind::Until:
      throw NegationNotEliminable("negation directly over 'U' cannot be eliminated");
    case NodeKind::Eventually:
      return Formula::always(f->ti, pnf_neg(f->a, next_id));
    case NodeKind::Always:
      return Formula::eventually(f->ti, pnf_neg(f->a, next_id));
    case NodeKind::Reach:
      throw NegationNotEliminable("negation directly over 'R' cannot be eliminated");
    case NodeKind::Escape:
      throw NegationNotEliminable("negation directly over 'E' cannot be eliminated");
    case NodeKind::Somewhere:
      return Formula::everywhere(f->di, pnf_neg(f->a, next_id));
    case NodeKind::Everywhere:
      return Formula::somewhere(f->di, pnf_neg(f->a, next_id));
    case NodeKind::Surround:
      return pnf_neg(expand_surround(*f), next_id);
  }
  throw std::logic_error("unreachable node kind");
}

inline FormulaPtr pnf_pos(const FormulaPtr& f, int& next_id) {
  switch (f->kind) {
    case NodeKind::True:
    case NodeKind::Predicate:
      return f;
    case NodeKind::Not:
      return pnf_neg(f->a, next_id);
    case NodeKind::And:
      return Formula::conj(pnf_pos(f->a, next_id), pnf_pos(f->b, next_id));
    case NodeKind::Or:
      return Formula::disj(pnf_pos(f->a, next_id), pnf_pos(f->b, next_id));
    case NodeKind::Until:
      return Formula::until(f->ti, pnf_pos(f->a, next_id), pnf_pos(f->b, next_id));
    case NodeKind::Eventually:
      return Formula::eventually(f->ti, pnf_pos(f->a, next_id));
    case NodeKind::Always:
      return Formula::always(f->ti, pnf_pos(f->a, next_id));
    case NodeKind::Reach:
      return Formula::reach(f->di, pnf_pos(f->a, next_id), pnf_pos(f->b, next_id));
    case NodeKind::Escape:
      return Formula::escape(f->di, pnf_pos(f->a, next_id));
    case NodeKind::Somewhere:
      return Formula::somewhere(f->di, pnf_pos(f->a, next_id));
    case NodeKind::Everywhere:
      return Formula::everywhere(f->di, pnf_pos(f->a, next_id));
    case NodeKind::Surround:
      // the expansion carries negations over R and E; they never eliminate,
      // so any positive surround fails here with the error below
      return pnf_pos(expand_surround(*f), next_id);
  }
  throw std::logic_error("unreachable node kind");
}

}  // namespace detail

// Positive normal form: all negations pushed into the predicates. Negated
// predicates get fresh ids continuing after the largest existing one.
// Throws NegationNotEliminable when a negation sits over U, R, or E.
inline FormulaPtr to_pnf(const FormulaPtr& f) {
  int next_id = max_pred_id(*f) + 1;
  return detail::pnf_pos(f, next_id);
}

}  // namespace stremon
