#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "stremon/conformal.hpp"
#include "stremon/ext_real.hpp"
#include "stremon/formula.hpp"
#include "stremon/graph.hpp"
#include "stremon/parser.hpp"
#include "stremon/predicate.hpp"
#include "stremon/predictors.hpp"
#include "stremon/semantics.hpp"
#include "stremon/trajectory.hpp"
#include "stremon/transform.hpp"

namespace stremon {

enum class Method {
  AccurateStl,
  Interp1Stl,
  Interp2Stl,
  AccurateStrel,
  Interp1Strel,
  Interp2Strel,
};

inline const char* method_name(Method m) {
  switch (m) {
    case Method::AccurateStl: return "accurate-stl";
    case Method::Interp1Stl: return "interp1-stl";
    case Method::Interp2Stl: return "interp2-stl";
    case Method::AccurateStrel: return "accurate-strel";
    case Method::Interp1Strel: return "interp1-strel";
    case Method::Interp2Strel: return "interp2-strel";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  for (Method m : {Method::AccurateStl, Method::Interp1Stl, Method::Interp2Stl,
                   Method::AccurateStrel, Method::Interp1Strel, Method::Interp2Strel})
    if (s == method_name(m)) return m;
  throw std::invalid_argument("unknown method '" + s + "'");
}

inline bool method_is_strel(Method m) {
  return m == Method::AccurateStrel || m == Method::Interp1Strel || m == Method::Interp2Strel;
}

// 0 = accurate, 1 = state-ball interpretable, 2 = predicate-level interpretable
inline int method_variant(Method m) {
  switch (m) {
    case Method::AccurateStl:
    case Method::AccurateStrel: return 0;
    case Method::Interp1Stl:
    case Method::Interp1Strel: return 1;
    case Method::Interp2Stl:
    case Method::Interp2Strel: return 2;
  }
  return 0;
}

inline constexpr double kAlphaFloor = 1e-8;

// (pred_id, tau, agent); pred_id = -1 for per-state entries, agent = -1 for
// the flattened single-agent view
using AlphaKey = std::tuple<int, int, int>;

struct CalibrationInputs {
  std::string formula_text;
  Dialect dialect = Dialect::Stl;
  double delta = 0.1;
  DivergenceSpec divergence;
  int tau0 = 0;
  int t = 1;
  int agent = -1;                       // STREL: verification location, 0-based
  BallNorm ball = BallNorm::L2;
  const WeightSpec* weights = nullptr;  // STREL
};

struct PredictorMeta {
  std::string kind;
  int order = 0;
  bool ridge_used = false;
  std::string dataset_id;
  int train_size = 0;
};

inline PredictorMeta meta_of(const PredictorModel& m) {
  PredictorMeta meta;
  meta.kind = PredictorModel::kind_name(m.kind);
  meta.order = m.order;
  meta.ridge_used = m.ridge_used;
  meta.dataset_id = m.dataset_id;
  meta.train_size = m.train_size;
  return meta;
}

struct CalibrationArtifact {
  Method method = Method::AccurateStl;
  std::string formula_text;
  Dialect dialect = Dialect::Stl;
  int tau0 = 0;
  int t = 0;
  int horizon = 0;
  double delta = 0.1;
  std::string divergence = "tv";
  double epsilon = 0.0;
  int k = 0;
  double c_tilde = kPlusInf;
  bool feasible = false;
  int rank = 0;
  double level = 1.0;
  std::map<AlphaKey, double> alpha;
  BallNorm ball = BallNorm::L2;
  int agent = -1;
  PredictorMeta predictor;
  std::vector<int> calib_ids;
  std::vector<int> alpha_ids;
  FormulaPtr formula;  // parsed form; rebuilt from formula_text after load
};

struct PredicateBound {
  int pred_id = -1;
  int tau = 0;
  int agent = -1;
  double bound = kMinusInf;
  double radius = 0.0;         // state-ball variant only
  std::vector<double> center;  // state-ball variant only
  std::string predicate;
};

struct VerificationVerdict {
  double rho_star = kMinusInf;
  double level = 0.0;  // 1 - delta
  bool satisfied = false;
  Method method = Method::AccurateStl;
  bool feasible = true;
  std::vector<PredicateBound> bounds;  // interpretable variants only
};

namespace detail {

inline std::vector<FormulaPtr> unique_predicates(const FormulaPtr& f) {
  std::vector<FormulaPtr> all = collect_predicates(f);
  std::vector<FormulaPtr> out;
  std::set<int> seen;
  for (auto& p : all)
    if (seen.insert(p->pred_id).second) out.push_back(p);
  return out;
}

// Norm of (a - b) restricted to the given coordinates.
inline double error_norm(const double* a, const double* b, const std::vector<int>& dims,
                         BallNorm ball) {
  if (ball == BallNorm::L2) {
    double s = 0;
    for (int d : dims) s += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(s);
  }
  double s = 0;
  for (int d : dims) s = std::max(s, std::abs(a[d] - b[d]));
  return s;
}

// Coordinates entering the state-ball error norm in the flattened view: the
// full substates of every agent the formula references (referencing any one
// coordinate of an agent pulls in that whole agent).
inline std::vector<int> flat_norm_dims(const FormulaPtr& pnf, int agents, int dims) {
  std::set<int> used;
  for (const auto& p : collect_predicates(pnf)) {
    std::vector<int> idx;
    referenced_indices(*p->h, idx);
    for (int i : idx) {
      if (i < 0 || i >= agents * dims)
        throw std::invalid_argument("formula references s[" + std::to_string(i) +
                                    "] outside the state of dimension " +
                                    std::to_string(agents * dims));
      used.insert(i / dims);
    }
  }
  if (used.empty())
    for (int a = 0; a < agents; ++a) used.insert(a);
  std::vector<int> out;
  for (int a : used)
    for (int d = 0; d < dims; ++d) out.push_back(a * dims + d);
  return out;
}

inline std::vector<int> all_dims(int n) {
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

}  // namespace detail

// Computes nonconformity scores for one method. Holds the parsed formula, the
// prediction horizon and (for interpretable methods) the normalization table
// built from a dataset disjoint from the calibration scores.
class NonconformityScorer {
 public:
  NonconformityScorer(Method method, const CalibrationInputs& in,
                      const std::vector<Trajectory>& alpha_set, const PredictorModel& predictor)
      : method_(method), in_(in), predictor_(&predictor) {
    formula_ = parse_formula(in.formula_text, in.dialect);
    strel_ = method_is_strel(method);
    if (strel_) {
      if (!in.weights) throw std::invalid_argument("strel methods need a weight specification");
      if (in.agent < 0) throw std::invalid_argument("strel methods need a verification agent");
    } else if (contains_spatial(*formula_)) {
      throw std::invalid_argument("stl methods cannot evaluate spatial operators");
    }
    if (in.tau0 < 0) throw std::invalid_argument("tau0 must be nonnegative");
    if (in.t < 0) throw std::invalid_argument("t must be nonnegative");
    len_ = formula_length(*formula_);
    horizon_ = in.tau0 + len_ - in.t;
    if (horizon_ < 0)
      throw std::invalid_argument("observation time t lies beyond the formula horizon tau0 + L");
    for (int tau = in.t + 1; tau <= in.tau0 + len_; ++tau) future_.push_back(tau);

    if (method_variant(method) != 0) {
      pnf_ = to_pnf(formula_);  // throws when negations cannot be pushed to predicates
      preds_ = detail::unique_predicates(pnf_);
      if (alpha_set.empty())
        throw std::invalid_argument("interpretable methods need a nonempty alpha dataset");
      build_alpha(alpha_set);
    }
  }

  double score(const Trajectory& x) const {
    check_shape(x);
    PredictedTrajectory ph = predict(*predictor_, x.prefix(in_.t), horizon_);
    const Trajectory& xh = ph.full;
    switch (method_) {
      case Method::AccurateStl:
        return sub_scored(eval_robust_stl(formula_, xh, in_.tau0),
                          eval_robust_stl(formula_, x, in_.tau0));
      case Method::AccurateStrel:
        return sub_scored(eval_robust_strel(formula_, xh, *in_.weights, in_.tau0, in_.agent),
                          eval_robust_strel(formula_, x, *in_.weights, in_.tau0, in_.agent));
      case Method::Interp1Stl: {
        double r = 0;
        for (int tau : future_)
          r = std::max(r, detail::error_norm(x.flat_state(tau), xh.flat_state(tau), norm_dims_,
                                             in_.ball) /
                              alpha_.at({-1, tau, -1}));
        return r;
      }
      case Method::Interp1Strel: {
        double r = 0;
        for (int tau : future_)
          for (int l = 0; l < x.agents; ++l)
            r = std::max(r, detail::error_norm(x.state(tau, l), xh.state(tau, l), norm_dims_,
                                               in_.ball) /
                                alpha_.at({-1, tau, l}));
        return r;
      }
      case Method::Interp2Stl: {
        if (preds_.empty() || future_.empty()) return 0;
        double r = kMinusInf;
        for (const auto& p : preds_)
          for (int tau : future_) {
            double d = eval_expr(*p->h, xh.flat_state(tau), xh.flat_dims()) -
                       eval_expr(*p->h, x.flat_state(tau), x.flat_dims());
            r = std::max(r, d / alpha_.at({p->pred_id, tau, -1}));
          }
        return r;
      }
      case Method::Interp2Strel: {
        if (preds_.empty() || future_.empty()) return 0;
        double r = kMinusInf;
        for (const auto& p : preds_)
          for (int tau : future_)
            for (int l = 0; l < x.agents; ++l) {
              double d = eval_expr(*p->h, xh.state(tau, l), xh.dims) -
                         eval_expr(*p->h, x.state(tau, l), x.dims);
              r = std::max(r, d / alpha_.at({p->pred_id, tau, l}));
            }
        return r;
      }
    }
    throw std::logic_error("unreachable");
  }

  Method method() const { return method_; }
  const CalibrationInputs& inputs() const { return in_; }
  const FormulaPtr& formula() const { return formula_; }
  int length() const { return len_; }
  int horizon() const { return horizon_; }
  const std::vector<int>& future_times() const { return future_; }
  const std::map<AlphaKey, double>& alpha() const { return alpha_; }
  const std::vector<int>& alpha_ids() const { return alpha_ids_; }

 private:
  void check_shape(const Trajectory& x) const {
    if (x.steps < in_.tau0 + len_ + 1)
      throw std::invalid_argument("scoring needs the trajectory up to time " +
                                  std::to_string(in_.tau0 + len_) + " but it ends at " +
                                  std::to_string(x.steps - 1));
    if (strel_ && in_.agent >= x.agents)
      throw std::invalid_argument("verification agent outside the trajectory");
  }

  void build_alpha(const std::vector<Trajectory>& alpha_set) {
    const Trajectory& first = alpha_set.front();
    if (method_ == Method::Interp1Stl)
      norm_dims_ = detail::flat_norm_dims(pnf_, first.agents, first.dims);
    else if (method_ == Method::Interp1Strel)
      norm_dims_ = detail::all_dims(first.dims);

    for (const auto& x : alpha_set) {
      if (x.agents != first.agents || x.dims != first.dims)
        throw std::invalid_argument("alpha dataset trajectories disagree on shape");
      check_shape(x);
      alpha_ids_.push_back(x.trial_id);
      PredictedTrajectory ph = predict(*predictor_, x.prefix(in_.t), horizon_);
      const Trajectory& xh = ph.full;
      auto bump = [this](AlphaKey k, double v) {
        auto it = alpha_.find(k);
        if (it == alpha_.end())
          alpha_.emplace(k, v);
        else
          it->second = std::max(it->second, v);
      };
      switch (method_) {
        case Method::Interp1Stl:
          for (int tau : future_)
            bump({-1, tau, -1},
                 detail::error_norm(x.flat_state(tau), xh.flat_state(tau), norm_dims_, in_.ball));
          break;
        case Method::Interp1Strel:
          for (int tau : future_)
            for (int l = 0; l < x.agents; ++l)
              bump({-1, tau, l},
                   detail::error_norm(x.state(tau, l), xh.state(tau, l), norm_dims_, in_.ball));
          break;
        case Method::Interp2Stl:
          for (const auto& p : preds_)
            for (int tau : future_)
              bump({p->pred_id, tau, -1},
                   std::abs(eval_expr(*p->h, xh.flat_state(tau), xh.flat_dims()) -
                            eval_expr(*p->h, x.flat_state(tau), x.flat_dims())));
          break;
        case Method::Interp2Strel:
          for (const auto& p : preds_)
            for (int tau : future_)
              for (int l = 0; l < x.agents; ++l)
                bump({p->pred_id, tau, l}, std::abs(eval_expr(*p->h, xh.state(tau, l), xh.dims) -
                                                    eval_expr(*p->h, x.state(tau, l), x.dims)));
          break;
        default:
          break;
      }
    }
    for (auto& [k, v] : alpha_) v = std::max(v, kAlphaFloor);
  }

  Method method_;
  CalibrationInputs in_;
  const PredictorModel* predictor_;
  bool strel_ = false;
  FormulaPtr formula_;
  FormulaPtr pnf_;
  std::vector<FormulaPtr> preds_;
  int len_ = 0;
  int horizon_ = 0;
  std::vector<int> future_;
  std::vector<int> norm_dims_;
  std::map<AlphaKey, double> alpha_;
  std::vector<int> alpha_ids_;
};

// Turn already-computed scores into an artifact. Lets one scoring pass feed
// quantiles at several divergence budgets (e.g. robust plus an eps = 0
// baseline) without rescoring.
inline CalibrationArtifact assemble_artifact(const NonconformityScorer& sc,
                                             const std::vector<double>& scores,
                                             std::vector<int> calib_ids,
                                             const PredictorModel& predictor, double delta,
                                             const DivergenceSpec& divergence) {
  if (scores.empty()) throw std::invalid_argument("calibration set is empty");
  QuantileResult q = robust_quantile(scores, delta, divergence);
  const CalibrationInputs& in = sc.inputs();

  CalibrationArtifact art;
  art.method = sc.method();
  art.formula_text = in.formula_text;
  art.dialect = in.dialect;
  art.tau0 = in.tau0;
  art.t = in.t;
  art.horizon = sc.horizon();
  art.delta = delta;
  art.divergence = divergence.kind == DivergenceSpec::Kind::TotalVariation ? "tv" : "generic";
  art.epsilon = divergence.epsilon;
  art.k = static_cast<int>(scores.size());
  art.c_tilde = q.value;
  art.feasible = q.feasible;
  art.rank = q.rank;
  art.level = q.level;
  art.alpha = sc.alpha();
  art.ball = in.ball;
  art.agent = in.agent;
  art.predictor = meta_of(predictor);
  art.calib_ids = std::move(calib_ids);
  art.alpha_ids = sc.alpha_ids();
  art.formula = sc.formula();
  return art;
}

// Calibrate one method: score the calibration set and take the robust
// quantile. Infeasible (delta, epsilon, K) combinations come back as a
// well-formed artifact with C-tilde = +inf rather than an exception.
inline CalibrationArtifact calibrate(Method method, const CalibrationInputs& in,
                                     const std::vector<Trajectory>& calib,
                                     const std::vector<Trajectory>& alpha_set,
                                     const PredictorModel& predictor) {
  if (calib.empty()) throw std::invalid_argument("calibration set is empty");
  NonconformityScorer sc(method, in, alpha_set, predictor);
  std::vector<double> scores;
  std::vector<int> ids;
  scores.reserve(calib.size());
  for (const auto& x : calib) {
    scores.push_back(sc.score(x));
    ids.push_back(x.trial_id);
  }
  return assemble_artifact(sc, scores, std::move(ids), predictor, in.delta, in.divergence);
}

namespace detail {

inline double alpha_at(const CalibrationArtifact& art, AlphaKey k) {
  auto it = art.alpha.find(k);
  if (it == art.alpha.end())
    throw std::runtime_error("calibration artifact alpha table is missing an entry");
  return it->second;
}

}  // namespace detail

// Verify one observed prefix against a calibration artifact: predict the
// remaining horizon and compute the probabilistic lower bound rho*.
inline VerificationVerdict verify(const CalibrationArtifact& art, const Trajectory& x_obs,
                                  const PredictorModel& predictor,
                                  const WeightSpec* weights = nullptr) {
  bool strel = method_is_strel(art.method);
  if (strel && !weights)
    throw std::invalid_argument("strel verification needs a weight specification");
  if (x_obs.steps < art.t + 1)
    throw std::invalid_argument("observation shorter than t + 1 steps");
  Trajectory obs = x_obs.prefix(art.t);

  FormulaPtr f = art.formula ? art.formula : parse_formula(art.formula_text, art.dialect);
  int len = formula_length(*f);
  if (art.tau0 + len - art.t != art.horizon)
    throw std::runtime_error("artifact horizon does not match its formula");

  VerificationVerdict v;
  v.method = art.method;
  v.level = 1.0 - art.delta;
  v.feasible = art.feasible;

  PredictedTrajectory ph = predict(predictor, obs, art.horizon);
  const Trajectory& xh = ph.full;

  if (method_variant(art.method) == 0) {
    if (art.c_tilde == kPlusInf) {
      v.rho_star = kMinusInf;
      return v;
    }
    double rho_hat = strel ? eval_robust_strel(f, xh, *weights, art.tau0, art.agent)
                           : eval_robust_stl(f, xh, art.tau0);
    v.rho_star = sub_scored(rho_hat, art.c_tilde);
    v.satisfied = v.rho_star > 0;
    return v;
  }

  FormulaPtr pnf = to_pnf(f);
  std::vector<FormulaPtr> preds = detail::unique_predicates(pnf);
  std::vector<int> future;
  for (int tau = art.t + 1; tau <= art.tau0 + len; ++tau) future.push_back(tau);
  int agents = strel ? xh.agents : 1;
  int dims = strel ? xh.dims : xh.flat_dims();
  bool infinite = art.c_tilde == kPlusInf;

  std::map<AlphaKey, double> bound;
  for (const auto& p : preds)
    for (int tau : future)
      for (int l = 0; l < agents; ++l) {
        int lk = strel ? l : -1;
        const double* center = strel ? xh.state(tau, l) : xh.flat_state(tau);
        PredicateBound pb;
        pb.pred_id = p->pred_id;
        pb.tau = tau;
        pb.agent = lk;
        pb.predicate = print_formula(*p);
        if (method_variant(art.method) == 1) {
          pb.radius = infinite ? kPlusInf : art.c_tilde * detail::alpha_at(art, {-1, tau, lk});
          pb.center.assign(center, center + dims);
          pb.bound = ball_lower_bound(*p->h, center, dims, pb.radius, art.ball);
        } else {
          double a = detail::alpha_at(art, {p->pred_id, tau, lk});
          pb.bound = infinite ? kMinusInf : eval_expr(*p->h, center, dims) - art.c_tilde * a;
        }
        bound[{p->pred_id, tau, lk}] = pb.bound;
        v.bounds.push_back(std::move(pb));
      }

  // probabilistic robust semantics: true predicate values on the observed
  // prefix, calibrated lower bounds on the predicted suffix
  detail::check_horizon(*pnf, xh, art.tau0);
  PredicateSource src;
  if (strel)
    src = [&art, &xh, &bound](const Formula& p, int tt, int l) -> double {
      if (tt <= art.t) return eval_expr(*p.h, xh.state(tt, l), xh.dims);
      return bound.at({p.pred_id, tt, l});
    };
  else
    src = [&art, &xh, &bound](const Formula& p, int tt, int) -> double {
      if (tt <= art.t) return eval_expr(*p.h, xh.flat_state(tt), xh.flat_dims());
      return bound.at({p.pred_id, tt, -1});
    };

  if (strel) {
    if (art.agent < 0 || art.agent >= xh.agents)
      throw std::invalid_argument("verification agent outside the trajectory");
    GraphCache graphs(*weights, xh);
    RobustEvaluator ev(pnf, xh.agents, xh.steps, src,
                       [&graphs](int tt) -> const GraphSnapshot& { return graphs(tt); });
    v.rho_star = ev.at(art.tau0, art.agent);
  } else {
    RobustEvaluator ev(pnf, 1, xh.steps, src, nullptr);
    v.rho_star = ev.at(art.tau0, 0);
  }
  v.satisfied = v.rho_star > 0;
  return v;
}

}  // namespace stremon
