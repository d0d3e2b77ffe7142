// Acceptance gate: one function per criterion, one [PASS]/[FAIL] line each.
// Run `acceptance all`, a single number, or `7-10` (criteria 7 through 10
// share the experiment runs). Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stremon/stremon.hpp"
#include "testutil/gen.hpp"
#include "testutil/oracles.hpp"

using namespace stremon;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

// ---- shared experiment runs (criteria 6-10) --------------------------------

ExperimentConfig noisy_reference_config() {
  ExperimentConfig c;  // noisy-reference defaults: 110 steps, amplitude 30, period 70
  c.formula = "G[95,105] (s[0] >= -45)";
  c.delta = 0.2;
  c.m = 100;
  c.t = 100;
  c.predictor = "linear-ar";
  c.ar_order = 2;
  return c;
}

ExperimentConfig no_shift_config() {
  ExperimentConfig c = noisy_reference_config();
  c.sigma_test = 3.0;  // draw test from the training distribution
  c.methods = {Method::AccurateStl};
  c.epsilon = 0.0;
  c.k = 500;
  c.reps = 50;
  c.calib_pool = 20000;
  c.test_pool = 10000;
  c.seed = 61;
  return c;
}

ExperimentConfig shift_config() {
  ExperimentConfig c = noisy_reference_config();  // sigma 3.0 train vs 3.5 test
  c.methods = {Method::AccurateStl, Method::Interp1Stl, Method::Interp2Stl};
  c.epsilon = 0.142;
  c.k = 2000;
  c.reps = 50;
  c.test_pool = 10000;
  c.seed = 71;
  return c;
}

ExperimentConfig swarm_config(int agents, std::uint64_t seed) {
  ExperimentConfig c;
  c.system = "swarm-lite";
  c.swarm = SwarmSpec::defaults();
  c.swarm.agents = agents;
  c.swarm.goal = {400.0, 0.0, 0.0};  // arrival stays past the checked window
  // drop the obstacle at x = 150: the slower fleet is still dodging it at the
  // prediction cut, which would leak a systematic lateral term into the
  // extrapolation that the training-side normalization never sees
  c.swarm.obstacles.pop_back();
  c.formula = "G[0,8] somewhere[0,12] (s[0] >= 170 and s[2] >= -50)";
  c.dialect = Dialect::Strel;
  c.agent = 0;
  c.weights = "proximity:60:scaled:0.2";  // communication cost 0.2 * distance
  c.methods = {Method::AccurateStrel, Method::Interp1Strel, Method::Interp2Strel};
  c.delta = 0.2;
  c.k = 500;
  c.m = 100;
  c.reps = 20;
  c.tau0 = 30;  // the whole window sits past the observed prefix,
  c.t = 29;     // so every verdict leans on the predicted suffix
  c.predictor = "constant-velocity";
  c.calib_pool = 2000;
  c.test_pool = 2000;
  c.seed = seed;
  return c;
}

// Shift budget for the swarm runs, estimated from fresh pools exactly as the
// CLI estimate-shift path would: score both speed distributions with the same
// predictor and normalization, take the largest per-method TV distance.
double estimated_swarm_epsilon(const ExperimentConfig& cfg, ShiftEstimate* out) {
  SwarmSpec train_spec = cfg.swarm;
  train_spec.speed = cfg.speed_train;
  SwarmSpec test_spec = cfg.swarm;
  test_spec.speed = cfg.speed_test;

  Rng seeds(cfg.seed + 0x51);
  auto alpha = generate_swarm_lite(train_spec, 200, seeds.next_u64(), 1);
  auto train_pool = generate_swarm_lite(train_spec, 500, seeds.next_u64(), 201);
  auto test_pool = generate_swarm_lite(test_spec, 500, seeds.next_u64(), 701);

  WeightSpec weights = resolve_weight_spec(cfg.weights, cfg.swarm.agents);
  CalibrationInputs in;
  in.formula_text = cfg.formula;
  in.dialect = Dialect::Strel;
  in.delta = cfg.delta;
  in.divergence = DivergenceSpec::total_variation(0.0);
  in.tau0 = cfg.tau0;
  in.t = cfg.t;
  in.agent = cfg.agent;
  in.ball = cfg.ball;
  in.weights = &weights;

  PredictorModel cv = make_constant_velocity();
  ShiftEstimate est =
      estimate_epsilon(in, cfg.methods, train_pool, test_pool, alpha, cv);
  if (out) *out = est;
  return est.epsilon;
}

struct SharedRuns {
  std::optional<CoverageReport> shift_run;          // criterion 7
  std::optional<CoverageReport> swarm3, swarm5;     // criterion 8
  double eps3 = 0, eps5 = 0;

  const CoverageReport& shift() {
    if (!shift_run) shift_run = run_experiment(shift_config());
    return *shift_run;
  }
  const CoverageReport& swarm(int agents) {
    if (agents == 3) {
      if (!swarm3) {
        ExperimentConfig c = swarm_config(3, 81);
        eps3 = estimated_swarm_epsilon(c, nullptr);
        c.epsilon = eps3;
        swarm3 = run_experiment(c);
      }
      return *swarm3;
    }
    if (!swarm5) {
      ExperimentConfig c = swarm_config(5, 85);
      eps5 = estimated_swarm_epsilon(c, nullptr);
      c.epsilon = eps5;
      swarm5 = run_experiment(c);
    }
    return *swarm5;
  }
};

const LabelSummary& summary_of(const CoverageReport& r, const std::string& label, bool robust) {
  for (const auto& s : r.summaries)
    if (s.label == label && s.robust == robust) return s;
  throw std::logic_error("missing summary row " + label);
}

const TimingSummary& timing_of(const CoverageReport& r, const std::string& label, bool robust) {
  for (const auto& t : r.timings)
    if (t.label == label && t.robust == robust) return t;
  throw std::logic_error("missing timing row " + label);
}

void rho_star_stats(const CoverageReport& r, const std::string& label, double& mean, double& se) {
  std::vector<double> v;
  for (const auto& p : r.pairs)
    if (p.robust && p.label == label) v.push_back(p.rho_star);
  mean = testutil::mean_of(v);
  se = testutil::stderr_of(v);
}

// ---- criteria ---------------------------------------------------------------

bool criterion1(std::string& detail) {
  Rng rng(0xAC01);
  int cases = 0;
  for (int i = 0; i < 200; ++i) {
    int dims = rng.uniform_int(1, 4);
    testutil::FormulaGenConfig gc;
    gc.dims = dims;  // depth <= 3, time bounds <= 10
    FormulaPtr f;
    int len = 0;
    do {
      f = testutil::random_formula(rng, gc);
      len = formula_length(*f);
    } while (len > 11);
    int steps = 12;
    int tau0 = rng.uniform_int(0, steps - 1 - len);
    for (int rep = 0; rep < 3; ++rep) {
      Trajectory x = testutil::random_trajectory(rng, 1, dims, steps);
      double got = eval_robust_stl(f, x, tau0);
      double want = testutil::oracle_stl(*f, x, tau0);
      ++cases;
      if (!(got == want)) {
        detail = "mismatch at formula " + std::to_string(i) + ": evaluator " + fmt(got) +
                 " vs oracle " + fmt(want);
        return false;
      }
    }
  }
  detail = std::to_string(cases) + " formula/trajectory instances, exact equality";
  return true;
}

bool criterion2(std::string& detail) {
  Rng rng(0xAC02);
  int checks = 0;
  for (int i = 0; i < 200; ++i) {
    int agents = rng.uniform_int(2, 5);
    GraphSnapshot g = testutil::random_graph(rng, agents, 3);
    std::vector<double> s1(agents), s2(agents);
    for (auto& v : s1) v = rng.uniform(-5.0, 5.0);
    for (auto& v : s2) v = rng.uniform(-5.0, 5.0);
    int d1i = rng.uniform_int(0, 8);
    double d1 = d1i, d2 = rng.uniform_int(d1i, 8);

    auto br = bounded_reach(d1, d2, s1, s2, g);
    auto ur = unbounded_reach(d1, s1, s2, g);
    auto es = escape({d1, d2}, s1, g);
    for (int l = 0; l < agents; ++l) {
      double wb = testutil::walk_reach(l, d1, d2, s1, s2, g);
      double wu = testutil::walk_reach(l, d1, testutil::kInf, s1, s2, g);
      double we = testutil::walk_escape(l, d1, d2, s1, g);
      checks += 3;
      if (!(br[l] == wb) || !(ur[l] == wu) || !(es[l] == we)) {
        detail = "mismatch at instance " + std::to_string(i) + " node " + std::to_string(l);
        return false;
      }
    }
  }
  detail = std::to_string(checks) + " node values across 200 instances, exact equality";
  return true;
}

bool criterion3(std::string& detail) {
  Rng rng(0xAC03);
  int nonzero = 0;
  for (int i = 0; i < 1000; ++i) {
    int dims = rng.uniform_int(1, 4);
    testutil::FormulaGenConfig gc;
    gc.dims = dims;
    FormulaPtr f;
    int len = 0;
    do {
      f = testutil::random_formula(rng, gc);
      len = formula_length(*f);
    } while (len > 11);
    int tau0 = rng.uniform_int(0, 11 - len);
    Trajectory x = testutil::random_trajectory(rng, 1, dims, 12);
    double rho = eval_robust_stl(f, x, tau0);
    bool sat = eval_bool_stl(f, x, tau0);
    if (rho != 0) ++nonzero;
    if ((rho > 0 && !sat) || (rho < 0 && sat)) {
      detail = "STL sign violation at instance " + std::to_string(i) + ": rho " + fmt(rho);
      return false;
    }
  }
  for (int i = 0; i < 1000; ++i) {
    int agents = rng.uniform_int(2, 5);
    int dims = rng.uniform_int(1, 3);
    testutil::FormulaGenConfig gc;
    gc.dims = dims;
    gc.spatial = true;
    FormulaPtr f;
    int len = 0;
    do {
      f = testutil::random_formula(rng, gc);
      len = formula_length(*f);
    } while (len > 11);
    int tau0 = rng.uniform_int(0, 11 - len);
    Trajectory x = testutil::random_trajectory(rng, agents, dims, 12);
    auto graphs = testutil::random_graph_sequence(rng, agents, 12);
    WeightSpec w = testutil::explicit_weights(x.trial_id, graphs);
    int l = rng.uniform_int(0, agents - 1);
    double rho = eval_robust_strel(f, x, w, tau0, l);
    bool sat = eval_bool_strel(f, x, w, tau0, l);
    if (rho != 0) ++nonzero;
    if ((rho > 0 && !sat) || (rho < 0 && sat)) {
      detail = "STREL sign violation at instance " + std::to_string(i) + ": rho " + fmt(rho);
      return false;
    }
  }
  detail = "2000 instances, zero sign violations (" + std::to_string(nonzero) + " nonzero)";
  return true;
}

bool criterion4(std::string& detail) {
  Rng rng(0xAC04);
  DivergenceSpec none = DivergenceSpec::total_variation(0.0);
  for (int i = 0; i < 10000; ++i) {
    int k = rng.uniform_int(1, 50);
    double delta;
    switch (rng.uniform_int(0, 2)) {
      case 0: delta = rng.uniform(0.02, 0.9); break;
      case 1: delta = 0.05 * rng.uniform_int(1, 18); break;
      default: delta = static_cast<double>(rng.uniform_int(1, k)) / (k + 1); break;
    }
    std::vector<double> scores(k);
    for (auto& s : scores)
      s = rng.uniform() < 0.3 ? std::floor(rng.uniform(-5.0, 5.0)) : rng.uniform(-10.0, 10.0);
    QuantileResult v = vanilla_quantile(scores, delta);
    QuantileResult r = robust_quantile(scores, delta, none);
    if (v.feasible != r.feasible || v.rank != r.rank || !(v.value == r.value)) {
      detail = "reduction mismatch at case " + std::to_string(i) + " (K " + std::to_string(k) +
               ", delta " + fmt(delta) + "): vanilla " + fmt(v.value) + " rank " +
               std::to_string(v.rank) + " vs robust " + fmt(r.value) + " rank " +
               std::to_string(r.rank);
      return false;
    }
  }

  int cells = 0;
  for (int di = 1; di <= 10; ++di) {
    double delta = 0.05 * di;
    for (int ei = 0; ei <= 8; ++ei) {
      DivergenceSpec div = DivergenceSpec::total_variation(0.05 * ei);
      auto min_k = min_calibration_size(delta, div);
      for (int k = 1; k <= 100; ++k) {
        std::vector<double> scores(k);
        std::iota(scores.begin(), scores.end(), 1.0);
        bool feasible = robust_quantile(scores, delta, div).feasible;
        bool want = min_k.has_value() && k >= *min_k;
        ++cells;
        if (feasible != want) {
          detail = "boundary mismatch at delta " + fmt(delta, 2) + " eps " + fmt(0.05 * ei, 2) +
                   " K " + std::to_string(k);
          return false;
        }
      }
    }
  }
  detail = "10000 reduction cases exact; " + std::to_string(cells) + " boundary cells consistent";
  return true;
}

bool criterion5(std::string& detail) {
  auto f_tv = [](double t) { return 0.5 * std::abs(t - 1.0); };
  double worst = 0;
  for (int bi = 0; bi < 100; ++bi) {
    double beta = (bi + 0.5) / 100.0;
    for (int ei = 0; ei < 100; ++ei) {
      double eps = 0.5 * ei / 99.0;
      DivergenceSpec closed = DivergenceSpec::total_variation(eps);
      DivergenceSpec generic = DivergenceSpec::generic(eps, f_tv, 0.5);
      double dg = std::abs(g_of(closed, beta) - g_of(generic, beta));
      double di = std::abs(g_inverse(closed, beta) - g_inverse(generic, beta));
      worst = std::max({worst, dg, di});
      if (dg > 1e-6 || di > 1e-6) {
        detail = "divergence at beta " + fmt(beta) + " eps " + fmt(eps) + ": g gap " + fmt(dg, 9) +
                 ", g_inverse gap " + fmt(di, 9);
        return false;
      }
    }
  }
  detail = "100x100 grid, worst gap " + fmt(worst, 9);
  return true;
}

bool criterion6(std::string& detail, double limit_s) {
  Stopwatch sw;
  CoverageReport report = run_experiment(no_shift_config());
  const LabelSummary& s = summary_of(report, "accurate-stl", true);
  double elapsed = sw.seconds();
  detail = "mean coverage " + fmt(s.mean_coverage) + " (threshold 0.78), min rep " +
           fmt(s.min_coverage) + ", " + std::to_string(s.infeasible_reps) + " infeasible reps";
  if (elapsed > limit_s) {
    detail += "; over the " + fmt(limit_s, 0) + "s budget";
    return false;
  }
  return s.mean_coverage >= 0.78 && s.infeasible_reps == 0;
}

bool criterion7(std::string& detail, SharedRuns& shared, double limit_s) {
  Stopwatch sw;
  const CoverageReport& r = shared.shift();
  double elapsed = sw.seconds();

  bool ok = true;
  std::string cov;
  for (const char* label : {"accurate-stl", "interp1-stl", "interp2-stl"}) {
    const LabelSummary& s = summary_of(r, label, true);
    ok = ok && s.mean_coverage >= 0.80 && s.infeasible_reps == 0;
    cov += std::string(label) + " " + fmt(s.mean_coverage) + " ";
  }
  double base = summary_of(r, "accurate-stl", false).mean_coverage;
  double robust = summary_of(r, "accurate-stl", true).mean_coverage;
  ok = ok && base < robust;
  detail = "robust coverage: " + cov + "| eps=0 baseline " + fmt(base) +
           (base < robust ? " < robust" : " NOT below robust");
  if (elapsed > limit_s) {
    detail += "; over the " + fmt(limit_s, 0) + "s budget";
    return false;
  }
  return ok;
}

bool criterion8(std::string& detail, SharedRuns& shared, double limit_s) {
  Stopwatch sw;
  bool ok = true;
  std::string parts;
  for (int agents : {3, 5}) {
    const CoverageReport& r = shared.swarm(agents);
    double eps = agents == 3 ? shared.eps3 : shared.eps5;
    parts += "L=" + std::to_string(agents) + " (eps " + fmt(eps, 3) + "):";
    for (const char* label : {"accurate-strel", "interp1-strel", "interp2-strel"}) {
      const LabelSummary& s = summary_of(r, label, true);
      ok = ok && s.mean_coverage >= 0.80 && s.infeasible_reps == 0;
      parts += " " + fmt(s.mean_coverage);
    }
    parts += "  ";
  }
  double elapsed = sw.seconds();
  detail = "robust coverage " + parts;
  if (elapsed > limit_s) {
    detail += "; over the " + fmt(limit_s, 0) + "s budget";
    return false;
  }
  return ok;
}

bool criterion9(std::string& detail, SharedRuns& shared) {
  struct RunRef {
    const char* name;
    const CoverageReport* report;
    const char* acc;
    const char* i1;
    const char* i2;
  };
  std::vector<RunRef> runs = {
      {"stl-shift", &shared.shift(), "accurate-stl", "interp1-stl", "interp2-stl"},
      {"swarm-3", &shared.swarm(3), "accurate-strel", "interp1-strel", "interp2-strel"},
      {"swarm-5", &shared.swarm(5), "accurate-strel", "interp1-strel", "interp2-strel"},
  };
  bool ok = true;
  detail.clear();
  for (const auto& run : runs) {
    double m_acc, se_acc, m_i1, se_i1, m_i2, se_i2;
    rho_star_stats(*run.report, run.acc, m_acc, se_acc);
    rho_star_stats(*run.report, run.i1, m_i1, se_i1);
    rho_star_stats(*run.report, run.i2, m_i2, se_i2);
    double slack_ai2 = std::sqrt(se_acc * se_acc + se_i2 * se_i2);
    double slack_i2i1 = std::sqrt(se_i2 * se_i2 + se_i1 * se_i1);
    bool first = m_acc - m_i2 >= -slack_ai2;
    bool second = m_i2 - m_i1 >= -slack_i2i1;
    ok = ok && first && second;
    detail += std::string(run.name) + ": accurate " + fmt(m_acc, 3) + " >= interp2 " +
              fmt(m_i2, 3) + " >= interp1 " + fmt(m_i1, 3) +
              (first && second ? "" : " VIOLATED") + "  ";
  }
  return ok;
}

bool criterion10(std::string& detail, SharedRuns& shared) {
  double off_acc = 0, off_i1 = 0, off_i2 = 0;
  double on_acc = 0, on_i1 = 0, on_i2 = 0;
  for (int agents : {3, 5}) {
    const CoverageReport& r = shared.swarm(agents);
    off_acc += timing_of(r, "accurate-strel", true).mean_calib_seconds;
    off_i1 += timing_of(r, "interp1-strel", true).mean_calib_seconds;
    off_i2 += timing_of(r, "interp2-strel", true).mean_calib_seconds;
    on_acc += timing_of(r, "accurate-strel", true).mean_verdict_seconds;
    on_i1 += timing_of(r, "interp1-strel", true).mean_verdict_seconds;
    on_i2 += timing_of(r, "interp2-strel", true).mean_verdict_seconds;
  }
  bool offline = off_acc > off_i2 && off_i2 > off_i1;
  bool online = on_i1 > on_i2 && on_i2 >= on_acc;
  detail = "offline calib s/rep: accurate " + fmt(off_acc, 6) + " > interp2 " + fmt(off_i2, 6) +
           " > interp1 " + fmt(off_i1, 6) + (offline ? "" : " VIOLATED") +
           "; online s/verdict: interp1 " + fmt(on_i1, 8) + " > interp2 " + fmt(on_i2, 8) +
           " >= accurate " + fmt(on_acc, 8) + (online ? "" : " VIOLATED");
  return offline && online;
}

bool criterion11(std::string& detail) {
  std::vector<std::string> fails;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) fails.push_back(what);
  };

  // formula lengths
  expect(formula_length(*parse_formula("s[0] >= 0", Dialect::Stl)) == 0, "length(predicate)=0");
  expect(formula_length(*parse_formula("true", Dialect::Stl)) == 0, "length(true)=0");
  expect(formula_length(*parse_formula("G[0,5] (F[0,3] (s[0] >= 0))", Dialect::Stl)) == 8,
         "length(G[0,5]F[0,3] pred)=8");
  expect(formula_length(*parse_formula("(s[0] >= 0) R[0,6] (s[1] >= 0)", Dialect::Strel)) == 0,
         "length(pred R[0,6] pred)=0");

  // robust quantile index chain: K=20, delta=0.2, eps=0.05
  {
    std::vector<double> scores(20);
    std::iota(scores.begin(), scores.end(), 1.0);
    QuantileResult r = robust_quantile(scores, 0.2, DivergenceSpec::total_variation(0.05));
    expect(r.feasible, "chain feasible");
    expect(r.rank == 18, "chain rank 18");
    expect(r.value == 18.0, "chain value 18");
    expect(std::abs(r.level - 0.8925) <= 1e-9, "chain level 0.8925");
  }
  {
    QuantileResult v = vanilla_quantile({1.0, 2.0, 3.0, 4.0}, 0.2);
    expect(v.feasible && v.rank == 4 && v.value == 4.0, "vanilla K=4 rank 4");
  }
  {
    QuantileResult v = vanilla_quantile({1.0, 2.0, 3.0}, 0.1);  // (K+1)(1-delta) > K
    expect(!v.feasible && v.value == kPlusInf, "vanilla infeasible -> +inf");
  }
  for (int k : {10, 1000, 100000}) {
    std::vector<double> scores(k);
    std::iota(scores.begin(), scores.end(), 1.0);
    QuantileResult r = robust_quantile(scores, 0.2, DivergenceSpec::total_variation(0.2));
    expect(!r.feasible && r.value == kPlusInf, "eps >= delta infeasible for any K");
  }

  // g_inverse point value
  expect(std::abs(g_inverse(DivergenceSpec::total_variation(0.05), 0.8) - 0.85) <= 1e-9,
         "g_inverse(0.8)=0.85 at eps 0.05");
  expect(std::abs(g_of(DivergenceSpec::total_variation(0.05), 0.9) - 0.85) <= 1e-9,
         "g(0.9)=0.85 at eps 0.05");

  // minimum calibration sizes
  {
    auto a = min_calibration_size(0.2, DivergenceSpec::total_variation(0.1));
    auto b = min_calibration_size(0.2, DivergenceSpec::total_variation(0.0));
    auto c = min_calibration_size(0.2, DivergenceSpec::total_variation(0.25));
    expect(a.has_value() && *a == 9, "min K 9 at eps 0.1");
    expect(b.has_value() && *b == 4, "min K 4 at eps 0");
    expect(!c.has_value(), "infeasible at eps 0.25");
  }

  if (fails.empty()) {
    detail = "formula-length, quantile-index, g/g_inverse, and min-K point values all hold";
    return true;
  }
  detail = "failed: ";
  for (const auto& f : fails) detail += f + "; ";
  return false;
}

// ---- driver -----------------------------------------------------------------

bool dispatch(int n, SharedRuns& shared, std::string& detail) {
  switch (n) {
    case 1: return criterion1(detail);
    case 2: return criterion2(detail);
    case 3: return criterion3(detail);
    case 4: return criterion4(detail);
    case 5: return criterion5(detail);
    case 6: return criterion6(detail, 300.0);
    case 7: return criterion7(detail, shared, 900.0);
    case 8: return criterion8(detail, shared, 1200.0);
    case 9: return criterion9(detail, shared);
    case 10: return criterion10(detail, shared);
    case 11: return criterion11(detail);
  }
  detail = "unknown criterion";
  return false;
}

const char* kNames[] = {
    "",
    "STL semantics vs brute-force oracle",
    "STREL reach/escape vs walk enumeration",
    "robust sign agrees with boolean semantics",
    "robust quantile at eps=0 reduces to vanilla",
    "TV closed form vs generic convex path",
    "coverage without shift",
    "coverage under sigma shift, robust vs baseline",
    "swarm coverage under speed shift",
    "conservatism ordering of the three methods",
    "offline/online cost ordering",
    "point-value anchors",
};

}  // namespace

int main(int argc, char** argv) {
  std::string sel = argc > 1 ? argv[1] : "all";
  std::vector<int> todo;
  if (sel == "all") {
    for (int i = 1; i <= 11; ++i) todo.push_back(i);
  } else if (sel == "7-10") {
    todo = {7, 8, 9, 10};
  } else {
    try {
      int n = std::stoi(sel);
      if (n < 1 || n > 11) throw std::out_of_range("criterion");
      todo = {n};
    } catch (const std::exception&) {
      std::fprintf(stderr, "usage: acceptance [all|7-10|1..11]\n");
      return 2;
    }
  }

  SharedRuns shared;
  int failures = 0;
  for (int n : todo) {
    std::string detail;
    Stopwatch sw;
    bool pass = false;
    try {
      pass = dispatch(n, shared, detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s (%.1fs) %s\n", pass ? "PASS" : "FAIL", n, kNames[n],
                sw.seconds(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  return failures;
}
