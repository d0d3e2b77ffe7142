// Command-line front end: dataset generation, predictor fitting, calibration,
// verification, shift estimation, coverage experiments, and one-shot
// monitoring. Exit codes: 0 success, 2 infeasible-only result, 1 error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stremon/stremon.hpp"

namespace {

using namespace stremon;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

// Shared predictor selection: a fitted model file, the fit-free
// constant-velocity built-in, or an external-predictions CSV.
struct PredictorFlags {
  std::string model_file;
  std::string predictions_file;
  bool constant_velocity = false;

  void attach(CLI::App* cmd) {
    auto* a = cmd->add_option("--predictor", model_file, "fitted predictor model JSON");
    auto* b = cmd->add_flag("--constant-velocity", constant_velocity,
                            "use the constant-velocity predictor (no model file)");
    auto* c = cmd->add_option("--predictions", predictions_file,
                              "external predictions CSV (trial,time,agent,x0,...)");
    a->excludes(b);
    a->excludes(c);
    b->excludes(c);
  }

  PredictorModel resolve() const {
    if (!model_file.empty()) return predictor_from_json(load_json(model_file));
    if (!predictions_file.empty())
      return make_external(load_external_predictions(predictions_file), predictions_file);
    if (constant_velocity) return make_constant_velocity();
    throw std::runtime_error(
        "choose a predictor: --predictor FILE, --constant-velocity, or --predictions FILE");
  }
};

void emit_json(const Json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else
    save_json(out, j);
}

void check_divergence(const std::string& d) {
  if (d != "tv")
    throw std::runtime_error("only the total-variation divergence ('tv') is available here");
}

int cmd_generate(const std::string& system, int count, std::uint64_t seed, int steps,
                 double sigma, double amplitude, double period, double slope, double offset,
                 int agents, double speed, double noise, const std::string& goal,
                 const std::vector<std::string>& obstacles, const std::string& out) {
  std::vector<Trajectory> xs;
  if (system == "noisy-reference") {
    auto base = sine_reference(steps, amplitude, period, slope, offset);
    xs = generate_noisy_reference(base, sigma, count, seed);
  } else if (system == "swarm-lite") {
    SwarmSpec spec = SwarmSpec::defaults();
    spec.agents = agents;
    spec.steps = steps;
    spec.speed = speed;
    spec.noise = noise;
    if (!goal.empty()) {
      auto f = detail::split_csv(goal);
      if (f.size() != 3) throw std::runtime_error("--goal needs x,y,z");
      for (int d = 0; d < 3; ++d) spec.goal[d] = detail::parse_num(f[d], "--goal");
    }
    if (!obstacles.empty()) {
      spec.obstacles.clear();
      for (const auto& o : obstacles) {
        if (o == "none") continue;
        auto f = detail::split_csv(o);
        if (f.size() != 4) throw std::runtime_error("--obstacle needs cx,cy,cz,radius");
        spec.obstacles.push_back({detail::parse_num(f[0], "--obstacle"),
                                  detail::parse_num(f[1], "--obstacle"),
                                  detail::parse_num(f[2], "--obstacle"),
                                  detail::parse_num(f[3], "--obstacle")});
      }
    }
    xs = generate_swarm_lite(spec, count, seed);
  } else {
    throw std::runtime_error("unknown system '" + system +
                             "' (expected noisy-reference or swarm-lite)");
  }
  save_trajectories(out, xs);
  std::cerr << "wrote " << xs.size() << " trajectories to " << out << "\n";
  return kExitOk;
}

int cmd_fit_predictor(const std::string& traj, const std::string& kind, int order,
                      const std::string& out) {
  auto train = load_trajectories(traj);
  PredictorModel m;
  if (kind == "constant-velocity") {
    m = make_constant_velocity();
    m.dataset_id = traj;
    m.train_size = static_cast<int>(train.size());
  } else if (kind == "linear-ar") {
    m = fit_linear_ar(train, order, traj);
    if (m.ridge_used)
      std::cerr << "note: normal equations were rank deficient; ridge fallback used\n";
  } else {
    throw std::runtime_error("unknown predictor kind '" + kind + "'");
  }
  save_json(out, predictor_to_json(m));
  std::cerr << "wrote predictor model to " << out << "\n";
  return kExitOk;
}

struct CalibrationFlags {
  std::string formula, dialect = "stl", method;
  double delta = 0.1, epsilon = 0.0;
  std::string divergence = "tv";
  int t = 1, tau0 = 0, agent = 1;
  std::string ball = "l2";
  std::string weights;

  void attach(CLI::App* cmd, bool with_conformal) {
    cmd->add_option("--formula", formula, "formula text")->required();
    cmd->add_option("--dialect", dialect, "stl | strel");
    cmd->add_option("--method", method,
                    "accurate-stl | interp1-stl | interp2-stl | accurate-strel | "
                    "interp1-strel | interp2-strel")
        ->required();
    if (with_conformal) {
      cmd->add_option("--delta", delta, "miscoverage budget in (0,1)");
      cmd->add_option("--epsilon", epsilon, "distribution shift budget");
      cmd->add_option("--divergence", divergence, "divergence ball type (tv)");
    }
    cmd->add_option("--t", t, "last observed time step");
    cmd->add_option("--tau0", tau0, "verification time");
    cmd->add_option("--agent", agent, "verification agent, 1-based (STREL methods)");
    cmd->add_option("--ball", ball, "state-ball norm: l2 | linf");
    cmd->add_option("--weights", weights,
                    "weight spec: proximity:TH[:unit|scaled[:S]] | adjacency:A-B,..[:rule] | "
                    "explicit:FILE");
  }

  CalibrationInputs inputs(Method m, const WeightSpec* w) const {
    check_divergence(divergence);
    CalibrationInputs in;
    in.formula_text = formula;
    in.dialect = dialect_from_string(dialect);
    in.delta = delta;
    in.divergence = DivergenceSpec::total_variation(epsilon);
    in.t = t;
    in.tau0 = tau0;
    in.agent = method_is_strel(m) ? agent - 1 : -1;
    in.ball = ball_from_string(ball);
    in.weights = w;
    return in;
  }
};

int cmd_calibrate(const CalibrationFlags& flags, const PredictorFlags& pf,
                  const std::string& traj, const std::string& alpha_traj, const std::string& out) {
  Method method = method_from_string(flags.method);
  auto calib = load_trajectories(traj);
  std::vector<Trajectory> alpha_set;
  if (!alpha_traj.empty()) alpha_set = load_trajectories(alpha_traj);
  PredictorModel predictor = pf.resolve();

  WeightSpec w;
  bool strel = method_is_strel(method);
  if (strel) {
    if (flags.weights.empty()) throw std::runtime_error("STREL methods need --weights");
    w = resolve_weight_spec(flags.weights, calib.front().agents);
  }
  CalibrationArtifact art = calibrate(method, flags.inputs(method, strel ? &w : nullptr), calib,
                                      alpha_set, predictor);
  emit_json(artifact_to_json(art), out);
  if (!art.feasible) {
    std::cerr << "calibration infeasible: K = " << art.k
              << " samples cannot support the requested delta and epsilon\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_verify(const std::string& artifact_file, const PredictorFlags& pf,
               const std::string& traj, const std::string& weights_flag, const std::string& out) {
  CalibrationArtifact art = artifact_from_json(load_json(artifact_file));
  auto obs = load_trajectories(traj);
  PredictorModel predictor = pf.resolve();

  WeightSpec w;
  const WeightSpec* wp = nullptr;
  if (method_is_strel(art.method)) {
    if (weights_flag.empty()) throw std::runtime_error("STREL artifacts need --weights");
    w = resolve_weight_spec(weights_flag, obs.front().agents);
    wp = &w;
  }

  Json verdicts = Json::array();
  bool any_feasible = false;
  for (const auto& x : obs) {
    VerificationVerdict v = verify(art, x, predictor, wp);
    Json e = verdict_to_json(v);
    e["trial"] = x.trial_id;
    verdicts.push_back(std::move(e));
    any_feasible = any_feasible || v.feasible;
  }
  emit_json(verdicts, out);
  return any_feasible ? kExitOk : kExitInfeasible;
}

int cmd_estimate_shift(const CalibrationFlags& flags, const PredictorFlags& pf,
                       std::vector<std::string> methods, const std::string& train_file,
                       const std::string& test_file, const std::string& alpha_traj,
                       int grid_points, const std::string& out) {
  if (methods.empty() && !flags.method.empty()) methods = {flags.method};
  if (methods.empty()) {
    bool strel = dialect_from_string(flags.dialect) == Dialect::Strel;
    methods = strel ? std::vector<std::string>{"accurate-strel", "interp1-strel", "interp2-strel"}
                    : std::vector<std::string>{"accurate-stl", "interp1-stl", "interp2-stl"};
  }
  std::vector<Method> ms;
  for (const auto& s : methods) ms.push_back(method_from_string(s));

  auto train = load_trajectories(train_file);
  auto test = load_trajectories(test_file);
  std::vector<Trajectory> alpha_set;
  if (!alpha_traj.empty()) alpha_set = load_trajectories(alpha_traj);
  PredictorModel predictor = pf.resolve();

  bool any_strel = false;
  for (Method m : ms) any_strel = any_strel || method_is_strel(m);
  WeightSpec w;
  if (any_strel) {
    if (flags.weights.empty()) throw std::runtime_error("STREL methods need --weights");
    w = resolve_weight_spec(flags.weights, train.front().agents);
  }

  CalibrationInputs in = flags.inputs(ms.front(), any_strel ? &w : nullptr);
  in.agent = any_strel ? flags.agent - 1 : -1;
  ShiftEstimate est = estimate_epsilon(in, ms, train, test, alpha_set, predictor, grid_points);
  emit_json(shift_to_json(est), out);
  return kExitOk;
}

int cmd_monitor(const std::string& formula, const std::string& dialect, const std::string& traj,
                int tau0, int agent, const std::string& weights_flag,
                const std::string& semantics, const std::string& out) {
  FormulaPtr f = parse_formula(formula, dialect_from_string(dialect));
  auto xs = load_trajectories(traj);
  bool strel = dialect_from_string(dialect) == Dialect::Strel;

  WeightSpec w;
  if (strel) {
    if (weights_flag.empty()) throw std::runtime_error("the strel dialect needs --weights");
    w = resolve_weight_spec(weights_flag, xs.front().agents);
  }

  Json rows = Json::array();
  for (const auto& x : xs) {
    Json e;
    e["trial"] = x.trial_id;
    if (semantics == "robust") {
      double rho = strel ? eval_robust_strel(f, x, w, tau0, agent - 1)
                         : eval_robust_stl(f, x, tau0);
      e["rho"] = json_num(rho);
      e["satisfied"] = rho > 0;
    } else if (semantics == "boolean") {
      bool sat = strel ? eval_bool_strel(f, x, w, tau0, agent - 1) : eval_bool_stl(f, x, tau0);
      e["satisfied"] = sat;
    } else {
      throw std::runtime_error("--semantics must be robust or boolean");
    }
    rows.push_back(std::move(e));
  }
  emit_json(rows, out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust predictive runtime verification toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "synthesize a trajectory dataset CSV");
  std::string gen_system = "noisy-reference", gen_out, gen_goal;
  std::vector<std::string> gen_obstacles;
  int gen_count = 100, gen_steps = 110, gen_agents = 3;
  std::uint64_t gen_seed = 1;
  double gen_sigma = 3.0, gen_amp = 30.0, gen_period = 70.0, gen_slope = 0.0, gen_offset = 0.0;
  double gen_speed = 6.0, gen_noise = 0.25;
  gen->add_option("--system", gen_system, "noisy-reference | swarm-lite");
  gen->add_option("--count", gen_count, "number of trajectories");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--steps", gen_steps, "time steps per trajectory");
  gen->add_option("--sigma", gen_sigma, "noise scale (noisy-reference)");
  gen->add_option("--amplitude", gen_amp, "reference amplitude (noisy-reference)");
  gen->add_option("--period", gen_period, "reference period (noisy-reference)");
  gen->add_option("--slope", gen_slope, "reference slope (noisy-reference)");
  gen->add_option("--offset", gen_offset, "reference offset (noisy-reference)");
  gen->add_option("--agents", gen_agents, "agent count (swarm-lite)");
  gen->add_option("--speed", gen_speed, "reference speed (swarm-lite)");
  gen->add_option("--noise", gen_noise, "actuation noise (swarm-lite)");
  gen->add_option("--goal", gen_goal, "goal point x,y,z (swarm-lite)");
  gen->add_option("--obstacle", gen_obstacles,
                  "obstacle cx,cy,cz,radius (repeatable; 'none' clears the defaults)");
  gen->add_option("--out", gen_out, "output CSV path")->required();

  // fit-predictor
  auto* fit = app.add_subcommand("fit-predictor", "fit a trajectory predictor");
  std::string fit_traj, fit_kind = "linear-ar", fit_out;
  int fit_order = 2;
  fit->add_option("--traj", fit_traj, "training trajectories CSV")->required();
  fit->add_option("--kind", fit_kind, "constant-velocity | linear-ar");
  fit->add_option("--order", fit_order, "AR order p");
  fit->add_option("--out", fit_out, "output model JSON")->required();

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "conformal calibration of one method");
  CalibrationFlags cal_flags;
  PredictorFlags cal_pf;
  std::string cal_traj, cal_alpha, cal_out;
  cal_flags.attach(cal, true);
  cal_pf.attach(cal);
  cal->add_option("--traj", cal_traj, "calibration trajectories CSV")->required();
  cal->add_option("--alpha-traj", cal_alpha, "normalization trajectories CSV (interp methods)");
  cal->add_option("--out", cal_out, "artifact JSON path (stdout when omitted)");

  // verify
  auto* ver = app.add_subcommand("verify", "verify observed prefixes against an artifact");
  PredictorFlags ver_pf;
  std::string ver_art, ver_traj, ver_weights, ver_out;
  ver->add_option("--artifact", ver_art, "calibration artifact JSON")->required();
  ver->add_option("--traj", ver_traj, "observed trajectories CSV")->required();
  ver->add_option("--weights", ver_weights, "weight spec (STREL artifacts)");
  ver_pf.attach(ver);
  ver->add_option("--out", ver_out, "verdict JSON path (stdout when omitted)");

  // estimate-shift
  auto* shift = app.add_subcommand("estimate-shift", "estimate epsilon between two pools");
  CalibrationFlags shift_flags;
  PredictorFlags shift_pf;
  std::vector<std::string> shift_methods;
  std::string shift_train, shift_test, shift_alpha, shift_out;
  int shift_grid = 4096;
  shift_flags.attach(shift, false);
  shift->get_option("--method")->required(false);
  shift->add_option("--methods", shift_methods, "score types to compare (repeatable)");
  shift_pf.attach(shift);
  shift->add_option("--train", shift_train, "training-distribution trajectories CSV")->required();
  shift->add_option("--test", shift_test, "test-distribution trajectories CSV")->required();
  shift->add_option("--alpha-traj", shift_alpha, "normalization trajectories CSV");
  shift->add_option("--grid-points", shift_grid, "TV integration grid resolution");
  shift->add_option("--out", shift_out, "report JSON path (stdout when omitted)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "repeated-trial coverage experiment");
  ExperimentConfig cfg;
  std::vector<std::string> exp_methods{"accurate-stl"};
  std::string exp_dialect = "stl", exp_ball = "l2", exp_out;
  int exp_agent = 0;
  exp->add_option("--system", cfg.system, "noisy-reference | swarm-lite | files");
  exp->add_option("--formula", cfg.formula, "formula text")->required();
  exp->add_option("--dialect", exp_dialect, "stl | strel");
  exp->add_option("--method", exp_methods, "methods to run (repeatable)");
  exp->add_option("--delta", cfg.delta, "miscoverage budget");
  exp->add_option("--epsilon", cfg.epsilon, "distribution shift budget");
  exp->add_option("--k", cfg.k, "calibration size per repetition");
  exp->add_option("--m", cfg.m, "test size per repetition");
  exp->add_option("--reps", cfg.reps, "repetitions");
  exp->add_option("--t", cfg.t, "last observed time step");
  exp->add_option("--tau0", cfg.tau0, "verification time");
  exp->add_option("--agent", exp_agent, "verification agent, 1-based (STREL)");
  exp->add_option("--ball", exp_ball, "state-ball norm: l2 | linf");
  exp->add_option("--predictor", cfg.predictor, "constant-velocity | linear-ar");
  exp->add_option("--order", cfg.ar_order, "AR order");
  exp->add_option("--train-size", cfg.train_size, "predictor training split size");
  exp->add_option("--alpha-size", cfg.alpha_size, "normalization split size");
  exp->add_option("--calib-pool", cfg.calib_pool, "calibration pool size (default 2K)");
  exp->add_option("--test-pool", cfg.test_pool, "test pool size (default 2M)");
  exp->add_option("--steps", cfg.nr_steps, "steps (noisy-reference)");
  exp->add_option("--sigma-train", cfg.sigma_train, "train noise (noisy-reference)");
  exp->add_option("--sigma-test", cfg.sigma_test, "test noise (noisy-reference)");
  exp->add_option("--amplitude", cfg.nr_amplitude, "reference amplitude (noisy-reference)");
  exp->add_option("--period", cfg.nr_period, "reference period (noisy-reference)");
  exp->add_option("--slope", cfg.nr_slope, "reference slope (noisy-reference)");
  exp->add_option("--offset", cfg.nr_offset, "reference offset (noisy-reference)");
  exp->add_option("--agents", cfg.swarm.agents, "agent count (swarm-lite)");
  exp->add_option("--swarm-steps", cfg.swarm.steps, "steps (swarm-lite)");
  exp->add_option("--speed-train", cfg.speed_train, "train reference speed (swarm-lite)");
  exp->add_option("--speed-test", cfg.speed_test, "test reference speed (swarm-lite)");
  exp->add_option("--noise", cfg.swarm.noise, "actuation noise (swarm-lite)");
  exp->add_option("--train", cfg.train_file, "training pool CSV (files system)");
  exp->add_option("--test", cfg.test_file, "test pool CSV (files system)");
  exp->add_option("--weights", cfg.weights, "weight spec (STREL methods)");
  std::string exp_divergence = "tv";
  exp->add_option("--divergence", exp_divergence, "divergence ball type (tv)");
  exp->add_option("--seed", cfg.seed, "RNG seed");
  exp->add_option("--out", exp_out, "output directory")->required();

  // monitor
  auto* mon = app.add_subcommand("monitor", "one-shot semantics evaluation");
  std::string mon_formula, mon_dialect = "stl", mon_traj, mon_weights, mon_out;
  std::string mon_semantics = "robust";
  int mon_tau0 = 0, mon_agent = 1;
  mon->add_option("--formula", mon_formula, "formula text")->required();
  mon->add_option("--dialect", mon_dialect, "stl | strel");
  mon->add_option("--traj", mon_traj, "trajectories CSV")->required();
  mon->add_option("--tau0", mon_tau0, "evaluation time");
  mon->add_option("--agent", mon_agent, "evaluation agent, 1-based (strel)");
  mon->add_option("--weights", mon_weights, "weight spec (strel)");
  mon->add_option("--semantics", mon_semantics, "robust | boolean");
  mon->add_option("--out", mon_out, "output JSON path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(gen_system, gen_count, gen_seed, gen_steps, gen_sigma, gen_amp,
                          gen_period, gen_slope, gen_offset, gen_agents, gen_speed, gen_noise,
                          gen_goal, gen_obstacles, gen_out);
    if (fit->parsed()) return cmd_fit_predictor(fit_traj, fit_kind, fit_order, fit_out);
    if (cal->parsed()) return cmd_calibrate(cal_flags, cal_pf, cal_traj, cal_alpha, cal_out);
    if (ver->parsed()) return cmd_verify(ver_art, ver_pf, ver_traj, ver_weights, ver_out);
    if (shift->parsed())
      return cmd_estimate_shift(shift_flags, shift_pf, shift_methods, shift_train, shift_test,
                                shift_alpha, shift_grid, shift_out);
    if (exp->parsed()) {
      check_divergence(exp_divergence);
      cfg.dialect = dialect_from_string(exp_dialect);
      cfg.ball = ball_from_string(exp_ball);
      cfg.agent = exp_agent - 1;
      cfg.methods.clear();
      for (const auto& s : exp_methods) cfg.methods.push_back(method_from_string(s));
      CoverageReport report = run_experiment(cfg);
      emit_report(report, exp_out);
      std::cerr << "wrote coverage.csv, pairs.csv, summary.json, timing.json to " << exp_out
                << "\n";
      bool any_feasible = false;
      for (const auto& r : report.reps) any_feasible = any_feasible || r.feasible;
      return any_feasible ? kExitOk : kExitInfeasible;
    }
    if (mon->parsed())
      return cmd_monitor(mon_formula, mon_dialect, mon_traj, mon_tau0, mon_agent, mon_weights,
                         mon_semantics, mon_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
