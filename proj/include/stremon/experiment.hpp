#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stremon/dataset.hpp"
#include "stremon/systems.hpp"

namespace stremon {

// Weight spec mini-language for CLI flags and configs:
//   proximity:THRESHOLD[:unit|scaled[:SCALE]]
//   adjacency:A-B,C-D,...[:unit|scaled[:SCALE]]   (1-based agent ids)
//   explicit:FILE.csv
inline WeightSpec resolve_weight_spec(const std::string& desc, int agents) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : desc) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  auto rule_of = [&](size_t idx, WeightRule& rule, double& scale) {
    if (idx >= parts.size()) return;
    if (parts[idx] == "unit") {
      rule = WeightRule::Unit;
    } else if (parts[idx] == "scaled") {
      rule = WeightRule::ScaledDistance;
      if (idx + 1 < parts.size()) scale = detail::parse_num(parts[idx + 1], "weight spec scale");
    } else {
      throw std::invalid_argument("weight spec: unknown rule '" + parts[idx] + "'");
    }
  };
  if (parts[0] == "proximity") {
    if (parts.size() < 2) throw std::invalid_argument("weight spec: proximity needs a threshold");
    double threshold = detail::parse_num(parts[1], "weight spec threshold");
    WeightRule rule = WeightRule::Unit;
    double scale = 1.0;
    rule_of(2, rule, scale);
    return WeightSpec::proximity(threshold, rule, scale);
  }
  if (parts[0] == "adjacency") {
    if (parts.size() < 2) throw std::invalid_argument("weight spec: adjacency needs a pair list");
    std::vector<std::pair<int, int>> edges;
    std::stringstream ss(parts[1]);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      size_t dash = pair.find('-');
      if (dash == std::string::npos)
        throw std::invalid_argument("weight spec: pairs look like A-B");
      int a = static_cast<int>(detail::parse_int(pair.substr(0, dash), "weight spec pair"));
      int b = static_cast<int>(detail::parse_int(pair.substr(dash + 1), "weight spec pair"));
      if (a < 1 || b < 1 || a > agents || b > agents || a == b)
        throw std::invalid_argument("weight spec: pair " + pair + " is not valid for " +
                                    std::to_string(agents) + " agents");
      edges.emplace_back(a - 1, b - 1);
    }
    WeightRule rule = WeightRule::Unit;
    double scale = 1.0;
    rule_of(2, rule, scale);
    return WeightSpec::fixed_adjacency(std::move(edges), rule, scale);
  }
  if (parts[0] == "explicit") {
    if (parts.size() < 2) throw std::invalid_argument("weight spec: explicit needs a file path");
    return load_weight_table(parts[1], agents);
  }
  throw std::invalid_argument("weight spec: unknown mode '" + parts[0] +
                              "' (expected proximity, adjacency, or explicit)");
}

struct ExperimentConfig {
  // system: "noisy-reference", "swarm-lite", or "files"
  std::string system = "noisy-reference";

  // noisy-reference: sine_reference curve plus per-distribution noise
  int nr_steps = 110;
  double nr_amplitude = 30.0;
  double nr_period = 70.0;
  double nr_slope = 0.0;
  double nr_offset = 0.0;
  double sigma_train = 3.0;
  double sigma_test = 3.5;

  // swarm-lite: shared geometry, per-distribution reference speed
  SwarmSpec swarm = SwarmSpec::defaults();
  double speed_train = 6.0;
  double speed_test = 5.9;

  // files
  std::string train_file;
  std::string test_file;

  std::string formula;
  Dialect dialect = Dialect::Stl;
  std::vector<Method> methods{Method::AccurateStl};
  double delta = 0.2;
  double epsilon = 0.0;
  int k = 500;
  int m = 100;
  int reps = 50;
  int t = 100;
  int tau0 = 0;
  int agent = -1;  // 0-based; STREL methods only
  BallNorm ball = BallNorm::L2;

  std::string predictor = "linear-ar";  // constant-velocity | linear-ar
  int ar_order = 2;

  int train_size = 300;  // predictor training split
  int alpha_size = 200;  // interpretable-normalization split
  int calib_pool = 0;    // 0 -> 2k
  int test_pool = 0;     // 0 -> 2m

  std::string weights;  // weight spec string; STREL methods only
  std::uint64_t seed = 1;
};

struct RepResult {
  std::string label;  // method name
  bool robust = true; // false for the matched eps = 0 baseline
  int rep = 0;
  double coverage = 0;
  bool feasible = true;
  double c_tilde = kPlusInf;
};

struct PairRow {
  std::string label;
  bool robust = true;
  int rep = 0;
  int test_index = 0;
  int trial_id = 0;
  double rho_star = kMinusInf;
  double rho_true = 0;
  bool covered = true;
};

struct LabelSummary {
  std::string label;
  bool robust = true;
  double epsilon = 0;
  double mean_coverage = 0;
  double min_coverage = 1;
  std::array<int, 10> histogram{};
  int infeasible_reps = 0;
};

struct TimingSummary {
  std::string label;
  bool robust = true;
  double mean_calib_seconds = 0;
  double mean_verdict_seconds = 0;
};

struct CoverageReport {
  Json config;
  std::vector<RepResult> reps;
  std::vector<PairRow> pairs;
  std::vector<LabelSummary> summaries;
  std::vector<TimingSummary> timings;
};

inline Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["system"] = c.system;
  j["noisy_reference"] = {{"steps", c.nr_steps},     {"amplitude", c.nr_amplitude},
                          {"period", c.nr_period},   {"slope", c.nr_slope},
                          {"offset", c.nr_offset},   {"sigma_train", c.sigma_train},
                          {"sigma_test", c.sigma_test}};
  Json obstacles = Json::array();
  for (const auto& o : c.swarm.obstacles) obstacles.push_back({o[0], o[1], o[2], o[3]});
  j["swarm"] = {{"agents", c.swarm.agents},
                {"steps", c.swarm.steps},
                {"goal", {c.swarm.goal[0], c.swarm.goal[1], c.swarm.goal[2]}},
                {"obstacles", obstacles},
                {"start", {c.swarm.start[0], c.swarm.start[1], c.swarm.start[2]}},
                {"start_spread", c.swarm.start_spread},
                {"noise", c.swarm.noise},
                {"goal_gain", c.swarm.goal_gain},
                {"cohesion_gain", c.swarm.cohesion_gain},
                {"separation_gain", c.swarm.separation_gain},
                {"separation_dist", c.swarm.separation_dist},
                {"obstacle_gain", c.swarm.obstacle_gain},
                {"obstacle_margin", c.swarm.obstacle_margin},
                {"speed_train", c.speed_train},
                {"speed_test", c.speed_test}};
  j["train_file"] = c.train_file;
  j["test_file"] = c.test_file;
  j["formula"] = c.formula;
  j["dialect"] = dialect_to_string(c.dialect);
  Json methods = Json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  j["methods"] = std::move(methods);
  j["delta"] = c.delta;
  j["epsilon"] = c.epsilon;
  j["divergence"] = "tv";
  j["k"] = c.k;
  j["m"] = c.m;
  j["reps"] = c.reps;
  j["t"] = c.t;
  j["tau0"] = c.tau0;
  j["agent"] = c.agent;
  j["ball"] = ball_name(c.ball);
  j["predictor"] = c.predictor;
  j["ar_order"] = c.ar_order;
  j["train_size"] = c.train_size;
  j["alpha_size"] = c.alpha_size;
  j["calib_pool"] = c.calib_pool;
  j["test_pool"] = c.test_pool;
  j["weights"] = c.weights;
  j["seed"] = c.seed;
  return j;
}

namespace detail {

struct ExperimentData {
  std::vector<Trajectory> predictor_train;
  std::vector<Trajectory> alpha_set;
  std::vector<Trajectory> calib_pool;
  std::vector<Trajectory> test_pool;
};

inline ExperimentData build_data(const ExperimentConfig& cfg) {
  ExperimentData data;
  int calib_pool = cfg.calib_pool > 0 ? cfg.calib_pool : 2 * cfg.k;
  int test_pool = cfg.test_pool > 0 ? cfg.test_pool : 2 * cfg.m;
  if (calib_pool < cfg.k) throw std::invalid_argument("calibration pool smaller than K");
  if (test_pool < cfg.m) throw std::invalid_argument("test pool smaller than M");

  Rng master(cfg.seed);
  std::uint64_t s_train = master.next_u64();
  std::uint64_t s_alpha = master.next_u64();
  std::uint64_t s_calib = master.next_u64();
  std::uint64_t s_test = master.next_u64();

  if (cfg.system == "noisy-reference") {
    auto base = sine_reference(cfg.nr_steps, cfg.nr_amplitude, cfg.nr_period, cfg.nr_slope,
                               cfg.nr_offset);
    int id = 1;
    data.predictor_train = generate_noisy_reference(base, cfg.sigma_train, cfg.train_size, s_train, id);
    id += cfg.train_size;
    data.alpha_set = generate_noisy_reference(base, cfg.sigma_train, cfg.alpha_size, s_alpha, id);
    id += cfg.alpha_size;
    data.calib_pool = generate_noisy_reference(base, cfg.sigma_train, calib_pool, s_calib, id);
    id += calib_pool;
    data.test_pool = generate_noisy_reference(base, cfg.sigma_test, test_pool, s_test, id);
  } else if (cfg.system == "swarm-lite") {
    SwarmSpec train_spec = cfg.swarm;
    train_spec.speed = cfg.speed_train;
    SwarmSpec test_spec = cfg.swarm;
    test_spec.speed = cfg.speed_test;
    int id = 1;
    data.predictor_train = generate_swarm_lite(train_spec, cfg.train_size, s_train, id);
    id += cfg.train_size;
    data.alpha_set = generate_swarm_lite(train_spec, cfg.alpha_size, s_alpha, id);
    id += cfg.alpha_size;
    data.calib_pool = generate_swarm_lite(train_spec, calib_pool, s_calib, id);
    id += calib_pool;
    data.test_pool = generate_swarm_lite(test_spec, test_pool, s_test, id);
  } else if (cfg.system == "files") {
    if (cfg.train_file.empty() || cfg.test_file.empty())
      throw std::invalid_argument("files system needs --traj train and test files");
    auto train = load_trajectories(cfg.train_file);
    int rest = static_cast<int>(train.size()) - cfg.train_size - cfg.alpha_size;
    if (rest < cfg.k)
      throw std::invalid_argument("training pool too small for the requested splits");
    auto parts = split_dataset(train, {cfg.train_size, cfg.alpha_size, rest}, s_train);
    data.predictor_train = std::move(parts[0]);
    data.alpha_set = std::move(parts[1]);
    data.calib_pool = std::move(parts[2]);
    data.test_pool = load_trajectories(cfg.test_file);
    if (static_cast<int>(data.test_pool.size()) < cfg.m)
      throw std::invalid_argument("test pool smaller than M");
  } else {
    throw std::invalid_argument("unknown system '" + cfg.system + "'");
  }
  return data;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// The repeated-trial coverage protocol: fit the predictor and normalization
// once, then per repetition draw K calibration and M test trajectories from
// the pools (without replacement, seeded), calibrate every method at the
// configured epsilon plus the matched eps = 0 baseline, verify every test
// trajectory, and record 1[rho_true >= rho*].
inline CoverageReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (cfg.k < 1 || cfg.m < 1) throw std::invalid_argument("K and M must be >= 1");
  if (cfg.methods.empty()) throw std::invalid_argument("no methods selected");
  if (cfg.epsilon < 0 || cfg.epsilon > 1) throw std::invalid_argument("epsilon must be in [0,1]");

  detail::ExperimentData data = detail::build_data(cfg);

  PredictorModel predictor;
  if (cfg.predictor == "constant-velocity") {
    predictor = make_constant_velocity();
    predictor.train_size = static_cast<int>(data.predictor_train.size());
  } else if (cfg.predictor == "linear-ar") {
    predictor = fit_linear_ar(data.predictor_train, cfg.ar_order, "predictor-train");
  } else {
    throw std::invalid_argument("unknown predictor '" + cfg.predictor + "'");
  }

  bool any_strel = false;
  for (Method m : cfg.methods) any_strel = any_strel || method_is_strel(m);
  WeightSpec weights;
  if (any_strel) {
    if (cfg.weights.empty())
      throw std::invalid_argument("STREL methods need --weights");
    weights = resolve_weight_spec(cfg.weights, data.calib_pool.front().agents);
  }

  CalibrationInputs inputs;
  inputs.formula_text = cfg.formula;
  inputs.dialect = cfg.dialect;
  inputs.delta = cfg.delta;
  inputs.divergence = DivergenceSpec::total_variation(cfg.epsilon);
  inputs.tau0 = cfg.tau0;
  inputs.t = cfg.t;
  inputs.agent = cfg.agent;
  inputs.ball = cfg.ball;
  inputs.weights = any_strel ? &weights : nullptr;

  // normalization tables are fit once, on data disjoint from every
  // per-repetition calibration draw
  std::vector<NonconformityScorer> scorers;
  scorers.reserve(cfg.methods.size());
  for (Method m : cfg.methods) scorers.emplace_back(m, inputs, data.alpha_set, predictor);

  DivergenceSpec div_robust = DivergenceSpec::total_variation(cfg.epsilon);
  DivergenceSpec div_base = DivergenceSpec::total_variation(0.0);

  CoverageReport report;
  report.config = config_to_json(cfg);

  struct Accum {
    double calib_seconds = 0;
    double verdict_seconds = 0;
    long verdicts = 0;
  };
  std::map<std::pair<std::string, bool>, Accum> accum;

  Rng master(cfg.seed);
  for (int i = 0; i < 4; ++i) master.next_u64();  // data-generation streams
  std::uint64_t rep_base = master.next_u64();

  for (int rep = 0; rep < cfg.reps; ++rep) {
    Rng rep_rng(rep_base + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(rep + 1));
    std::vector<int> cperm = rep_rng.permutation(static_cast<int>(data.calib_pool.size()));
    std::vector<int> tperm = rep_rng.permutation(static_cast<int>(data.test_pool.size()));

    for (size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const NonconformityScorer& sc = scorers[mi];
      std::string label = method_name(cfg.methods[mi]);

      auto t0 = std::chrono::steady_clock::now();
      std::vector<double> scores;
      std::vector<int> ids;
      scores.reserve(cfg.k);
      for (int i = 0; i < cfg.k; ++i) {
        const Trajectory& x = data.calib_pool[cperm[i]];
        scores.push_back(sc.score(x));
        ids.push_back(x.trial_id);
      }
      CalibrationArtifact art_r =
          assemble_artifact(sc, scores, ids, predictor, cfg.delta, div_robust);
      CalibrationArtifact art_b =
          assemble_artifact(sc, scores, ids, predictor, cfg.delta, div_base);
      double calib_time = detail::seconds_since(t0);
      accum[{label, true}].calib_seconds += calib_time;
      accum[{label, false}].calib_seconds += calib_time;

      bool strel = method_is_strel(cfg.methods[mi]);
      const WeightSpec* w = strel ? &weights : nullptr;
      int covered_r = 0, covered_b = 0;
      for (int i = 0; i < cfg.m; ++i) {
        const Trajectory& x = data.test_pool[tperm[i]];
        double rho_true = strel ? eval_robust_strel(sc.formula(), x, weights, cfg.tau0, cfg.agent)
                                : eval_robust_stl(sc.formula(), x, cfg.tau0);

        auto tv0 = std::chrono::steady_clock::now();
        VerificationVerdict vr = verify(art_r, x, predictor, w);
        accum[{label, true}].verdict_seconds += detail::seconds_since(tv0);
        accum[{label, true}].verdicts += 1;

        auto tv1 = std::chrono::steady_clock::now();
        VerificationVerdict vb = verify(art_b, x, predictor, w);
        accum[{label, false}].verdict_seconds += detail::seconds_since(tv1);
        accum[{label, false}].verdicts += 1;

        bool cov_r = rho_true >= vr.rho_star;
        bool cov_b = rho_true >= vb.rho_star;
        covered_r += cov_r;
        covered_b += cov_b;
        report.pairs.push_back({label, true, rep, i, x.trial_id, vr.rho_star, rho_true, cov_r});
        report.pairs.push_back({label, false, rep, i, x.trial_id, vb.rho_star, rho_true, cov_b});
      }
      report.reps.push_back({label, true, rep, static_cast<double>(covered_r) / cfg.m,
                             art_r.feasible, art_r.c_tilde});
      report.reps.push_back({label, false, rep, static_cast<double>(covered_b) / cfg.m,
                             art_b.feasible, art_b.c_tilde});
    }
  }

  for (size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    std::string label = method_name(cfg.methods[mi]);
    for (bool robust : {true, false}) {
      LabelSummary s;
      s.label = label;
      s.robust = robust;
      s.epsilon = robust ? cfg.epsilon : 0.0;
      double sum = 0;
      int n = 0;
      for (const auto& r : report.reps) {
        if (r.label != label || r.robust != robust) continue;
        sum += r.coverage;
        s.min_coverage = std::min(s.min_coverage, r.coverage);
        int bin = std::min(9, static_cast<int>(r.coverage * 10.0));
        s.histogram[bin] += 1;
        s.infeasible_reps += r.feasible ? 0 : 1;
        ++n;
      }
      s.mean_coverage = n ? sum / n : 0.0;
      report.summaries.push_back(std::move(s));

      const Accum& a = accum[{label, robust}];
      TimingSummary ts;
      ts.label = label;
      ts.robust = robust;
      ts.mean_calib_seconds = cfg.reps ? a.calib_seconds / cfg.reps : 0.0;
      ts.mean_verdict_seconds = a.verdicts ? a.verdict_seconds / a.verdicts : 0.0;
      report.timings.push_back(std::move(ts));
    }
  }
  return report;
}

// Write coverage.csv, pairs.csv, summary.json (all byte-deterministic under a
// fixed config) and timing.json (wall-clock, varies run to run) into out_dir.
inline void emit_report(const CoverageReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };

  std::ostringstream cov;
  cov << "label,robust,epsilon,rep,coverage,feasible,c_tilde\n";
  double eps = report.config.at("epsilon").get<double>();
  for (const auto& r : report.reps)
    cov << r.label << "," << (r.robust ? 1 : 0) << "," << detail::num_str(r.robust ? eps : 0.0)
        << "," << r.rep << "," << detail::num_str(r.coverage) << "," << (r.feasible ? 1 : 0)
        << "," << detail::num_str(r.c_tilde) << "\n";
  detail::write_text(path("coverage.csv"), cov.str());

  std::ostringstream pairs;
  pairs << "label,robust,rep,test_index,trial,rho_star,rho_true,covered\n";
  for (const auto& p : report.pairs)
    pairs << p.label << "," << (p.robust ? 1 : 0) << "," << p.rep << "," << p.test_index << ","
          << p.trial_id << "," << detail::num_str(p.rho_star) << ","
          << detail::num_str(p.rho_true) << "," << (p.covered ? 1 : 0) << "\n";
  detail::write_text(path("pairs.csv"), pairs.str());

  Json summary;
  summary["config"] = report.config;
  Json labels = Json::array();
  for (const auto& s : report.summaries) {
    Json e;
    e["label"] = s.label;
    e["robust"] = s.robust;
    e["epsilon"] = s.epsilon;
    e["mean_coverage"] = s.mean_coverage;
    e["min_coverage"] = s.min_coverage;
    e["histogram"] = s.histogram;
    e["infeasible_reps"] = s.infeasible_reps;
    labels.push_back(std::move(e));
  }
  summary["labels"] = std::move(labels);
  save_json(path("summary.json"), summary);

  Json timing;
  Json rows = Json::array();
  for (const auto& t : report.timings) {
    Json e;
    e["label"] = t.label;
    e["robust"] = t.robust;
    e["mean_calib_seconds"] = t.mean_calib_seconds;
    e["mean_verdict_seconds"] = t.mean_verdict_seconds;
    rows.push_back(std::move(e));
  }
  timing["timings"] = std::move(rows);
  save_json(path("timing.json"), timing);
}

}  // namespace stremon
