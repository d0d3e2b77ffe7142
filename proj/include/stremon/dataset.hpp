#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "stremon/graph.hpp"
#include "stremon/predictors.hpp"
#include "stremon/rng.hpp"
#include "stremon/rprv.hpp"
#include "stremon/shift.hpp"
#include "stremon/trajectory.hpp"

namespace stremon {

using Json = nlohmann::json;

inline const char* ball_name(BallNorm b) { return b == BallNorm::L2 ? "l2" : "linf"; }

inline BallNorm ball_from_string(const std::string& s) {
  if (s == "l2") return BallNorm::L2;
  if (s == "linf") return BallNorm::Linf;
  throw std::invalid_argument("unknown ball norm '" + s + "' (expected l2 or linf)");
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// strtod with a full-consumption check; accepts inf/-inf
inline double parse_num(const std::string& s, const std::string& what) {
  if (s.empty()) throw std::invalid_argument(what + ": empty number field");
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size()) throw std::invalid_argument(what + ": malformed number '" + s + "'");
  return v;
}

inline long parse_int(const std::string& s, const std::string& what) {
  if (s.empty()) throw std::invalid_argument(what + ": empty integer field");
  const char* begin = s.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end != begin + s.size())
    throw std::invalid_argument(what + ": malformed integer '" + s + "'");
  return v;
}

inline std::string num_str(double v) {
  if (v == kPlusInf) return "inf";
  if (v == kMinusInf) return "-inf";
  return format_double(v);
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace detail

// ---- trajectory CSV --------------------------------------------------------
// Format: header `trial,time,agent,x0,...`; agent ids are 1-based in files.
// Every trial must cover times 0..T-1 for all agents exactly once.

inline std::vector<Trajectory> load_trajectories(const std::string& path) {
  auto lines = detail::read_lines(path);
  size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw std::runtime_error(path + ": empty file");
  auto header = detail::split_csv(lines[i]);
  if (header.size() < 4 || header[0] != "trial" || header[1] != "time" || header[2] != "agent")
    throw std::runtime_error(path + ": header must be trial,time,agent,x0,...");
  int dims = static_cast<int>(header.size()) - 3;

  struct Row {
    int time, agent;
    std::vector<double> x;
  };
  std::map<int, std::vector<Row>> trials;
  int agents = -1;
  for (++i; i < lines.size(); ++i) {
    std::string line = detail::trim(lines[i]);
    if (line.empty()) continue;
    std::string where = path + ":" + std::to_string(i + 1);
    auto f = detail::split_csv(line);
    if (static_cast<int>(f.size()) != dims + 3)
      throw std::runtime_error(where + ": expected " + std::to_string(dims + 3) + " fields");
    Row r;
    int trial = static_cast<int>(detail::parse_int(f[0], where));
    r.time = static_cast<int>(detail::parse_int(f[1], where));
    r.agent = static_cast<int>(detail::parse_int(f[2], where));
    if (r.time < 0) throw std::runtime_error(where + ": negative time");
    if (r.agent < 1) throw std::runtime_error(where + ": agent ids are 1-based");
    r.x.resize(dims);
    for (int d = 0; d < dims; ++d) {
      r.x[d] = detail::parse_num(f[3 + d], where);
      if (!std::isfinite(r.x[d])) throw std::runtime_error(where + ": non-finite state value");
    }
    trials[trial].push_back(std::move(r));
  }
  if (trials.empty()) throw std::runtime_error(path + ": no data rows");

  std::vector<Trajectory> out;
  for (auto& [trial, rows] : trials) {
    int maxt = 0, maxa = 0;
    for (const auto& r : rows) {
      maxt = std::max(maxt, r.time);
      maxa = std::max(maxa, r.agent);
    }
    if (agents == -1) agents = maxa;
    if (maxa != agents)
      throw std::runtime_error(path + ": trial " + std::to_string(trial) +
                               " disagrees on the number of agents");
    Trajectory x = Trajectory::zeros(agents, dims, maxt + 1);
    x.trial_id = trial;
    std::vector<char> seen(static_cast<size_t>(agents) * (maxt + 1), 0);
    for (const auto& r : rows) {
      size_t slot = static_cast<size_t>(r.time) * agents + (r.agent - 1);
      if (seen[slot])
        throw std::runtime_error(path + ": duplicate row for trial " + std::to_string(trial) +
                                 ", time " + std::to_string(r.time) + ", agent " +
                                 std::to_string(r.agent));
      seen[slot] = 1;
      for (int d = 0; d < dims; ++d) x.at(r.time, r.agent - 1, d) = r.x[d];
    }
    for (size_t s = 0; s < seen.size(); ++s)
      if (!seen[s])
        throw std::runtime_error(path + ": trial " + std::to_string(trial) +
                                 " is missing time " + std::to_string(s / agents) + ", agent " +
                                 std::to_string(s % agents + 1));
    out.push_back(std::move(x));
  }
  return out;
}

inline void save_trajectories(const std::string& path, const std::vector<Trajectory>& xs) {
  if (xs.empty()) throw std::invalid_argument("nothing to save");
  std::ostringstream out;
  out << "trial,time,agent";
  for (int d = 0; d < xs.front().dims; ++d) out << ",x" << d;
  out << "\n";
  for (const auto& x : xs) {
    for (int t = 0; t < x.steps; ++t)
      for (int l = 0; l < x.agents; ++l) {
        out << x.trial_id << "," << t << "," << (l + 1);
        for (int d = 0; d < x.dims; ++d) out << "," << detail::num_str(x.at(t, l, d));
        out << "\n";
      }
  }
  detail::write_text(path, out.str());
}

// ---- explicit weight table CSV ---------------------------------------------
// Format: `trial,time,agent_a,agent_b,weight` (1-based agents, a != b);
// missing pairs mean "no edge" (infinite weight). Symmetry is implied.

inline WeightSpec load_weight_table(const std::string& path, int agents) {
  if (agents < 1) throw std::invalid_argument("agent count must be positive");
  auto lines = detail::read_lines(path);
  size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw std::runtime_error(path + ": empty file");
  auto header = detail::split_csv(lines[i]);
  if (header != std::vector<std::string>{"trial", "time", "agent_a", "agent_b", "weight"})
    throw std::runtime_error(path + ": header must be trial,time,agent_a,agent_b,weight");

  auto table = std::make_shared<std::map<int, std::map<int, GraphSnapshot>>>();
  for (++i; i < lines.size(); ++i) {
    std::string line = detail::trim(lines[i]);
    if (line.empty()) continue;
    std::string where = path + ":" + std::to_string(i + 1);
    auto f = detail::split_csv(line);
    if (f.size() != 5) throw std::runtime_error(where + ": expected 5 fields");
    int trial = static_cast<int>(detail::parse_int(f[0], where));
    int time = static_cast<int>(detail::parse_int(f[1], where));
    int a = static_cast<int>(detail::parse_int(f[2], where));
    int b = static_cast<int>(detail::parse_int(f[3], where));
    double w = detail::parse_num(f[4], where);
    if (time < 0) throw std::runtime_error(where + ": negative time");
    if (a < 1 || a > agents || b < 1 || b > agents)
      throw std::runtime_error(where + ": agent ids must be in 1.." + std::to_string(agents));
    if (a == b) throw std::runtime_error(where + ": self-weights are not allowed");
    if (w < 0 || std::isnan(w)) throw std::runtime_error(where + ": weights must be nonnegative");
    auto& snap = (*table)[trial].try_emplace(time, GraphSnapshot::empty(agents)).first->second;
    if (snap.wt(a - 1, b - 1) != kPlusInf)
      throw std::runtime_error(where + ": duplicate weight for this pair");
    snap.set(a - 1, b - 1, w);
  }
  return WeightSpec::explicit_table(std::move(table));
}

inline void save_weight_table(const std::string& path,
                              const std::map<int, std::map<int, GraphSnapshot>>& table) {
  std::ostringstream out;
  out << "trial,time,agent_a,agent_b,weight\n";
  for (const auto& [trial, by_time] : table)
    for (const auto& [time, g] : by_time)
      for (int a = 0; a < g.agents; ++a)
        for (int b = a + 1; b < g.agents; ++b)
          if (g.wt(a, b) != kPlusInf)
            out << trial << "," << time << "," << (a + 1) << "," << (b + 1) << ","
                << detail::num_str(g.wt(a, b)) << "\n";
  detail::write_text(path, out.str());
}

// ---- external predictions CSV ----------------------------------------------
// Same columns as the trajectory CSV, but rows cover only predicted times.

inline std::shared_ptr<ExternalPredictionTable> load_external_predictions(const std::string& path) {
  auto lines = detail::read_lines(path);
  size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw std::runtime_error(path + ": empty file");
  auto header = detail::split_csv(lines[i]);
  if (header.size() < 4 || header[0] != "trial" || header[1] != "time" || header[2] != "agent")
    throw std::runtime_error(path + ": header must be trial,time,agent,x0,...");
  int dims = static_cast<int>(header.size()) - 3;

  // (trial, time) -> agent -> values
  std::map<std::pair<int, int>, std::map<int, std::vector<double>>> rows;
  for (++i; i < lines.size(); ++i) {
    std::string line = detail::trim(lines[i]);
    if (line.empty()) continue;
    std::string where = path + ":" + std::to_string(i + 1);
    auto f = detail::split_csv(line);
    if (static_cast<int>(f.size()) != dims + 3)
      throw std::runtime_error(where + ": expected " + std::to_string(dims + 3) + " fields");
    int trial = static_cast<int>(detail::parse_int(f[0], where));
    int time = static_cast<int>(detail::parse_int(f[1], where));
    int agent = static_cast<int>(detail::parse_int(f[2], where));
    if (agent < 1) throw std::runtime_error(where + ": agent ids are 1-based");
    std::vector<double> x(dims);
    for (int d = 0; d < dims; ++d) x[d] = detail::parse_num(f[3 + d], where);
    if (!rows[{trial, time}].emplace(agent, std::move(x)).second)
      throw std::runtime_error(where + ": duplicate prediction row");
  }

  auto out = std::make_shared<ExternalPredictionTable>();
  for (auto& [key, by_agent] : rows) {
    int agents = by_agent.rbegin()->first;
    if (static_cast<int>(by_agent.size()) != agents)
      throw std::runtime_error(path + ": trial " + std::to_string(key.first) + ", time " +
                               std::to_string(key.second) + " is missing agent rows");
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(agents) * dims);
    for (auto& [agent, x] : by_agent) flat.insert(flat.end(), x.begin(), x.end());
    (*out)[key.first][key.second] = std::move(flat);
  }
  return out;
}

inline void save_external_predictions(const std::string& path, const ExternalPredictionTable& table,
                                      int agents, int dims) {
  std::ostringstream out;
  out << "trial,time,agent";
  for (int d = 0; d < dims; ++d) out << ",x" << d;
  out << "\n";
  for (const auto& [trial, by_time] : table)
    for (const auto& [time, flat] : by_time) {
      if (static_cast<int>(flat.size()) != agents * dims)
        throw std::invalid_argument("prediction row size does not match agents * dims");
      for (int l = 0; l < agents; ++l) {
        out << trial << "," << time << "," << (l + 1);
        for (int d = 0; d < dims; ++d) out << "," << detail::num_str(flat[l * dims + d]);
        out << "\n";
      }
    }
  detail::write_text(path, out.str());
}

// ---- JSON helpers -----------------------------------------------------------

inline Json json_num(double v) {
  if (v == kPlusInf) return Json("inf");
  if (v == kMinusInf) return Json("-inf");
  return Json(v);
}

inline double num_json(const Json& j, const std::string& what) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf") return kPlusInf;
    if (s == "-inf") return kMinusInf;
    throw std::runtime_error(what + ": expected a number or \"inf\"/\"-inf\"");
  }
  if (j.is_number()) return j.get<double>();
  throw std::runtime_error(what + ": expected a number");
}

inline void save_json(const std::string& path, const Json& j) {
  detail::write_text(path, j.dump(2) + "\n");
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

// ---- predictor model JSON ----------------------------------------------------

inline Json predictor_to_json(const PredictorModel& m) {
  if (m.kind == PredictorModel::Kind::External)
    throw std::invalid_argument("external predictors are file-backed; keep the predictions CSV");
  Json j;
  j["kind"] = PredictorModel::kind_name(m.kind);
  j["order"] = m.order;
  j["coeffs"] = m.coeffs;
  j["ridge_used"] = m.ridge_used;
  j["dataset_id"] = m.dataset_id;
  j["train_size"] = m.train_size;
  return j;
}

inline PredictorModel predictor_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  PredictorModel m;
  if (kind == "constant-velocity") {
    m = make_constant_velocity();
  } else if (kind == "linear-ar") {
    m.kind = PredictorModel::Kind::LinearAR;
    m.order = j.at("order").get<int>();
    m.coeffs = j.at("coeffs").get<std::vector<std::vector<double>>>();
    if (m.order < 1) throw std::runtime_error("predictor file: order must be >= 1");
    for (const auto& c : m.coeffs)
      if (static_cast<int>(c.size()) != m.order)
        throw std::runtime_error("predictor file: coefficient rows must have `order` entries");
    m.fitted = true;
  } else {
    throw std::runtime_error("predictor file: unknown kind '" + kind + "'");
  }
  m.ridge_used = j.value("ridge_used", false);
  m.dataset_id = j.value("dataset_id", std::string());
  m.train_size = j.value("train_size", 0);
  return m;
}

// ---- calibration artifact JSON ------------------------------------------------

inline Json artifact_to_json(const CalibrationArtifact& art) {
  Json j;
  j["method"] = method_name(art.method);
  j["formula"] = art.formula_text;
  j["dialect"] = dialect_to_string(art.dialect);
  j["tau0"] = art.tau0;
  j["t"] = art.t;
  j["horizon"] = art.horizon;
  j["delta"] = art.delta;
  j["divergence"] = art.divergence;
  j["epsilon"] = art.epsilon;
  j["k"] = art.k;
  j["c_tilde"] = json_num(art.c_tilde);
  j["feasible"] = art.feasible;
  j["rank"] = art.rank;
  j["level"] = art.level;
  j["ball"] = ball_name(art.ball);
  j["agent"] = art.agent;
  Json alpha = Json::array();
  for (const auto& [key, v] : art.alpha) {
    Json e;
    e["pred"] = std::get<0>(key);
    e["tau"] = std::get<1>(key);
    e["agent"] = std::get<2>(key);
    e["value"] = json_num(v);
    alpha.push_back(std::move(e));
  }
  j["alpha"] = std::move(alpha);
  j["predictor"] = {{"kind", art.predictor.kind},
                    {"order", art.predictor.order},
                    {"ridge_used", art.predictor.ridge_used},
                    {"dataset_id", art.predictor.dataset_id},
                    {"train_size", art.predictor.train_size}};
  j["calib_ids"] = art.calib_ids;
  j["alpha_ids"] = art.alpha_ids;
  return j;
}

inline CalibrationArtifact artifact_from_json(const Json& j) {
  CalibrationArtifact art;
  art.method = method_from_string(j.at("method").get<std::string>());
  art.formula_text = j.at("formula").get<std::string>();
  art.dialect = dialect_from_string(j.at("dialect").get<std::string>());
  art.tau0 = j.at("tau0").get<int>();
  art.t = j.at("t").get<int>();
  art.horizon = j.at("horizon").get<int>();
  art.delta = j.at("delta").get<double>();
  art.divergence = j.at("divergence").get<std::string>();
  art.epsilon = j.at("epsilon").get<double>();
  art.k = j.at("k").get<int>();
  art.c_tilde = num_json(j.at("c_tilde"), "c_tilde");
  art.feasible = j.at("feasible").get<bool>();
  art.rank = j.at("rank").get<int>();
  art.level = j.at("level").get<double>();
  art.ball = ball_from_string(j.at("ball").get<std::string>());
  art.agent = j.at("agent").get<int>();
  for (const auto& e : j.at("alpha")) {
    AlphaKey key{e.at("pred").get<int>(), e.at("tau").get<int>(), e.at("agent").get<int>()};
    art.alpha[key] = num_json(e.at("value"), "alpha value");
  }
  const Json& p = j.at("predictor");
  art.predictor.kind = p.at("kind").get<std::string>();
  art.predictor.order = p.at("order").get<int>();
  art.predictor.ridge_used = p.at("ridge_used").get<bool>();
  art.predictor.dataset_id = p.at("dataset_id").get<std::string>();
  art.predictor.train_size = p.at("train_size").get<int>();
  art.calib_ids = j.at("calib_ids").get<std::vector<int>>();
  art.alpha_ids = j.at("alpha_ids").get<std::vector<int>>();
  art.formula = parse_formula(art.formula_text, art.dialect);
  return art;
}

// ---- verdict and shift-estimate JSON ------------------------------------------

inline Json verdict_to_json(const VerificationVerdict& v) {
  Json j;
  j["rho_star"] = json_num(v.rho_star);
  j["level"] = v.level;
  j["satisfied"] = v.satisfied;
  j["method"] = method_name(v.method);
  j["feasible"] = v.feasible;
  Json bounds = Json::array();
  for (const auto& b : v.bounds) {
    Json e;
    e["pred_id"] = b.pred_id;
    e["tau"] = b.tau;
    e["agent"] = b.agent;
    e["bound"] = json_num(b.bound);
    e["radius"] = json_num(b.radius);
    e["center"] = b.center;
    e["predicate"] = b.predicate;
    bounds.push_back(std::move(e));
  }
  j["bounds"] = std::move(bounds);
  return j;
}

inline Json shift_to_json(const ShiftEstimate& est) {
  Json j;
  j["epsilon"] = est.epsilon;
  Json comps = Json::array();
  for (const auto& c : est.components) {
    Json e;
    e["score_type"] = c.score_type;
    e["tv"] = c.tv;
    e["bw_train"] = c.bw_train;
    e["bw_test"] = c.bw_test;
    e["grid"] = {{"lo", c.grid.lo}, {"hi", c.grid.hi}, {"points", c.grid.points}};
    e["train_count"] = c.train_count;
    e["test_count"] = c.test_count;
    comps.push_back(std::move(e));
  }
  j["components"] = std::move(comps);
  return j;
}

// ---- seeded splitting -----------------------------------------------------------

// Shuffle the pool with the seed and cut it into parts of the given sizes.
inline std::vector<std::vector<Trajectory>> split_dataset(const std::vector<Trajectory>& pool,
                                                          const std::vector<int>& sizes,
                                                          std::uint64_t seed) {
  int total = 0;
  for (int s : sizes) {
    if (s < 0) throw std::invalid_argument("split sizes must be nonnegative");
    total += s;
  }
  if (total > static_cast<int>(pool.size()))
    throw std::invalid_argument("split sizes exceed the pool (" + std::to_string(total) + " > " +
                                std::to_string(pool.size()) + ")");
  Rng rng(seed);
  std::vector<int> perm = rng.permutation(static_cast<int>(pool.size()));
  std::vector<std::vector<Trajectory>> parts;
  int at = 0;
  for (int s : sizes) {
    std::vector<Trajectory> part;
    part.reserve(s);
    for (int i = 0; i < s; ++i) part.push_back(pool[perm[at++]]);
    parts.push_back(std::move(part));
  }
  return parts;
}

}  // namespace stremon
