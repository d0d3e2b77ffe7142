#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stremon {

// A discrete-time multi-agent trajectory. Time runs 0..steps-1; agents are
// 0-based internally (file formats and CLI use 1-based ids). Layout is
// [time][agent][dim], so the per-time flattening used by the single-agent
// view is the concatenation of the agent states.
struct Trajectory {
  int agents = 1;
  int dims = 1;
  int steps = 0;
  int trial_id = -1;
  std::vector<double> data;

  static Trajectory zeros(int agents, int dims, int steps, int trial_id = -1) {
    Trajectory x;
    x.agents = agents;
    x.dims = dims;
    x.steps = steps;
    x.trial_id = trial_id;
    x.data.assign(static_cast<size_t>(agents) * dims * steps, 0.0);
    return x;
  }

  size_t offset(int t, int l, int d) const {
    return (static_cast<size_t>(t) * agents + l) * dims + d;
  }
  double at(int t, int l, int d) const { return data[offset(t, l, d)]; }
  double& at(int t, int l, int d) { return data[offset(t, l, d)]; }

  const double* state(int t, int l) const { return &data[offset(t, l, 0)]; }
  const double* flat_state(int t) const { return &data[offset(t, 0, 0)]; }
  double* flat_state_mut(int t) { return &data[offset(t, 0, 0)]; }
  int flat_dims() const { return agents * dims; }

  void check_time(int t) const {
    if (t < 0 || t >= steps)
      throw std::out_of_range("time " + std::to_string(t) + " outside trajectory of length " +
                              std::to_string(steps));
  }

  // First `upto + 1` steps as an observation prefix.
  Trajectory prefix(int upto) const {
    check_time(upto);
    Trajectory p;
    p.agents = agents;
    p.dims = dims;
    p.steps = upto + 1;
    p.trial_id = trial_id;
    p.data.assign(data.begin(), data.begin() + offset(upto + 1, 0, 0));
    return p;
  }
};

// Observed prefix (times 0..t) extended with predicted states t+1..t+horizon.
struct PredictedTrajectory {
  Trajectory full;
  int t = 0;
  int horizon = 0;
};

}  // namespace stremon
