#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stremon/rng.hpp"
#include "stremon/trajectory.hpp"

namespace stremon {

// ---- noisy reference ---------------------------------------------------------
// Single-agent system: iid Gaussian perturbations of a reference curve. Train
// and test distributions differ only in the noise scale.

// 1-D reference curve: offset + amplitude * sin(2 pi tau / period) + slope * tau
inline std::vector<std::vector<double>> sine_reference(int steps, double amplitude, double period,
                                                       double slope, double offset = 0.0) {
  if (steps < 1) throw std::invalid_argument("reference needs at least one step");
  if (period <= 0) throw std::invalid_argument("period must be positive");
  std::vector<std::vector<double>> base(steps, std::vector<double>(1));
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (int tau = 0; tau < steps; ++tau)
    base[tau][0] = offset + amplitude * std::sin(kTwoPi * tau / period) + slope * tau;
  return base;
}

inline std::vector<Trajectory> generate_noisy_reference(
    const std::vector<std::vector<double>>& base, double sigma, int count, std::uint64_t seed,
    int first_trial_id = 1) {
  if (base.empty()) throw std::invalid_argument("reference curve is empty");
  if (sigma <= 0) throw std::invalid_argument("sigma must be positive");
  if (count < 0) throw std::invalid_argument("count must be nonnegative");
  int steps = static_cast<int>(base.size());
  int dims = static_cast<int>(base.front().size());
  for (const auto& row : base)
    if (static_cast<int>(row.size()) != dims)
      throw std::invalid_argument("reference curve rows disagree on dimension");

  Rng master(seed);
  std::vector<Trajectory> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng r = master.fork(static_cast<std::uint64_t>(i));
    Trajectory x = Trajectory::zeros(1, dims, steps);
    x.trial_id = first_trial_id + i;
    for (int tau = 0; tau < steps; ++tau)
      for (int d = 0; d < dims; ++d) x.at(tau, 0, d) = base[tau][d] + r.normal(0.0, sigma);
    out.push_back(std::move(x));
  }
  return out;
}

// ---- swarm-lite ----------------------------------------------------------------
// Point-mass agents in 3-D steered by goal attraction, neighbor cohesion and
// separation, and obstacle repulsion, with Gaussian actuation noise; the
// commanded velocity is capped at the reference speed. The default obstacle
// layout is a documented choice of this toolkit, not a reproduction of any
// particular field.

struct SwarmSpec {
  int agents = 3;
  int steps = 60;
  double speed = 6.0;  // reference speed (velocity cap)
  std::array<double, 3> goal{220.0, 0.0, 0.0};
  std::vector<std::array<double, 4>> obstacles;  // cx, cy, cz, radius
  std::array<double, 3> start{0.0, 0.0, 0.0};
  double start_spread = 6.0;
  double noise = 0.25;
  double goal_gain = 1.0;
  double cohesion_gain = 0.05;
  double separation_gain = 30.0;
  double separation_dist = 4.0;
  double obstacle_gain = 40.0;
  double obstacle_margin = 8.0;

  static SwarmSpec defaults() {
    SwarmSpec s;
    s.obstacles = {
        {60.0, 8.0, 0.0, 6.0},
        {100.0, -10.0, 2.0, 7.0},
        {150.0, 5.0, -2.0, 6.0},
    };
    return s;
  }
};

inline void validate(const SwarmSpec& s) {
  if (s.agents < 1) throw std::invalid_argument("swarm needs at least one agent");
  if (s.steps < 1) throw std::invalid_argument("swarm needs at least one step");
  if (s.speed <= 0) throw std::invalid_argument("reference speed must be positive");
  if (s.noise < 0 || s.start_spread < 0) throw std::invalid_argument("invalid swarm geometry");
  auto inside = [&](const std::array<double, 3>& p, const std::array<double, 4>& o) {
    double dx = p[0] - o[0], dy = p[1] - o[1], dz = p[2] - o[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz) <= o[3];
  };
  for (const auto& o : s.obstacles) {
    if (o[3] <= 0) throw std::invalid_argument("obstacle radius must be positive");
    if (inside(s.start, o) || inside(s.goal, o))
      throw std::invalid_argument("start or goal lies inside an obstacle");
  }
}

inline std::vector<Trajectory> generate_swarm_lite(const SwarmSpec& spec, int count,
                                                   std::uint64_t seed, int first_trial_id = 1) {
  validate(spec);
  if (count < 0) throw std::invalid_argument("count must be nonnegative");
  constexpr double kTwoPi = 6.283185307179586476925286766559;

  Rng master(seed);
  std::vector<Trajectory> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng r = master.fork(static_cast<std::uint64_t>(i));
    Trajectory x = Trajectory::zeros(spec.agents, 3, spec.steps);
    x.trial_id = first_trial_id + i;

    // start on a ring around the start point, jittered in proportion to the
    // spread so that start_spread = 0 pins the starts exactly
    double jitter = 0.05 * spec.start_spread;
    std::vector<std::array<double, 3>> p(spec.agents);
    for (int l = 0; l < spec.agents; ++l) {
      double ang = kTwoPi * l / spec.agents;
      p[l] = {spec.start[0] + spec.start_spread * std::cos(ang) + r.normal(0.0, jitter),
              spec.start[1] + spec.start_spread * std::sin(ang) + r.normal(0.0, jitter),
              spec.start[2] + r.normal(0.0, jitter)};
    }

    for (int tau = 0; tau < spec.steps; ++tau) {
      for (int l = 0; l < spec.agents; ++l)
        for (int d = 0; d < 3; ++d) x.at(tau, l, d) = p[l][d];
      if (tau + 1 == spec.steps) break;

      std::vector<std::array<double, 3>> v(spec.agents, {0, 0, 0});
      for (int l = 0; l < spec.agents; ++l) {
        for (int d = 0; d < 3; ++d) v[l][d] += spec.goal_gain * (spec.goal[d] - p[l][d]);
        if (spec.agents > 1) {
          std::array<double, 3> centroid{0, 0, 0};
          for (int j = 0; j < spec.agents; ++j)
            if (j != l)
              for (int d = 0; d < 3; ++d) centroid[d] += p[j][d];
          for (int d = 0; d < 3; ++d)
            v[l][d] += spec.cohesion_gain * (centroid[d] / (spec.agents - 1) - p[l][d]);
          for (int j = 0; j < spec.agents; ++j) {
            if (j == l) continue;
            double dx = p[l][0] - p[j][0], dy = p[l][1] - p[j][1], dz = p[l][2] - p[j][2];
            double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
            if (dist < spec.separation_dist) {
              double push = spec.separation_gain / (dist * dist + 1e-6);
              v[l][0] += push * dx;
              v[l][1] += push * dy;
              v[l][2] += push * dz;
            }
          }
        }
        for (const auto& o : spec.obstacles) {
          double dx = p[l][0] - o[0], dy = p[l][1] - o[1], dz = p[l][2] - o[2];
          double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
          double gap = dist - o[3];
          if (gap < spec.obstacle_margin && dist > 1e-9) {
            double push = spec.obstacle_gain / std::max(gap, 0.2);
            v[l][0] += push * dx / dist;
            v[l][1] += push * dy / dist;
            v[l][2] += push * dz / dist;
          }
        }
        for (int d = 0; d < 3; ++d) v[l][d] += r.normal(0.0, spec.noise);
        double sp = std::sqrt(v[l][0] * v[l][0] + v[l][1] * v[l][1] + v[l][2] * v[l][2]);
        if (sp > spec.speed)
          for (int d = 0; d < 3; ++d) v[l][d] *= spec.speed / sp;
      }
      for (int l = 0; l < spec.agents; ++l)
        for (int d = 0; d < 3; ++d) p[l][d] += v[l][d];
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace stremon
