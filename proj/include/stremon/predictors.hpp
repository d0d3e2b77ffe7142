#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "stremon/trajectory.hpp"

namespace stremon {

// external predictions: trial id -> time -> flat state row
using ExternalPredictionTable = std::map<int, std::map<int, std::vector<double>>>;

struct PredictorModel {
  enum class Kind { ConstantVelocity, LinearAR, External };

  Kind kind = Kind::ConstantVelocity;
  bool fitted = false;
  int order = 0;  // AR only
  // AR coefficients per flat state dimension, each of length `order`;
  // x_tau = sum_k coeffs[d][k-1] * x_{tau-k}, no intercept
  std::vector<std::vector<double>> coeffs;
  bool ridge_used = false;
  std::string dataset_id;
  int train_size = 0;
  std::shared_ptr<const ExternalPredictionTable> external;

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::ConstantVelocity: return "constant-velocity";
      case Kind::LinearAR: return "linear-ar";
      case Kind::External: return "external";
    }
    return "?";
  }
};

inline PredictorModel make_constant_velocity() {
  PredictorModel m;
  m.kind = PredictorModel::Kind::ConstantVelocity;
  m.fitted = true;
  return m;
}

inline PredictorModel make_external(std::shared_ptr<const ExternalPredictionTable> table,
                                    std::string dataset_id = "") {
  if (!table) throw std::invalid_argument("external prediction table is null");
  PredictorModel m;
  m.kind = PredictorModel::Kind::External;
  m.fitted = true;
  m.external = std::move(table);
  m.dataset_id = std::move(dataset_id);
  return m;
}

// Fit per-dimension AR(p) coefficients by least squares over all sliding
// windows of the training trajectories. Falls back to ridge (lambda = 1e-6)
// when the normal equations are rank deficient, and records that it did.
inline PredictorModel fit_linear_ar(const std::vector<Trajectory>& train, int p,
                                    std::string dataset_id = "") {
  if (train.empty()) throw std::invalid_argument("training set is empty");
  if (p < 1) throw std::invalid_argument("AR order must be >= 1");
  int flat = train.front().flat_dims();
  for (const auto& x : train) {
    if (x.flat_dims() != flat) throw std::invalid_argument("training trajectories disagree on state dimension");
    if (x.steps < p + 1) throw std::invalid_argument("training trajectory shorter than AR order + 1");
  }

  PredictorModel m;
  m.kind = PredictorModel::Kind::LinearAR;
  m.order = p;
  m.dataset_id = std::move(dataset_id);
  m.train_size = static_cast<int>(train.size());
  m.coeffs.assign(flat, std::vector<double>(p, 0.0));

  int rows = 0;
  for (const auto& x : train) rows += x.steps - p;

  Eigen::MatrixXd a(rows, p);
  Eigen::VectorXd b(rows);
  for (int d = 0; d < flat; ++d) {
    int r = 0;
    for (const auto& x : train) {
      for (int tau = p; tau < x.steps; ++tau) {
        for (int k = 1; k <= p; ++k) a(r, k - 1) = x.flat_state(tau - k)[d];
        b(r) = x.flat_state(tau)[d];
        ++r;
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::VectorXd theta;
    if (qr.rank() < p) {
      Eigen::MatrixXd gram = a.transpose() * a;
      gram.diagonal().array() += 1e-6;
      theta = gram.ldlt().solve(a.transpose() * b);
      m.ridge_used = true;
    } else {
      theta = qr.solve(b);
    }
    for (int k = 0; k < p; ++k) {
      if (!std::isfinite(theta(k))) throw std::runtime_error("AR fit produced non-finite coefficients");
      m.coeffs[d][k] = theta(k);
    }
  }
  m.fitted = true;
  return m;
}

inline PredictorModel fit_predictor(PredictorModel::Kind kind, const std::vector<Trajectory>& train,
                                    int p = 1, std::string dataset_id = "") {
  switch (kind) {
    case PredictorModel::Kind::ConstantVelocity: {
      PredictorModel m = make_constant_velocity();
      m.dataset_id = std::move(dataset_id);
      m.train_size = static_cast<int>(train.size());
      return m;
    }
    case PredictorModel::Kind::LinearAR:
      return fit_linear_ar(train, p, std::move(dataset_id));
    case PredictorModel::Kind::External:
      throw std::invalid_argument("external predictors are loaded from a file, not fitted");
  }
  throw std::invalid_argument("unknown predictor kind");
}

// Extend the observed prefix by `horizon` predicted steps. The observed part
// is copied through untouched; predictions fill times t+1 .. t+horizon.
inline PredictedTrajectory predict(const PredictorModel& m, const Trajectory& obs, int horizon) {
  if (!m.fitted) throw std::invalid_argument("predictor is not fitted");
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  int t = obs.steps - 1;
  int flat = obs.flat_dims();

  PredictedTrajectory out;
  out.t = t;
  out.horizon = horizon;
  out.full = Trajectory::zeros(obs.agents, obs.dims, obs.steps + horizon);
  out.full.trial_id = obs.trial_id;
  for (int tau = 0; tau < obs.steps; ++tau) {
    const double* src = obs.flat_state(tau);
    double* dst = out.full.flat_state_mut(tau);
    for (int d = 0; d < flat; ++d) dst[d] = src[d];
  }
  if (horizon == 0) return out;

  switch (m.kind) {
    case PredictorModel::Kind::ConstantVelocity: {
      if (obs.steps < 2) throw std::invalid_argument("constant-velocity needs at least two observed steps");
      const double* last = obs.flat_state(t);
      const double* prev = obs.flat_state(t - 1);
      for (int h = 1; h <= horizon; ++h) {
        double* dst = out.full.flat_state_mut(t + h);
        for (int d = 0; d < flat; ++d) dst[d] = last[d] + h * (last[d] - prev[d]);
      }
      break;
    }
    case PredictorModel::Kind::LinearAR: {
      int p = m.order;
      if (obs.steps < std::max(2, p)) throw std::invalid_argument("observation shorter than AR order");
      if (static_cast<int>(m.coeffs.size()) != flat)
        throw std::invalid_argument("AR model dimension does not match the trajectory");
      for (int h = 1; h <= horizon; ++h) {
        double* dst = out.full.flat_state_mut(t + h);
        for (int d = 0; d < flat; ++d) {
          double v = 0.0;
          for (int k = 1; k <= p; ++k) v += m.coeffs[d][k - 1] * out.full.flat_state(t + h - k)[d];
          dst[d] = v;
        }
      }
      break;
    }
    case PredictorModel::Kind::External: {
      const auto it = m.external->find(obs.trial_id);
      if (it == m.external->end())
        throw std::invalid_argument("no external predictions for trial " + std::to_string(obs.trial_id));
      for (int h = 1; h <= horizon; ++h) {
        auto row = it->second.find(t + h);
        if (row == it->second.end())
          throw std::invalid_argument("external predictions missing time " + std::to_string(t + h) +
                                      " for trial " + std::to_string(obs.trial_id));
        if (static_cast<int>(row->second.size()) != flat)
          throw std::invalid_argument("external prediction row has wrong state dimension");
        double* dst = out.full.flat_state_mut(t + h);
        for (int d = 0; d < flat; ++d) dst[d] = row->second[d];
      }
      break;
    }
  }
  return out;
}

}  // namespace stremon
