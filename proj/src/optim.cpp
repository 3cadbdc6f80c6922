// src/optim.cpp

// Copyright 2026  The xmodal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "xmodal/optim.hpp"

#include <cmath>
#include <string>

#include "xmodal/error.hpp"

namespace xmodal {

AdamOptimizer::AdamOptimizer(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {
  if (!(config.lr > 0.0)) Fail(ErrorCode::kInvalidConfig, "lr must be positive");
}

void AdamOptimizer::Step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    Fail(ErrorCode::kShapeError,
         "Adam state holds " + std::to_string(m_.size()) + " parameters, got " +
             std::to_string(params.size()) + " params and " +
             std::to_string(grads.size()) + " grads");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      Fail(ErrorCode::kNumericalFailure,
           "non-finite gradient at index " + std::to_string(i));
    }
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

std::string_view EpochActionName(EpochAction action) {
  switch (action) {
    case EpochAction::kContinue: return "continue";
    case EpochAction::kReduceLr: return "reduce_lr";
    case EpochAction::kStop: return "stop";
  }
  return "continue";
}

double PlateauScheduler::lr() const {
  return lr0 / std::pow(factor, reductions);
}

EpochDecision SchedulerEpochEnd(PlateauScheduler& sched, EarlyStopper& stopper,
                                double val_score) {
  if (std::isnan(val_score)) {
    Fail(ErrorCode::kInvalidMetric, "validation score is NaN");
  }
  ++stopper.epoch;
  EpochDecision d;
  if (val_score > stopper.best_score) {
    stopper.best_score = val_score;
    stopper.best_epoch = stopper.epoch;
    stopper.epochs_since_improvement = 0;
    sched.epochs_since_improvement = 0;
    d.improved = true;
    return d;
  }
  ++stopper.epochs_since_improvement;
  ++sched.epochs_since_improvement;
  if (stopper.epochs_since_improvement >= stopper.patience) {
    d.action = EpochAction::kStop;
    return d;
  }
  if (sched.epochs_since_improvement >= sched.patience) {
    ++sched.reductions;
    sched.epochs_since_improvement = 0;
    d.action = EpochAction::kReduceLr;
  }
  return d;
}

}  // namespace xmodal
