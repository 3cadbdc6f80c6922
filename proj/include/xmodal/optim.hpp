// include/xmodal/optim.hpp

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

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace xmodal {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over one flat parameter vector.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t parameter_count, AdamConfig config = {});

  /// Throws NumericalFailure without touching params or state if any
  /// gradient is non-finite.
  void Step(std::span<double> params, std::span<const double> grads);

  double lr() const { return config_.lr; }
  void set_lr(double lr) { config_.lr = lr; }
  std::uint64_t step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }

 private:
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

enum class EpochAction { kContinue, kReduceLr, kStop };

std::string_view EpochActionName(EpochAction action);

struct EpochDecision {
  EpochAction action = EpochAction::kContinue;
  // The score beat every earlier one; the caller should record a checkpoint.
  bool improved = false;
};

/// Divides the learning rate by `factor` after `patience` epochs without
/// improvement, then restarts its own count.
struct PlateauScheduler {
  int patience = 5;
  double factor = 10.0;
  double lr0 = 1e-4;
  int reductions = 0;
  int epochs_since_improvement = 0;

  // lr0 / factor^k, computed as a single division.
  double lr() const;
};

/// Signals a stop after `patience` epochs without improvement.  Learning
/// rate reductions do not reset this count.
struct EarlyStopper {
  int patience = 10;
  int epoch = 0;
  int best_epoch = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  int epochs_since_improvement = 0;
};

/// Feed one validation score (higher is better, strict improvement).
/// Throws InvalidMetric on NaN.
EpochDecision SchedulerEpochEnd(PlateauScheduler& sched, EarlyStopper& stopper,
                                double val_score);

}  // namespace xmodal
