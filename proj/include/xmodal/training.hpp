// include/xmodal/training.hpp

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
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/checkpoint.hpp"
#include "xmodal/data_model.hpp"
#include "xmodal/losses.hpp"
#include "xmodal/optim.hpp"
#include "xmodal/retrieval.hpp"

namespace xmodal {

enum class LossKind { kContrastive, kNtXent };
// kTrain is a standalone single-stage run; kPretrain is the first of two.
enum class StageKind { kTrain, kPretrain, kFinetune };
enum class Strategy { kAtae, kAtaeEt, kAtaeEpF, kAtaeNpF };

std::string_view LossKindName(LossKind kind);
std::optional<LossKind> ParseLossKind(std::string_view name);
std::string_view StageKindName(StageKind kind);
std::optional<StageKind> ParseStageKind(std::string_view name);
std::string_view StrategyName(Strategy strategy);
std::optional<Strategy> ParseStrategy(std::string_view name);

struct StageConfig {
  std::vector<std::string> train_datasets;
  StageKind kind = StageKind::kTrain;
  bool inherit = false;

  bool operator==(const StageConfig&) const = default;
};

struct TrainConfig {
  LossKind loss = LossKind::kContrastive;
  PairMining mining = PairMining::kAllPairs;
  double temperature = kDefaultTemperature;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double lr0 = 1e-4;
  int max_epochs = 100;
  Eigen::Index hidden_dim = kDefaultHidden;
  Eigen::Index output_dim = kDefaultOutput;
  int plateau_patience = 5;
  double lr_factor = 10.0;
  int stop_patience = 10;
  std::vector<StageConfig> stages;
};

/// Throws InvalidConfig on any violated constraint.
void ValidateConfig(const TrainConfig& config);

/// Canonical JSON (stable key order), used for hashing and reports.
std::string ConfigToJson(const TrainConfig& config);
TrainConfig ConfigFromJson(std::string_view text);
std::string ConfigHash(const TrainConfig& config);

/// Stage list for one of the four data-usage strategies.
std::vector<StageConfig> ConfigureStrategy(Strategy strategy, const std::string& clean,
                                           const std::string& noisy);

/// Per-(seed, stage, epoch) generator so any epoch can be replayed alone.
std::mt19937_64 EpochRng(std::uint64_t seed, int stage, int epoch);

/// Random permutation of [0, n) cut into consecutive batches; a final
/// batch with fewer than two pairs is dropped.
std::vector<std::vector<std::size_t>> SampleEpochBatches(std::size_t n_pairs,
                                                         int batch_size,
                                                         std::mt19937_64& rng);

/// Mean-pooled inputs of a list of examples, one column per example.
struct PooledExamples {
  std::vector<std::string> pair_ids;
  std::vector<std::string> labels;
  Matrix audio;  // F_a x N
  Matrix text;   // F_t x N

  std::size_t size() const { return pair_ids.size(); }
};

PooledExamples PoolExamples(const std::vector<const PairedExample*>& examples);

/// Text-to-audio retrieval over a pooled split: every text is a query, the
/// index holds each distinct audio once, relevance is label equality.
std::vector<RankedResult> RetrieveTextToAudio(const AdapterPair& adapters,
                                              const PooledExamples& pooled,
                                              std::optional<std::size_t> k);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_map10 = 0.0;
  double lr = 0.0;
  EpochAction action = EpochAction::kContinue;
  bool improved = false;
  std::size_t steps = 0;          // optimizer steps applied
  std::size_t skipped_steps = 0;  // all-zero-loss batches
};

struct TrainReport {
  int stage = 0;
  StageKind kind = StageKind::kTrain;
  std::vector<std::string> datasets;
  std::size_t train_pairs = 0;
  std::size_t dropped_per_epoch = 0;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_score = 0.0;
  std::string init_params_hash;  // empty for a fresh initialisation
  std::string best_params_hash;
  double wall_time_seconds = 0.0;  // not serialised
};

struct TrainResult {
  AdapterPair best;                    // best weights of the final stage
  std::vector<AdapterPair> stage_best;  // one per stage
  std::vector<TrainReport> reports;
  std::string config_hash;
};

using DatasetMap = std::map<std::string, Dataset>;

/// Runs every stage in order.  Validation mAP@10 on clean_validation's
/// validation split drives the scheduler in all stages.
TrainResult RunTraining(const TrainConfig& config, const DatasetMap& datasets,
                        const Dataset& clean_validation);

/// Deterministic serialisations (no timing information).
std::string ReportsToJson(const std::vector<TrainReport>& reports,
                          const std::string& config_hash);
std::string ReportsToTsv(const std::vector<TrainReport>& reports);

}  // namespace xmodal
