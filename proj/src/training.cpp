// src/training.cpp

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

#include "xmodal/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "xmodal/error.hpp"
#include "xmodal/log.hpp"

namespace xmodal {

using json = nlohmann::ordered_json;

std::string_view LossKindName(LossKind kind) {
  return kind == LossKind::kContrastive ? "contrastive" : "nt_xent";
}

std::optional<LossKind> ParseLossKind(std::string_view name) {
  if (name == "contrastive") return LossKind::kContrastive;
  if (name == "nt_xent") return LossKind::kNtXent;
  return std::nullopt;
}

std::string_view StageKindName(StageKind kind) {
  switch (kind) {
    case StageKind::kTrain: return "train";
    case StageKind::kPretrain: return "pretrain";
    case StageKind::kFinetune: return "finetune";
  }
  return "train";
}

std::optional<StageKind> ParseStageKind(std::string_view name) {
  if (name == "train") return StageKind::kTrain;
  if (name == "pretrain") return StageKind::kPretrain;
  if (name == "finetune") return StageKind::kFinetune;
  return std::nullopt;
}

std::string_view StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kAtae: return "ATAE";
    case Strategy::kAtaeEt: return "ATAE-ET";
    case Strategy::kAtaeEpF: return "ATAE-EP-F";
    case Strategy::kAtaeNpF: return "ATAE-NP-F";
  }
  return "ATAE";
}

std::optional<Strategy> ParseStrategy(std::string_view name) {
  for (auto s : {Strategy::kAtae, Strategy::kAtaeEt, Strategy::kAtaeEpF,
                 Strategy::kAtaeNpF}) {
    if (StrategyName(s) == name) return s;
  }
  return std::nullopt;
}

void ValidateConfig(const TrainConfig& c) {
  auto bad = [](const std::string& what) { Fail(ErrorCode::kInvalidConfig, what); };
  if (c.batch_size < 2) bad("batch_size must be at least 2");
  if (c.max_epochs < 1) bad("max_epochs must be at least 1");
  if (!(c.lr0 > 0.0) || !std::isfinite(c.lr0)) bad("lr0 must be positive");
  if (!(c.temperature > 0.0) || !std::isfinite(c.temperature)) {
    bad("temperature must be positive");
  }
  if (c.hidden_dim < 1 || c.output_dim < 1) bad("adapter dims must be positive");
  if (c.plateau_patience < 1 || c.stop_patience < 1) bad("patience must be positive");
  if (!(c.lr_factor > 1.0)) bad("lr_factor must exceed 1");
  if (c.stages.empty()) bad("at least one stage is required");
  for (std::size_t i = 0; i < c.stages.size(); ++i) {
    const auto& s = c.stages[i];
    if (s.train_datasets.empty()) bad("stage " + std::to_string(i + 1) + " has no datasets");
    if (i == 0 && s.inherit) bad("the first stage cannot inherit weights");
    if (s.kind == StageKind::kFinetune && !s.inherit) bad("finetune stages must inherit");
  }
}

namespace {

json StageToJson(const StageConfig& s) {
  return {{"datasets", s.train_datasets},
          {"kind", StageKindName(s.kind)},
          {"inherit", s.inherit}};
}

json ConfigJson(const TrainConfig& c) {
  json j;
  j["loss"] = LossKindName(c.loss);
  j["mining"] = PairMiningName(c.mining);
  j["temperature"] = c.temperature;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["lr0"] = c.lr0;
  j["max_epochs"] = c.max_epochs;
  j["hidden_dim"] = c.hidden_dim;
  j["output_dim"] = c.output_dim;
  j["plateau_patience"] = c.plateau_patience;
  j["lr_factor"] = c.lr_factor;
  j["stop_patience"] = c.stop_patience;
  j["stages"] = json::array();
  for (const auto& s : c.stages) j["stages"].push_back(StageToJson(s));
  return j;
}

template <typename T, typename Parse>
T ParseEnum(const nlohmann::json& j, const char* key, T fallback, Parse parse) {
  if (!j.contains(key)) return fallback;
  const auto name = j.at(key).get<std::string>();
  auto v = parse(name);
  if (!v) Fail(ErrorCode::kInvalidConfig, std::string("unknown ") + key + " '" + name + "'");
  return *v;
}

}  // namespace

std::string ConfigToJson(const TrainConfig& config) { return ConfigJson(config).dump(); }

TrainConfig ConfigFromJson(std::string_view text) {
  TrainConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.loss = ParseEnum(j, "loss", c.loss, ParseLossKind);
    c.mining = ParseEnum(j, "mining", c.mining, ParsePairMining);
    c.temperature = j.value("temperature", c.temperature);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    c.lr0 = j.value("lr0", c.lr0);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.output_dim = j.value("output_dim", c.output_dim);
    c.plateau_patience = j.value("plateau_patience", c.plateau_patience);
    c.lr_factor = j.value("lr_factor", c.lr_factor);
    c.stop_patience = j.value("stop_patience", c.stop_patience);
    if (j.contains("stages")) {
      for (const auto& s : j.at("stages")) {
        StageConfig stage;
        stage.train_datasets = s.at("datasets").get<std::vector<std::string>>();
        stage.kind = ParseEnum(s, "kind", StageKind::kTrain, ParseStageKind);
        stage.inherit = s.value("inherit", stage.kind == StageKind::kFinetune);
        c.stages.push_back(std::move(stage));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidConfig, std::string("config: ") + e.what());
  }
  return c;
}

std::string ConfigHash(const TrainConfig& config) {
  return HashBytes(ConfigToJson(config));
}

std::vector<StageConfig> ConfigureStrategy(Strategy strategy, const std::string& clean,
                                           const std::string& noisy) {
  switch (strategy) {
    case Strategy::kAtae:
      return {{{clean}, StageKind::kTrain, false}};
    case Strategy::kAtaeEt:
      return {{{clean, noisy}, StageKind::kTrain, false}};
    case Strategy::kAtaeEpF:
      return {{{clean, noisy}, StageKind::kPretrain, false},
              {{clean}, StageKind::kFinetune, true}};
    case Strategy::kAtaeNpF:
      return {{{noisy}, StageKind::kPretrain, false},
              {{clean}, StageKind::kFinetune, true}};
  }
  Fail(ErrorCode::kInvalidConfig, "unknown strategy");
}

std::mt19937_64 EpochRng(std::uint64_t seed, int stage, int epoch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage), static_cast<std::uint32_t>(epoch)};
  return std::mt19937_64(seq);
}

std::vector<std::vector<std::size_t>> SampleEpochBatches(std::size_t n_pairs,
                                                         int batch_size,
                                                         std::mt19937_64& rng) {
  if (batch_size < 2) Fail(ErrorCode::kInvalidConfig, "batch_size must be at least 2");
  if (n_pairs < 2) {
    Fail(ErrorCode::kInvalidDataset, "training split needs at least 2 pairs, has " +
                                         std::to_string(n_pairs));
  }
  std::vector<std::size_t> order(n_pairs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  const auto bs = static_cast<std::size_t>(batch_size);
  for (std::size_t start = 0; start < n_pairs; start += bs) {
    const std::size_t end = std::min(n_pairs, start + bs);
    if (end - start < 2) break;
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

PooledExamples PoolExamples(const std::vector<const PairedExample*>& examples) {
  PooledExamples out;
  if (examples.empty()) return out;
  const auto fa = examples.front()->audio->dim();
  const auto ft = examples.front()->text->dim();
  const auto n = static_cast<Eigen::Index>(examples.size());
  out.audio.resize(fa, n);
  out.text.resize(ft, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& ex = *examples[static_cast<std::size_t>(i)];
    if (ex.audio->dim() != fa || ex.text->dim() != ft) {
      Fail(ErrorCode::kShapeError, "pair '" + ex.pair_id + "' has feature dims " +
                                       std::to_string(ex.audio->dim()) + "/" +
                                       std::to_string(ex.text->dim()) + ", expected " +
                                       std::to_string(fa) + "/" + std::to_string(ft));
    }
    out.audio.col(i) = MeanPool(ex.audio->data);
    out.text.col(i) = MeanPool(ex.text->data);
    out.pair_ids.push_back(ex.pair_id);
    out.labels.push_back(ex.label);
  }
  return out;
}

std::vector<RankedResult> RetrieveTextToAudio(const AdapterPair& adapters,
                                              const PooledExamples& pooled,
                                              std::optional<std::size_t> k) {
  if (pooled.size() == 0) Fail(ErrorCode::kEmptyIndex, "no examples to index");
  // One index entry per distinct audio (label), first occurrence wins.
  std::vector<std::string> ids;
  std::vector<Eigen::Index> cols;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    if (seen.emplace(pooled.labels[i], ids.size()).second) {
      ids.push_back(pooled.labels[i]);
      cols.push_back(static_cast<Eigen::Index>(i));
    }
  }
  Matrix audio_in(pooled.audio.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    audio_in.col(static_cast<Eigen::Index>(j)) = pooled.audio.col(cols[j]);
  }
  const Matrix audio_out = ForwardPooled(adapters.audio, audio_in).output;
  const Matrix text_out = ForwardPooled(adapters.text, pooled.text).output;
  const AudioIndex index(std::move(ids), audio_out);

  std::vector<RankedResult> results;
  results.reserve(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    RankedResult r;
    r.query_id = pooled.pair_ids[i];
    r.ranking = Rank(index, text_out.col(static_cast<Eigen::Index>(i)), k);
    r.relevant_ids.insert(pooled.labels[i]);
    results.push_back(std::move(r));
  }
  return results;
}

namespace {

Matrix GatherColumns(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = m.col(static_cast<Eigen::Index>(idx[j]));
  }
  return out;
}

std::uint64_t StageInitSeed(std::uint64_t seed, int stage, int tower) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage), static_cast<std::uint32_t>(tower),
                    0x1d17u};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

LossOutput EvaluateLoss(const TrainConfig& config, const BatchEmbeddings& batch) {
  return config.loss == LossKind::kContrastive
             ? ContrastiveLoss(batch, config.mining)
             : NtXentLoss(batch, config.mining, config.temperature);
}

}  // namespace

TrainResult RunTraining(const TrainConfig& config, const DatasetMap& datasets,
                        const Dataset& clean_validation) {
  ValidateConfig(config);
  TrainResult result;
  result.config_hash = ConfigHash(config);

  const PooledExamples validation = PoolExamples(clean_validation.InSplit(Split::kValidation));
  if (validation.size() == 0) {
    Fail(ErrorCode::kInvalidDataset,
         "dataset '" + clean_validation.name + "' has no validation pairs");
  }

  std::optional<AdapterPair> previous;
  for (std::size_t s = 0; s < config.stages.size(); ++s) {
    const auto& stage = config.stages[s];
    const int stage_no = static_cast<int>(s) + 1;
    const auto started = std::chrono::steady_clock::now();

    std::vector<const PairedExample*> members;
    for (const auto& name : stage.train_datasets) {
      auto it = datasets.find(name);
      if (it == datasets.end()) {
        Fail(ErrorCode::kInvalidConfig, "stage " + std::to_string(stage_no) +
                                            " references unknown dataset '" + name + "'");
      }
      auto part = it->second.InSplit(Split::kTrain);
      members.insert(members.end(), part.begin(), part.end());
    }
    if (members.size() < 2) {
      Fail(ErrorCode::kInvalidDataset, "stage " + std::to_string(stage_no) +
                                           " has fewer than 2 training pairs");
    }
    const PooledExamples train = PoolExamples(members);
    if (train.audio.rows() != validation.audio.rows() ||
        train.text.rows() != validation.text.rows()) {
      Fail(ErrorCode::kShapeError, "training and validation feature dims differ");
    }

    const AdapterDims audio_dims{train.audio.rows(), config.hidden_dim, config.output_dim};
    const AdapterDims text_dims{train.text.rows(), config.hidden_dim, config.output_dim};
    AdapterPair current;
    TrainReport report;
    report.stage = stage_no;
    report.kind = stage.kind;
    report.datasets = stage.train_datasets;
    report.train_pairs = train.size();
    if (stage.inherit) {
      current = *previous;
      if (!(current.audio.dims() == audio_dims) || !(current.text.dims() == text_dims)) {
        Fail(ErrorCode::kShapeError, "inherited adapters do not fit stage " +
                                         std::to_string(stage_no) + " data");
      }
      report.init_params_hash = HashParameters(current);
    } else {
      current.audio = Adapter::Init(audio_dims, StageInitSeed(config.seed, stage_no, 0));
      current.text = Adapter::Init(text_dims, StageInitSeed(config.seed, stage_no, 1));
    }

    AdamOptimizer audio_opt(static_cast<std::size_t>(audio_dims.ParameterCount()),
                            {.lr = config.lr0});
    AdamOptimizer text_opt(static_cast<std::size_t>(text_dims.ParameterCount()),
                           {.lr = config.lr0});
    PlateauScheduler sched{config.plateau_patience, config.lr_factor, config.lr0};
    EarlyStopper stopper{config.stop_patience};
    AdapterPair best = current;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
      auto rng = EpochRng(config.seed, stage_no, epoch);
      const auto batches = SampleEpochBatches(train.size(), config.batch_size, rng);
      std::size_t covered = 0;
      for (const auto& b : batches) covered += b.size();
      report.dropped_per_epoch = train.size() - covered;

      EpochRecord rec;
      rec.epoch = epoch;
      rec.lr = sched.lr();
      double loss_sum = 0.0;
      for (const auto& idx : batches) {
        auto audio_fwd = ForwardPooled(current.audio, GatherColumns(train.audio, idx));
        auto text_fwd = ForwardPooled(current.text, GatherColumns(train.text, idx));
        BatchEmbeddings batch{std::move(audio_fwd.output), std::move(text_fwd.output), {}};
        batch.labels.reserve(idx.size());
        for (auto i : idx) batch.labels.push_back(train.labels[i]);

        const LossOutput loss = [&] {
          try {
            return EvaluateLoss(config, batch);
          } catch (const Error& e) {
            Fail(e.code(), e.detail() + " (stage " + std::to_string(stage_no) +
                               ", epoch " + std::to_string(epoch) + ")");
          }
        }();
        if (!std::isfinite(loss.value)) {
          Fail(ErrorCode::kNumericalFailure, "non-finite loss in stage " +
                                                 std::to_string(stage_no) + ", epoch " +
                                                 std::to_string(epoch));
        }
        loss_sum += loss.value;
        if (loss.active_pair_count == 0) {
          ++rec.skipped_steps;
          continue;
        }
        const auto audio_grad = Backward(current.audio, audio_fwd.cache, loss.audio_grad);
        const auto text_grad = Backward(current.text, text_fwd.cache, loss.text_grad);
        try {
          audio_opt.Step(current.audio.mutable_flat(), audio_grad.flat());
          text_opt.Step(current.text.mutable_flat(), text_grad.flat());
        } catch (const Error& e) {
          Fail(e.code(), e.detail() + " (stage " + std::to_string(stage_no) +
                             ", epoch " + std::to_string(epoch) + ")");
        }
        ++rec.steps;
      }
      rec.train_loss = batches.empty() ? 0.0 : loss_sum / static_cast<double>(batches.size());
      rec.val_map10 = MapAtK(RetrieveTextToAudio(current, validation, 10), 10);

      const EpochDecision decision = SchedulerEpochEnd(sched, stopper, rec.val_map10);
      rec.action = decision.action;
      rec.improved = decision.improved;
      if (decision.improved) best = current;
      if (decision.action == EpochAction::kReduceLr) {
        audio_opt.set_lr(sched.lr());
        text_opt.set_lr(sched.lr());
      }
      XMODAL_LOG(kInfo) << "stage " << stage_no << " epoch " << epoch << " loss "
                        << rec.train_loss << " val mAP@10 " << rec.val_map10 << " lr "
                        << rec.lr << " " << EpochActionName(rec.action);
      report.epochs.push_back(rec);
      if (decision.action == EpochAction::kStop) break;
    }

    report.best_epoch = stopper.best_epoch;
    report.best_score = stopper.best_score;
    report.best_params_hash = HashParameters(best);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.reports.push_back(std::move(report));
    result.stage_best.push_back(best);
    previous = std::move(best);
  }
  result.best = *previous;
  return result;
}

std::string ReportsToJson(const std::vector<TrainReport>& reports,
                          const std::string& config_hash) {
  json out;
  out["config_hash"] = config_hash;
  out["stages"] = json::array();
  for (const auto& r : reports) {
    json s;
    s["stage"] = r.stage;
    s["kind"] = StageKindName(r.kind);
    s["datasets"] = r.datasets;
    s["train_pairs"] = r.train_pairs;
    s["dropped_per_epoch"] = r.dropped_per_epoch;
    s["best_epoch"] = r.best_epoch;
    s["best_score"] = r.best_score;
    s["init_params_hash"] = r.init_params_hash;
    s["best_params_hash"] = r.best_params_hash;
    s["epochs"] = json::array();
    for (const auto& e : r.epochs) {
      s["epochs"].push_back({{"epoch", e.epoch},
                             {"train_loss", e.train_loss},
                             {"val_map10", e.val_map10},
                             {"lr", e.lr},
                             {"decision", EpochActionName(e.action)},
                             {"improved", e.improved},
                             {"steps", e.steps},
                             {"skipped_steps", e.skipped_steps}});
    }
    out["stages"].push_back(std::move(s));
  }
  return out.dump(2) + "\n";
}

std::string ReportsToTsv(const std::vector<TrainReport>& reports) {
  std::ostringstream os;
  os << "stage\tepoch\ttrain_loss\tval_map10\tlr\tdecision\n";
  os << std::setprecision(17);
  for (const auto& r : reports) {
    for (const auto& e : r.epochs) {
      os << r.stage << '\t' << e.epoch << '\t' << e.train_loss << '\t' << e.val_map10
         << '\t' << e.lr << '\t' << EpochActionName(e.action) << '\n';
    }
  }
  return os.str();
}

}  // namespace xmodal
