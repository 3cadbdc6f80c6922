// src/cli.cpp

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

#include "xmodal/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "xmodal/checkpoint.hpp"
#include "xmodal/data_model.hpp"
#include "xmodal/error.hpp"
#include "xmodal/log.hpp"
#include "xmodal/retrieval.hpp"
#include "xmodal/text_prep.hpp"
#include "xmodal/training.hpp"

namespace xmodal {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// A usage/data error detected by the CLI itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path ResolveRoot(const std::string& manifest, const std::string& root) {
  return root.empty() ? fs::path(manifest).parent_path() : fs::path(root);
}

// ---- preprocess ------------------------------------------------------------

struct PreprocessArgs {
  std::string input;
  std::string output;
};

int Preprocess(const PreprocessArgs& a, std::ostream& err) {
  std::ifstream in(a.input);
  if (!in) throw UsageError("cannot read input " + a.input);

  std::ostringstream cleaned;
  std::size_t records = 0;
  std::size_t truncated = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    RawTextRecord rec;
    try {
      const auto j = json::parse(line);
      rec.item_id = j.at("item_id").get<std::string>();
      rec.description = j.value("description", std::string());
      rec.tags = NormalizeTags(j.value("tags", std::vector<std::string>{}));
    } catch (const json::exception& e) {
      throw UsageError("malformed record at line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    const auto desc = CleanDescriptionDetailed(rec.description);
    truncated += desc.truncated ? 1 : 0;
    ++records;
    nlohmann::ordered_json out = {{"item_id", rec.item_id},
                                  {"cleaned_description", desc.text},
                                  {"joined_tags", JoinTags(rec.tags)}};
    cleaned << out.dump() << '\n';
  }
  WriteFileBytes(a.output, cleaned.str());
  err << "preprocess: " << records << " records, " << truncated << " truncated\n";
  return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string strategy;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int Train(const TrainArgs& a, std::ostream& out) {
  const std::string text = ReadFileBytes(a.config);
  TrainConfig config = ConfigFromJson(text);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  const fs::path base = fs::path(a.config).parent_path();
  if (a.seed) config.seed = *a.seed;

  DatasetMap datasets;
  if (!doc.contains("datasets") || !doc["datasets"].is_object()) {
    throw UsageError("config needs a \"datasets\" object");
  }
  for (const auto& [name, spec] : doc["datasets"].items()) {
    if (!spec.contains("manifest")) throw UsageError("dataset '" + name + "' has no manifest");
    const fs::path manifest = base / spec["manifest"].get<std::string>();
    const fs::path root = spec.contains("embedding_root")
                              ? base / spec["embedding_root"].get<std::string>()
                              : manifest.parent_path();
    const auto tier = spec.value("noise_tier", std::string("clean")) == "noisy"
                          ? NoiseTier::kNoisy
                          : NoiseTier::kClean;
    datasets.emplace(name, LoadManifest(manifest, root, name, tier));
  }
  const std::string clean = doc.value("clean_dataset", std::string("clean"));
  const std::string noisy = doc.value("noisy_dataset", std::string("noisy"));
  const std::string strategy_name = !a.strategy.empty()
                                        ? a.strategy
                                        : doc.value("strategy", std::string());
  if (!strategy_name.empty()) {
    const auto strategy = ParseStrategy(strategy_name);
    if (!strategy) throw UsageError("unknown strategy '" + strategy_name + "'");
    config.stages = ConfigureStrategy(*strategy, clean, noisy);
  }
  auto clean_it = datasets.find(clean);
  if (clean_it == datasets.end()) {
    throw UsageError("clean dataset '" + clean + "' is not defined");
  }

  const TrainResult result = RunTraining(config, datasets, clean_it->second);

  fs::create_directories(a.out);
  for (std::size_t s = 0; s < result.reports.size(); ++s) {
    const auto& rep = result.reports[s];
    const CheckpointMetadata meta{rep.best_epoch, rep.best_score, result.config_hash,
                                  rep.stage, rep.init_params_hash};
    SaveCheckpoint(fs::path(a.out) / ("stage" + std::to_string(rep.stage) + "_best.xmck"),
                   result.stage_best[s], meta);
    XMODAL_LOG(kInfo) << "stage " << rep.stage << " took " << rep.wall_time_seconds << " s";
  }
  const auto& last = result.reports.back();
  SaveCheckpoint(fs::path(a.out) / "final.xmck", result.best,
                 {last.best_epoch, last.best_score, result.config_hash, last.stage,
                  last.init_params_hash});
  WriteFileBytes(fs::path(a.out) / "report.json",
                 ReportsToJson(result.reports, result.config_hash));
  WriteFileBytes(fs::path(a.out) / "report.tsv", ReportsToTsv(result.reports));
  WriteFileBytes(fs::path(a.out) / "config.json", ConfigToJson(config) + "\n");

  for (const auto& rep : result.reports) {
    out << "stage " << rep.stage << " (" << StageKindName(rep.kind) << "): "
        << rep.epochs.size() << " epochs, best epoch " << rep.best_epoch
        << ", val mAP@10 " << std::fixed << std::setprecision(3) << rep.best_score << '\n';
  }
  return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint;
  std::string manifest;
  std::string embedding_root;
  std::string split = "test";
  std::string format = "tsv";
};

void CheckDims(const AdapterPair& adapters, const PooledExamples& pooled) {
  if (adapters.audio.dims().input != pooled.audio.rows() ||
      adapters.text.dims().input != pooled.text.rows()) {
    Fail(ErrorCode::kShapeError,
         "checkpoint expects audio/text dims " + std::to_string(adapters.audio.dims().input) +
             "/" + std::to_string(adapters.text.dims().input) + ", data has " +
             std::to_string(pooled.audio.rows()) + "/" + std::to_string(pooled.text.rows()));
  }
  if (adapters.audio.dims().output != adapters.text.dims().output) {
    Fail(ErrorCode::kShapeError, "audio and text adapters have different output dims");
  }
}

int Evaluate(const EvaluateArgs& a, std::ostream& out) {
  const Checkpoint ck = LoadCheckpoint(a.checkpoint);
  const auto split = ParseSplit(a.split);
  if (!split) throw UsageError("unknown split '" + a.split + "'");
  const Dataset ds = LoadManifest(a.manifest, ResolveRoot(a.manifest, a.embedding_root));
  const PooledExamples pooled = PoolExamples(ds.InSplit(*split));
  if (pooled.size() == 0) throw UsageError("no '" + a.split + "' pairs in " + a.manifest);
  CheckDims(ck.adapters, pooled);
  const MetricReport report =
      ComputeMetricReport(RetrieveTextToAudio(ck.adapters, pooled, 10));
  out << (a.format == "json" ? FormatMetricReportJson(report) : FormatMetricReportTsv(report));
  return kExitOk;
}

// ---- retrieve --------------------------------------------------------------

struct RetrieveArgs {
  std::string checkpoint;
  std::string index;
  std::string embedding_root;
  std::string query;
  std::size_t k = 10;
};

int Retrieve(const RetrieveArgs& a, std::ostream& out, std::ostream& err) {
  const Checkpoint ck = LoadCheckpoint(a.checkpoint);
  const Dataset ds = LoadManifest(a.index, ResolveRoot(a.index, a.embedding_root));
  std::vector<const PairedExample*> all;
  for (const auto& ex : ds.examples) all.push_back(&ex);
  const PooledExamples pooled = PoolExamples(all);
  if (pooled.size() == 0) Fail(ErrorCode::kEmptyIndex, "index manifest is empty");
  CheckDims(ck.adapters, pooled);

  std::vector<std::string> ids;
  std::vector<Eigen::Index> cols;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    if (std::find(ids.begin(), ids.end(), pooled.labels[i]) == ids.end()) {
      ids.push_back(pooled.labels[i]);
      cols.push_back(static_cast<Eigen::Index>(i));
    }
  }
  Matrix audio_in(pooled.audio.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    audio_in.col(static_cast<Eigen::Index>(j)) = pooled.audio.col(cols[j]);
  }
  const AudioIndex index(std::move(ids), ForwardPooled(ck.adapters.audio, audio_in).output);

  const EmbeddingSequence query = ReadEmbeddingFile(a.query, Modality::kText);
  const Vector query_out = Forward(ck.adapters.text, query.data).output;
  std::size_t k = a.k;
  if (k > index.size()) {
    err << "warning: k=" << k << " exceeds index size " << index.size() << "; clamped\n";
    k = index.size();
  }
  const auto ranking = Rank(index, query_out, k);
  out << std::fixed << std::setprecision(6);
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    out << (r + 1) << '\t' << ranking[r].audio_id << '\t' << ranking[r].score << '\n';
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-modal text-to-audio alignment and retrieval toolkit", "xmodal"};
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Clean raw descriptions and join tags");
  pre_cmd->add_option("--input", pre.input, "Raw records (JSON lines: item_id, description, tags)")
      ->required();
  pre_cmd->add_option("--output", pre.output, "Cleaned records (JSON lines)")->required();

  TrainArgs train;
  std::uint64_t seed_value = 0;
  auto* train_cmd = app.add_subcommand("train", "Train audio/text adapters");
  train_cmd->add_option("--config", train.config, "Training config (JSON)")->required();
  train_cmd->add_option("--strategy", train.strategy, "ATAE, ATAE-ET, ATAE-EP-F or ATAE-NP-F");
  train_cmd->add_option("--out", train.out, "Output directory")->required();
  auto* seed_opt = train_cmd->add_option("--seed", seed_value, "Override the config seed");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Text-to-audio metrics with 95% CIs");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--manifest", eval.manifest, "Manifest with the evaluation pairs")
      ->required();
  eval_cmd->add_option("--embedding-root", eval.embedding_root,
                       "Base for relative embedding paths (default: manifest directory)");
  eval_cmd->add_option("--split", eval.split, "Split to evaluate")
      ->check(CLI::IsMember({"train", "validation", "test"}));
  eval_cmd->add_option("--format", eval.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));

  RetrieveArgs ret;
  auto* ret_cmd = app.add_subcommand("retrieve", "Rank indexed audio for one text query");
  ret_cmd->add_option("--checkpoint", ret.checkpoint, "Checkpoint file")->required();
  ret_cmd->add_option("--index", ret.index, "Manifest whose audio items form the index")
      ->required();
  ret_cmd->add_option("--embedding-root", ret.embedding_root,
                      "Base for relative embedding paths (default: manifest directory)");
  ret_cmd->add_option("--query-embedding", ret.query, "Text embedding file (XMEB)")
      ->required();
  ret_cmd->add_option("--k", ret.k, "Number of results")->check(CLI::PositiveNumber);

  std::vector<std::string> argv_storage{"xmodal"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pre_cmd->parsed()) return Preprocess(pre, err);
    if (train_cmd->parsed()) {
      if (seed_opt->count() > 0) train.seed = seed_value;
      return Train(train, out);
    }
    if (eval_cmd->parsed()) return Evaluate(eval, out);
    if (ret_cmd->parsed()) return Retrieve(ret, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kNumericalFailure ? kExitNumerical : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace xmodal
