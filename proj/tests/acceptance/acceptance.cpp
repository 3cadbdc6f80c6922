// tests/acceptance/acceptance.cpp

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

// Acceptance suite.  Prints one PASS/FAIL line per criterion and exits
// non-zero if any hard criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

#include "../oracles.hpp"
#include "xmodal/adapter.hpp"
#include "xmodal/checkpoint.hpp"
#include "xmodal/cli.hpp"
#include "xmodal/losses.hpp"
#include "xmodal/optim.hpp"
#include "xmodal/retrieval.hpp"
#include "xmodal/synthetic.hpp"
#include "xmodal/training.hpp"

using namespace xmodal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix Random(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

// ---------------------------------------------------------------------------

Outcome GradientCorrectness() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    auto dim = [&] { return static_cast<Eigen::Index>(1 + rng() % 8); };
    const AdapterDims ad{dim(), dim(), dim()};
    const AdapterDims td{dim(), dim(), ad.output};
    const Eigen::Index b = 2 + static_cast<Eigen::Index>(rng() % 3);
    const bool nt = trial % 2 == 0;
    const PairMining mining = (trial / 2) % 2 == 0 ? PairMining::kAllPairs
                                                   : PairMining::kCrossModalOnly;
    // Random biases as well as weights: with zero biases and a tiny hidden
    // layer an item can lose every unit, leaving a zero output where the
    // cosine has no derivative.
    const Adapter audio = Adapter::FromFlat(ad, Random(ad.ParameterCount(), 1, rng).col(0));
    const Adapter text = Adapter::FromFlat(td, Random(td.ParameterCount(), 1, rng).col(0));
    const Matrix audio_in = Random(ad.input, b, rng);
    const Matrix text_in = Random(td.input, b, rng);
    std::vector<std::string> labels;
    for (Eigen::Index i = 0; i < b; ++i) labels.push_back("l" + std::to_string(i));

    auto loss_of = [&](const Adapter& a, const Adapter& t) {
      BatchEmbeddings batch{ForwardPooled(a, audio_in).output, ForwardPooled(t, text_in).output,
                            labels};
      return nt ? NtXentLoss(batch, mining) : ContrastiveLoss(batch, mining);
    };
    const Eigen::Index na = ad.ParameterCount();
    const Eigen::Index nt_params = td.ParameterCount();
    Vector x(na + nt_params);
    x << audio.vector(), text.vector();
    auto f = [&](const Vector& v) {
      return loss_of(Adapter::FromFlat(ad, v.head(na)), Adapter::FromFlat(td, v.tail(nt_params)))
          .value;
    };
    const auto af = ForwardPooled(audio, audio_in);
    const auto tf = ForwardPooled(text, text_in);
    BatchEmbeddings batch{af.output, tf.output, labels};
    const LossOutput out = nt ? NtXentLoss(batch, mining) : ContrastiveLoss(batch, mining);
    Vector analytic(x.size());
    analytic << Backward(audio, af.cache, out.audio_grad).vector(),
        Backward(text, tf.cache, out.text_grad).vector();
    const double err = CheckGradient(f, x, analytic);
    worst = std::max(worst, err);
  }
  const double secs = Seconds(start);
  return {worst < 1e-4 && secs < 10.0,
          Fmt("max relative error %.2e over 50 composites (< 1e-4), %.2f s (< 10 s)", worst, secs)};
}

Outcome LossUnitValues() {
  bool ok = ContrastivePairLoss(1.0, true) == 0.0 && ContrastivePairLoss(0.25, true) == 0.75 &&
            ContrastivePairLoss(-0.4, true) == 1.4 && ContrastivePairLoss(-0.3, false) == 0.0 &&
            ContrastivePairLoss(0.4, false) == 0.4;
  double worst = 0.0;
  for (Eigen::Index b : {2, 3, 4}) {
    // Every item equal: all similarities are 1.
    BatchEmbeddings batch{Matrix::Ones(5, b), Matrix::Ones(5, b), {}};
    for (Eigen::Index i = 0; i < b; ++i) batch.labels.push_back(std::to_string(i));
    const double v = NtXentLoss(batch, PairMining::kCrossModalOnly).value;
    worst = std::max(worst, std::abs(v - std::log(static_cast<double>(b))));
  }
  ok = ok && worst < 1e-10;
  return {ok, Fmt("pair losses exact; |NT-Xent - ln B| max %.1e for B in {2,3,4} (< 1e-10)",
                  worst)};
}

Outcome MetricOracle() {
  std::mt19937_64 rng(77);
  int mismatches = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 50);
    std::vector<std::string> ids;
    for (Eigen::Index i = 0; i < n; ++i) ids.push_back("a" + std::to_string(i));
    const AudioIndex index(ids, Random(6, n, rng));
    const Vector q = Random(6, 1, rng).col(0);
    const std::string rel = ids[rng() % ids.size()];
    RankedResult r{"q", Rank(index, q), {rel}};
    std::vector<std::string> order;
    for (const auto& s : r.ranking) order.push_back(s.audio_id);
    for (std::size_t k : {1, 5, 10}) {
      if (RecallAtK({r}, k) != oracle::Recall(order, {rel}, k)) ++mismatches;
    }
    if (MapAtK({r}, 10) != oracle::SingleRelevantAp(order, rel, 10)) ++mismatches;
  }
  double worst_multi = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    std::vector<std::string> ids;
    for (int i = 0; i < 30; ++i) ids.push_back("a" + std::to_string(i));
    std::shuffle(ids.begin(), ids.end(), rng);
    std::set<std::string> rel;
    const std::size_t n_rel = 2 + rng() % 12;
    while (rel.size() < n_rel) rel.insert(ids[rng() % ids.size()]);
    RankedResult r{"q", {}, rel};
    for (std::size_t i = 0; i < ids.size(); ++i) {
      r.ranking.push_back({ids[i], 1.0 - 0.01 * static_cast<double>(i)});
    }
    double sum = 0.0;
    int hits = 0;
    for (std::size_t i = 0; i < 10; ++i) {
      if (rel.count(ids[i])) sum += static_cast<double>(++hits) / static_cast<double>(i + 1);
    }
    const double expected = sum / static_cast<double>(std::min<std::size_t>(rel.size(), 10));
    worst_multi = std::max(worst_multi, std::abs(AveragePrecisionAtK(r, 10) - expected));
  }
  return {mismatches == 0 && worst_multi < 1e-12,
          Fmt("%d mismatches over 200 single-relevant instances; multi-relevant AP max error "
              "%.1e (< 1e-12)",
              mismatches, worst_multi)};
}

Outcome Jackknife() {
  const auto constant = JackknifeCi(std::vector<double>(40, 0.42));
  const bool zero_width = constant.low == constant.high && constant.half_width == 0.0;
  const auto two = JackknifeCi({0.0, 1.0});
  const bool two_ok = std::abs(two.half_width - 6.353) < 1e-3;

  std::mt19937_64 rng(5);
  std::bernoulli_distribution hit(0.3);
  std::vector<double> ln, lw;
  for (std::size_t n : {25u, 100u, 400u}) {
    double w = 0.0;
    const int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
      std::vector<double> s(n);
      for (double& v : s) v = hit(rng) ? 1.0 : 0.0;
      w += JackknifeCi(s).half_width / reps;
    }
    ln.push_back(std::log(static_cast<double>(n)));
    lw.push_back(std::log(w));
  }
  const double mx = std::accumulate(ln.begin(), ln.end(), 0.0) / 3.0;
  const double my = std::accumulate(lw.begin(), lw.end(), 0.0) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (ln[i] - mx) * (lw[i] - my);
    sxx += (ln[i] - mx) * (ln[i] - mx);
  }
  const double slope = sxy / sxx;
  return {zero_width && two_ok && slope >= -0.6 && slope <= -0.4,
          Fmt("constant width %.1e; {0,1} half-width %.4f (6.353 +- 1e-3); width exponent %.3f "
              "in [-0.6, -0.4]",
              constant.high - constant.low, two.half_width, slope)};
}

// ---------------------------------------------------------------------------

SyntheticSpec CorpusSpec(std::uint64_t seed) {
  SyntheticSpec s;  // 256 pairs, 16-d latent, 2048/768 views, 192/32/32
  s.sample_seed = seed;
  return s;
}

struct RunMetrics {
  double train_r1 = 0.0;
  double test_r10 = 0.0;
  double test_map10 = 0.0;
};

RunMetrics TrainAndScore(const Dataset& ds, LossKind loss, PairMining mining,
                         std::uint64_t seed) {
  TrainConfig c;
  c.loss = loss;
  c.mining = mining;
  c.seed = seed;
  c.stages = ConfigureStrategy(Strategy::kAtae, "clean", "noisy");
  const TrainResult r = RunTraining(c, {{"clean", ds}}, ds);
  RunMetrics m;
  const auto train = PoolExamples(ds.InSplit(Split::kTrain));
  m.train_r1 = RecallAtK(RetrieveTextToAudio(r.best, train, std::nullopt), 1);
  const auto test = RetrieveTextToAudio(r.best, PoolExamples(ds.InSplit(Split::kTest)), 10);
  m.test_r10 = RecallAtK(test, 10);
  m.test_map10 = MapAtK(test, 10);
  return m;
}

Outcome SyntheticEndToEnd() {
  const auto start = std::chrono::steady_clock::now();
  const double chance = 10.0 / 32.0;
  int good = 0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset ds = MakeSyntheticDataset(CorpusSpec(seed), "clean");
    const RunMetrics m = TrainAndScore(ds, LossKind::kNtXent, PairMining::kCrossModalOnly, seed);
    const bool ok = m.train_r1 >= 0.9 && m.test_r10 >= 3.0 * chance;
    good += ok ? 1 : 0;
    per_seed += Fmt(" [seed %d R@1 %.3f R@10 %.3f]", static_cast<int>(seed), m.train_r1,
                    m.test_r10);
  }
  const double secs = Seconds(start);
  return {good >= 4 && secs < 120.0,
          Fmt("%d/5 seeds meet train R@1 >= 0.9 and test R@10 >= %.4f, %.1f s (< 120 s);", good,
              3.0 * chance, secs) +
              per_seed};
}

Outcome AblationTrend(std::string& note) {
  double sum[3] = {0, 0, 0};
  const std::pair<LossKind, PairMining> arms[3] = {
      {LossKind::kNtXent, PairMining::kCrossModalOnly},
      {LossKind::kNtXent, PairMining::kAllPairs},
      {LossKind::kContrastive, PairMining::kAllPairs}};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset ds = MakeSyntheticDataset(CorpusSpec(seed), "clean");
    for (int a = 0; a < 3; ++a) {
      sum[a] += TrainAndScore(ds, arms[a].first, arms[a].second, seed).test_map10 / 5.0;
    }
  }
  const bool first = sum[0] >= sum[1];
  const bool second = sum[1] >= sum[2] - 0.02;
  if (!first) note = "first inequality inverted (reported, not failed)";
  return {second, Fmt("mean test mAP@10: NT-Xent/cross-modal %.4f, NT-Xent/all-pairs %.4f, "
                      "contrastive/all-pairs %.4f; first >= second: %s; second >= third - 0.02: %s",
                      sum[0], sum[1], sum[2], first ? "yes" : "no", second ? "yes" : "no")};
}

Outcome SchedulerMachine() {
  bool ok = true;
  {
    PlateauScheduler sched{.lr0 = 1e-4};
    EarlyStopper stop;
    std::vector<EpochAction> got;
    for (double s : {0.12, 0.12, 0.11, 0.10, 0.12, 0.05}) {
      got.push_back(SchedulerEpochEnd(sched, stop, s).action);
    }
    ok = ok && got == std::vector<EpochAction>{EpochAction::kContinue, EpochAction::kContinue,
                                               EpochAction::kContinue, EpochAction::kContinue,
                                               EpochAction::kContinue, EpochAction::kReduceLr};
    ok = ok && std::abs(sched.lr() - 1e-5) <= 1e-20;
  }
  int stop_epoch = 0;
  int best_epoch = 0;
  {
    PlateauScheduler sched{.lr0 = 1e-4};
    EarlyStopper stop;
    const std::vector<double> scores = {0.1, 0.2, 0.3, 0.1, 0.1, 0.1, 0.1, 0.1,
                                        0.1, 0.1, 0.1, 0.1, 0.1, 0.9};
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const auto d = SchedulerEpochEnd(sched, stop, scores[i]);
      const int epoch = static_cast<int>(i) + 1;
      const EpochAction expected = epoch == 13  ? EpochAction::kStop
                                   : epoch == 8 ? EpochAction::kReduceLr
                                                : EpochAction::kContinue;
      ok = ok && d.action == expected;
      if (d.action == EpochAction::kStop) {
        stop_epoch = epoch;
        break;
      }
    }
    best_epoch = stop.best_epoch;
  }
  ok = ok && stop_epoch == 13 && best_epoch == 3;

  // Revert: a real training stage returns the weights recorded at its best epoch.
  SyntheticSpec spec = CorpusSpec(1);
  spec.audio_dim = 64;
  spec.text_dim = 48;
  const Dataset ds = MakeSyntheticDataset(spec, "clean");
  TrainConfig c;
  c.hidden_dim = 32;
  c.output_dim = 16;
  c.max_epochs = 40;
  c.stages = ConfigureStrategy(Strategy::kAtae, "clean", "noisy");
  const TrainResult r = RunTraining(c, {{"clean", ds}}, ds);
  const auto val = PoolExamples(ds.InSplit(Split::kValidation));
  const double replay = MapAtK(RetrieveTextToAudio(r.best, val, 10), 10);
  const bool reverted = replay == r.reports[0].best_score;
  ok = ok && reverted;
  return {ok, Fmt("reduce at the 5th flat epoch (lr 1e-4 -> 1e-5); stop at epoch %d with best "
                  "epoch %d; returned weights reproduce best score: %s",
                  stop_epoch, best_epoch, reverted ? "yes" : "no")};
}

// ---------------------------------------------------------------------------

struct Corpus {
  fs::path root;
  fs::path config;
  std::size_t clean_train = 0;
  std::size_t noisy_train = 0;
};

Corpus WriteCorpus(const fs::path& root) {
  Corpus c;
  c.root = root;
  SyntheticSpec clean = CorpusSpec(11);
  clean.pairs = 128;
  clean.train = 96;
  clean.validation = 16;
  SyntheticSpec noisy = CorpusSpec(12);
  noisy.pairs = 160;
  noisy.train = 140;
  noisy.validation = 10;
  noisy.text_noise = 0.5;
  noisy.id_prefix = "fs";
  WriteSyntheticCorpus(clean, root / "clean");
  WriteSyntheticCorpus(noisy, root / "noisy");
  c.clean_train = clean.train;
  c.noisy_train = noisy.train;
  const nlohmann::json cfg = {
      {"loss", "nt_xent"},
      {"mining", "cross_modal_only"},
      {"seed", 5},
      {"max_epochs", 12},
      {"datasets",
       {{"clean", {{"manifest", "clean/manifest.jsonl"}}},
        {"noisy", {{"manifest", "noisy/manifest.jsonl"}, {"noise_tier", "noisy"}}}}}};
  c.config = root / "config.json";
  std::ofstream(c.config) << cfg.dump(2);
  return c;
}

int Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return RunCli(args, out, err);
}

std::map<std::string, std::string> Tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    files[e.path().filename().string()] = ReadFileBytes(e.path());
  }
  return files;
}

Outcome Determinism(const Corpus& corpus) {
  for (const char* run : {"det_a", "det_b"}) {
    if (Cli({"train", "--config", corpus.config.string(), "--strategy", "ATAE-EP-F", "--out",
             (corpus.root / run).string()}) != kExitOk) {
      return {false, "train command failed"};
    }
  }
  const auto a = Tree(corpus.root / "det_a");
  const auto b = Tree(corpus.root / "det_b");
  std::size_t same = 0;
  for (const auto& [name, bytes] : a) same += b.count(name) && b.at(name) == bytes ? 1 : 0;
  return {a.size() == b.size() && same == a.size() && a.size() >= 5,
          Fmt("%zu/%zu output files byte-identical across two ATAE-EP-F runs", same, a.size())};
}

Outcome StrategyPlumbing(const Corpus& corpus) {
  const fs::path np = corpus.root / "np";
  const fs::path et = corpus.root / "et";
  if (Cli({"train", "--config", corpus.config.string(), "--strategy", "ATAE-NP-F", "--out",
           np.string()}) != kExitOk ||
      Cli({"train", "--config", corpus.config.string(), "--strategy", "ATAE-ET", "--out",
           et.string()}) != kExitOk) {
    return {false, "train command failed"};
  }
  const auto np_report = nlohmann::json::parse(ReadFileBytes(np / "report.json"));
  const Checkpoint s1 = LoadCheckpoint(np / "stage1_best.xmck");
  const Checkpoint s2 = LoadCheckpoint(np / "stage2_best.xmck");
  const bool two_stages = np_report["stages"].size() == 2;
  const bool lineage = s1.metadata.init_params_hash.empty() &&
                       s2.metadata.init_params_hash == HashParameters(s1.adapters) &&
                       np_report["stages"][1]["init_params_hash"] ==
                           np_report["stages"][0]["best_params_hash"];
  const auto et_report = nlohmann::json::parse(ReadFileBytes(et / "report.json"));
  const std::size_t et_pairs = et_report["stages"][0]["train_pairs"].get<std::size_t>();
  const bool union_ok = et_report["stages"].size() == 1 &&
                        et_pairs == corpus.clean_train + corpus.noisy_train;
  return {two_stages && lineage && union_ok,
          Fmt("ATAE-NP-F stages %zu, finetune init hash matches pretrain best: %s; ATAE-ET "
              "train pairs %zu = %zu clean + %zu noisy",
              np_report["stages"].size(), lineage ? "yes" : "no", et_pairs, corpus.clean_train,
              corpus.noisy_train)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn,
                    const std::string* note = nullptr) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %d %s: %s  %s%s\n", id, name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), note && !note->empty() ? ("  NOTE: " + *note).c_str() : "");
    std::fflush(stdout);
  };

  report(1, "gradient correctness", GradientCorrectness);
  report(2, "loss unit values", LossUnitValues);
  report(3, "metric oracle equivalence", MetricOracle);
  report(4, "jackknife", Jackknife);
  report(5, "synthetic end-to-end", SyntheticEndToEnd);
  std::string ablation_note;
  report(6, "ablation trend", [&] { return AblationTrend(ablation_note); }, &ablation_note);
  report(7, "scheduler state machine", SchedulerMachine);

  const fs::path root = fs::temp_directory_path() /
                        ("xmodal_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(root);
  Corpus corpus;
  try {
    corpus = WriteCorpus(root);
  } catch (const std::exception& e) {
    std::printf("corpus setup failed: %s\n", e.what());
  }
  report(8, "determinism", [&] { return Determinism(corpus); });
  report(9, "strategy plumbing", [&] { return StrategyPlumbing(corpus); });
  std::error_code ec;
  fs::remove_all(root, ec);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
