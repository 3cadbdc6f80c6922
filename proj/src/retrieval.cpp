// src/retrieval.cpp

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

#include "xmodal/retrieval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <iomanip>

#include "json.hpp"

#include "xmodal/error.hpp"

namespace xmodal {

AudioIndex::AudioIndex(std::vector<std::string> ids, Matrix embeddings)
    : ids_(std::move(ids)), embeddings_(std::move(embeddings)) {
  if (static_cast<Eigen::Index>(ids_.size()) != embeddings_.cols()) {
    Fail(ErrorCode::kShapeError, "index ids and embedding columns differ");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) {
      Fail(ErrorCode::kDuplicateId, "audio_id '" + id + "' indexed twice");
    }
  }
}

std::vector<ScoredItem> Rank(const AudioIndex& index,
                             const Eigen::Ref<const Vector>& query,
                             std::optional<std::size_t> k) {
  if (index.size() == 0) Fail(ErrorCode::kEmptyIndex, "index is empty");
  if (query.size() != index.dim()) {
    Fail(ErrorCode::kShapeError, "query dim " + std::to_string(query.size()) +
                                     " vs index dim " + std::to_string(index.dim()));
  }
  std::vector<ScoredItem> items;
  items.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    items.push_back({index.ids()[i],
                     CosineSimilarity(query, index.embeddings().col(
                                                 static_cast<Eigen::Index>(i)))
                         .value});
  }
  auto better = [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.audio_id < b.audio_id;
  };
  const std::size_t keep = std::min(k.value_or(items.size()), items.size());
  std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(keep),
                    items.end(), better);
  items.resize(keep);
  return items;
}

namespace {

void CheckQuery(const RankedResult& r, std::size_t k) {
  if (k < 1) Fail(ErrorCode::kInvalidConfig, "k must be >= 1");
  if (r.relevant_ids.empty()) {
    Fail(ErrorCode::kInvalidGroundTruth,
         "query '" + r.query_id + "' has no relevant items");
  }
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) Fail(ErrorCode::kInsufficientData, "no queries");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double RecallAtK(const RankedResult& result, std::size_t k) {
  CheckQuery(result, k);
  std::size_t hits = 0;
  const std::size_t top = std::min(k, result.ranking.size());
  for (std::size_t r = 0; r < top; ++r) {
    hits += result.relevant_ids.count(result.ranking[r].audio_id);
  }
  return static_cast<double>(hits) / static_cast<double>(result.relevant_ids.size());
}

double AveragePrecisionAtK(const RankedResult& result, std::size_t k) {
  CheckQuery(result, k);
  std::size_t hits = 0;
  double sum = 0.0;
  const std::size_t top = std::min(k, result.ranking.size());
  for (std::size_t r = 0; r < top; ++r) {
    if (result.relevant_ids.count(result.ranking[r].audio_id)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(std::min(result.relevant_ids.size(), k));
}

std::vector<double> PerQueryRecall(const std::vector<RankedResult>& results,
                                   std::size_t k) {
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(RecallAtK(r, k));
  return out;
}

std::vector<double> PerQueryAveragePrecision(
    const std::vector<RankedResult>& results, std::size_t k) {
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(AveragePrecisionAtK(r, k));
  return out;
}

double RecallAtK(const std::vector<RankedResult>& results, std::size_t k) {
  return Mean(PerQueryRecall(results, k));
}

double MapAtK(const std::vector<RankedResult>& results, std::size_t k) {
  return Mean(PerQueryAveragePrecision(results, k));
}

namespace {

// t quantile at 0.975 for df = 1..200.
constexpr std::array<double, 200> kT975 = {
    12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004,
    2.262157, 2.228139, 2.200985, 2.178813, 2.160369, 2.144787, 2.131450, 2.119905,
    2.109816, 2.100922, 2.093024, 2.085963, 2.079614, 2.073873, 2.068658, 2.063899,
    2.059539, 2.055529, 2.051831, 2.048407, 2.045230, 2.042272, 2.039513, 2.036933,
    2.034515, 2.032245, 2.030108, 2.028094, 2.026192, 2.024394, 2.022691, 2.021075,
    2.019541, 2.018082, 2.016692, 2.015368, 2.014103, 2.012896, 2.011741, 2.010635,
    2.009575, 2.008559, 2.007584, 2.006647, 2.005746, 2.004879, 2.004045, 2.003241,
    2.002465, 2.001717, 2.000995, 2.000298, 1.999624, 1.998972, 1.998341, 1.997730,
    1.997138, 1.996564, 1.996008, 1.995469, 1.994945, 1.994437, 1.993943, 1.993464,
    1.992997, 1.992543, 1.992102, 1.991673, 1.991254, 1.990847, 1.990450, 1.990063,
    1.989686, 1.989319, 1.988960, 1.988610, 1.988268, 1.987934, 1.987608, 1.987290,
    1.986979, 1.986675, 1.986377, 1.986086, 1.985802, 1.985523, 1.985251, 1.984984,
    1.984723, 1.984467, 1.984217, 1.983972, 1.983731, 1.983495, 1.983264, 1.983038,
    1.982815, 1.982597, 1.982383, 1.982173, 1.981967, 1.981765, 1.981567, 1.981372,
    1.981180, 1.980992, 1.980808, 1.980626, 1.980448, 1.980272, 1.980100, 1.979930,
    1.979764, 1.979600, 1.979439, 1.979280, 1.979124, 1.978971, 1.978820, 1.978671,
    1.978524, 1.978380, 1.978239, 1.978099, 1.977961, 1.977826, 1.977692, 1.977561,
    1.977431, 1.977304, 1.977178, 1.977054, 1.976931, 1.976811, 1.976692, 1.976575,
    1.976460, 1.976346, 1.976233, 1.976122, 1.976013, 1.975905, 1.975799, 1.975694,
    1.975590, 1.975488, 1.975387, 1.975288, 1.975189, 1.975092, 1.974996, 1.974902,
    1.974808, 1.974716, 1.974625, 1.974535, 1.974446, 1.974358, 1.974271, 1.974185,
    1.974100, 1.974017, 1.973934, 1.973852, 1.973771, 1.973691, 1.973612, 1.973534,
    1.973457, 1.973381, 1.973305, 1.973231, 1.973157, 1.973084, 1.973012, 1.972941,
    1.972870, 1.972800, 1.972731, 1.972663, 1.972595, 1.972528, 1.972462, 1.972396,
    1.972332, 1.972268, 1.972204, 1.972141, 1.972079, 1.972017, 1.971957, 1.971896,
};

constexpr double kNormal975 = 1.959964;

}  // namespace

double StudentT975(std::size_t df) {
  if (df < 1) Fail(ErrorCode::kInsufficientData, "t quantile needs df >= 1");
  return df <= kT975.size() ? kT975[df - 1] : kNormal975;
}

ConfidenceInterval JackknifeCi(const std::vector<double>& scores, double confidence) {
  if (confidence != 0.95) {
    Fail(ErrorCode::kInvalidConfig, "only 95% intervals are supported");
  }
  const std::size_t n = scores.size();
  if (n < 2) Fail(ErrorCode::kInsufficientData, "jackknife needs n >= 2");
  const double nd = static_cast<double>(n);
  // Work on offsets from the first score: the spread is then exactly zero
  // for constant input and unaffected by the magnitude of a common shift.
  const double pivot = scores.front();
  double shifted_sum = 0.0;
  for (double s : scores) shifted_sum += s - pivot;
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    loo[i] = (shifted_sum - (scores[i] - pivot)) / (nd - 1.0);
  }
  const double loo_mean = std::accumulate(loo.begin(), loo.end(), 0.0) / nd;
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  const double se = std::sqrt((nd - 1.0) / nd * ss);

  ConfidenceInterval ci;
  ci.estimate = pivot + shifted_sum / nd;
  ci.half_width = StudentT975(n - 1) * se;
  ci.low = std::clamp(ci.estimate - ci.half_width, 0.0, 1.0);
  ci.high = std::clamp(ci.estimate + ci.half_width, 0.0, 1.0);
  return ci;
}

const MetricValue& MetricReport::Get(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m;
  }
  Fail(ErrorCode::kInvalidMetric, "no metric named " + name);
}

MetricReport ComputeMetricReport(const std::vector<RankedResult>& results) {
  MetricReport report;
  report.n = results.size();
  for (std::size_t k : {1, 5, 10}) {
    report.metrics.push_back(
        {"recall@" + std::to_string(k), JackknifeCi(PerQueryRecall(results, k))});
  }
  report.metrics.push_back(
      {"map@10", JackknifeCi(PerQueryAveragePrecision(results, 10))});
  return report;
}

std::string FormatMetricReportTsv(const MetricReport& report) {
  std::ostringstream os;
  os << "metric\tvalue\tci_low\tci_high\tn\n" << std::fixed << std::setprecision(3);
  for (const auto& m : report.metrics) {
    os << m.name << '\t' << m.ci.estimate << '\t' << m.ci.low << '\t' << m.ci.high
       << '\t' << report.n << '\n';
  }
  return os.str();
}

std::string FormatMetricReportJson(const MetricReport& report) {
  nlohmann::ordered_json out;
  out["n"] = report.n;
  for (const auto& m : report.metrics) {
    out["metrics"].push_back({{"metric", m.name},
                              {"value", m.ci.estimate},
                              {"ci_low", m.ci.low},
                              {"ci_high", m.ci.high}});
  }
  return out.dump(2) + "\n";
}

}  // namespace xmodal
