// include/xmodal/retrieval.hpp

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

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xmodal/numerics.hpp"

namespace xmodal {

/// Immutable set of adapted audio embeddings.
class AudioIndex {
 public:
  AudioIndex(std::vector<std::string> ids, Matrix embeddings /* F' x N */);

  std::size_t size() const { return ids_.size(); }
  Eigen::Index dim() const { return embeddings_.rows(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Matrix& embeddings() const { return embeddings_; }

 private:
  std::vector<std::string> ids_;
  Matrix embeddings_;
};

struct ScoredItem {
  std::string audio_id;
  double score = 0.0;
};

struct RankedResult {
  std::string query_id;
  std::vector<ScoredItem> ranking;
  std::set<std::string> relevant_ids;
};

/// Cosine similarity descending, ties by ascending audio_id.  k limits the
/// result to a prefix; nullopt or k >= size returns the full ranking.
std::vector<ScoredItem> Rank(const AudioIndex& index,
                             const Eigen::Ref<const Vector>& query,
                             std::optional<std::size_t> k = std::nullopt);

/// |relevant ∩ top-k| / |relevant| for one query.
double RecallAtK(const RankedResult& result, std::size_t k);
/// (1 / min(|relevant|, k)) * sum of precision@r over relevant r <= k.
double AveragePrecisionAtK(const RankedResult& result, std::size_t k);

double RecallAtK(const std::vector<RankedResult>& results, std::size_t k);
double MapAtK(const std::vector<RankedResult>& results, std::size_t k = 10);

std::vector<double> PerQueryRecall(const std::vector<RankedResult>& results,
                                   std::size_t k);
std::vector<double> PerQueryAveragePrecision(
    const std::vector<RankedResult>& results, std::size_t k);

struct ConfidenceInterval {
  double estimate = 0.0;
  double low = 0.0;   // clipped to [0, 1]
  double high = 0.0;  // clipped to [0, 1]
  double half_width = 0.0;  // before clipping
};

/// Two-sided 97.5% Student-t quantile; table up to df = 200, normal beyond.
double StudentT975(std::size_t df);

/// Leave-one-out jackknife interval for the mean of per-query scores.
/// Only confidence = 0.95 is supported.
ConfidenceInterval JackknifeCi(const std::vector<double>& scores,
                               double confidence = 0.95);

struct MetricValue {
  std::string name;
  ConfidenceInterval ci;
};

struct MetricReport {
  std::vector<MetricValue> metrics;  // recall@1, recall@5, recall@10, map@10
  std::size_t n = 0;

  const MetricValue& Get(const std::string& name) const;
};

MetricReport ComputeMetricReport(const std::vector<RankedResult>& results);

/// Columns metric, value, ci_low, ci_high, n; three decimals.
std::string FormatMetricReportTsv(const MetricReport& report);
std::string FormatMetricReportJson(const MetricReport& report);

}  // namespace xmodal
