// src/losses.cpp

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

#include "xmodal/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xmodal/error.hpp"

namespace xmodal {

std::string_view PairMiningName(PairMining mining) {
  return mining == PairMining::kAllPairs ? "all_pairs" : "cross_modal_only";
}

std::optional<PairMining> ParsePairMining(std::string_view name) {
  if (name == "all_pairs") return PairMining::kAllPairs;
  if (name == "cross_modal_only") return PairMining::kCrossModalOnly;
  return std::nullopt;
}

double ContrastivePairLoss(double similarity, bool same_label) {
  return same_label ? 1.0 - similarity : std::max(0.0, similarity);
}

namespace {

// Items 0..B-1 are audio, B..2B-1 text.
struct Normalized {
  Matrix unit;         // F' x 2B, zero column for zero-norm inputs
  Vector norms;        // 2B
  Matrix similarity;   // 2B x 2B
};

void Validate(const BatchEmbeddings& batch) {
  if (batch.size() == 0) Fail(ErrorCode::kInvalidBatch, "empty batch");
  if (batch.text.cols() != batch.audio.cols() ||
      batch.text.rows() != batch.audio.rows() ||
      static_cast<Eigen::Index>(batch.labels.size()) != batch.audio.cols()) {
    Fail(ErrorCode::kInvalidBatch,
         "audio, text and labels must have the same number of rows");
  }
  if (!batch.audio.allFinite() || !batch.text.allFinite()) {
    Fail(ErrorCode::kNumericalFailure, "non-finite embedding in loss input");
  }
}

Normalized Normalize(const BatchEmbeddings& batch) {
  const Eigen::Index b = batch.size();
  Normalized n;
  n.unit.resize(batch.audio.rows(), 2 * b);
  n.unit.leftCols(b) = batch.audio;
  n.unit.rightCols(b) = batch.text;
  n.norms = n.unit.colwise().norm().transpose();
  for (Eigen::Index i = 0; i < 2 * b; ++i) {
    if (n.norms[i] > 0.0) {
      n.unit.col(i) /= n.norms[i];
    } else {
      n.unit.col(i).setZero();
    }
  }
  n.similarity = n.unit.transpose() * n.unit;
  return n;
}

// Chain rule from dL/dS (S = cosine matrix) back to the raw embeddings.
void BackpropSimilarity(const Normalized& n, const Matrix& sim_grad,
                        Eigen::Index b, LossOutput& out) {
  Matrix unit_grad = n.unit * (sim_grad + sim_grad.transpose());
  Matrix grad(unit_grad.rows(), unit_grad.cols());
  for (Eigen::Index i = 0; i < 2 * b; ++i) {
    if (n.norms[i] > 0.0) {
      const auto u = n.unit.col(i);
      grad.col(i) = (unit_grad.col(i) - u * u.dot(unit_grad.col(i))) / n.norms[i];
    } else {
      grad.col(i).setZero();
    }
  }
  out.audio_grad = grad.leftCols(b);
  out.text_grad = grad.rightCols(b);
}

}  // namespace

LossOutput ContrastiveLoss(const BatchEmbeddings& batch, PairMining mining) {
  Validate(batch);
  const Eigen::Index b = batch.size();
  const Normalized n = Normalize(batch);

  // Upper-triangular dL/dS, scaled by the active count afterwards.
  Matrix sim_grad = Matrix::Zero(2 * b, 2 * b);
  double total = 0.0;
  std::size_t active = 0;
  auto visit = [&](Eigen::Index i, Eigen::Index j, bool same) {
    const double s = n.similarity(i, j);
    const double loss = ContrastivePairLoss(s, same);
    if (loss > 0.0) {
      total += loss;
      ++active;
      sim_grad(i, j) = same ? -1.0 : 1.0;
    }
  };
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = 0; j < b; ++j) {
      visit(i, b + j, batch.labels[i] == batch.labels[j]);
    }
  }
  if (mining == PairMining::kAllPairs) {
    for (Eigen::Index i = 0; i < b; ++i) {
      for (Eigen::Index j = i + 1; j < b; ++j) {
        const bool same = batch.labels[i] == batch.labels[j];
        visit(i, j, same);
        visit(b + i, b + j, same);
      }
    }
  }

  LossOutput out;
  out.active_pair_count = active;
  if (active == 0) {
    out.audio_grad = Matrix::Zero(batch.audio.rows(), b);
    out.text_grad = Matrix::Zero(batch.text.rows(), b);
    return out;
  }
  out.value = total / static_cast<double>(active);
  sim_grad /= static_cast<double>(active);
  BackpropSimilarity(n, sim_grad, b, out);
  return out;
}

LossOutput NtXentLoss(const BatchEmbeddings& batch, PairMining mining,
                      double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    Fail(ErrorCode::kInvalidConfig, "temperature must be positive");
  }
  Validate(batch);
  const Eigen::Index b = batch.size();
  const Eigen::Index m = 2 * b;
  const Normalized n = Normalize(batch);
  const double anchors = static_cast<double>(m);

  Matrix sim_grad = Matrix::Zero(m, m);
  double total = 0.0;
  Vector logits(m);
  std::vector<Eigen::Index> candidates;
  candidates.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index a = 0; a < m; ++a) {
    const bool is_audio = a < b;
    const Eigen::Index positive = is_audio ? a + b : a - b;
    candidates.clear();
    for (Eigen::Index c = 0; c < m; ++c) {
      if (c == a) continue;
      if (mining == PairMining::kCrossModalOnly && (c < b) == is_audio) continue;
      candidates.push_back(c);
    }
    double max_logit = -std::numeric_limits<double>::infinity();
    for (auto c : candidates) {
      logits[c] = n.similarity(a, c) / temperature;
      max_logit = std::max(max_logit, logits[c]);
    }
    double denom = 0.0;
    for (auto c : candidates) denom += std::exp(logits[c] - max_logit);
    const double log_sum = max_logit + std::log(denom);
    total += log_sum - logits[positive];
    for (auto c : candidates) {
      const double p = std::exp(logits[c] - log_sum);
      sim_grad(a, c) += p / (temperature * anchors);
    }
    sim_grad(a, positive) -= 1.0 / (temperature * anchors);
  }

  LossOutput out;
  out.value = total / anchors;
  out.active_pair_count = static_cast<std::size_t>(m);
  BackpropSimilarity(n, sim_grad, b, out);
  return out;
}

}  // namespace xmodal
