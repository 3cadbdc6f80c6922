// include/xmodal/losses.hpp

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
#include <string>
#include <string_view>
#include <optional>
#include <vector>

#include "xmodal/numerics.hpp"

namespace xmodal {

enum class PairMining {
  kAllPairs,        // audio-text, audio-audio and text-text
  kCrossModalOnly,  // audio-text only
};

std::string_view PairMiningName(PairMining mining);
std::optional<PairMining> ParsePairMining(std::string_view name);

inline constexpr double kDefaultTemperature = 0.07;

/// Column i of audio and column i of text form a positive pair and share
/// labels[i].  Two rows with equal labels (two captions of one audio) are
/// also treated as similar by the contrastive loss.
struct BatchEmbeddings {
  Matrix audio;  // F' x B
  Matrix text;   // F' x B
  std::vector<std::string> labels;

  Eigen::Index size() const { return audio.cols(); }
};

struct LossOutput {
  double value = 0.0;
  Matrix audio_grad;  // F' x B
  Matrix text_grad;   // F' x B
  // Contrastive: pairs with strictly positive loss.  NT-Xent: anchors.
  std::size_t active_pair_count = 0;
};

/// Pairwise loss 1 - s for same-label pairs and max(0, s) otherwise, with s
/// the cosine similarity; averaged over the pairs whose loss is > 0.
LossOutput ContrastiveLoss(const BatchEmbeddings& batch, PairMining mining);

/// Every audio and every text item acts as an anchor whose positive is its
/// row-aligned partner; candidates are the opposite modality
/// (kCrossModalOnly) or every other item (kAllPairs).  Averaged over anchors.
LossOutput NtXentLoss(const BatchEmbeddings& batch, PairMining mining,
                      double temperature = kDefaultTemperature);

/// Per-pair contrastive term.
double ContrastivePairLoss(double similarity, bool same_label);

}  // namespace xmodal
