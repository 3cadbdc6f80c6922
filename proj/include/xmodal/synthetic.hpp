// include/xmodal/synthetic.hpp

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
#include <string>

#include "xmodal/data_model.hpp"

namespace xmodal {

/// Paired embeddings generated from a shared low-dimensional latent.  Each
/// view applies a fixed random linear map (drawn from map_seed) to the
/// latent and adds Gaussian noise to every frame.
struct SyntheticSpec {
  std::size_t pairs = 256;
  std::size_t latent_dim = 16;
  std::size_t audio_dim = 2048;
  std::size_t text_dim = 768;
  std::size_t audio_frames = 4;
  std::size_t text_frames = 3;
  double audio_noise = 0.05;
  double text_noise = 0.05;
  // The first `train` pairs go to train, the next `validation` to
  // validation, the rest to test.
  std::size_t train = 192;
  std::size_t validation = 32;
  std::uint64_t map_seed = 7;
  std::uint64_t sample_seed = 0;
  std::string id_prefix;  // keeps ids distinct across corpora
};

Dataset MakeSyntheticDataset(const SyntheticSpec& spec, std::string name,
                             NoiseTier tier = NoiseTier::kClean);

/// Writes every embedding plus a manifest.jsonl with relative paths into dir.
void WriteSyntheticCorpus(const SyntheticSpec& spec, const std::filesystem::path& dir);

}  // namespace xmodal
