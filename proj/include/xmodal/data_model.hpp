// include/xmodal/data_model.hpp

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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xmodal/numerics.hpp"

namespace xmodal {

enum class Modality { kAudio, kText };
enum class Split { kTrain, kValidation, kTest };
enum class NoiseTier { kClean, kNoisy };

std::string_view SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view name);

/// One encoder output: T rows of F features.
struct EmbeddingSequence {
  std::string item_id;
  Modality modality = Modality::kAudio;
  Matrix data;  // T x F

  Eigen::Index length() const { return data.rows(); }
  Eigen::Index dim() const { return data.cols(); }
};

struct PairedExample {
  std::string pair_id;
  std::shared_ptr<const EmbeddingSequence> audio;
  std::shared_ptr<const EmbeddingSequence> text;
  std::string label;  // the audio_id
  Split split = Split::kTrain;
};

struct Dataset {
  std::string name;
  std::vector<PairedExample> examples;
  NoiseTier noise_tier = NoiseTier::kClean;

  std::vector<const PairedExample*> InSplit(Split split) const;
};

// Binary embedding file ("XMEB"):
//   magic[4] = "XMEB", u16 version = 1, u8 dtype = 1 (f32), u8 reserved = 0,
//   u32 T, u32 F, then T*F f32 row-major.  Everything little-endian.
inline constexpr char kEmbeddingMagic[4] = {'X', 'M', 'E', 'B'};
inline constexpr std::uint16_t kEmbeddingVersion = 1;
inline constexpr std::uint8_t kEmbeddingDtypeF32 = 1;
inline constexpr std::size_t kEmbeddingHeaderSize = 16;

EmbeddingSequence ParseEmbedding(std::string_view bytes,
                                 std::string item_id = {},
                                 Modality modality = Modality::kAudio);
std::string SerializeEmbedding(const Eigen::Ref<const Matrix>& data);

/// item_id defaults to the file stem.
EmbeddingSequence ReadEmbeddingFile(const std::filesystem::path& path,
                                    Modality modality = Modality::kAudio,
                                    std::optional<std::string> item_id = {});
void WriteEmbeddingFile(const std::filesystem::path& path,
                        const Eigen::Ref<const Matrix>& data);

/// Reads a JSON-lines manifest.  Relative embedding paths resolve against
/// embedding_root.  Records sharing an audio_id share a label and one
/// loaded audio sequence.
Dataset LoadManifest(const std::filesystem::path& manifest,
                     const std::filesystem::path& embedding_root,
                     std::string name = {},
                     NoiseTier tier = NoiseTier::kClean);

/// Concatenation, with pair_ids required to stay unique.
Dataset UnionDatasets(std::string name, const std::vector<const Dataset*>& parts);

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace xmodal
