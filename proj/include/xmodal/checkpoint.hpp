// include/xmodal/checkpoint.hpp

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
#include <string_view>

#include "xmodal/adapter.hpp"

namespace xmodal {

struct AdapterPair {
  Adapter audio;
  Adapter text;
};

struct CheckpointMetadata {
  int epoch = 0;
  double score = 0.0;
  std::string config_hash;
  int stage = 0;
  // Hash of the parameters this stage started from (empty for fresh init);
  // links a fine-tuning checkpoint to the one it inherited.
  std::string init_params_hash;

  bool operator==(const CheckpointMetadata&) const = default;
};

struct Checkpoint {
  AdapterPair adapters;
  CheckpointMetadata metadata;
};

// Checkpoint file ("XMCK"):
//   magic[4] = "XMCK", u16 version = 1; then for the audio and the text
//   adapter: u32 F, u32 H, u32 F', (H*F + H + F'*H + F') f64 in
//   W1, b1, W2, b2 order (row-major); then u32 length + UTF-8 JSON metadata.
inline constexpr char kCheckpointMagic[4] = {'X', 'M', 'C', 'K'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

std::string SerializeCheckpoint(const AdapterPair& adapters,
                                const CheckpointMetadata& metadata);
Checkpoint ParseCheckpoint(std::string_view bytes);

void SaveCheckpoint(const std::filesystem::path& path, const AdapterPair& adapters,
                    const CheckpointMetadata& metadata);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

/// FNV-1a 64-bit, rendered as 16 hex digits.
std::string HashBytes(std::string_view bytes);
/// Hash of both adapters' dims and parameter bytes.
std::string HashParameters(const AdapterPair& adapters);

}  // namespace xmodal
