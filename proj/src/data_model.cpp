// src/data_model.cpp

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

#include "xmodal/data_model.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "byte_io.hpp"
#include "xmodal/error.hpp"
#include "xmodal/log.hpp"

namespace xmodal {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "train";
}

std::optional<Split> ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation") return Split::kValidation;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

std::vector<const PairedExample*> Dataset::InSplit(Split split) const {
  std::vector<const PairedExample*> out;
  for (const auto& ex : examples) {
    if (ex.split == split) out.push_back(&ex);
  }
  return out;
}

std::string ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileBytes(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIoError, "short write to " + path.string());
}

EmbeddingSequence ParseEmbedding(std::string_view bytes, std::string item_id,
                                 Modality modality) {
  if (bytes.size() < kEmbeddingHeaderSize ||
      bytes.substr(0, 4) != std::string_view(kEmbeddingMagic, 4)) {
    Fail(ErrorCode::kFormatError, "'" + item_id + "': bad magic");
  }
  detail::ByteReader r(bytes);
  r.Bytes(4);
  const auto version = r.Uint<std::uint16_t>();
  const auto dtype = r.Uint<std::uint8_t>();
  r.Uint<std::uint8_t>();  // reserved
  if (version != kEmbeddingVersion) {
    Fail(ErrorCode::kFormatError, "'" + item_id + "': unsupported version " +
                                      std::to_string(version));
  }
  if (dtype != kEmbeddingDtypeF32) {
    Fail(ErrorCode::kFormatError,
         "'" + item_id + "': unsupported dtype " + std::to_string(dtype));
  }
  const std::uint64_t t = r.Uint<std::uint32_t>();
  const std::uint64_t f = r.Uint<std::uint32_t>();
  if (t < 1 || f < 1) {
    Fail(ErrorCode::kCorruptFile, "'" + item_id + "': empty shape");
  }
  if (r.remaining() != t * f * 4) {
    Fail(ErrorCode::kCorruptFile,
         "'" + item_id + "': header says " + std::to_string(t) + "x" +
             std::to_string(f) + " but payload holds " +
             std::to_string(r.remaining()) + " bytes");
  }
  EmbeddingSequence seq{std::move(item_id), modality,
                        Matrix(static_cast<Eigen::Index>(t),
                               static_cast<Eigen::Index>(f))};
  for (Eigen::Index i = 0; i < seq.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < seq.data.cols(); ++j) {
      const float v = r.F32();
      if (!std::isfinite(v)) {
        Fail(ErrorCode::kInvalidValues,
             "'" + seq.item_id + "': non-finite value at (" +
                 std::to_string(i) + "," + std::to_string(j) + ")");
      }
      seq.data(i, j) = v;
    }
  }
  return seq;
}

std::string SerializeEmbedding(const Eigen::Ref<const Matrix>& data) {
  if (data.rows() < 1 || data.cols() < 1) {
    Fail(ErrorCode::kShapeError, "cannot serialize an empty embedding");
  }
  detail::ByteWriter w;
  w.Bytes(std::string_view(kEmbeddingMagic, 4));
  w.Uint<std::uint16_t>(kEmbeddingVersion);
  w.Uint<std::uint8_t>(kEmbeddingDtypeF32);
  w.Uint<std::uint8_t>(0);
  w.Uint<std::uint32_t>(static_cast<std::uint32_t>(data.rows()));
  w.Uint<std::uint32_t>(static_cast<std::uint32_t>(data.cols()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      w.F32(static_cast<float>(data(i, j)));
    }
  }
  return w.Take();
}

EmbeddingSequence ReadEmbeddingFile(const fs::path& path, Modality modality,
                                    std::optional<std::string> item_id) {
  return ParseEmbedding(ReadFileBytes(path),
                        item_id ? *item_id : path.stem().string(), modality);
}

void WriteEmbeddingFile(const fs::path& path,
                        const Eigen::Ref<const Matrix>& data) {
  WriteFileBytes(path, SerializeEmbedding(data));
}

namespace {

std::string RequireString(const json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    Fail(ErrorCode::kFormatError, "manifest line " + std::to_string(line) +
                                      ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

Dataset LoadManifest(const fs::path& manifest, const fs::path& embedding_root,
                     std::string name, NoiseTier tier) {
  std::ifstream in(manifest);
  if (!in) Fail(ErrorCode::kIoError, "cannot open manifest " + manifest.string());

  Dataset ds;
  ds.name = name.empty() ? manifest.stem().string() : std::move(name);
  ds.noise_tier = tier;

  std::unordered_set<std::string> seen_pairs;
  std::map<fs::path, std::shared_ptr<const EmbeddingSequence>> loaded;
  auto load = [&](const std::string& rel, Modality modality,
                  const std::string& item_id, const std::string& pair_id) {
    const fs::path full = fs::path(rel).is_absolute() ? fs::path(rel)
                                                      : embedding_root / rel;
    if (auto it = loaded.find(full); it != loaded.end()) return it->second;
    if (!fs::exists(full)) {
      Fail(ErrorCode::kMissingArtifact,
           "pair '" + pair_id + "': no embedding file " + full.string());
    }
    auto seq = std::make_shared<const EmbeddingSequence>(
        ReadEmbeddingFile(full, modality, item_id));
    loaded.emplace(full, seq);
    return seq;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      Fail(ErrorCode::kFormatError, "manifest line " + std::to_string(lineno) +
                                        ": " + e.what());
    }
    if (!rec.is_object()) {
      Fail(ErrorCode::kFormatError,
           "manifest line " + std::to_string(lineno) + ": not an object");
    }
    PairedExample ex;
    ex.pair_id = RequireString(rec, "pair_id", lineno);
    const auto audio_id = RequireString(rec, "audio_id", lineno);
    const auto text_id = RequireString(rec, "text_id", lineno);
    const auto split_name = RequireString(rec, "split", lineno);
    auto split = ParseSplit(split_name);
    if (!split) {
      Fail(ErrorCode::kFormatError, "manifest line " + std::to_string(lineno) +
                                        ": unknown split '" + split_name + "'");
    }
    if (!seen_pairs.insert(ex.pair_id).second) {
      Fail(ErrorCode::kDuplicateId, "pair_id '" + ex.pair_id +
                                        "' repeated at line " +
                                        std::to_string(lineno));
    }
    ex.audio = load(RequireString(rec, "audio_embedding", lineno),
                    Modality::kAudio, audio_id, ex.pair_id);
    ex.text = load(RequireString(rec, "text_embedding", lineno),
                   Modality::kText, text_id, ex.pair_id);
    ex.label = audio_id;
    ex.split = *split;
    ds.examples.push_back(std::move(ex));
  }
  XMODAL_LOG(kDebug) << "loaded " << ds.examples.size() << " pairs from "
                     << manifest.string();
  return ds;
}

Dataset UnionDatasets(std::string name,
                      const std::vector<const Dataset*>& parts) {
  Dataset out;
  out.name = std::move(name);
  out.noise_tier = NoiseTier::kClean;
  std::unordered_set<std::string> seen;
  for (const Dataset* part : parts) {
    if (part->noise_tier == NoiseTier::kNoisy) out.noise_tier = NoiseTier::kNoisy;
    for (const auto& ex : part->examples) {
      if (!seen.insert(ex.pair_id).second) {
        Fail(ErrorCode::kDuplicateId, "pair_id '" + ex.pair_id +
                                          "' appears in more than one dataset");
      }
      out.examples.push_back(ex);
    }
  }
  return out;
}

}  // namespace xmodal
