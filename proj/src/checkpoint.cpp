// src/checkpoint.cpp

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

#include "xmodal/checkpoint.hpp"

#include <cstdio>

#include "json.hpp"

#include "byte_io.hpp"
#include "xmodal/data_model.hpp"
#include "xmodal/error.hpp"

namespace xmodal {

using json = nlohmann::json;

namespace {

void WriteAdapter(detail::ByteWriter& w, const Adapter& a) {
  w.Uint<std::uint32_t>(static_cast<std::uint32_t>(a.dims().input));
  w.Uint<std::uint32_t>(static_cast<std::uint32_t>(a.dims().hidden));
  w.Uint<std::uint32_t>(static_cast<std::uint32_t>(a.dims().output));
  for (double v : a.flat()) w.F64(v);
}

Adapter ReadAdapter(detail::ByteReader& r) {
  AdapterDims d;
  d.input = r.Uint<std::uint32_t>();
  d.hidden = r.Uint<std::uint32_t>();
  d.output = r.Uint<std::uint32_t>();
  if (d.input < 1 || d.hidden < 1 || d.output < 1) {
    Fail(ErrorCode::kCorruptFile, "adapter with zero dimension");
  }
  const auto count = static_cast<std::size_t>(d.ParameterCount());
  if (r.remaining() < count * 8) {
    Fail(ErrorCode::kCorruptFile, "truncated adapter parameters");
  }
  Vector values(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    values[static_cast<Eigen::Index>(i)] = r.F64();
  }
  if (!values.allFinite()) {
    Fail(ErrorCode::kInvalidValues, "non-finite adapter parameter");
  }
  return Adapter::FromFlat(d, values);
}

}  // namespace

std::string HashBytes(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string HashParameters(const AdapterPair& adapters) {
  detail::ByteWriter w;
  WriteAdapter(w, adapters.audio);
  WriteAdapter(w, adapters.text);
  return HashBytes(w.str());
}

std::string SerializeCheckpoint(const AdapterPair& adapters,
                                const CheckpointMetadata& metadata) {
  detail::ByteWriter w;
  w.Bytes(std::string_view(kCheckpointMagic, 4));
  w.Uint<std::uint16_t>(kCheckpointVersion);
  WriteAdapter(w, adapters.audio);
  WriteAdapter(w, adapters.text);
  const json meta = {{"config_hash", metadata.config_hash},
                     {"epoch", metadata.epoch},
                     {"init_params_hash", metadata.init_params_hash},
                     {"score", metadata.score},
                     {"stage", metadata.stage}};
  const std::string blob = meta.dump();
  w.Uint<std::uint32_t>(static_cast<std::uint32_t>(blob.size()));
  w.Bytes(blob);
  return w.Take();
}

Checkpoint ParseCheckpoint(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kCheckpointMagic, 4)) {
    Fail(ErrorCode::kFormatError, "not a checkpoint (bad magic)");
  }
  detail::ByteReader r(bytes);
  r.Bytes(4);
  const auto version = r.Uint<std::uint16_t>();
  if (version != kCheckpointVersion) {
    Fail(ErrorCode::kFormatError,
         "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.adapters.audio = ReadAdapter(r);
  ck.adapters.text = ReadAdapter(r);
  const auto len = r.Uint<std::uint32_t>();
  const auto blob = r.Bytes(len);
  if (r.remaining() != 0) {
    Fail(ErrorCode::kCorruptFile, "trailing bytes after checkpoint metadata");
  }
  try {
    const json meta = json::parse(blob);
    ck.metadata.epoch = meta.at("epoch").get<int>();
    ck.metadata.score = meta.at("score").get<double>();
    ck.metadata.config_hash = meta.at("config_hash").get<std::string>();
    ck.metadata.stage = meta.value("stage", 0);
    ck.metadata.init_params_hash = meta.value("init_params_hash", std::string());
  } catch (const json::exception& e) {
    Fail(ErrorCode::kCorruptFile, std::string("bad checkpoint metadata: ") + e.what());
  }
  return ck;
}

void SaveCheckpoint(const std::filesystem::path& path, const AdapterPair& adapters,
                    const CheckpointMetadata& metadata) {
  WriteFileBytes(path, SerializeCheckpoint(adapters, metadata));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  return ParseCheckpoint(ReadFileBytes(path));
}

}  // namespace xmodal
