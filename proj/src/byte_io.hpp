// src/byte_io.hpp

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

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "xmodal/error.hpp"

namespace xmodal::detail {

// Explicit little-endian encoding, independent of host byte order.
class ByteWriter {
 public:
  void Bytes(std::string_view b) { out_.append(b); }

  template <typename UInt>
  void Uint(UInt v) {
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  }

  void F32(float v) { Uint(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { Uint(std::bit_cast<std::uint64_t>(v)); }

  const std::string& str() const { return out_; }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view in) : in_(in) {}

  std::size_t remaining() const { return in_.size() - pos_; }

  std::string_view Bytes(std::size_t n) {
    Need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  template <typename UInt>
  UInt Uint() {
    Need(sizeof(UInt));
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
      v |= static_cast<UInt>(static_cast<unsigned char>(in_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(UInt);
    return v;
  }

  float F32() { return std::bit_cast<float>(Uint<std::uint32_t>()); }
  double F64() { return std::bit_cast<double>(Uint<std::uint64_t>()); }

 private:
  void Need(std::size_t n) const {
    if (remaining() < n) {
      Fail(ErrorCode::kCorruptFile,
           "unexpected end of data at byte " + std::to_string(pos_));
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace xmodal::detail
