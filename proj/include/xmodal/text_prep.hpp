// include/xmodal/text_prep.hpp

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
#include <vector>

namespace xmodal {

inline constexpr std::size_t kMaxDescriptionChars = 500;

struct RawTextRecord {
  std::string item_id;
  std::string description;  // may carry HTML
  std::vector<std::string> tags;
};

struct CleanedText {
  std::string text;
  bool truncated = false;
};

/// Strips <...> spans, decodes amp/lt/gt/quot/apos/nbsp and numeric
/// entities (repeating until nothing changes), collapses whitespace runs,
/// trims, then cuts to 500 Unicode scalar values.
CleanedText CleanDescriptionDetailed(std::string_view text);
std::string CleanDescription(std::string_view text);

std::string JoinTags(const std::vector<std::string>& tags);

/// Trims each tag and drops the ones that end up empty.
std::vector<std::string> NormalizeTags(const std::vector<std::string>& tags);

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t Utf8Length(std::string_view text);

}  // namespace xmodal
