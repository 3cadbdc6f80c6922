// src/text_prep.cpp

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

#include "xmodal/text_prep.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <utility>

namespace xmodal {

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsContinuation(unsigned char c) { return (c & 0xC0) == 0x80; }

void AppendUtf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    cp = 0xFFFD;
  }
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// nbsp maps to a plain space so whitespace collapsing sees it.
constexpr std::array<std::pair<std::string_view, std::string_view>, 6>
    kNamedEntities = {{{"amp", "&"},
                       {"lt", "<"},
                       {"gt", ">"},
                       {"quot", "\""},
                       {"apos", "'"},
                       {"nbsp", " "}}};

// Decodes the entity starting at text[0] == '&'.  Returns bytes consumed,
// or 0 if this is not a recognised entity.
std::size_t DecodeEntity(std::string_view text, std::string& out) {
  const auto semi = text.find(';');
  if (semi == std::string_view::npos || semi < 2 || semi > 10) return 0;
  const auto body = text.substr(1, semi - 1);
  if (body[0] == '#') {
    std::uint32_t cp = 0;
    std::from_chars_result res{};
    if (body.size() > 1 && (body[1] == 'x' || body[1] == 'X')) {
      if (body.size() < 3) return 0;
      res = std::from_chars(body.data() + 2, body.data() + body.size(), cp, 16);
    } else {
      if (body.size() < 2) return 0;
      res = std::from_chars(body.data() + 1, body.data() + body.size(), cp, 10);
    }
    if (res.ec != std::errc() || res.ptr != body.data() + body.size()) return 0;
    AppendUtf8(out, cp);
    return semi + 1;
  }
  for (const auto& [name, value] : kNamedEntities) {
    if (body == name) {
      out.append(value);
      return semi + 1;
    }
  }
  return 0;
}

std::string StripTags(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '<') {
      // A tag runs to the next '>' with no '<' in between.
      const auto close = text.find_first_of("<>", i + 1);
      if (close != std::string_view::npos && text[close] == '>') {
        i = close + 1;
        continue;
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

std::string DecodeEntities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '&') {
      if (auto used = DecodeEntity(text.substr(i), out); used > 0) {
        i += used;
        continue;
      }
    }
    out.push_back(text[i++]);
  }
  return out;
}

std::string CollapseWhitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string Trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && IsSpace(text[b])) ++b;
  while (e > b && IsSpace(text[e - 1])) --e;
  return std::string(text.substr(b, e - b));
}

}  // namespace

std::size_t Utf8Length(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if (!IsContinuation(static_cast<unsigned char>(c))) ++n;
  }
  return n;
}

CleanedText CleanDescriptionDetailed(std::string_view text) {
  // Every pass that changes the string shortens it, so this terminates.
  std::string current(text);
  while (true) {
    std::string next = CollapseWhitespace(StripTags(DecodeEntities(StripTags(current))));
    if (next == current) break;
    current = std::move(next);
  }

  CleanedText result;
  std::size_t chars = 0;
  std::size_t cut = current.size();
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (IsContinuation(static_cast<unsigned char>(current[i]))) continue;
    if (chars == kMaxDescriptionChars) {
      cut = i;
      result.truncated = true;
      break;
    }
    ++chars;
  }
  result.text = Trim(std::string_view(current).substr(0, cut));
  return result;
}

std::string CleanDescription(std::string_view text) {
  return CleanDescriptionDetailed(text).text;
}

std::string JoinTags(const std::vector<std::string>& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tags[i];
  }
  return out;
}

std::vector<std::string> NormalizeTags(const std::vector<std::string>& tags) {
  std::vector<std::string> out;
  out.reserve(tags.size());
  for (const auto& t : tags) {
    auto trimmed = Trim(t);
    if (!trimmed.empty()) out.push_back(std::move(trimmed));
  }
  return out;
}

}  // namespace xmodal
