// include/xmodal/log.hpp

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

#include <sstream>
#include <string_view>

namespace xmodal {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kQuiet = 4 };

// Threshold read once from XMODAL_LOG (debug|info|warn|error|quiet);
// defaults to warn.
LogLevel CurrentLogLevel();
void SetLogLevel(LogLevel level);

class LogLine {
 public:
  explicit LogLine(LogLevel level) : level_(level) {}
  ~LogLine();
  LogLine(const LogLine&) = delete;
  LogLine& operator=(const LogLine&) = delete;

  template <typename T>
  LogLine& operator<<(const T& v) {
    buf_ << v;
    return *this;
  }

 private:
  LogLevel level_;
  std::ostringstream buf_;
};

}  // namespace xmodal

#define XMODAL_LOG(level)                                          \
  if (::xmodal::LogLevel::level < ::xmodal::CurrentLogLevel()) {   \
  } else                                                           \
    ::xmodal::LogLine(::xmodal::LogLevel::level)
