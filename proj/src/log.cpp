// src/log.cpp

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

#include "xmodal/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <string>

namespace xmodal {

namespace {

LogLevel FromEnv() {
  const char* env = std::getenv("XMODAL_LOG");
  if (env == nullptr) return LogLevel::kWarn;
  const std::string_view v(env);
  if (v == "debug") return LogLevel::kDebug;
  if (v == "info") return LogLevel::kInfo;
  if (v == "warn") return LogLevel::kWarn;
  if (v == "error") return LogLevel::kError;
  if (v == "quiet") return LogLevel::kQuiet;
  return LogLevel::kWarn;
}

std::atomic<LogLevel>& Threshold() {
  static std::atomic<LogLevel> level{FromEnv()};
  return level;
}

const char* Tag(LogLevel level) {
  switch (level) {
    case LogLevel::kDebug: return "DEBUG";
    case LogLevel::kInfo: return "INFO";
    case LogLevel::kWarn: return "WARN";
    case LogLevel::kError: return "ERROR";
    case LogLevel::kQuiet: return "";
  }
  return "";
}

}  // namespace

LogLevel CurrentLogLevel() { return Threshold().load(); }
void SetLogLevel(LogLevel level) { Threshold().store(level); }

LogLine::~LogLine() {
  std::cerr << Tag(level_) << " (xmodal) " << buf_.str() << '\n';
}

}  // namespace xmodal
