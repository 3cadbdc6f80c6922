// src/error.cpp

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

#include "xmodal/error.hpp"

namespace xmodal {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kInvalidValues: return "InvalidValues";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kInvalidCache: return "InvalidCache";
    case ErrorCode::kInvalidBatch: return "InvalidBatch";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kInvalidMetric: return "InvalidMetric";
    case ErrorCode::kInvalidDataset: return "InvalidDataset";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kInvalidGroundTruth: return "InvalidGroundTruth";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      detail_(message) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace xmodal
