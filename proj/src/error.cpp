// Copyright 2026 The lgmle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lgmle/error.hpp"

namespace lgmle {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimensions: return "InvalidDimensions";
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kOutcomeNotInSpace: return "OutcomeNotInSpace";
    case ErrorCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::kH1Violated: return "H1Violated";
    case ErrorCode::kInconsistentBlockShapes: return "InconsistentBlockShapes";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kTooLargeForBruteForce: return "TooLargeForBruteForce";
    case ErrorCode::kLayerOutOfRange: return "LayerOutOfRange";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

}  // namespace lgmle
