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

#ifndef LGMLE_ERROR_HPP_
#define LGMLE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lgmle {

enum class ErrorCode {
  kInvalidDimensions,
  kDisconnectedGraph,
  kOutcomeNotInSpace,
  kNonPositiveWeight,
  kH1Violated,
  kInconsistentBlockShapes,
  kInvalidDistribution,
  kSupportMismatch,
  kTooLargeForBruteForce,
  kLayerOutOfRange,
  kNoCandidates,
  kInvalidConfig,
  kIo,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the library. The message names the violated
// invariant; `code()` lets callers map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

  // Input validation failures, as opposed to runtime (I/O) failures.
  bool is_validation() const { return code_ != ErrorCode::kIo; }

 private:
  ErrorCode code_;
};

}  // namespace lgmle

#endif  // LGMLE_ERROR_HPP_
