/* Copyright 2026 The HomoGuard Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef HOMOGUARD_ERROR_HPP_
#define HOMOGUARD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace homoguard {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateCorners,
  kPointAtInfinity,
  kInvalidPlan,
  kOutOfBounds,
  kSolverDiverged,
  kProtocolError,
  kLengthMismatch,
  kTooFewSamples,
  kEmptyList,
  kDegenerateLabels,
  kInfeasibleDc,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; the C API
// translates the code into an hg_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace homoguard

#endif  // HOMOGUARD_ERROR_HPP_
