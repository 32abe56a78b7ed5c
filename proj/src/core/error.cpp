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

#include "homoguard/error.hpp"

namespace homoguard {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateCorners: return "DegenerateCorners";
    case ErrorCode::kPointAtInfinity: return "PointAtInfinity";
    case ErrorCode::kInvalidPlan: return "InvalidPlan";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kSolverDiverged: return "SolverDiverged";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kInfeasibleDc: return "InfeasibleDc";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace homoguard
