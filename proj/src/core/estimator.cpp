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

#include "homoguard/estimator.hpp"

#include <cmath>

#include "homoguard/error.hpp"

namespace homoguard {

void EstimatorConfig::Validate() const {
  if (k1 < 1 || k2 < 1) Fail(ErrorCode::kInvalidArgument, "iteration counts must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1]");
  }
  if (w_b_expand < 0) Fail(ErrorCode::kInvalidArgument, "w_b_expand must be >= 0");
}

double ComputeCropTtaLoss(std::span<const EstimateTrajectory> trajectories,
                          const Displacement& gt, double gamma) {
  if (trajectories.empty()) Fail(ErrorCode::kEmptyList, "no trajectories");
  const int k_total = trajectories.front().size();
  for (const EstimateTrajectory& t : trajectories) {
    if (t.size() != k_total) {
      Fail(ErrorCode::kLengthMismatch, "trajectories differ in length");
    }
  }
  double loss = 0.0;
  for (int k = 0; k < k_total; ++k) {
    double term = 0.0;
    for (const EstimateTrajectory& t : trajectories) {
      term += (t.per_iteration[k].offsets - gt.offsets).cwiseAbs().sum();
    }
    loss += std::pow(gamma, k_total - k - 1) * term;
  }
  return loss;
}

}  // namespace homoguard
