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

#ifndef HOMOGUARD_ORACLE_ESTIMATOR_HPP_
#define HOMOGUARD_ORACLE_ESTIMATOR_HPP_

#include <cstdint>

#include "homoguard/estimator.hpp"

namespace homoguard {

struct OracleConfig {
  // Resized thermal -> resized satellite, full frames.
  Homography ground_truth = Homography::Identity();
  double noise_sigma = 0.0;  // pixels, per element and iteration
  std::uint64_t seed = 0;
};

// Reports the true displacement of the requested view plus i.i.d. Gaussian
// noise drawn from a stream keyed by (seed, image digests, view). Exact when
// noise_sigma == 0.
class OracleEstimator final : public Estimator {
 public:
  explicit OracleEstimator(OracleConfig config);

  EstimateTrajectory Estimate(const EstimateRequest& request) override;
  std::string Name() const override { return "oracle"; }

 private:
  OracleConfig config_;
};

}  // namespace homoguard

#endif  // HOMOGUARD_ORACLE_ESTIMATOR_HPP_
