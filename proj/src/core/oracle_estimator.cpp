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

#include "homoguard/oracle_estimator.hpp"

#include <bit>

#include "homoguard/error.hpp"
#include "homoguard/rng.hpp"

namespace homoguard {
namespace {

std::uint64_t MatrixDigest(const Eigen::Matrix3d& m, std::uint64_t h) {
  for (int i = 0; i < 9; ++i) h = MixSeed(h, std::bit_cast<std::uint64_t>(m(i)));
  return h;
}

}  // namespace

OracleEstimator::OracleEstimator(OracleConfig config) : config_(std::move(config)) {
  if (!(config_.noise_sigma >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "oracle noise_sigma must be >= 0");
  }
}

EstimateTrajectory OracleEstimator::Estimate(const EstimateRequest& request) {
  if (request.satellite == nullptr || request.thermal == nullptr) {
    Fail(ErrorCode::kInvalidArgument, "estimate request is missing images");
  }
  if (request.iterations < 1) Fail(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  const CornerSet base = CornersOfFrame(request.thermal->width);
  const Homography view_truth = request.view.satellite_to_full.Inverse() *
                                config_.ground_truth * request.view.thermal_to_full;
  const Displacement truth = DisplacementFromHomography(view_truth, base);

  std::uint64_t key = MixSeed(config_.seed, ImageDigest(*request.satellite));
  key = MixSeed(key, ImageDigest(*request.thermal));
  key = MatrixDigest(request.view.thermal_to_full.matrix(), key);
  key = MatrixDigest(request.view.satellite_to_full.matrix(), key);
  Pcg32 rng(key);

  EstimateTrajectory trajectory;
  const int steps = request.StepsToRun();
  trajectory.per_iteration.reserve(static_cast<size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    Displacement d = truth;
    if (config_.noise_sigma > 0.0) {
      for (int i = 0; i < 8; ++i) d.offsets(i) += config_.noise_sigma * rng.Normal();
    }
    trajectory.per_iteration.push_back(d);
  }
  return trajectory;
}

}  // namespace homoguard
