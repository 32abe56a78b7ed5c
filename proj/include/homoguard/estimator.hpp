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

#ifndef HOMOGUARD_ESTIMATOR_HPP_
#define HOMOGUARD_ESTIMATOR_HPP_

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homoguard/geometry.hpp"
#include "homoguard/image.hpp"

namespace homoguard {

// Ordered per-iteration displacements; the last element is the estimate.
struct EstimateTrajectory {
  std::vector<Displacement> per_iteration;
  // Optional per-corner variance reported by estimators that model it.
  std::optional<Matrix24> variance;

  const Displacement& Final() const { return per_iteration.back(); }
  int size() const { return static_cast<int>(per_iteration.size()); }
};

struct EstimatorConfig {
  int k1 = 6;              // first-stage iterations
  int k2 = 6;              // second-stage iterations
  double gamma = 0.85;     // loss decay
  int w_b_expand = 64;     // stage-two bounding box growth, pixels (half per side)

  void Validate() const;
};

// How the images handed to an estimator relate to the full resized frames.
// Estimators that only look at pixels ignore it; the oracle needs it to
// produce the view's true displacement.
struct ViewGeometry {
  Homography thermal_to_full = Homography::Identity();
  Homography satellite_to_full = Homography::Identity();
};

struct EstimateRequest {
  const GrayImage* satellite = nullptr;  // W_R x W_R
  const GrayImage* thermal = nullptr;    // W_R x W_R
  int iterations = 6;                    // planned iteration count K
  int stop_after = 0;                    // run only the first k of K (0: all)
  ViewGeometry view;
  // Starting point for refinement (template -> satellite, W_R frames).
  std::optional<Homography> initial;

  int StepsToRun() const { return stop_after > 0 ? std::min(stop_after, iterations) : iterations; }
};

class Estimator {
 public:
  virtual ~Estimator() = default;

  // Returns StepsToRun() displacements. Running with stop_after = k yields
  // the first k entries of the full K-iteration trajectory.
  virtual EstimateTrajectory Estimate(const EstimateRequest& request) = 0;

  virtual std::string Name() const = 0;
  // Whether one instance may serve concurrent Estimate calls.
  virtual bool ThreadSafe() const { return true; }
};

// Training objective of an iterative estimator under crop augmentation:
// sum_k gamma^(K-k-1) * (|D_k - gt|_1 + sum_i |D^i_k - gt|_1).
// trajectories[0] is the original view; the rest are recovered crop views.
double ComputeCropTtaLoss(std::span<const EstimateTrajectory> trajectories,
                          const Displacement& gt, double gamma);

}  // namespace homoguard

#endif  // HOMOGUARD_ESTIMATOR_HPP_
