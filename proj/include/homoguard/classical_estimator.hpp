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

#ifndef HOMOGUARD_CLASSICAL_ESTIMATOR_HPP_
#define HOMOGUARD_CLASSICAL_ESTIMATOR_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "homoguard/estimator.hpp"

namespace homoguard {

struct ClassicalConfig {
  int pyramid_levels = 3;
  // Starting guess, resized thermal -> resized satellite. Replaced by
  // EstimateRequest::initial when the request carries one.
  Homography prior = Homography::Identity();
  // Exhaustive translation search (normalized cross-correlation) at the
  // coarsest level before the first Gauss-Newton step. Skipped when the
  // request carries an initial warp.
  bool coarse_search = true;
  double search_radius = std::numeric_limits<double>::infinity();  // base px
  double min_overlap = 0.5;
  int max_damping_trials = 6;
  // Non-zero seeds select a random subset of template pixels, which gives
  // each ensemble member a slightly different objective.
  std::uint64_t member_seed = 0;
  double keep_fraction = 0.8;

  void Validate() const;
};

struct ClassicalStep {
  int level = 0;
  double cost_before = 0.0;
  double cost_after = 0.0;
  double lambda = 0.0;
  bool accepted = false;
};

struct ClassicalResult {
  EstimateTrajectory trajectory;
  std::vector<ClassicalStep> steps;
  Homography warp = Homography::Identity();
};

// Inverse-compositional photometric alignment of the thermal template onto
// the satellite image over an 8-parameter homography. The cost is the mean
// squared difference of intensities after normalizing both sides to zero
// mean and unit variance over the overlapping pixels. One Gauss-Newton step
// (with Levenberg damping when the plain step raises the cost) is taken per
// reported iteration, coarse to fine across a Gaussian pyramid; iterations
// are split evenly over the levels with the remainder at the finest.
class ClassicalEstimator final : public Estimator {
 public:
  explicit ClassicalEstimator(ClassicalConfig config = {});

  ClassicalResult Run(const EstimateRequest& request) const;

  EstimateTrajectory Estimate(const EstimateRequest& request) override {
    return Run(request).trajectory;
  }
  std::string Name() const override { return "classical"; }

  const ClassicalConfig& config() const { return config_; }

 private:
  ClassicalConfig config_;
};

// Number of Gauss-Newton steps taken at each pyramid level (index 0 is the
// finest) for a planned iteration count.
std::vector<int> IterationSchedule(int iterations, int levels);

}  // namespace homoguard

#endif  // HOMOGUARD_CLASSICAL_ESTIMATOR_HPP_
