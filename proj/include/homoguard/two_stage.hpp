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

#ifndef HOMOGUARD_TWO_STAGE_HPP_
#define HOMOGUARD_TWO_STAGE_HPP_

#include "homoguard/estimator.hpp"

namespace homoguard {

struct StageTwoBox {
  CropSpec box;                 // square region of the W_S satellite frame
  bool exceeds_region = false;  // the box had to be clamped into the frame
};

// Axis-aligned square box around the predicted thermal quadrilateral (given
// as a resized-frame displacement), grown by w_b_expand pixels in total and
// clamped into the satellite frame.
StageTwoBox ComputeStageTwoBox(const Displacement& stage_one, const FrameConfig& frames,
                               int w_b_expand);

// Maps coordinates of the resized box crop to resized satellite coordinates.
Homography BoxViewTransform(const CropSpec& box, const FrameConfig& frames);

struct TwoStageResult {
  // Stage one followed by stage two, all in the full resized satellite frame.
  EstimateTrajectory trajectory;
  StageTwoBox box;
};

// Second stage only: re-estimates on the box crop of the full satellite
// patch and maps every iterate back to the full resized frame. The returned
// trajectory holds the k2 refined iterates.
TwoStageResult RefineSecondStage(Estimator& estimator, const GrayImage& satellite_full,
                                 const GrayImage& thermal_resized, const Displacement& stage_one,
                                 const EstimatorConfig& config, const FrameConfig& frames);

TwoStageResult EstimateTwoStage(Estimator& estimator, const GrayImage& satellite_full,
                                const GrayImage& thermal_full, const EstimatorConfig& config,
                                const FrameConfig& frames);

}  // namespace homoguard

#endif  // HOMOGUARD_TWO_STAGE_HPP_
