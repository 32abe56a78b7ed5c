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

#include "homoguard/two_stage.hpp"

#include <algorithm>
#include <cmath>

#include "homoguard/error.hpp"

namespace homoguard {

StageTwoBox ComputeStageTwoBox(const Displacement& stage_one, const FrameConfig& frames,
                               int w_b_expand) {
  const CornerSet quad = ApplyHomography(ResampleTransform(frames.w_r, frames.w_s),
                                         DisplacementToCorners(stage_one, CornersOfFrame(frames.w_r)));
  double min_x = quad[0].x, max_x = quad[0].x, min_y = quad[0].y, max_y = quad[0].y;
  for (const Point2& p : quad) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  StageTwoBox out;
  const double extent = std::max(max_x - min_x, max_y - min_y) + 1.0;
  int side = static_cast<int>(std::ceil(extent)) + w_b_expand;
  side = std::max(side, 2);
  const double cx = 0.5 * (min_x + max_x);
  const double cy = 0.5 * (min_y + max_y);
  int x = static_cast<int>(std::lround(cx - 0.5 * (side - 1)));
  int y = static_cast<int>(std::lround(cy - 0.5 * (side - 1)));

  const bool quad_inside = min_x >= -0.5 && min_y >= -0.5 && max_x <= frames.w_s - 0.5 &&
                           max_y <= frames.w_s - 0.5;
  bool clamped = false;
  if (side > frames.w_s) {
    side = frames.w_s;
    clamped = true;
  }
  const int cx_clamped = std::clamp(x, 0, frames.w_s - side);
  const int cy_clamped = std::clamp(y, 0, frames.w_s - side);
  clamped = clamped || cx_clamped != x || cy_clamped != y;
  out.box = {cx_clamped, cy_clamped, side};
  out.exceeds_region = clamped || !quad_inside;
  return out;
}

Homography BoxViewTransform(const CropSpec& box, const FrameConfig& frames) {
  return ResampleTransform(frames.w_s, frames.w_r) * Homography::Translation(box.x, box.y) *
         ResampleTransform(frames.w_r, box.size);
}

TwoStageResult RefineSecondStage(Estimator& estimator, const GrayImage& satellite_full,
                                 const GrayImage& thermal_resized, const Displacement& stage_one,
                                 const EstimatorConfig& config, const FrameConfig& frames) {
  if (satellite_full.width != frames.w_s || satellite_full.height != frames.w_s) {
    Fail(ErrorCode::kInvalidArgument, "stage two expects a W_S x W_S satellite patch");
  }
  TwoStageResult result;
  result.box = ComputeStageTwoBox(stage_one, frames, config.w_b_expand);
  const GrayImage satellite_box = CropAndResize(satellite_full, result.box.box, frames.w_r);
  const Homography box_view = BoxViewTransform(result.box.box, frames);
  const CornerSet base = CornersOfFrame(frames.w_r);

  EstimateRequest request;
  request.satellite = &satellite_box;
  request.thermal = &thermal_resized;
  request.iterations = config.k2;
  request.view.satellite_to_full = box_view;
  try {
    request.initial = box_view.Inverse() * HomographyFromDisplacement(stage_one, base);
  } catch (const Error&) {
    // Degenerate stage-one quadrilateral: let the estimator start from its prior.
  }
  const EstimateTrajectory stage_two = estimator.Estimate(request);
  for (const Displacement& d : stage_two.per_iteration) {
    result.trajectory.per_iteration.push_back(
        RecoverWithViews(d, Homography::Identity(), box_view, base));
  }
  result.trajectory.variance = stage_two.variance;
  return result;
}

TwoStageResult EstimateTwoStage(Estimator& estimator, const GrayImage& satellite_full,
                                const GrayImage& thermal_full, const EstimatorConfig& config,
                                const FrameConfig& frames) {
  frames.Validate();
  config.Validate();
  if (satellite_full.width != frames.w_s || satellite_full.height != frames.w_s ||
      thermal_full.width != frames.w_t || thermal_full.height != frames.w_t) {
    Fail(ErrorCode::kInvalidArgument, "images do not match the frame configuration");
  }
  const GrayImage satellite = CropAndResize(satellite_full, {0, 0, frames.w_s}, frames.w_r);
  const GrayImage thermal = CropAndResize(thermal_full, {0, 0, frames.w_t}, frames.w_r);

  EstimateRequest request;
  request.satellite = &satellite;
  request.thermal = &thermal;
  request.iterations = config.k1;
  const EstimateTrajectory stage_one = estimator.Estimate(request);

  TwoStageResult result =
      RefineSecondStage(estimator, satellite_full, thermal, stage_one.Final(), config, frames);
  std::vector<Displacement> joined = stage_one.per_iteration;
  joined.insert(joined.end(), result.trajectory.per_iteration.begin(),
                result.trajectory.per_iteration.end());
  result.trajectory.per_iteration = std::move(joined);
  return result;
}

}  // namespace homoguard
