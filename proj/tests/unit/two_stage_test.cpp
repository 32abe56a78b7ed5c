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

#include <gtest/gtest.h>

#include "homoguard/error.hpp"
#include "homoguard/oracle_estimator.hpp"

namespace homoguard {
namespace {

// Thermal placed with its top-left corner at (tx, ty) of the full satellite.
Displacement Placement(double tx, double ty, const FrameConfig& frames) {
  const Homography h = ResampleTransform(frames.w_s, frames.w_r) * Homography::Translation(tx, ty) *
                       ResampleTransform(frames.w_r, frames.w_t);
  return DisplacementFromHomography(h, CornersOfFrame(frames.w_r));
}

CornerSet FullFrameQuad(const Displacement& d, const FrameConfig& frames) {
  return ApplyHomography(ResampleTransform(frames.w_r, frames.w_s),
                         DisplacementToCorners(d, CornersOfFrame(frames.w_r)));
}

TEST(StageTwoBoxTest, ContainsQuadWithMargin) {
  const FrameConfig frames;
  Displacement d = Placement(400.0, 500.0, frames);
  d.offsets(0, 1) += 5.0;
  const StageTwoBox box = ComputeStageTwoBox(d, frames, 64);
  EXPECT_FALSE(box.exceeds_region);
  for (const Point2& p : FullFrameQuad(d, frames)) {
    EXPECT_GE(p.x, box.box.x + 31.0);
    EXPECT_GE(p.y, box.box.y + 31.0);
    EXPECT_LE(p.x, box.box.x + box.box.size - 32.0);
    EXPECT_LE(p.y, box.box.y + box.box.size - 32.0);
  }
}

TEST(StageTwoBoxTest, ClampedAtFrameEdge) {
  const FrameConfig frames;
  const StageTwoBox box = ComputeStageTwoBox(Placement(-20.0, 500.0, frames), frames, 64);
  EXPECT_TRUE(box.exceeds_region);
  EXPECT_EQ(box.box.x, 0);
  EXPECT_LE(box.box.x + box.box.size, frames.w_s);
}

TEST(StageTwoBoxTest, OversizedBoxShrinksToFrame) {
  const FrameConfig frames;
  Displacement d;
  d.offsets << -10, 300, 300, -10, -10, -10, 300, 300;  // quad larger than the frame
  const StageTwoBox box = ComputeStageTwoBox(d, frames, 64);
  EXPECT_TRUE(box.exceeds_region);
  EXPECT_EQ(box.box, (CropSpec{0, 0, frames.w_s}));
}

TEST(BoxViewTest, FullBoxIsIdentity) {
  const FrameConfig frames;
  const Homography v = BoxViewTransform({0, 0, frames.w_s}, frames);
  EXPECT_TRUE(v.matrix().isApprox(Eigen::Matrix3d::Identity(), 1e-12));
}

TEST(TwoStageTest, ExactOracleStaysExact) {
  const FrameConfig frames;
  const CornerSet base = CornersOfFrame(frames.w_r);
  Displacement gt = Placement(500.0, 450.0, frames);
  gt.offsets(1, 2) += 4.0;
  OracleEstimator est({HomographyFromDisplacement(gt, base), 0.0, 1});
  const GrayImage sat(frames.w_s, frames.w_s, 100), thr(frames.w_t, frames.w_t, 100);
  EstimatorConfig config;
  config.k1 = 3;
  config.k2 = 4;
  const TwoStageResult r = EstimateTwoStage(est, sat, thr, config, frames);
  ASSERT_EQ(r.trajectory.size(), 7);
  for (const Displacement& d : r.trajectory.per_iteration) {
    ASSERT_LT((d.offsets - gt.offsets).cwiseAbs().maxCoeff(), 1e-8);
  }
  EXPECT_FALSE(r.box.exceeds_region);
}

TEST(TwoStageTest, RefinementCorrectsCoarseGuess) {
  const FrameConfig frames;
  const CornerSet base = CornersOfFrame(frames.w_r);
  const Displacement gt = Placement(600.0, 620.0, frames);
  OracleEstimator est({HomographyFromDisplacement(gt, base), 0.0, 1});
  const GrayImage sat(frames.w_s, frames.w_s, 1), thr(frames.w_r, frames.w_r, 1);
  const TwoStageResult r =
      RefineSecondStage(est, sat, thr, Placement(610.0, 612.0, frames), {}, frames);
  EXPECT_LT((r.trajectory.Final().offsets - gt.offsets).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(TwoStageTest, RejectsWrongSizes) {
  const FrameConfig frames;
  OracleEstimator est({});
  const GrayImage small(10, 10);
  EXPECT_THROW(EstimateTwoStage(est, small, small, {}, frames), Error);
}

}  // namespace
}  // namespace homoguard
