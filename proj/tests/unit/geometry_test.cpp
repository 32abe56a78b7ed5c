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

#include "homoguard/geometry.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "homoguard/error.hpp"
#include "oracles.hpp"

namespace homoguard {
namespace {

CornerSet ToCorners(const oracle::Quad& q) {
  CornerSet out;
  for (int i = 0; i < 4; ++i) out[static_cast<size_t>(i)] = {q[i][0], q[i][1]};
  return out;
}

Displacement ToDisplacement(const oracle::Mat24& m) { return {m}; }

TEST(DltTest, SquareToShiftedSquareIsTranslation) {
  const CornerSet src = CornersOfFrame(256);
  CornerSet dst = src;
  for (Point2& p : dst) {
    p.x += 10;
    p.y += 10;
  }
  const Homography h = Dlt(src, dst);
  const Eigen::Matrix3d expected = Homography::Translation(10, 10).matrix();
  EXPECT_TRUE(h.matrix().isApprox(expected, 1e-9)) << h.matrix();
}

TEST(DltTest, IdentityCorrespondence) {
  const CornerSet src = CornersOfFrame(64);
  EXPECT_TRUE(Dlt(src, src).matrix().isApprox(Eigen::Matrix3d::Identity(), 1e-12));
}

TEST(DltTest, CollinearSourceIsDegenerate) {
  CornerSet src = {Point2{0, 0}, Point2{1, 1}, Point2{2, 2}, Point2{0, 5}};
  const CornerSet dst = CornersOfFrame(8);
  try {
    Dlt(src, dst);
    FAIL() << "expected DegenerateCorners";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateCorners);
  }
}

TEST(DltTest, CollinearTargetIsDegenerate) {
  const CornerSet src = CornersOfFrame(8);
  const CornerSet dst = {Point2{0, 0}, Point2{4, 0}, Point2{9, 0}, Point2{0, 3}};
  EXPECT_THROW(Dlt(src, dst), Error);
}

TEST(DltTest, MatchesLinearSolveOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const oracle::Quad src = oracle::RandomQuad(rng, 256, 40);
    const oracle::Quad dst = oracle::RandomQuad(rng, 256, 40);
    const Eigen::Matrix3d expected = oracle::Dlt(src, dst);
    const Eigen::Matrix3d got = Dlt(ToCorners(src), ToCorners(dst)).matrix();
    ASSERT_TRUE(got.isApprox(expected, 1e-8)) << "trial " << trial;
  }
}

TEST(HomographyTest, CompositionAppliesRightFirst) {
  const Homography a = Homography::Similarity(2.0, 1.0, -3.0);
  const Homography b = Homography::Translation(5.0, 7.0);
  const Point2 p = (a * b).Apply({1.0, 1.0});
  EXPECT_DOUBLE_EQ(p.x, 2.0 * 6.0 + 1.0);
  EXPECT_DOUBLE_EQ(p.y, 2.0 * 8.0 - 3.0);
}

TEST(HomographyTest, PointAtInfinity) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(2, 0) = 1.0;
  m(2, 2) = 0.0;
  m(0, 2) = 1.0;  // keep it invertible
  const Homography h = Homography::FromMatrix(m);
  try {
    h.Apply({0.0, 3.0});
    FAIL() << "expected PointAtInfinity";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPointAtInfinity);
  }
}

TEST(HomographyTest, SingularMatrixRejected) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 0) = 1.0;
  m(2, 2) = 1.0;
  EXPECT_THROW(Homography::FromMatrix(m), Error);
}

TEST(HomographyTest, InverseRoundTrip) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const oracle::Quad src = oracle::RandomQuad(rng, 100, 20);
    const oracle::Quad dst = oracle::RandomQuad(rng, 100, 20);
    const Homography h = Dlt(ToCorners(src), ToCorners(dst));
    const Point2 p{13.0, 71.0};
    const Point2 q = h.Inverse().Apply(h.Apply(p));
    ASSERT_NEAR(q.x, p.x, 1e-8);
    ASSERT_NEAR(q.y, p.y, 1e-8);
  }
}

TEST(DisplacementTest, HomographyRoundTrip) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-30, 30);
  const CornerSet base = CornersOfFrame(256);
  for (int trial = 0; trial < 200; ++trial) {
    Displacement d;
    for (int i = 0; i < 8; ++i) d.offsets(i % 2, i / 2) = u(rng);
    const Displacement back = DisplacementFromHomography(HomographyFromDisplacement(d, base), base);
    ASSERT_LT((back.offsets - d.offsets).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(ResampleTest, PixelCentersAlign) {
  const Homography r = ResampleTransform(512, 256);
  // Pixel 0 of the fine grid covers the left half of coarse pixel 0.
  EXPECT_DOUBLE_EQ(r.Apply({-0.5, 0}).x, -0.5);
  EXPECT_DOUBLE_EQ(r.Apply({511.5, 0}).x, 255.5);
  EXPECT_DOUBLE_EQ(r.Apply({0.5, 0}).x, 0.0);
}

TEST(RecoverTest, FullViewIsUnchanged) {
  const FrameConfig frames;
  Displacement d = Displacement::Constant(3.5, -2.0);
  d.offsets(0, 2) += 1.25;
  const Displacement out = RecoverFullDisplacement(d, {0, 0, frames.w_t}, frames);
  EXPECT_LT((out.offsets - d.offsets).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(RecoverTest, MatchesPointwiseOracle) {
  const FrameConfig frames;
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-20, 20);
  std::uniform_int_distribution<int> off(0, 32);
  for (int trial = 0; trial < 300; ++trial) {
    oracle::Mat24 d;
    for (int i = 0; i < 8; ++i) d(i % 2, i / 2) = u(rng);
    const int size = frames.w_t - off(rng) % 33;
    std::uniform_int_distribution<int> origin(0, frames.w_t - size);
    const int cx = origin(rng), cy = origin(rng);
    const oracle::Mat24 expected = oracle::RecoverFull(d, cx, cy, size, frames.w_t, frames.w_r);
    const Displacement got = RecoverFullDisplacement(ToDisplacement(d), {cx, cy, size}, frames);
    ASSERT_LT((got.offsets - expected).cwiseAbs().maxCoeff(), 1e-7) << "trial " << trial;
  }
}

TEST(RecoverTest, CropOfTrueHomographyRecoversTruth) {
  // Predicting the exact crop displacement implied by a true homography
  // must lift back to the full-frame truth.
  const FrameConfig frames;
  const CornerSet base = CornersOfFrame(frames.w_r);
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const oracle::Quad dst = oracle::RandomQuad(rng, frames.w_r, 25);
    const Homography truth = Dlt(base, ToCorners(dst));
    const Displacement full = DisplacementFromHomography(truth, base);
    const CropSpec crop{trial % 33, (trial * 7) % 33, frames.w_t - 32};
    const Homography view = CropViewTransform(crop, frames);
    const Displacement on_crop = DisplacementFromHomography(truth * view, base);
    const Displacement lifted = RecoverFullDisplacement(on_crop, crop, frames);
    ASSERT_LT((lifted.offsets - full.offsets).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(RecoverTest, RejectsCropOutsideFrame) {
  const FrameConfig frames;
  EXPECT_THROW(RecoverFullDisplacement(Displacement::Zero(), {40, 0, frames.w_t - 32}, frames), Error);
}

TEST(RecoverTest, ScaleCovariantUnderCoordinateScaling) {
  // Scaling every coordinate frame by s scales the recovered displacement by s.
  const FrameConfig frames;
  const CornerSet base = CornersOfFrame(frames.w_r);
  const double s = 2.0;
  const Homography scale = Homography::Similarity(s, 0, 0);
  const CropSpec crop{12, 20, frames.w_t - 32};
  const Homography view = CropViewTransform(crop, frames);
  Displacement d = Displacement::Constant(4.0, -6.0);
  d.offsets(1, 3) = 2.5;
  const Displacement ref = RecoverWithViews(d, view, Homography::Identity(), base);

  const Homography h = HomographyFromDisplacement(d, base);
  const Homography h_scaled = scale * h * scale.Inverse();
  CornerSet base_scaled = base;
  for (Point2& p : base_scaled) p = {s * p.x, s * p.y};
  const Displacement d_scaled = DisplacementFromHomography(h_scaled, base_scaled);
  const Displacement got =
      RecoverWithViews(d_scaled, scale * view * scale.Inverse(), Homography::Identity(), base_scaled);
  EXPECT_LT((got.offsets - s * ref.offsets).cwiseAbs().maxCoeff(), 1e-8);
}

}  // namespace
}  // namespace homoguard
