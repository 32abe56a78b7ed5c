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

#include "homoguard/metrics.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "homoguard/error.hpp"
#include "oracles.hpp"

namespace homoguard {
namespace {

oracle::Mat24 RandomMat(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  oracle::Mat24 m;
  for (int i = 0; i < 8; ++i) m(i % 2, i / 2) = n(rng);
  return m;
}

EvalRecord Record(double mace, double score, bool rejected = false) {
  EvalRecord r;
  r.mace_m = mace;
  r.score = score;
  r.rejected = rejected;
  return r;
}

TEST(ErrorMetricsTest, MatchOracles) {
  const FrameConfig frames;
  const double mpp = frames.MetersPerResizedPixel();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const oracle::Mat24 p = RandomMat(rng, 10), g = RandomMat(rng, 10);
    ASSERT_NEAR(Mace({p}, {g}, frames), oracle::Mace(p, g, mpp), 1e-9);
    ASSERT_NEAR(CenterError({p}, {g}, frames), oracle::CenterError(p, g, mpp), 1e-9);
  }
}

TEST(ErrorMetricsTest, PureTranslationGivesEqualErrors) {
  const FrameConfig frames;
  const Displacement p = Displacement::Constant(3, 4);
  EXPECT_DOUBLE_EQ(Mace(p, Displacement::Zero(), frames), 5.0 * frames.MetersPerResizedPixel());
  EXPECT_DOUBLE_EQ(CenterError(p, Displacement::Zero(), frames), 5.0 * frames.MetersPerResizedPixel());
}

TEST(ErrorMetricsTest, CenterErrorNeverExceedsMace) {
  const FrameConfig frames;
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10000; ++trial) {
    const Displacement p{RandomMat(rng, 20)}, g{RandomMat(rng, 20)};
    ASSERT_LE(CenterError(p, g, frames), Mace(p, g, frames) + 1e-12);
  }
}

TEST(ErrorMetricsTest, SymmetricExpansionHasZeroCenterError) {
  const FrameConfig frames;
  Displacement d;
  d.offsets << -2, 2, 2, -2, -2, -2, 2, 2;
  EXPECT_NEAR(CenterError(d, Displacement::Zero(), frames), 0.0, 1e-12);
  EXPECT_GT(Mace(d, Displacement::Zero(), frames), 0.0);
}

TEST(SuccessRateTest, CountsKeptOnly) {
  std::vector<EvalRecord> rs = {Record(1, 0), Record(2, 0, true), Record(3, 0), Record(4, 0)};
  rs[3].error = "boom";
  EXPECT_DOUBLE_EQ(SuccessRate(rs), 0.5);
  EXPECT_THROW(SuccessRate({}), Error);
}

TEST(RocTest, AucMatchesPairwiseOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mace(0, 60);
  std::uniform_int_distribution<int> coarse(0, 12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EvalRecord> rs;
    std::vector<std::pair<double, bool>> scored;
    for (int i = 0; i < 150; ++i) {
      const double m = mace(rng);
      // Coarse scores force ties; correlated with the error.
      const double s = 0.1 * coarse(rng) + (m > 25 ? 0.4 : 0.0);
      rs.push_back(Record(m, s));
      scored.push_back({s, m > 25});
    }
    const RocCurve roc = ComputeRoc(rs, 25.0);
    ASSERT_NEAR(roc.auc, oracle::PairwiseAuc(scored), 1e-12) << trial;
  }
}

TEST(RocTest, CurveShape) {
  const std::vector<EvalRecord> rs = {Record(30, 0.9), Record(40, 0.5), Record(5, 0.5), Record(1, 0.1)};
  const RocCurve roc = ComputeRoc(rs, 25.0);
  EXPECT_EQ(roc.positives, 2);
  EXPECT_EQ(roc.negatives, 2);
  ASSERT_EQ(roc.points.size(), 4u);
  EXPECT_TRUE(std::isinf(roc.points[0].threshold));
  EXPECT_DOUBLE_EQ(roc.points[1].tpr, 0.5);
  EXPECT_DOUBLE_EQ(roc.points[2].tpr, 1.0);
  EXPECT_DOUBLE_EQ(roc.points[2].fpr, 0.5);
  EXPECT_DOUBLE_EQ(roc.points.back().fpr, 1.0);
  EXPECT_DOUBLE_EQ(roc.auc, 0.875);
}

TEST(RocTest, FailedRecordsSkippedAndLabelsChecked) {
  std::vector<EvalRecord> rs = {Record(30, 1), Record(1, 0)};
  rs.push_back(Record(50, 0));
  rs.back().error = "x";
  EXPECT_DOUBLE_EQ(ComputeRoc(rs, 25.0).auc, 1.0);
  try {
    ComputeRoc(std::vector<EvalRecord>{Record(1, 0), Record(2, 1)}, 25.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateLabels);
  }
}

TEST(HistogramTest, BinsAndOverflow) {
  std::vector<EvalRecord> rs = {Record(0, 0), Record(4.99, 0), Record(5, 0), Record(24.9, 0),
                                Record(25, 0), Record(1000, 0)};
  rs.push_back(Record(3, 0));
  rs.back().error = "failed";
  const auto bins = MaceHistogram(rs, 5.0, 25.0);
  ASSERT_EQ(bins.size(), 6u);
  EXPECT_EQ(bins[0].count, 2);
  EXPECT_EQ(bins[1].count, 1);
  EXPECT_EQ(bins[4].count, 1);
  EXPECT_EQ(bins[5].count, 2);
  EXPECT_DOUBLE_EQ(bins[5].lo, 25.0);
  long total = 0;
  for (const auto& b : bins) total += b.count;
  EXPECT_EQ(total, 6);
  EXPECT_THROW(MaceHistogram(rs, 0.0, 25.0), Error);
}

TEST(CenterOffsetTest, UniformInDisk) {
  const FrameConfig frames;
  const double radius = 300.0;
  double r2 = 0.0, mx = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Point2 p = SampleCenterOffset({radius}, frames, static_cast<std::uint64_t>(i));
    const double rr = p.x * p.x + p.y * p.y;
    ASSERT_LE(rr, radius * radius * (1 + 1e-12));
    r2 += rr;
    mx += p.x;
  }
  EXPECT_NEAR(r2 / n, radius * radius / 2.0, radius * radius * 0.02);
  EXPECT_NEAR(mx / n, 0.0, 5.0);
}

TEST(CenterOffsetTest, ZeroRadiusAndInfeasible) {
  const FrameConfig frames;
  const Point2 p = SampleCenterOffset({0.0}, frames, 1);
  EXPECT_EQ(p.x, 0.0);
  EXPECT_EQ(p.y, 0.0);
  try {
    SampleCenterOffset({513.0}, frames, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleDc);
  }
  EXPECT_NO_THROW(SampleCenterOffset({512.0}, frames, 1));
}

TEST(CategoryTest, NamesRoundTrip) {
  for (FailureCategory c : kAllCategories) EXPECT_EQ(ParseCategory(CategoryName(c)), c);
  EXPECT_THROW(ParseCategory("Foggy"), Error);
}

}  // namespace
}  // namespace homoguard
