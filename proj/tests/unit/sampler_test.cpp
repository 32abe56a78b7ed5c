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

#include "homoguard/sampler.hpp"

#include <gtest/gtest.h>

#include "homoguard/error.hpp"

namespace homoguard {
namespace {

TEST(SamplerTest, FirstViewIsOriginal) {
  for (auto method : {SamplingMethod::kRandom, SamplingMethod::kGrid}) {
    const auto crops = GenerateCrops({method, 32, 5, 9}, 512);
    ASSERT_EQ(crops.size(), 5u);
    EXPECT_EQ(crops[0], (CropSpec{0, 0, 512}));
  }
}

TEST(SamplerTest, RandomCropsStayInLattice) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto crops = GenerateCrops({SamplingMethod::kRandom, 32, 9, seed}, 512);
    ASSERT_EQ(crops.size(), 9u);
    for (size_t i = 1; i < crops.size(); ++i) {
      ASSERT_EQ(crops[i].size, 480);
      ASSERT_GE(crops[i].x, 0);
      ASSERT_LE(crops[i].x, 32);
      ASSERT_GE(crops[i].y, 0);
      ASSERT_LE(crops[i].y, 32);
    }
  }
}

TEST(SamplerTest, RandomCropsReachBothEnds) {
  bool lo = false, hi = false;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (const auto& c : GenerateCrops({SamplingMethod::kRandom, 4, 5, seed}, 64)) {
      if (c.size == 64) continue;
      lo |= c.x == 0;
      hi |= c.x == 4;
    }
  }
  EXPECT_TRUE(lo && hi);
}

TEST(SamplerTest, DeterministicPerSeed) {
  const SamplingPlan plan{SamplingMethod::kRandom, 16, 7, 1234};
  EXPECT_EQ(GenerateCrops(plan, 256), GenerateCrops(plan, 256));
  SamplingPlan other = plan;
  other.seed = 1235;
  EXPECT_NE(GenerateCrops(plan, 256), GenerateCrops(other, 256));
}

TEST(SamplerTest, GridUsesFourCorners) {
  const auto crops = GenerateCrops({SamplingMethod::kGrid, 32, 5, 0}, 512);
  EXPECT_EQ(crops[1], (CropSpec{0, 0, 480}));
  EXPECT_EQ(crops[2], (CropSpec{32, 0, 480}));
  EXPECT_EQ(crops[3], (CropSpec{0, 32, 480}));
  EXPECT_EQ(crops[4], (CropSpec{32, 32, 480}));
}

TEST(SamplerTest, SingleViewDisablesAugmentation) {
  EXPECT_EQ(GenerateCrops({SamplingMethod::kRandom, 32, 1, 0}, 512).size(), 1u);
  EXPECT_EQ(GenerateCrops({SamplingMethod::kGrid, 32, 1, 0}, 512).size(), 1u);
}

TEST(SamplerTest, InvalidPlans) {
  auto expect_invalid = [](SamplingPlan plan) {
    try {
      GenerateCrops(plan, 512);
      ADD_FAILURE() << "accepted invalid plan";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidPlan);
    }
  };
  expect_invalid({SamplingMethod::kRandom, 32, 0, 0});
  expect_invalid({SamplingMethod::kRandom, -1, 5, 0});
  expect_invalid({SamplingMethod::kRandom, 512, 5, 0});
  expect_invalid({SamplingMethod::kGrid, 32, 4, 0});
}

TEST(SamplerTest, ParseNames) {
  EXPECT_EQ(ParseSamplingMethod("grid"), SamplingMethod::kGrid);
  EXPECT_EQ(ParseSamplingMethod(SamplingMethodName(SamplingMethod::kRandom)), SamplingMethod::kRandom);
  EXPECT_THROW(ParseSamplingMethod("spiral"), Error);
}

}  // namespace
}  // namespace homoguard
