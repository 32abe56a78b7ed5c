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

#include <string>

#include "homoguard/error.hpp"
#include "homoguard/rng.hpp"

namespace homoguard {

const char* SamplingMethodName(SamplingMethod method) {
  return method == SamplingMethod::kGrid ? "grid" : "random";
}

SamplingMethod ParseSamplingMethod(std::string_view text) {
  if (text == "random") return SamplingMethod::kRandom;
  if (text == "grid") return SamplingMethod::kGrid;
  Fail(ErrorCode::kInvalidArgument, "unknown sampling method '" + std::string(text) + "'");
}

void SamplingPlan::Validate(int w_t) const {
  if (w_t <= 0) Fail(ErrorCode::kInvalidPlan, "thermal width must be positive");
  if (o_c < 0 || o_c >= w_t) {
    Fail(ErrorCode::kInvalidPlan, "crop offset must satisfy 0 <= o_c < w_t");
  }
  if (n_c < 1) Fail(ErrorCode::kInvalidPlan, "n_c must be >= 1");
  if (method == SamplingMethod::kGrid && n_c != 1 && n_c != 5) {
    Fail(ErrorCode::kInvalidPlan, "grid sampling supports n_c of 1 or 5 only");
  }
}

std::vector<CropSpec> GenerateCrops(const SamplingPlan& plan, int w_t) {
  plan.Validate(w_t);
  std::vector<CropSpec> crops;
  crops.reserve(static_cast<size_t>(plan.n_c));
  crops.push_back({0, 0, w_t});
  if (plan.n_c == 1) return crops;

  const int size = w_t - plan.o_c;
  if (plan.method == SamplingMethod::kGrid) {
    crops.push_back({0, 0, size});
    crops.push_back({plan.o_c, 0, size});
    crops.push_back({0, plan.o_c, size});
    crops.push_back({plan.o_c, plan.o_c, size});
    return crops;
  }

  Pcg32 rng(plan.seed);
  for (int i = 1; i < plan.n_c; ++i) {
    const auto x = static_cast<int>(rng.UniformInt(0, plan.o_c));
    const auto y = static_cast<int>(rng.UniformInt(0, plan.o_c));
    crops.push_back({x, y, size});
  }
  return crops;
}

}  // namespace homoguard
