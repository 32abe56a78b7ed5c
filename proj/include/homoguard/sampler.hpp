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

#ifndef HOMOGUARD_SAMPLER_HPP_
#define HOMOGUARD_SAMPLER_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "homoguard/geometry.hpp"

namespace homoguard {

enum class SamplingMethod { kRandom, kGrid };

const char* SamplingMethodName(SamplingMethod method);
SamplingMethod ParseSamplingMethod(std::string_view text);

struct SamplingPlan {
  SamplingMethod method = SamplingMethod::kRandom;
  int o_c = 32;   // crop offset, pixels in the W_T frame
  int n_c = 5;    // total views including the original
  std::uint64_t seed = 0;

  // Throws InvalidPlan.
  void Validate(int w_t) const;
};

// Element 0 is always the original view (origin (0,0), size w_t). Random
// views draw origins uniformly on the integer lattice [0, o_c]^2; grid views
// (n_c == 5 only) place a w_t - o_c crop at each of the four corners.
std::vector<CropSpec> GenerateCrops(const SamplingPlan& plan, int w_t);

}  // namespace homoguard

#endif  // HOMOGUARD_SAMPLER_HPP_
