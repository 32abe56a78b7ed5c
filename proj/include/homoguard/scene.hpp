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

#ifndef HOMOGUARD_SCENE_HPP_
#define HOMOGUARD_SCENE_HPP_

#include <cstdint>
#include <string_view>

#include "homoguard/image.hpp"

namespace homoguard {

enum class SceneTexture { kRich, kFlat, kTiled };

const char* SceneTextureName(SceneTexture texture);
SceneTexture ParseSceneTexture(std::string_view text);

struct SceneSpec {
  std::uint64_t seed = 0;
  SceneTexture texture = SceneTexture::kRich;
  double domain_gap = 0.3;  // thermal intensity remap strength in [0, 1]
  int size = 2560;
  int period = 128;         // tile period for kTiled, pixels

  void Validate(int min_size) const;
};

// Procedural stand-in for a satellite map. Rich: multi-octave value noise
// with field polygons and road strokes; Flat: near-constant; Tiled: a rich
// patch repeated with the given period.
GrayImage GenerateScene(const SceneSpec& spec);

// Monotone nonlinear intensity remap plus mild sensor noise, modelling the
// appearance gap between thermal and optical imagery.
void ApplyDomainGap(GrayImage& image, double strength, std::uint64_t seed);

}  // namespace homoguard

#endif  // HOMOGUARD_SCENE_HPP_
