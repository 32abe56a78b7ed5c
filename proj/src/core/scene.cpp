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

#include "homoguard/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "homoguard/error.hpp"
#include "homoguard/rng.hpp"

namespace homoguard {
namespace {

struct Octave {
  int period;
  float amplitude;
};

constexpr Octave kOctaves[] = {{512, 1.0f}, {256, 0.85f}, {128, 0.7f},
                               {64, 0.5f},  {32, 0.32f},  {16, 0.18f}};

// Adds one octave of smoothstep-interpolated value noise.
void AddValueNoise(FloatImage& field, int period, float amplitude, Pcg32& rng) {
  const int cells_x = field.width / period + 2;
  const int cells_y = field.height / period + 2;
  std::vector<float> lattice(static_cast<size_t>(cells_x) * cells_y);
  for (float& v : lattice) v = static_cast<float>(rng.Uniform(-1.0, 1.0));

  std::vector<int> ix(static_cast<size_t>(field.width));
  std::vector<float> wx(static_cast<size_t>(field.width));
  for (int x = 0; x < field.width; ++x) {
    const double t = static_cast<double>(x) / period;
    ix[x] = static_cast<int>(t);
    const double f = t - ix[x];
    wx[x] = static_cast<float>(f * f * (3.0 - 2.0 * f));
  }
  for (int y = 0; y < field.height; ++y) {
    const double t = static_cast<double>(y) / period;
    const int iy = static_cast<int>(t);
    const double fy = t - iy;
    const float wy = static_cast<float>(fy * fy * (3.0 - 2.0 * fy));
    const float* row0 = &lattice[static_cast<size_t>(iy) * cells_x];
    const float* row1 = row0 + cells_x;
    float* out = &field.data[static_cast<size_t>(y) * field.width];
    for (int x = 0; x < field.width; ++x) {
      const int i = ix[x];
      const float top = row0[i] + wx[x] * (row0[i + 1] - row0[i]);
      const float bottom = row1[i] + wx[x] * (row1[i + 1] - row1[i]);
      out[x] += amplitude * (top + wy * (bottom - top));
    }
  }
}

// Fills a rotated rectangle with `value` blended by `opacity`.
void FillRotatedRect(FloatImage& field, double cx, double cy, double half_w, double half_h,
                     double angle, float value, float opacity) {
  const double c = std::cos(angle), s = std::sin(angle);
  const double reach = std::hypot(half_w, half_h);
  const int x0 = std::max(0, static_cast<int>(cx - reach));
  const int x1 = std::min(field.width - 1, static_cast<int>(cx + reach) + 1);
  const int y0 = std::max(0, static_cast<int>(cy - reach));
  const int y1 = std::min(field.height - 1, static_cast<int>(cy + reach) + 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double u = c * dx + s * dy;
      const double v = -s * dx + c * dy;
      if (std::abs(u) <= half_w && std::abs(v) <= half_h) {
        float& p = field.at(x, y);
        p += opacity * (value - p);
      }
    }
  }
}

void StrokeRoad(FloatImage& field, Pcg32& rng, float value) {
  const double length = rng.Uniform(0.3, 0.9) * field.width;
  const double half_width = rng.Uniform(2.0, 6.0);
  const double angle = rng.Uniform(0.0, std::numbers::pi);
  const double cx = rng.Uniform(0.0, field.width);
  const double cy = rng.Uniform(0.0, field.height);
  FillRotatedRect(field, cx, cy, 0.5 * length, half_width, angle, value, 0.85f);
}

FloatImage RichField(int size, Pcg32& rng) {
  FloatImage field(size, size, 0.0f);
  for (const Octave& o : kOctaves) AddValueNoise(field, o.period, o.amplitude, rng);
  for (float& v : field.data) v = 128.0f + 38.0f * v;

  const double area_units = static_cast<double>(size) * size / (256.0 * 256.0);
  const int fields = std::max(1, static_cast<int>(std::lround(1.6 * area_units)));
  for (int i = 0; i < fields; ++i) {
    const double half_w = rng.Uniform(20.0, 110.0);
    const double half_h = rng.Uniform(20.0, 110.0);
    FillRotatedRect(field, rng.Uniform(0.0, size), rng.Uniform(0.0, size), half_w, half_h,
                    rng.Uniform(0.0, std::numbers::pi / 2.0),
                    static_cast<float>(rng.Uniform(40.0, 215.0)), static_cast<float>(rng.Uniform(0.5, 0.9)));
  }
  const int roads = std::max(1, static_cast<int>(std::lround(0.25 * area_units)));
  for (int i = 0; i < roads; ++i) {
    StrokeRoad(field, rng, static_cast<float>(rng.Uniform() < 0.5 ? rng.Uniform(20.0, 60.0)
                                                                   : rng.Uniform(195.0, 235.0)));
  }
  return field;
}

}  // namespace

const char* SceneTextureName(SceneTexture texture) {
  switch (texture) {
    case SceneTexture::kRich: return "rich";
    case SceneTexture::kFlat: return "flat";
    case SceneTexture::kTiled: return "tiled";
  }
  return "rich";
}

SceneTexture ParseSceneTexture(std::string_view text) {
  if (text == "rich") return SceneTexture::kRich;
  if (text == "flat") return SceneTexture::kFlat;
  if (text == "tiled") return SceneTexture::kTiled;
  Fail(ErrorCode::kInvalidArgument, "unknown scene texture '" + std::string(text) + "'");
}

void SceneSpec::Validate(int min_size) const {
  if (size < min_size) Fail(ErrorCode::kInvalidArgument, "scene is smaller than the satellite patch");
  if (!(domain_gap >= 0.0 && domain_gap <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "domain_gap must lie in [0, 1]");
  }
  if (texture == SceneTexture::kTiled && (period < 8 || period > size)) {
    Fail(ErrorCode::kInvalidArgument, "tile period out of range");
  }
}

GrayImage GenerateScene(const SceneSpec& spec) {
  spec.Validate(1);
  Pcg32 rng(spec.seed);
  switch (spec.texture) {
    case SceneTexture::kFlat: {
      FloatImage field(spec.size, spec.size, 0.0f);
      AddValueNoise(field, 64, 1.0f, rng);
      for (float& v : field.data) v = 128.0f + 0.8f * v;
      return ToGray(field);
    }
    case SceneTexture::kTiled: {
      const FloatImage tile = RichField(spec.period, rng);
      const GrayImage tile_gray = ToGray(tile);
      GrayImage out(spec.size, spec.size);
      for (int y = 0; y < spec.size; ++y) {
        const std::uint8_t* src = &tile_gray.pixels[static_cast<size_t>(y % spec.period) * spec.period];
        std::uint8_t* dst = &out.pixels[static_cast<size_t>(y) * spec.size];
        for (int x = 0; x < spec.size; ++x) dst[x] = src[x % spec.period];
      }
      return out;
    }
    case SceneTexture::kRich:
      break;
  }
  return ToGray(RichField(spec.size, rng));
}

void ApplyDomainGap(GrayImage& image, double strength, std::uint64_t seed) {
  if (strength <= 0.0) return;
  Pcg32 rng(seed);
  const double sigma = 3.0 * strength;
  for (std::uint8_t& p : image.pixels) {
    const double t = p / 255.0;
    const double curved = t * t * (3.0 - 2.0 * t);  // smoothstep, monotone on [0, 1]
    const double v = 255.0 * ((1.0 - strength) * t + strength * curved) + sigma * rng.Normal();
    p = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
}

}  // namespace homoguard
