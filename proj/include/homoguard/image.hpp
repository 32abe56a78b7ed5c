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

#ifndef HOMOGUARD_IMAGE_HPP_
#define HOMOGUARD_IMAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "homoguard/geometry.hpp"

namespace homoguard {

// Row-major 8-bit grayscale raster.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
  bool empty() const { return pixels.empty(); }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// Row-major float raster used for intermediate processing.
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  FloatImage() = default;
  FloatImage(int w, int h, float fill = 0.0f);

  float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

FloatImage ToFloat(const GrayImage& image);
// Rounds to nearest and clamps to [0, 255].
GrayImage ToGray(const FloatImage& image);

// Bilinear sample with coordinates clamped to the raster.
float SampleBilinear(const FloatImage& image, double x, double y);
float SampleBilinear(const GrayImage& image, double x, double y);

std::uint64_t ImageDigest(const GrayImage& image);

// Binary PGM (P5), maxval 255.
GrayImage ReadPgm(const std::filesystem::path& path);
void WritePgm(const GrayImage& image, const std::filesystem::path& path);

// Extracts the square crop and resamples it to w_r x w_r, pixel-center
// aligned. Shrinking averages each output pixel's footprint (area filter);
// enlarging interpolates bilinearly, clamped at the crop border.
GrayImage CropAndResize(const GrayImage& image, const CropSpec& crop, int w_r);

// Warps `image` by the mapping output -> source given as a homography;
// samples falling outside the source are filled with `fill`.
GrayImage WarpImage(const GrayImage& image, const Homography& output_to_source,
                    int out_width, int out_height, std::uint8_t fill = 0);

double MeanIntensity(const GrayImage& image);
double IntensityStdDev(const GrayImage& image);

}  // namespace homoguard

#endif  // HOMOGUARD_IMAGE_HPP_
