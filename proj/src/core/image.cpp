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

#include "homoguard/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "homoguard/error.hpp"
#include "homoguard/rng.hpp"

namespace homoguard {
namespace {

template <typename Raster>
float Bilinear(const Raster& image, double x, double y, auto fetch) {
  x = std::clamp(x, 0.0, static_cast<double>(image.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(image.height - 1));
  const int x0 = std::min(static_cast<int>(x), image.width - 1);
  const int y0 = std::min(static_cast<int>(y), image.height - 1);
  const int x1 = std::min(x0 + 1, image.width - 1);
  const int y1 = std::min(y0 + 1, image.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * fetch(x0, y0) + fx * fetch(x1, y0);
  const double bottom = (1.0 - fx) * fetch(x0, y1) + fx * fetch(x1, y1);
  return static_cast<float>((1.0 - fy) * top + fy * bottom);
}

int ReadHeaderInt(std::istream& in) {
  int c = in.peek();
  while (c != EOF) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
    c = in.peek();
  }
  int value = -1;
  in >> value;
  if (!in) Fail(ErrorCode::kIo, "malformed PGM header");
  return value;
}

}  // namespace

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

FloatImage::FloatImage(int w, int h, float fill)
    : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

FloatImage ToFloat(const GrayImage& image) {
  FloatImage out(image.width, image.height);
  std::transform(image.pixels.begin(), image.pixels.end(), out.data.begin(),
                 [](std::uint8_t v) { return static_cast<float>(v); });
  return out;
}

GrayImage ToGray(const FloatImage& image) {
  GrayImage out(image.width, image.height);
  std::transform(image.data.begin(), image.data.end(), out.pixels.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  });
  return out;
}

float SampleBilinear(const FloatImage& image, double x, double y) {
  return Bilinear(image, x, y, [&](int px, int py) { return image.at(px, py); });
}

float SampleBilinear(const GrayImage& image, double x, double y) {
  return Bilinear(image, x, y,
                  [&](int px, int py) { return static_cast<float>(image.at(px, py)); });
}

std::uint64_t ImageDigest(const GrayImage& image) {
  std::uint64_t h = Fnv1a64(image.pixels);
  return MixSeed(h, (static_cast<std::uint64_t>(image.width) << 32) |
                        static_cast<std::uint32_t>(image.height));
}

GrayImage ReadPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5") Fail(ErrorCode::kIo, path.string() + " is not a binary PGM");
  const int width = ReadHeaderInt(in);
  const int height = ReadHeaderInt(in);
  const int maxval = ReadHeaderInt(in);
  if (width <= 0 || height <= 0 || maxval != 255) {
    Fail(ErrorCode::kIo, path.string() + ": unsupported PGM geometry or maxval");
  }
  in.get();  // single whitespace byte after maxval
  GrayImage image(width, height);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.pixels.size())) {
    Fail(ErrorCode::kIo, path.string() + ": truncated pixel data");
  }
  return image;
}

void WritePgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

namespace {

// Resampling taps for one axis: output i averages the source footprint
// [i*k, (i+1)*k) when shrinking, and interpolates bilinearly otherwise.
// Both keep x_out = (x_src + 0.5) / k - 0.5.
struct Taps {
  std::vector<int> first;
  std::vector<std::vector<float>> weights;
};

Taps AxisTaps(int src, int dst) {
  Taps taps;
  taps.first.resize(dst);
  taps.weights.resize(dst);
  const double k = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    if (k > 1.0) {
      const double lo = i * k, hi = (i + 1) * k;
      const int a = static_cast<int>(std::floor(lo));
      const int b = std::min(src - 1, static_cast<int>(std::ceil(hi)) - 1);
      taps.first[i] = a;
      for (int s = a; s <= b; ++s) {
        const double w = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
        taps.weights[i].push_back(static_cast<float>(w / k));
      }
    } else {
      const double sx = std::clamp((i + 0.5) * k - 0.5, 0.0, src - 1.0);
      const int x0 = std::min(static_cast<int>(sx), std::max(0, src - 2));
      const double f = sx - x0;
      taps.first[i] = x0;
      taps.weights[i] = {static_cast<float>(1.0 - f)};
      if (x0 + 1 < src) taps.weights[i].push_back(static_cast<float>(f));
    }
  }
  return taps;
}

}  // namespace

GrayImage CropAndResize(const GrayImage& image, const CropSpec& crop, int w_r) {
  if (w_r <= 0 || crop.size <= 0) Fail(ErrorCode::kInvalidArgument, "sizes must be positive");
  if (crop.x < 0 || crop.y < 0 || crop.x + crop.size > image.width ||
      crop.y + crop.size > image.height) {
    Fail(ErrorCode::kOutOfBounds, "crop exceeds image bounds");
  }
  const Taps taps = AxisTaps(crop.size, w_r);
  // Horizontal pass over the crop rows.
  std::vector<float> rows(static_cast<size_t>(crop.size) * w_r);
  for (int y = 0; y < crop.size; ++y) {
    const std::uint8_t* src = &image.pixels[static_cast<size_t>(crop.y + y) * image.width + crop.x];
    float* dst = &rows[static_cast<size_t>(y) * w_r];
    for (int i = 0; i < w_r; ++i) {
      float acc = 0.0f;
      const auto& w = taps.weights[i];
      for (size_t t = 0; t < w.size(); ++t) acc += w[t] * src[taps.first[i] + static_cast<int>(t)];
      dst[i] = acc;
    }
  }
  GrayImage out(w_r, w_r);
  std::vector<float> acc(static_cast<size_t>(w_r));
  for (int j = 0; j < w_r; ++j) {
    std::fill(acc.begin(), acc.end(), 0.0f);
    const auto& w = taps.weights[j];
    for (size_t t = 0; t < w.size(); ++t) {
      const float* row = &rows[static_cast<size_t>(taps.first[j] + static_cast<int>(t)) * w_r];
      for (int i = 0; i < w_r; ++i) acc[i] += w[t] * row[i];
    }
    for (int i = 0; i < w_r; ++i) {
      out.at(i, j) = static_cast<std::uint8_t>(std::clamp(std::lround(acc[i]), 0L, 255L));
    }
  }
  return out;
}

GrayImage WarpImage(const GrayImage& image, const Homography& output_to_source,
                    int out_width, int out_height, std::uint8_t fill) {
  GrayImage out(out_width, out_height, fill);
  const Eigen::Matrix3d& m = output_to_source.matrix();
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const double w = m(2, 0) * x + m(2, 1) * y + m(2, 2);
      if (std::abs(w) < 1e-12) continue;
      const double sx = (m(0, 0) * x + m(0, 1) * y + m(0, 2)) / w;
      const double sy = (m(1, 0) * x + m(1, 1) * y + m(1, 2)) / w;
      if (sx < -0.5 || sy < -0.5 || sx > image.width - 0.5 || sy > image.height - 0.5) continue;
      out.at(x, y) = static_cast<std::uint8_t>(
          std::clamp(std::lround(SampleBilinear(image, sx, sy)), 0L, 255L));
    }
  }
  return out;
}

double MeanIntensity(const GrayImage& image) {
  if (image.pixels.empty()) return 0.0;
  double sum = 0.0;
  for (std::uint8_t v : image.pixels) sum += v;
  return sum / static_cast<double>(image.pixels.size());
}

double IntensityStdDev(const GrayImage& image) {
  if (image.pixels.empty()) return 0.0;
  const double mean = MeanIntensity(image);
  double acc = 0.0;
  for (std::uint8_t v : image.pixels) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(image.pixels.size()));
}

}  // namespace homoguard
