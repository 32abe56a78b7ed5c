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

#ifndef HOMOGUARD_DATASET_HPP_
#define HOMOGUARD_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "homoguard/geometry.hpp"
#include "homoguard/image.hpp"
#include "homoguard/metrics.hpp"
#include "homoguard/scene.hpp"

namespace homoguard {

// Magnitude units: Textureless contrast loss in [0, 1]; Corrupted exposure
// exponent in [0, 1] (gain 10^{+-m}); GeometricNoise corner shift in pixels
// (<= 64); SelfSimilar tile period in pixels; ExceedsRegion overshoot past
// the feasible offset in pixels (<= W_T / 2); Outdated number of edits.
struct CorruptionSpec {
  FailureCategory category = FailureCategory::kClean;
  double magnitude = 0.0;

  void Validate(const FrameConfig& frames) const;
};

struct PairOptions {
  double domain_gap = 0.3;
  double jitter_px = 4.0;  // max corner perturbation of the true placement
};

struct PairSample {
  GrayImage satellite;  // W_S x W_S
  GrayImage thermal;    // W_T x W_T
  Displacement gt;      // resized thermal -> resized satellite, W_R pixels
  FailureCategory category = FailureCategory::kClean;
  // Full thermal -> full satellite placement (before geometric corruption).
  Homography placement = Homography::Identity();
};

PairSample MakePair(const GrayImage& scene, const DcConfig& dc, const CorruptionSpec& corruption,
                    const FrameConfig& frames, std::uint64_t seed, const PairOptions& options = {});

// One evaluation input, gt in resized pixels.
struct Sample {
  std::string id;
  GrayImage satellite;
  GrayImage thermal;
  Displacement gt;
  FailureCategory category = FailureCategory::kClean;
  double d_c_m = 0.0;
  std::uint64_t seed = 0;
};

struct ManifestEntry {
  std::string id;
  std::string satellite;  // relative to the manifest directory
  std::string thermal;
  Displacement gt_full;   // W_S pixels
  FailureCategory category = FailureCategory::kClean;
  double d_c_m = 0.0;
  std::uint64_t seed = 0;
  double magnitude = 0.0;
};

struct Manifest {
  FrameConfig frames;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> samples;
  std::filesystem::path root;  // directory holding manifest.json
};

Manifest ReadManifest(const std::filesystem::path& path);
void WriteManifest(const Manifest& manifest, const std::filesystem::path& path);
// Checks that every referenced file exists and every gt is finite.
void ValidateManifest(const Manifest& manifest);

class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual size_t size() const = 0;
  virtual const FrameConfig& frames() const = 0;
  // Safe to call concurrently.
  virtual Sample Load(size_t index) const = 0;
};

class ManifestSource final : public SampleSource {
 public:
  explicit ManifestSource(Manifest manifest);
  size_t size() const override { return manifest_.samples.size(); }
  const FrameConfig& frames() const override { return manifest_.frames; }
  Sample Load(size_t index) const override;
  const Manifest& manifest() const { return manifest_; }

 private:
  Manifest manifest_;
};

struct GenerateOptions {
  std::uint64_t seed = 0;
  int count = 100;
  double d_c_m = 512.0;
  // Corrupted samples cycle through these.
  std::vector<FailureCategory> categories = {
      FailureCategory::kTextureless,   FailureCategory::kCorrupted,
      FailureCategory::kGeometricNoise, FailureCategory::kSelfSimilar,
      FailureCategory::kExceedsRegion, FailureCategory::kOutdated};
  double clean_fraction = 0.5;
  int scene_group = 25;  // samples sharing one scene
  double domain_gap_min = 0.2;
  double domain_gap_max = 0.5;
  double jitter_px = 4.0;
  FrameConfig frames;

  void Validate() const;
};

// Everything needed to render sample `index`; a pure function of the options.
struct SamplePlan {
  std::string id;
  FailureCategory category = FailureCategory::kClean;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t scene_seed = 0;
  double domain_gap = 0.0;
};

SamplePlan PlanSample(const GenerateOptions& options, int index);

// Renders samples on demand without touching the filesystem.
class SyntheticSource final : public SampleSource {
 public:
  explicit SyntheticSource(GenerateOptions options);
  size_t size() const override { return static_cast<size_t>(options_.count); }
  const FrameConfig& frames() const override { return options_.frames; }
  Sample Load(size_t index) const override;
  PairSample Render(size_t index) const;

 private:
  std::shared_ptr<const GrayImage> SceneFor(const SamplePlan& plan) const;

  GenerateOptions options_;
  mutable std::mutex mutex_;
  // Small most-recently-used cache; consecutive samples share a scene.
  mutable std::vector<std::pair<std::uint64_t, std::shared_ptr<const GrayImage>>> cache_;
};

// Writes images/<id>_sat.pgm, images/<id>_thr.pgm and manifest.json under
// `out_dir`. Parallel across samples; output is independent of `threads`.
Manifest GenerateDataset(const GenerateOptions& options, const std::filesystem::path& out_dir,
                         int threads = 1);

}  // namespace homoguard

#endif  // HOMOGUARD_DATASET_HPP_
