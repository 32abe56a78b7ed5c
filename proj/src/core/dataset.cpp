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

#include "homoguard/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <thread>

#include "json.hpp"

#include "homoguard/error.hpp"
#include "homoguard/rng.hpp"

namespace homoguard {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Stream tags for the per-sample generators.
enum : std::uint64_t {
  kOriginStream = 1,
  kOffsetStream,
  kJitterStream,
  kGapStream,
  kCorruptStream,
  kPlanStream,
};

constexpr std::uint64_t kSceneSalt = 0x5ce9e5a17ULL;

Displacement RandomCornerShift(Pcg32& rng, double max_shift) {
  Displacement d;
  for (int c = 0; c < 4; ++c) {
    d.offsets(0, c) = rng.Uniform(-max_shift, max_shift);
    d.offsets(1, c) = rng.Uniform(-max_shift, max_shift);
  }
  return d;
}

GrayImage CopyPatch(const GrayImage& scene, int x0, int y0, int size) {
  GrayImage out(size, size);
  for (int y = 0; y < size; ++y) {
    std::copy_n(&scene.pixels[static_cast<size_t>(y0 + y) * scene.width + x0], size,
                &out.pixels[static_cast<size_t>(y) * size]);
  }
  return out;
}

void CollapseContrast(GrayImage& image, double m, Pcg32& rng) {
  const double mean = MeanIntensity(image);
  for (std::uint8_t& p : image.pixels) {
    const double v = mean + (p - mean) * (1.0 - m) + 2.0 * m * rng.Normal();
    p = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
}

void ExposureClip(GrayImage& image, double m, Pcg32& rng) {
  const double sign = rng.Uniform() < 0.5 ? -1.0 : 1.0;
  const double gain = std::pow(10.0, sign * m);
  const double sigma = 6.0 * m;
  for (std::uint8_t& p : image.pixels) {
    const double v = gain * p + sigma * rng.Normal();
    p = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
}

// Adds or flattens rectangular structures inside `region` (x, y, size).
void EditStructures(GrayImage& image, int edits, const CropSpec& region, Pcg32& rng) {
  for (int e = 0; e < edits; ++e) {
    const double cx = region.x + rng.Uniform(0.0, region.size);
    const double cy = region.y + rng.Uniform(0.0, region.size);
    const bool road = rng.Uniform() < 0.3;
    const double half_w = road ? rng.Uniform(80.0, 220.0) : rng.Uniform(20.0, 80.0);
    const double half_h = road ? rng.Uniform(3.0, 7.0) : rng.Uniform(20.0, 80.0);
    const double angle = rng.Uniform(0.0, std::numbers::pi);
    const bool remove = !road && rng.Uniform() < 0.5;
    const double c = std::cos(angle), s = std::sin(angle);
    const double reach = std::hypot(half_w, half_h);
    const int x0 = std::max(0, static_cast<int>(cx - reach));
    const int x1 = std::min(image.width - 1, static_cast<int>(cx + reach) + 1);
    const int y0 = std::max(0, static_cast<int>(cy - reach));
    const int y1 = std::min(image.height - 1, static_cast<int>(cy + reach) + 1);

    auto inside = [&](int x, int y) {
      const double dx = x - cx, dy = y - cy;
      return std::abs(c * dx + s * dy) <= half_w && std::abs(-s * dx + c * dy) <= half_h;
    };
    double value = rng.Uniform() < 0.5 ? rng.Uniform(20.0, 70.0) : rng.Uniform(185.0, 235.0);
    if (remove) {
      double sum = 0.0;
      long n = 0;
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          if (inside(x, y)) sum += image.at(x, y), ++n;
      if (n == 0) continue;
      value = sum / n;
    }
    const auto fill = static_cast<std::uint8_t>(std::lround(value));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (inside(x, y)) image.at(x, y) = fill;
  }
}

std::pair<double, double> MagnitudeRange(FailureCategory category, const FrameConfig& frames) {
  switch (category) {
    case FailureCategory::kClean: return {0.0, 0.0};
    case FailureCategory::kTextureless: return {0.9, 0.98};
    case FailureCategory::kCorrupted: return {0.7, 1.0};
    case FailureCategory::kGeometricNoise: return {32.0, 64.0};
    case FailureCategory::kSelfSimilar: return {48.0, 96.0};
    case FailureCategory::kExceedsRegion: return {0.25 * frames.w_t, 0.5 * frames.w_t};
    case FailureCategory::kOutdated: return {12.0, 32.0};
  }
  return {0.0, 0.0};
}

json DisplacementJson(const Displacement& d) {
  json rows = json::array();
  for (int r = 0; r < 2; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(d.offsets(r, c));
    rows.push_back(row);
  }
  return rows;
}

Displacement DisplacementFromJson(const json& j) {
  if (!j.is_array() || j.size() != 2) Fail(ErrorCode::kIo, "displacement must be a 2x4 array");
  Displacement d;
  for (int r = 0; r < 2; ++r) {
    if (!j[r].is_array() || j[r].size() != 4) Fail(ErrorCode::kIo, "displacement must be a 2x4 array");
    for (int c = 0; c < 4; ++c) {
      if (!j[r][c].is_number()) Fail(ErrorCode::kIo, "displacement entries must be numbers");
      d.offsets(r, c) = j[r][c].get<double>();
    }
  }
  return d;
}

// Full W_S satellite pixels <-> resized W_R pixels.
double FullPerResized(const FrameConfig& frames) {
  return static_cast<double>(frames.w_s) / frames.w_r;
}

}  // namespace

void CorruptionSpec::Validate(const FrameConfig& frames) const {
  const double m = magnitude;
  if (!(m >= 0.0) || !std::isfinite(m)) Fail(ErrorCode::kInvalidArgument, "magnitude must be finite and >= 0");
  auto bound = [&](double hi, const char* what) {
    if (m > hi) Fail(ErrorCode::kInvalidArgument, std::string(what) + " magnitude out of range");
  };
  switch (category) {
    case FailureCategory::kClean: break;
    case FailureCategory::kTextureless: bound(1.0, "textureless"); break;
    case FailureCategory::kCorrupted: bound(1.0, "exposure"); break;
    case FailureCategory::kGeometricNoise: bound(64.0, "geometric noise"); break;
    case FailureCategory::kSelfSimilar:
      if (m < 8.0) Fail(ErrorCode::kInvalidArgument, "tile period must be at least 8 px");
      bound(frames.w_s, "tile period");
      break;
    case FailureCategory::kExceedsRegion: bound(0.5 * frames.w_t, "overshoot"); break;
    case FailureCategory::kOutdated: bound(256.0, "edit count"); break;
  }
}

PairSample MakePair(const GrayImage& scene, const DcConfig& dc, const CorruptionSpec& corruption,
                    const FrameConfig& frames, std::uint64_t seed, const PairOptions& options) {
  frames.Validate();
  corruption.Validate(frames);
  if (scene.width < frames.w_s || scene.height < frames.w_s) {
    Fail(ErrorCode::kInvalidArgument, "scene is smaller than the satellite patch");
  }
  if (!(options.domain_gap >= 0.0 && options.domain_gap <= 1.0) || !(options.jitter_px >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "invalid pair options");
  }

  // Keep room for the thermal patch around the satellite patch when possible.
  Pcg32 origin_rng(MixSeed(seed, kOriginStream));
  const int margin_x = std::min(frames.w_t / 2 + 8, (scene.width - frames.w_s) / 2);
  const int margin_y = std::min(frames.w_t / 2 + 8, (scene.height - frames.w_s) / 2);
  const int ox = static_cast<int>(origin_rng.UniformInt(margin_x, scene.width - frames.w_s - margin_x));
  const int oy = static_cast<int>(origin_rng.UniformInt(margin_y, scene.height - frames.w_s - margin_y));

  Point2 offset = SampleCenterOffset(dc, frames, MixSeed(seed, kOffsetStream));
  if (corruption.category == FailureCategory::kExceedsRegion) {
    Pcg32 rng(MixSeed(seed, kOffsetStream) ^ 0xe5ULL);
    const double theta = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    const double reach = 0.5 * (frames.w_s - frames.w_t) + corruption.magnitude;
    const double c = std::cos(theta), s = std::sin(theta);
    const double norm = std::max(std::abs(c), std::abs(s));
    offset = {reach * c / norm, reach * s / norm};
  }

  const CornerSet thermal_corners = CornersOfFrame(frames.w_t);
  Pcg32 jitter_rng(MixSeed(seed, kJitterStream));
  const Displacement jitter = RandomCornerShift(jitter_rng, options.jitter_px);
  const double center = 0.5 * (frames.w_s - frames.w_t);

  PairSample out;
  out.category = corruption.category;
  out.placement = Homography::Translation(center + offset.x, center + offset.y) *
                  HomographyFromDisplacement(jitter, thermal_corners);
  out.satellite = CopyPatch(scene, ox, oy, frames.w_s);
  out.thermal = WarpImage(scene, Homography::Translation(ox, oy) * out.placement, frames.w_t,
                          frames.w_t, 0);
  ApplyDomainGap(out.thermal, options.domain_gap, MixSeed(seed, kGapStream));

  Pcg32 rng(MixSeed(seed, kCorruptStream));
  const double m = corruption.magnitude;
  switch (corruption.category) {
    case FailureCategory::kClean:
    case FailureCategory::kSelfSimilar:
    case FailureCategory::kExceedsRegion:
      break;
    case FailureCategory::kTextureless:
      CollapseContrast(out.thermal, m, rng);
      break;
    case FailureCategory::kCorrupted:
      ExposureClip(out.thermal, m, rng);
      break;
    case FailureCategory::kGeometricNoise:
      if (m > 0.0) {
        const Homography distortion =
            HomographyFromDisplacement(RandomCornerShift(rng, m), thermal_corners);
        out.thermal = WarpImage(out.thermal, distortion.Inverse(), frames.w_t, frames.w_t, 0);
      }
      break;
    case FailureCategory::kOutdated: {
      const int x = static_cast<int>(std::lround(center + offset.x));
      const int y = static_cast<int>(std::lround(center + offset.y));
      EditStructures(out.satellite, static_cast<int>(std::lround(m)), {x, y, frames.w_t}, rng);
      break;
    }
  }

  const Homography to_resized = ResampleTransform(frames.w_s, frames.w_r) * out.placement *
                                ResampleTransform(frames.w_r, frames.w_t);
  out.gt = DisplacementFromHomography(to_resized, CornersOfFrame(frames.w_r));
  return out;
}

Manifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open manifest " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kIo, std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest m;
  m.root = path.parent_path();
  try {
    const json& f = j.at("frames");
    m.frames.w_s = f.at("w_s").get<int>();
    m.frames.w_t = f.at("w_t").get<int>();
    m.frames.w_r = f.at("w_r").get<int>();
    m.frames.meters_per_pixel = f.at("meters_per_pixel").get<double>();
    m.seed = j.value("seed", std::uint64_t{0});
    for (const json& s : j.at("samples")) {
      ManifestEntry e;
      e.id = s.at("id").get<std::string>();
      e.satellite = s.at("satellite").get<std::string>();
      e.thermal = s.at("thermal").get<std::string>();
      e.gt_full = DisplacementFromJson(s.at("gt_displacement"));
      e.category = ParseCategory(s.at("category").get<std::string>());
      e.d_c_m = s.value("d_c_m", 0.0);
      e.seed = s.value("seed", std::uint64_t{0});
      e.magnitude = s.value("magnitude", 0.0);
      m.samples.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kIo, std::string("malformed manifest: ") + e.what());
  } catch (const Error& e) {
    Fail(ErrorCode::kIo, std::string("malformed manifest: ") + e.what());
  }
  m.frames.Validate();
  return m;
}

void WriteManifest(const Manifest& manifest, const std::filesystem::path& path) {
  ordered_json j;
  j["version"] = 1;
  j["seed"] = manifest.seed;
  j["frames"] = {{"w_s", manifest.frames.w_s},
                 {"w_t", manifest.frames.w_t},
                 {"w_r", manifest.frames.w_r},
                 {"meters_per_pixel", manifest.frames.meters_per_pixel}};
  ordered_json samples = ordered_json::array();
  for (const ManifestEntry& e : manifest.samples) {
    ordered_json s;
    s["id"] = e.id;
    s["satellite"] = e.satellite;
    s["thermal"] = e.thermal;
    s["gt_displacement"] = DisplacementJson(e.gt_full);
    s["category"] = CategoryName(e.category);
    s["d_c_m"] = e.d_c_m;
    s["seed"] = e.seed;
    s["magnitude"] = e.magnitude;
    samples.push_back(std::move(s));
  }
  j["samples"] = std::move(samples);
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write manifest " + path.string());
  out << j.dump(1) << '\n';
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

void ValidateManifest(const Manifest& manifest) {
  manifest.frames.Validate();
  for (const ManifestEntry& e : manifest.samples) {
    if (!e.gt_full.AllFinite()) Fail(ErrorCode::kIo, "non-finite displacement for " + e.id);
    for (const std::string& rel : {e.satellite, e.thermal}) {
      if (!std::filesystem::exists(manifest.root / rel)) {
        Fail(ErrorCode::kIo, "missing image " + (manifest.root / rel).string());
      }
    }
  }
}

ManifestSource::ManifestSource(Manifest manifest) : manifest_(std::move(manifest)) {
  ValidateManifest(manifest_);
}

Sample ManifestSource::Load(size_t index) const {
  const ManifestEntry& e = manifest_.samples.at(index);
  Sample s;
  s.id = e.id;
  s.satellite = ReadPgm(manifest_.root / e.satellite);
  s.thermal = ReadPgm(manifest_.root / e.thermal);
  s.gt = (1.0 / FullPerResized(manifest_.frames)) * e.gt_full;
  s.category = e.category;
  s.d_c_m = e.d_c_m;
  s.seed = e.seed;
  return s;
}

void GenerateOptions::Validate() const {
  frames.Validate();
  if (count < 0) Fail(ErrorCode::kInvalidArgument, "count must be non-negative");
  if (!(clean_fraction >= 0.0 && clean_fraction <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "clean_fraction must lie in [0, 1]");
  }
  if (clean_fraction < 1.0 && categories.empty()) {
    Fail(ErrorCode::kInvalidArgument, "no corruption categories enabled");
  }
  for (FailureCategory c : categories) {
    if (c == FailureCategory::kClean) Fail(ErrorCode::kInvalidArgument, "clean is not a corruption category");
  }
  if (scene_group < 1) Fail(ErrorCode::kInvalidArgument, "scene_group must be positive");
  if (!(0.0 <= domain_gap_min && domain_gap_min <= domain_gap_max && domain_gap_max <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "domain gap range must lie in [0, 1]");
  }
  if (!(jitter_px >= 0.0)) Fail(ErrorCode::kInvalidArgument, "jitter must be non-negative");
  // Surfaces InfeasibleDc before any work is done.
  SampleCenterOffset({d_c_m}, frames, 0);
}

SamplePlan PlanSample(const GenerateOptions& options, int index) {
  SamplePlan plan;
  char id[32];
  std::snprintf(id, sizeof(id), "s%06d", index);
  plan.id = id;
  const double f = options.clean_fraction;
  const auto clean_before = [f](int i) { return static_cast<int>(std::floor(i * f + 1e-9)); };
  const bool clean = clean_before(index + 1) > clean_before(index);
  if (!clean) {
    const int corrupted_index = index - clean_before(index);
    plan.category = options.categories[static_cast<size_t>(corrupted_index) % options.categories.size()];
  }
  plan.seed = MixSeed(options.seed, static_cast<std::uint64_t>(index));
  Pcg32 rng(MixSeed(plan.seed, kPlanStream));
  const auto [lo, hi] = MagnitudeRange(plan.category, options.frames);
  plan.magnitude = rng.Uniform(lo, hi);
  if (plan.category == FailureCategory::kSelfSimilar) plan.magnitude = std::round(plan.magnitude);
  if (plan.category == FailureCategory::kOutdated) plan.magnitude = std::round(plan.magnitude);
  plan.domain_gap = rng.Uniform(options.domain_gap_min, options.domain_gap_max);
  plan.scene_seed = plan.category == FailureCategory::kSelfSimilar
                        ? MixSeed(plan.seed, kSceneSalt)
                        : MixSeed(options.seed ^ kSceneSalt,
                                  static_cast<std::uint64_t>(index / options.scene_group));
  return plan;
}

SyntheticSource::SyntheticSource(GenerateOptions options) : options_(std::move(options)) {
  options_.Validate();
}

std::shared_ptr<const GrayImage> SyntheticSource::SceneFor(const SamplePlan& plan) const {
  const bool tiled = plan.category == FailureCategory::kSelfSimilar;
  const int size = options_.frames.w_s + 2 * options_.frames.w_t;
  if (tiled) {
    SceneSpec spec{plan.scene_seed, SceneTexture::kTiled, plan.domain_gap, size,
                   static_cast<int>(plan.magnitude)};
    return std::make_shared<const GrayImage>(GenerateScene(spec));
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& [seed, scene] : cache_) {
      if (seed == plan.scene_seed) return scene;
    }
  }
  SceneSpec spec{plan.scene_seed, SceneTexture::kRich, plan.domain_gap, size, 128};
  auto scene = std::make_shared<const GrayImage>(GenerateScene(spec));
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.insert(cache_.begin(), {plan.scene_seed, scene});
  const size_t capacity = std::max<size_t>(4, std::thread::hardware_concurrency());
  if (cache_.size() > capacity) cache_.pop_back();
  return scene;
}

PairSample SyntheticSource::Render(size_t index) const {
  if (index >= size()) Fail(ErrorCode::kOutOfBounds, "sample index out of range");
  const SamplePlan plan = PlanSample(options_, static_cast<int>(index));
  const auto scene = SceneFor(plan);
  PairOptions pair_options{plan.domain_gap, options_.jitter_px};
  return MakePair(*scene, {options_.d_c_m}, {plan.category, plan.magnitude}, options_.frames,
                  plan.seed, pair_options);
}

Sample SyntheticSource::Load(size_t index) const {
  const SamplePlan plan = PlanSample(options_, static_cast<int>(index));
  PairSample pair = Render(index);
  Sample s;
  s.id = plan.id;
  s.satellite = std::move(pair.satellite);
  s.thermal = std::move(pair.thermal);
  s.gt = pair.gt;
  s.category = plan.category;
  s.d_c_m = options_.d_c_m;
  s.seed = plan.seed;
  return s;
}

Manifest GenerateDataset(const GenerateOptions& options, const std::filesystem::path& out_dir,
                         int threads) {
  const SyntheticSource source(options);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + (out_dir / "images").string());

  Manifest manifest;
  manifest.frames = options.frames;
  manifest.seed = options.seed;
  manifest.root = out_dir;
  manifest.samples.resize(static_cast<size_t>(options.count));

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (int i = next++; i < options.count; i = next++) {
      try {
        const SamplePlan plan = PlanSample(options, i);
        const PairSample pair = source.Render(static_cast<size_t>(i));
        ManifestEntry e;
        e.id = plan.id;
        e.satellite = "images/" + plan.id + "_sat.pgm";
        e.thermal = "images/" + plan.id + "_thr.pgm";
        WritePgm(pair.satellite, out_dir / e.satellite);
        WritePgm(pair.thermal, out_dir / e.thermal);
        e.gt_full = FullPerResized(options.frames) * pair.gt;
        e.category = plan.category;
        e.d_c_m = options.d_c_m;
        e.seed = plan.seed;
        e.magnitude = plan.magnitude;
        manifest.samples[static_cast<size_t>(i)] = std::move(e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int n = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  WriteManifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace homoguard
