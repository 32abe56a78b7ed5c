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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homoguard/error.hpp"
#include "homoguard/rng.hpp"

namespace homoguard {

const char* CategoryName(FailureCategory category) {
  switch (category) {
    case FailureCategory::kClean: return "Clean";
    case FailureCategory::kTextureless: return "Textureless";
    case FailureCategory::kCorrupted: return "Corrupted";
    case FailureCategory::kGeometricNoise: return "GeometricNoise";
    case FailureCategory::kSelfSimilar: return "SelfSimilar";
    case FailureCategory::kExceedsRegion: return "ExceedsRegion";
    case FailureCategory::kOutdated: return "Outdated";
  }
  return "Clean";
}

FailureCategory ParseCategory(std::string_view text) {
  for (FailureCategory c : kAllCategories) {
    if (text == CategoryName(c)) return c;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown category '" + std::string(text) + "'");
}

double Mace(const Displacement& pred, const Displacement& gt, const FrameConfig& frames) {
  const Matrix24 diff = pred.offsets - gt.offsets;
  return diff.colwise().norm().mean() * frames.MetersPerResizedPixel();
}

double CenterError(const Displacement& pred, const Displacement& gt, const FrameConfig& frames) {
  // Corners share the same base, so the center offset is the mean offset.
  const Eigen::Vector2d diff = (pred.offsets - gt.offsets).rowwise().mean();
  return diff.norm() * frames.MetersPerResizedPixel();
}

double SuccessRate(std::span<const EvalRecord> records) {
  if (records.empty()) Fail(ErrorCode::kEmptyList, "no records");
  const auto kept = std::count_if(records.begin(), records.end(),
                                  [](const EvalRecord& r) { return !r.rejected && !r.failed(); });
  return static_cast<double>(kept) / static_cast<double>(records.size());
}

RocCurve ComputeRoc(std::span<const EvalRecord> records, double error_threshold_m) {
  if (!(error_threshold_m > 0.0)) Fail(ErrorCode::kInvalidArgument, "threshold must be positive");
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> entries;
  RocCurve curve;
  for (const EvalRecord& r : records) {
    if (r.failed()) continue;
    const bool positive = r.mace_m > error_threshold_m;
    entries.push_back({r.score, positive});
    (positive ? curve.positives : curve.negatives)++;
  }
  if (curve.positives == 0 || curve.negatives == 0) {
    Fail(ErrorCode::kDegenerateLabels, "ROC needs both positive and negative records");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.score > b.score; });

  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  int tp = 0, fp = 0;
  for (size_t i = 0; i < entries.size();) {
    const double score = entries[i].score;
    // Equal scores form one threshold step.
    for (; i < entries.size() && entries[i].score == score; ++i) {
      (entries[i].positive ? tp : fp)++;
    }
    curve.points.push_back({score, static_cast<double>(tp) / curve.positives,
                            static_cast<double>(fp) / curve.negatives});
  }
  for (size_t i = 1; i < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i - 1];
    const RocPoint& b = curve.points[i];
    curve.auc += 0.5 * (b.fpr - a.fpr) * (a.tpr + b.tpr);
  }
  return curve;
}

std::vector<HistogramBin> MaceHistogram(std::span<const EvalRecord> records, double bin_width_m,
                                        double max_m) {
  if (!(bin_width_m > 0.0) || !(max_m > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "bin width and range must be positive");
  }
  const auto regular = static_cast<size_t>(std::ceil(max_m / bin_width_m - 1e-12));
  std::vector<HistogramBin> bins(regular + 1);
  for (size_t i = 0; i < regular; ++i) bins[i].lo = static_cast<double>(i) * bin_width_m;
  bins[regular].lo = max_m;
  for (const EvalRecord& r : records) {
    if (r.failed()) continue;
    if (r.mace_m >= max_m) {
      ++bins[regular].count;
      continue;
    }
    const auto index = std::min(static_cast<size_t>(std::floor(r.mace_m / bin_width_m)), regular - 1);
    ++bins[index].count;
  }
  return bins;
}

Point2 SampleCenterOffset(const DcConfig& dc, const FrameConfig& frames, std::uint64_t seed) {
  frames.Validate();
  if (!(dc.d_c >= 0.0)) Fail(ErrorCode::kInvalidArgument, "d_c must be non-negative");
  const double bound_m = 0.5 * (frames.w_s - frames.w_t) * frames.meters_per_pixel;
  if (dc.d_c > bound_m) {
    Fail(ErrorCode::kInfeasibleDc, "d_c exceeds the largest offset that keeps the thermal patch inside");
  }
  const double radius = dc.d_c / frames.meters_per_pixel;
  if (radius == 0.0) return {0.0, 0.0};
  Pcg32 rng(seed);
  const double r = radius * std::sqrt(rng.Uniform());
  const double theta = 2.0 * std::numbers::pi * rng.Uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace homoguard
