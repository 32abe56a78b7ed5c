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

#ifndef HOMOGUARD_METRICS_HPP_
#define HOMOGUARD_METRICS_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "homoguard/consensus.hpp"
#include "homoguard/geometry.hpp"

namespace homoguard {

enum class FailureCategory {
  kClean,
  kTextureless,
  kCorrupted,
  kGeometricNoise,
  kSelfSimilar,
  kExceedsRegion,
  kOutdated,
};

inline constexpr FailureCategory kAllCategories[] = {
    FailureCategory::kClean,         FailureCategory::kTextureless,
    FailureCategory::kCorrupted,     FailureCategory::kGeometricNoise,
    FailureCategory::kSelfSimilar,   FailureCategory::kExceedsRegion,
    FailureCategory::kOutdated,
};

const char* CategoryName(FailureCategory category);
FailureCategory ParseCategory(std::string_view text);

struct EvalRecord {
  std::string sample_id;
  double mace_m = 0.0;
  double ce_m = 0.0;
  double score = 0.0;  // uncertainty scalar, resized pixels
  bool rejected = false;
  FailureCategory category = FailureCategory::kClean;
  double d_c_m = 0.0;
  Displacement estimate;
  Displacement ground_truth;
  UncertaintyEstimate uncertainty;
  // Non-empty when the sample could not be evaluated. Failed records count
  // as rejected and carry no error metrics.
  std::string error;

  bool failed() const { return !error.empty(); }
};

struct RocPoint {
  // Smallest score that is rejected at this operating point (+inf: none).
  double threshold = std::numeric_limits<double>::infinity();
  double tpr = 0.0;
  double fpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
  int positives = 0;
  int negatives = 0;
};

struct HistogramBin {
  double lo = 0.0;  // the final bin is the overflow bin [max_m, inf)
  std::int64_t count = 0;
};

struct DcConfig {
  double d_c = 512.0;  // meters
};

// Mean corner distance, in meters.
double Mace(const Displacement& pred, const Displacement& gt, const FrameConfig& frames);
// Distance between corner means, in meters.
double CenterError(const Displacement& pred, const Displacement& gt, const FrameConfig& frames);

double SuccessRate(std::span<const EvalRecord> records);

// Records with mace_m > error_threshold_m are the positives (should be
// rejected); the sweep rejects scores at or above each distinct score.
RocCurve ComputeRoc(std::span<const EvalRecord> records, double error_threshold_m);

std::vector<HistogramBin> MaceHistogram(std::span<const EvalRecord> records, double bin_width_m,
                                        double max_m);

// Uniform offset within a disk of radius d_c (meters), returned in satellite
// pixels. Throws InfeasibleDc when the thermal patch could leave the frame.
Point2 SampleCenterOffset(const DcConfig& dc, const FrameConfig& frames, std::uint64_t seed);

}  // namespace homoguard

#endif  // HOMOGUARD_METRICS_HPP_
