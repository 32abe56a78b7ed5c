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

#ifndef HOMOGUARD_ABLATION_HPP_
#define HOMOGUARD_ABLATION_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "homoguard/evaluation.hpp"

namespace homoguard {

enum class AblationAxis {
  kAggregation,
  kSampling,
  kCropOffset,
  kSampleNumbers,
  kEarlyStopping,
  kMerge,
};

// Names: aggregation, sampling, crop-offset, sample-numbers, early-stopping, merge.
const char* AblationAxisName(AblationAxis axis);
AblationAxis ParseAblationAxis(std::string_view text);

// Applies one axis value to the options. Values: original|mean,
// random|grid, an integer offset, an integer sample count (sets both n_c and
// n_m), none|<k>, min|max|add.
void ApplyAxisValue(EvaluationOptions& options, AblationAxis axis, std::string_view value);

struct SweepPoint {
  double s_c = 0.0;
  double success_rate = 0.0;
  double mace_m = 0.0;  // over samples kept at s_c; NaN if none
};

// Success rate against MACE of the kept samples as s_c moves through the
// observed scores (at most max_points thresholds, quantile-spaced).
std::vector<SweepPoint> SuccessMaceSweep(std::span<const EvalRecord> records, int max_points = 64);

struct AblationRun {
  std::string value;
  ResultTable table;
  std::vector<SweepPoint> sweep;
  double mean_score = 0.0;
  double score_stddev = 0.0;
  long long estimator_steps = 0;
  double seconds = 0.0;
};

struct AblationResult {
  AblationAxis axis = AblationAxis::kSampleNumbers;
  std::vector<AblationRun> runs;
};

AblationResult RunAblation(const SampleSource& source, const EvaluationOptions& base,
                           AblationAxis axis, std::span<const std::string> values);

void WriteAblationJson(const AblationResult& result, const std::filesystem::path& path);

}  // namespace homoguard

#endif  // HOMOGUARD_ABLATION_HPP_
