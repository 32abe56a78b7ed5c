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

#include "homoguard/ablation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "homoguard/error.hpp"

namespace homoguard {
namespace {

int ParseInt(std::string_view text, const char* what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    Fail(ErrorCode::kInvalidArgument, std::string("invalid ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

nlohmann::json NumberOrNull(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

const char* AblationAxisName(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kAggregation: return "aggregation";
    case AblationAxis::kSampling: return "sampling";
    case AblationAxis::kCropOffset: return "crop-offset";
    case AblationAxis::kSampleNumbers: return "sample-numbers";
    case AblationAxis::kEarlyStopping: return "early-stopping";
    case AblationAxis::kMerge: return "merge";
  }
  return "sample-numbers";
}

AblationAxis ParseAblationAxis(std::string_view text) {
  for (AblationAxis axis : {AblationAxis::kAggregation, AblationAxis::kSampling,
                            AblationAxis::kCropOffset, AblationAxis::kSampleNumbers,
                            AblationAxis::kEarlyStopping, AblationAxis::kMerge}) {
    if (text == AblationAxisName(axis)) return axis;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown ablation axis '" + std::string(text) + "'");
}

void ApplyAxisValue(EvaluationOptions& options, AblationAxis axis, std::string_view value) {
  switch (axis) {
    case AblationAxis::kAggregation:
      options.consensus.aggregation = ParseAggregation(value);
      break;
    case AblationAxis::kSampling:
      options.plan.method = ParseSamplingMethod(value);
      break;
    case AblationAxis::kCropOffset:
      options.plan.o_c = ParseInt(value, "crop offset");
      break;
    case AblationAxis::kSampleNumbers: {
      const int n = ParseInt(value, "sample number");
      options.plan.n_c = n;
      options.consensus.n_m = n;
      break;
    }
    case AblationAxis::kEarlyStopping:
      if (value == "none") {
        options.consensus.early_stop_k.reset();
      } else {
        options.consensus.early_stop_k = ParseInt(value, "early-stop iteration");
      }
      break;
    case AblationAxis::kMerge:
      options.consensus.merge = ParseMergeFunction(value);
      break;
  }
}

std::vector<SweepPoint> SuccessMaceSweep(std::span<const EvalRecord> records, int max_points) {
  if (records.empty()) Fail(ErrorCode::kEmptyList, "no records to sweep");
  if (max_points < 2) Fail(ErrorCode::kInvalidArgument, "max_points must be >= 2");
  std::vector<double> scores;
  for (const EvalRecord& r : records) {
    if (!r.failed()) scores.push_back(r.score);
  }
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  std::vector<double> thresholds;
  if (static_cast<int>(scores.size()) <= max_points) {
    thresholds = scores;
  } else {
    for (int i = 0; i < max_points; ++i) {
      const size_t k = static_cast<size_t>(std::llround(
          static_cast<double>(i) * (scores.size() - 1) / (max_points - 1)));
      thresholds.push_back(scores[k]);
    }
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  }

  std::vector<SweepPoint> out;
  for (double s_c : thresholds) {
    SweepPoint p;
    p.s_c = s_c;
    int kept = 0;
    double mace = 0.0;
    for (const EvalRecord& r : records) {
      if (r.failed() || r.score > s_c) continue;
      ++kept;
      mace += r.mace_m;
    }
    p.success_rate = static_cast<double>(kept) / static_cast<double>(records.size());
    p.mace_m = kept > 0 ? mace / kept : std::numeric_limits<double>::quiet_NaN();
    out.push_back(p);
  }
  return out;
}

AblationResult RunAblation(const SampleSource& source, const EvaluationOptions& base,
                           AblationAxis axis, std::span<const std::string> values) {
  if (values.empty()) Fail(ErrorCode::kEmptyList, "no axis values given");
  AblationResult result;
  result.axis = axis;
  // Validate every value up front so a typo does not waste earlier runs.
  std::vector<EvaluationOptions> configs;
  for (const std::string& value : values) {
    EvaluationOptions options = base;
    ApplyAxisValue(options, axis, value);
    options.Validate(source.frames());
    configs.push_back(std::move(options));
  }
  for (size_t i = 0; i < values.size(); ++i) {
    const EvaluationResult eval = RunEvaluation(source, configs[i]);
    AblationRun run;
    run.value = values[i];
    run.table = BuildResultTable(eval.records, configs[i].MethodLabel(), configs[i].roc_threshold_m);
    run.sweep = SuccessMaceSweep(eval.records);
    run.estimator_steps = eval.estimator_steps;
    run.seconds = eval.seconds;
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (const EvalRecord& r : eval.records) {
      if (r.failed()) continue;
      sum += r.score;
      sum2 += r.score * r.score;
      ++n;
    }
    if (n > 0) {
      run.mean_score = sum / n;
      run.score_stddev = std::sqrt(std::max(0.0, sum2 / n - run.mean_score * run.mean_score));
    }
    result.runs.push_back(std::move(run));
  }
  return result;
}

void WriteAblationJson(const AblationResult& result, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["axis"] = AblationAxisName(result.axis);
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const AblationRun& run : result.runs) {
    nlohmann::ordered_json r;
    r["value"] = run.value;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const ResultRow& row : run.table.rows) {
      rows.push_back({{"method", row.method},
                      {"d_c_m", row.d_c_m},
                      {"count", row.count},
                      {"mace_m", NumberOrNull(row.mace_m)},
                      {"ce_m", NumberOrNull(row.ce_m)},
                      {"success_rate", row.success_rate},
                      {"auc", NumberOrNull(row.auc)}});
    }
    r["rows"] = std::move(rows);
    r["mean_score"] = run.mean_score;
    r["score_stddev"] = run.score_stddev;
    r["estimator_steps"] = run.estimator_steps;
    r["seconds"] = run.seconds;
    nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
    for (const SweepPoint& p : run.sweep) {
      sweep.push_back({{"s_c", p.s_c}, {"success_rate", p.success_rate}, {"mace_m", NumberOrNull(p.mace_m)}});
    }
    r["sweep"] = std::move(sweep);
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(1) << '\n';
}

}  // namespace homoguard
