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

#ifndef HOMOGUARD_EVALUATION_HPP_
#define HOMOGUARD_EVALUATION_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "homoguard/consensus.hpp"
#include "homoguard/dataset.hpp"
#include "homoguard/estimator.hpp"
#include "homoguard/metrics.hpp"
#include "homoguard/sampler.hpp"

namespace homoguard {

enum class EstimatorKind { kOracle, kClassical, kExternal };

struct EstimatorSelector {
  EstimatorKind kind = EstimatorKind::kClassical;
  std::string command;       // external only; "{member}" expands to the member index
  double oracle_sigma = 0.0;

  // "oracle", "classical" or "external:<command>".
  static EstimatorSelector Parse(std::string_view text);
  std::string ToString() const;
};

struct EvaluationOptions {
  EstimatorSelector estimator;
  SamplingPlan plan;          // plan.seed is ignored; each sample derives its own
  ConsensusConfig consensus;
  bool ensemble = false;      // deep ensemble of consensus.n_m members
  bool two_stage = false;
  EstimatorConfig stages;
  double roc_threshold_m = 25.0;
  // Overrides the manifest's D_C: sets the classical search region and the
  // d_c_m recorded for every sample.
  std::optional<double> d_c_m;
  std::uint64_t seed = 0;
  int threads = 1;

  void Validate(const FrameConfig& frames) const;
  // "none", "croptta", "de" or "croptta+de".
  std::string MethodLabel() const;
};

// Sets plan.n_c and ensemble from a method label.
void ApplyMethod(EvaluationOptions& options, std::string_view method);

struct ResultRow {
  std::string method;
  double d_c_m = 0.0;
  int count = 0;
  int kept = 0;
  int failed = 0;
  double mace_m = 0.0;  // over kept samples; NaN when nothing is kept
  double ce_m = 0.0;
  double success_rate = 0.0;
  double auc = 0.0;     // NaN when the labels are single-class
};

struct CategoryRow {
  FailureCategory category = FailureCategory::kClean;
  int count = 0;
  int rejected = 0;     // includes failed samples
  int failed = 0;
  double mean_mace_m = 0.0;  // over samples that produced an estimate
};

struct ResultTable {
  std::vector<ResultRow> rows;          // one per distinct d_c
  std::vector<CategoryRow> categories;  // only categories present
};

// Throws EmptyList for an empty record list.
ResultTable BuildResultTable(std::span<const EvalRecord> records, const std::string& method,
                             double roc_threshold_m);

struct EvaluationResult {
  std::vector<EvalRecord> records;  // manifest order
  long long estimator_steps = 0;
  int estimator_errors = 0;         // samples lost to estimator or protocol failures
  double seconds = 0.0;
};

// Per-sample seeds derive from (options.seed, sample id), so the output does
// not depend on thread count or order.
std::uint64_t SampleStreamSeed(std::uint64_t global_seed, std::string_view sample_id);

EvaluationResult RunEvaluation(const SampleSource& source, const EvaluationOptions& options);

void WriteRecordsJson(std::span<const EvalRecord> records, const std::filesystem::path& path);
std::vector<EvalRecord> ReadRecordsJson(const std::filesystem::path& path);
void WriteRecordsCsv(std::span<const EvalRecord> records, const std::filesystem::path& path);
void WriteTableJson(const ResultTable& table, const std::filesystem::path& path);
void WriteTableCsv(const ResultTable& table, const std::filesystem::path& path);
void WriteRocCsv(const RocCurve& roc, const std::filesystem::path& path);
void WriteHistogramCsv(std::span<const HistogramBin> bins, const std::filesystem::path& path);

}  // namespace homoguard

#endif  // HOMOGUARD_EVALUATION_HPP_
