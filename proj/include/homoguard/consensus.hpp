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

#ifndef HOMOGUARD_CONSENSUS_HPP_
#define HOMOGUARD_CONSENSUS_HPP_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "homoguard/estimator.hpp"
#include "homoguard/sampler.hpp"

namespace homoguard {

// Per-corner, per-axis standard deviations in resized-frame pixels.
struct UncertaintyEstimate {
  Matrix24 stds = Matrix24::Zero();
};

enum class MergeFunction { kMin, kMax, kAdd };
enum class Aggregation { kOriginal, kMean };

const char* MergeFunctionName(MergeFunction merge);
MergeFunction ParseMergeFunction(std::string_view text);
const char* AggregationName(Aggregation aggregation);
Aggregation ParseAggregation(std::string_view text);

struct ConsensusConfig {
  int n_m = 5;  // ensemble size used when deep ensembles are enabled
  MergeFunction merge = MergeFunction::kMax;
  Aggregation aggregation = Aggregation::kOriginal;
  double s_c = 1.0;  // rejection threshold, resized-frame pixels
  std::optional<int> early_stop_k;
  int iterations = 6;  // planned estimator iterations K

  void Validate() const;
};

// Population standard deviation (divide by N) over the samples, elementwise.
UncertaintyEstimate CropTtaUncertainty(std::span<const Displacement> displacements);
UncertaintyEstimate EnsembleUncertainty(std::span<const Displacement> displacements);

UncertaintyEstimate MergeUncertainty(const UncertaintyEstimate& data,
                                     const UncertaintyEstimate& model, MergeFunction merge);

// Minimum over the eight entries: score > s_c exactly when every entry
// exceeds s_c.
double UncertaintyScore(const UncertaintyEstimate& u);
bool ShouldReject(const UncertaintyEstimate& u, double s_c);

// Element 0 must be the original view.
Displacement AggregateDisplacement(std::span<const Displacement> displacements,
                                   Aggregation aggregation);

struct MemberRun {
  std::vector<CropSpec> crops;
  // Full-frame displacements of every view at the iteration used for the
  // uncertainty estimate (the last one, or k under early stopping).
  std::vector<Displacement> recovered_at_ue;
  // Original view, every iteration.
  std::vector<Displacement> original_trajectory;
  Displacement aggregated;
  std::optional<UncertaintyEstimate> data_uncertainty;
};

struct ConsensusResult {
  Displacement estimate;
  std::optional<UncertaintyEstimate> data_uncertainty;   // CropTTA
  std::optional<UncertaintyEstimate> model_uncertainty;  // ensemble
  UncertaintyEstimate total;
  double score = 0.0;
  bool rejected = false;
  long long estimator_steps = 0;  // iterations summed over every estimator call
  std::vector<MemberRun> members;
};

// Runs every member over the crop batch of `plan`, lifts the crop
// predictions back to the full frame, measures their spread, and applies the
// rejection rule. `satellite` is the resized satellite patch (W_R) and
// `thermal` the full thermal patch (W_T). A plan with n_c == 1 disables
// CropTTA; a single member disables the ensemble.
ConsensusResult RunConsensus(const GrayImage& satellite, const GrayImage& thermal,
                             const SamplingPlan& plan, const ConsensusConfig& config,
                             std::span<Estimator* const> members, const FrameConfig& frames);

}  // namespace homoguard

#endif  // HOMOGUARD_CONSENSUS_HPP_
