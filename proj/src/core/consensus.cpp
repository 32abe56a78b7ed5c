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

#include "homoguard/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "homoguard/error.hpp"
#include "homoguard/rng.hpp"

namespace homoguard {
namespace {

UncertaintyEstimate PopulationStd(std::span<const Displacement> displacements) {
  if (displacements.size() < 2) Fail(ErrorCode::kTooFewSamples, "need at least two samples");
  const double n = static_cast<double>(displacements.size());
  Matrix24 mean = Matrix24::Zero();
  for (const Displacement& d : displacements) mean += d.offsets;
  mean /= n;
  Matrix24 var = Matrix24::Zero();
  for (const Displacement& d : displacements) var += (d.offsets - mean).cwiseAbs2();
  return {(var / n).cwiseSqrt()};
}

}  // namespace

const char* MergeFunctionName(MergeFunction merge) {
  switch (merge) {
    case MergeFunction::kMin: return "min";
    case MergeFunction::kMax: return "max";
    case MergeFunction::kAdd: return "add";
  }
  return "max";
}

MergeFunction ParseMergeFunction(std::string_view text) {
  if (text == "min") return MergeFunction::kMin;
  if (text == "max") return MergeFunction::kMax;
  if (text == "add") return MergeFunction::kAdd;
  Fail(ErrorCode::kInvalidArgument, "unknown merge function '" + std::string(text) + "'");
}

const char* AggregationName(Aggregation aggregation) {
  return aggregation == Aggregation::kMean ? "mean" : "original";
}

Aggregation ParseAggregation(std::string_view text) {
  if (text == "original") return Aggregation::kOriginal;
  if (text == "mean") return Aggregation::kMean;
  Fail(ErrorCode::kInvalidArgument, "unknown aggregation '" + std::string(text) + "'");
}

void ConsensusConfig::Validate() const {
  if (n_m < 1) Fail(ErrorCode::kInvalidArgument, "n_m must be >= 1");
  if (!(s_c > 0.0)) Fail(ErrorCode::kInvalidArgument, "s_c must be positive");
  if (iterations < 1) Fail(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (early_stop_k && (*early_stop_k < 1 || *early_stop_k > iterations)) {
    Fail(ErrorCode::kInvalidArgument, "early_stop_k must lie in [1, iterations]");
  }
}

UncertaintyEstimate CropTtaUncertainty(std::span<const Displacement> displacements) {
  return PopulationStd(displacements);
}

UncertaintyEstimate EnsembleUncertainty(std::span<const Displacement> displacements) {
  return PopulationStd(displacements);
}

UncertaintyEstimate MergeUncertainty(const UncertaintyEstimate& data,
                                     const UncertaintyEstimate& model, MergeFunction merge) {
  switch (merge) {
    case MergeFunction::kMin: return {data.stds.cwiseMin(model.stds)};
    case MergeFunction::kMax: return {data.stds.cwiseMax(model.stds)};
    case MergeFunction::kAdd: return {data.stds + model.stds};
  }
  return data;
}

double UncertaintyScore(const UncertaintyEstimate& u) { return u.stds.minCoeff(); }

bool ShouldReject(const UncertaintyEstimate& u, double s_c) { return UncertaintyScore(u) > s_c; }

Displacement AggregateDisplacement(std::span<const Displacement> displacements,
                                   Aggregation aggregation) {
  if (displacements.empty()) Fail(ErrorCode::kEmptyList, "no displacements to aggregate");
  if (aggregation == Aggregation::kOriginal) return displacements.front();
  Matrix24 sum = Matrix24::Zero();
  for (const Displacement& d : displacements) sum += d.offsets;
  return {sum / static_cast<double>(displacements.size())};
}

ConsensusResult RunConsensus(const GrayImage& satellite, const GrayImage& thermal,
                             const SamplingPlan& plan, const ConsensusConfig& config,
                             std::span<Estimator* const> members, const FrameConfig& frames) {
  frames.Validate();
  config.Validate();
  plan.Validate(frames.w_t);
  if (members.empty()) Fail(ErrorCode::kInvalidArgument, "no estimator supplied");
  if (satellite.width != frames.w_r || satellite.height != frames.w_r) {
    Fail(ErrorCode::kInvalidArgument, "satellite must be resized to W_R");
  }
  if (thermal.width != frames.w_t || thermal.height != frames.w_t) {
    Fail(ErrorCode::kInvalidArgument, "thermal must be W_T x W_T");
  }

  const int iterations = config.iterations;
  const int ue_iterations = config.early_stop_k.value_or(iterations);
  const Aggregation aggregation =
      config.early_stop_k ? Aggregation::kOriginal : config.aggregation;

  ConsensusResult result;
  std::vector<Displacement> member_estimates;
  for (size_t m = 0; m < members.size(); ++m) {
    SamplingPlan member_plan = plan;
    if (m > 0) member_plan.seed = MixSeed(plan.seed, m);
    MemberRun run;
    run.crops = GenerateCrops(member_plan, frames.w_t);

    std::vector<Displacement> finals;
    for (size_t i = 0; i < run.crops.size(); ++i) {
      const CropSpec& crop = run.crops[i];
      const GrayImage view = CropAndResize(thermal, crop, frames.w_r);
      const Homography view_transform = CropViewTransform(crop, frames);
      EstimateRequest request;
      request.satellite = &satellite;
      request.thermal = &view;
      request.iterations = iterations;
      request.stop_after = i == 0 ? 0 : ue_iterations;
      request.view.thermal_to_full = view_transform;
      const EstimateTrajectory trajectory = members[m]->Estimate(request);
      if (trajectory.size() != request.StepsToRun()) {
        Fail(ErrorCode::kLengthMismatch, "estimator returned a trajectory of unexpected length");
      }
      result.estimator_steps += trajectory.size();

      auto recover = [&](const Displacement& d) {
        return RecoverWithViews(d, view_transform, Homography::Identity(),
                                CornersOfFrame(frames.w_r));
      };
      run.recovered_at_ue.push_back(recover(trajectory.per_iteration[static_cast<size_t>(ue_iterations - 1)]));
      if (i == 0) {
        for (const Displacement& d : trajectory.per_iteration) {
          run.original_trajectory.push_back(recover(d));
        }
        finals.push_back(run.original_trajectory.back());
      } else if (aggregation == Aggregation::kMean) {
        finals.push_back(recover(trajectory.Final()));
      }
    }
    run.aggregated = AggregateDisplacement(finals, aggregation);
    if (run.recovered_at_ue.size() >= 2) {
      run.data_uncertainty = CropTtaUncertainty(run.recovered_at_ue);
    }
    member_estimates.push_back(run.aggregated);
    result.members.push_back(std::move(run));
  }

  if (result.members.front().data_uncertainty) {
    Matrix24 mean = Matrix24::Zero();
    for (const MemberRun& run : result.members) mean += run.data_uncertainty->stds;
    result.data_uncertainty = UncertaintyEstimate{mean / static_cast<double>(result.members.size())};
  }
  if (members.size() >= 2) {
    result.model_uncertainty = EnsembleUncertainty(member_estimates);
    result.estimate = AggregateDisplacement(member_estimates, Aggregation::kMean);
  } else {
    result.estimate = member_estimates.front();
  }

  if (result.data_uncertainty && result.model_uncertainty) {
    result.total = MergeUncertainty(*result.data_uncertainty, *result.model_uncertainty, config.merge);
  } else if (result.data_uncertainty) {
    result.total = *result.data_uncertainty;
  } else if (result.model_uncertainty) {
    result.total = *result.model_uncertainty;
  }
  result.score = UncertaintyScore(result.total);
  result.rejected = result.score > config.s_c;
  return result;
}

}  // namespace homoguard
