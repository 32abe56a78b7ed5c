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

// homoguard command-line front end. Talks to the library only through the
// C interface.

#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "homoguard/homoguard.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitEstimator = 3;

int ExitCodeFor(hg_status status) {
  switch (status) {
    case HG_OK:
      return kExitOk;
    case HG_PROTOCOL_ERROR:
    case HG_SOLVER_DIVERGED:
    case HG_LENGTH_MISMATCH:
      return kExitEstimator;
    case HG_INTERNAL:
      return kExitInternal;
    default:
      return kExitConfig;
  }
}

int Report(hg_status status) {
  if (status != HG_OK) {
    std::fprintf(stderr, "homoguard: %s: %s\n", hg_status_name(status), hg_last_error());
  }
  return ExitCodeFor(status);
}

// HOMOGUARD_SEED takes precedence over --seed.
bool SeedFromEnv(uint64_t& seed) {
  const char* env = std::getenv("HOMOGUARD_SEED");
  if (env == nullptr || *env == '\0') return true;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0') {
    std::fprintf(stderr, "homoguard: HOMOGUARD_SEED must be an unsigned integer\n");
    return false;
  }
  seed = v;
  return true;
}

struct EvalFlags {
  std::string estimator = "classical";
  double oracle_sigma = 0.0;
  std::string method = "croptta";
  std::string sampling = "random";
  std::string agg = "original";
  std::string merge = "max";
  int nc = 5;
  int oc = 32;
  int samples = 5;
  double threshold = 0.0;
  int early_stop_k = 0;
  int iterations = 6;
  bool two_stage = false;
  double roc_threshold = 25.0;
  double dc = 0.0;
  uint64_t seed = 0;
  int threads = 1;
};

void AddEvalFlags(CLI::App* app, EvalFlags& f) {
  app->add_option("--estimator", f.estimator, "oracle | classical | external:<cmd>");
  app->add_option("--oracle-sigma", f.oracle_sigma, "oracle noise, resized px")->check(CLI::NonNegativeNumber);
  app->add_option("--method", f.method, "none | croptta | de | croptta+de")
      ->check(CLI::IsMember({"none", "croptta", "de", "croptta+de"}));
  app->add_option("--nc", f.nc, "views per sample including the original");
  app->add_option("--oc", f.oc, "crop offset, thermal px");
  app->add_option("--sampling", f.sampling)->check(CLI::IsMember({"random", "grid"}));
  app->add_option("--agg", f.agg)->check(CLI::IsMember({"original", "mean"}));
  app->add_option("--merge", f.merge)->check(CLI::IsMember({"min", "max", "add"}));
  app->add_option("--samples", f.samples, "ensemble members");
  app->add_option("--threshold", f.threshold, "rejection threshold s_c, resized px (0: default)");
  app->add_option("--early-stop-k", f.early_stop_k, "iteration for the uncertainty check (0: off)");
  app->add_option("--iterations", f.iterations, "estimator iterations K");
  app->add_flag("--two-stage", f.two_stage, "refine on a box crop of the satellite patch");
  app->add_option("--roc-threshold", f.roc_threshold, "MACE above which a rejection is expected, m");
  app->add_option("--dc", f.dc, "override D_C, m (0: manifest value)");
  app->add_option("--seed", f.seed);
  app->add_option("--threads", f.threads)->check(CLI::PositiveNumber);
}

bool ToOptions(const EvalFlags& f, hg_eval_options& o) {
  hg_eval_options_init(&o);
  o.estimator = f.estimator.c_str();
  o.oracle_sigma = f.oracle_sigma;
  o.method = f.method.c_str();
  o.sampling = f.sampling == "grid" ? HG_SAMPLING_GRID : HG_SAMPLING_RANDOM;
  o.o_c = f.oc;
  o.n_c = f.nc;
  o.n_m = f.samples;
  o.merge = f.merge == "min" ? HG_MERGE_MIN : f.merge == "add" ? HG_MERGE_ADD : HG_MERGE_MAX;
  o.aggregation = f.agg == "mean" ? HG_AGG_MEAN : HG_AGG_ORIGINAL;
  if (f.threshold > 0.0) o.s_c = f.threshold;
  o.early_stop_k = f.early_stop_k;
  o.iterations = f.iterations;
  o.two_stage = f.two_stage ? 1 : 0;
  o.roc_threshold_m = f.roc_threshold;
  o.d_c_m = f.dc;
  o.seed = f.seed;
  o.threads = f.threads;
  return SeedFromEnv(o.seed);
}

void PrintSummary(const hg_summary& s) {
  std::printf("samples %d  kept %d  failed %d\n", s.count, s.kept, s.failed);
  std::printf("MACE %.3f m  CE %.3f m  SR %.4f  AUC %.4f\n", s.mace_m, s.ce_m, s.success_rate, s.auc);
  std::printf("estimator steps %lld  %.1f s\n", s.estimator_steps, s.seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware homography estimation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hg_version()));

  // generate
  hg_generate_options gen;
  hg_generate_options_init(&gen);
  std::string categories;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a synthetic manifest and images");
  generate->add_option("--seed", gen.seed);
  generate->add_option("--count", gen.count)->check(CLI::NonNegativeNumber);
  generate->add_option("--dc", gen.d_c_m, "center offset bound D_C, m");
  generate->add_option("--categories", categories, "comma-separated corrupted categories");
  generate->add_option("--clean-fraction", gen.clean_fraction)->check(CLI::Range(0.0, 1.0));
  generate->add_option("--threads", gen.threads)->check(CLI::PositiveNumber);
  generate->add_option("--out", gen_out)->required();

  // evaluate
  EvalFlags eval_flags;
  std::string manifest;
  std::string eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "run consensus over a manifest");
  evaluate->add_option("--manifest", manifest)->required();
  evaluate->add_option("--out", eval_out)->required();
  AddEvalFlags(evaluate, eval_flags);

  // roc
  std::string records_path;
  double error_threshold = 25.0;
  std::string roc_out;
  auto* roc = app.add_subcommand("roc", "ROC of uncertainty score against MACE failures");
  roc->add_option("--records", records_path)->required();
  roc->add_option("--error-threshold", error_threshold, "MACE above which a sample is a failure, m");
  roc->add_option("--out", roc_out, "CSV path (default: roc.csv next to the records)");

  // hist
  double bin_width = 5.0;
  double hist_max = 100.0;
  std::string hist_out;
  auto* hist = app.add_subcommand("hist", "MACE histogram");
  hist->add_option("--records", records_path)->required();
  hist->add_option("--bin-width", bin_width, "m")->check(CLI::PositiveNumber);
  hist->add_option("--max", hist_max, "start of the overflow bin, m")->check(CLI::PositiveNumber);
  hist->add_option("--out", hist_out, "CSV path (default: hist.csv next to the records)");

  // ablate
  EvalFlags ablate_flags;
  std::string axis;
  std::string values;
  std::string ablate_out;
  auto* ablate = app.add_subcommand("ablate", "one evaluation per axis value");
  ablate->add_option("--manifest", manifest)->required();
  ablate->add_option("--axis", axis, "aggregation | sampling | crop-offset | sample-numbers | early-stopping | merge")
      ->required();
  ablate->add_option("--values", values, "comma-separated values")->required();
  ablate->add_option("--out", ablate_out, "JSON path")->required();
  AddEvalFlags(ablate, ablate_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  auto next_to_records = [&](const std::string& given, const char* name) {
    if (!given.empty()) return given;
    return (std::filesystem::path(records_path).parent_path() / name).string();
  };

  if (generate->parsed()) {
    if (!SeedFromEnv(gen.seed)) return kExitConfig;
    gen.categories = categories.empty() ? nullptr : categories.c_str();
    const hg_status status = hg_generate_dataset(&gen, gen_out.c_str());
    if (status == HG_OK) {
      std::printf("wrote %d samples to %s\n", gen.count, gen_out.c_str());
    }
    return Report(status);
  }

  if (evaluate->parsed()) {
    hg_eval_options options;
    if (!ToOptions(eval_flags, options)) return kExitConfig;
    hg_evaluation* result = nullptr;
    hg_status status = hg_evaluate(manifest.c_str(), &options, &result);
    if (status != HG_OK) return Report(status);
    status = hg_evaluation_write(result, eval_out.c_str());
    hg_summary summary{};
    if (status == HG_OK) status = hg_evaluation_summary(result, &summary);
    hg_evaluation_free(result);
    if (status != HG_OK) return Report(status);
    PrintSummary(summary);
    if (summary.estimator_errors > 0) {
      std::fprintf(stderr, "homoguard: %d samples failed in the estimator\n", summary.estimator_errors);
      return kExitEstimator;
    }
    return kExitOk;
  }

  if (roc->parsed()) {
    hg_records* records = nullptr;
    hg_status status = hg_records_load(records_path.c_str(), &records);
    if (status != HG_OK) return Report(status);
    hg_roc* curve = nullptr;
    status = hg_roc_compute(records, error_threshold, &curve);
    hg_records_free(records);
    if (status != HG_OK) return Report(status);
    const std::string path = next_to_records(roc_out, "roc.csv");
    status = hg_roc_write_csv(curve, path.c_str());
    if (status == HG_OK) {
      std::printf("AUC %.4f over %zu points -> %s\n", hg_roc_auc(curve), hg_roc_point_count(curve),
                  path.c_str());
    }
    hg_roc_free(curve);
    return Report(status);
  }

  if (hist->parsed()) {
    hg_records* records = nullptr;
    hg_status status = hg_records_load(records_path.c_str(), &records);
    if (status != HG_OK) return Report(status);
    const std::string path = next_to_records(hist_out, "hist.csv");
    size_t bins = 0;
    status = hg_histogram_write_csv(records, bin_width, hist_max, path.c_str(), &bins);
    hg_records_free(records);
    if (status == HG_OK) std::printf("%zu bins -> %s\n", bins, path.c_str());
    return Report(status);
  }

  if (ablate->parsed()) {
    hg_eval_options options;
    if (!ToOptions(ablate_flags, options)) return kExitConfig;
    hg_axis parsed_axis;
    hg_status status = hg_parse_axis(axis.c_str(), &parsed_axis);
    if (status != HG_OK) return Report(status);
    status = hg_ablate(manifest.c_str(), &options, parsed_axis, values.c_str(), ablate_out.c_str());
    if (status == HG_OK) std::printf("wrote %s\n", ablate_out.c_str());
    return Report(status);
  }
  return kExitInternal;
}
