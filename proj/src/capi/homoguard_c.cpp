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

#include "homoguard/homoguard.h"

#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "homoguard/ablation.hpp"
#include "homoguard/consensus.hpp"
#include "homoguard/dataset.hpp"
#include "homoguard/error.hpp"
#include "homoguard/evaluation.hpp"
#include "homoguard/geometry.hpp"
#include "homoguard/image.hpp"
#include "homoguard/metrics.hpp"
#include "homoguard/sampler.hpp"

struct hg_image {
  homoguard::GrayImage image;
};

struct hg_evaluation {
  homoguard::EvaluationResult result;
  std::string method;
  double roc_threshold_m = 25.0;
};

struct hg_records {
  std::vector<homoguard::EvalRecord> records;
};

struct hg_roc {
  homoguard::RocCurve curve;
};

namespace {

using namespace homoguard;

thread_local std::string g_last_error;

hg_status ToStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return HG_INVALID_ARGUMENT;
    case ErrorCode::kDegenerateCorners: return HG_DEGENERATE_CORNERS;
    case ErrorCode::kPointAtInfinity: return HG_POINT_AT_INFINITY;
    case ErrorCode::kInvalidPlan: return HG_INVALID_PLAN;
    case ErrorCode::kOutOfBounds: return HG_OUT_OF_BOUNDS;
    case ErrorCode::kSolverDiverged: return HG_SOLVER_DIVERGED;
    case ErrorCode::kProtocolError: return HG_PROTOCOL_ERROR;
    case ErrorCode::kLengthMismatch: return HG_LENGTH_MISMATCH;
    case ErrorCode::kTooFewSamples: return HG_TOO_FEW_SAMPLES;
    case ErrorCode::kEmptyList: return HG_EMPTY_LIST;
    case ErrorCode::kDegenerateLabels: return HG_DEGENERATE_LABELS;
    case ErrorCode::kInfeasibleDc: return HG_INFEASIBLE_DC;
    case ErrorCode::kIo: return HG_IO_ERROR;
  }
  return HG_INTERNAL;
}

template <typename F>
hg_status Guard(F&& body) {
  g_last_error.clear();
  try {
    body();
    return HG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return HG_INTERNAL;
}

void Require(bool ok, const char* what) {
  if (!ok) Fail(ErrorCode::kInvalidArgument, what);
}

Displacement LoadDisplacement(const double* d) {
  Displacement out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) out.offsets(r, c) = d[r * 4 + c];
  return out;
}

void StoreMatrix(const Matrix24& m, double* out) {
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) out[r * 4 + c] = m(r, c);
}

CornerSet LoadCorners(const double* p) {
  CornerSet out;
  for (int i = 0; i < 4; ++i) out[static_cast<size_t>(i)] = {p[2 * i], p[2 * i + 1]};
  return out;
}

FrameConfig ToFrames(const hg_frames* frames) {
  FrameConfig f;
  if (frames != nullptr) {
    f.w_s = frames->w_s;
    f.w_t = frames->w_t;
    f.w_r = frames->w_r;
    f.meters_per_pixel = frames->meters_per_pixel;
  }
  f.Validate();
  return f;
}

std::vector<Displacement> LoadMany(const double* data, size_t count) {
  Require(data != nullptr || count == 0, "null displacement array");
  std::vector<Displacement> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(LoadDisplacement(data + 8 * i));
  return out;
}

std::vector<std::string> SplitCommas(const char* text) {
  std::vector<std::string> out;
  if (text == nullptr) return out;
  std::string current;
  for (const char* p = text;; ++p) {
    if (*p == ',' || *p == '\0') {
      if (!current.empty()) out.push_back(current);
      current.clear();
      if (*p == '\0') break;
    } else if (*p != ' ') {
      current += *p;
    }
  }
  return out;
}

EvaluationOptions ToEvaluationOptions(const hg_eval_options* o) {
  Require(o != nullptr, "null options");
  EvaluationOptions out;
  out.estimator = EstimatorSelector::Parse(o->estimator != nullptr ? o->estimator : "classical");
  out.estimator.oracle_sigma = o->oracle_sigma;
  out.plan.method = o->sampling == HG_SAMPLING_GRID ? SamplingMethod::kGrid : SamplingMethod::kRandom;
  out.plan.o_c = o->o_c;
  out.plan.n_c = o->n_c;
  out.consensus.n_m = o->n_m;
  switch (o->merge) {
    case HG_MERGE_MIN: out.consensus.merge = MergeFunction::kMin; break;
    case HG_MERGE_MAX: out.consensus.merge = MergeFunction::kMax; break;
    case HG_MERGE_ADD: out.consensus.merge = MergeFunction::kAdd; break;
    default: Fail(ErrorCode::kInvalidArgument, "unknown merge function");
  }
  out.consensus.aggregation = o->aggregation == HG_AGG_MEAN ? Aggregation::kMean : Aggregation::kOriginal;
  out.consensus.s_c = o->s_c;
  if (o->early_stop_k > 0) out.consensus.early_stop_k = o->early_stop_k;
  out.stages.k1 = o->iterations;
  out.two_stage = o->two_stage != 0;
  out.roc_threshold_m = o->roc_threshold_m;
  if (o->d_c_m > 0.0) out.d_c_m = o->d_c_m;
  out.seed = o->seed;
  out.threads = o->threads;
  if (o->method != nullptr) ApplyMethod(out, o->method);
  return out;
}

}  // namespace

extern "C" {

const char* hg_version(void) { return "0.1.0"; }

const char* hg_status_name(hg_status status) {
  switch (status) {
    case HG_OK: return "OK";
    case HG_INVALID_ARGUMENT: return "InvalidArgument";
    case HG_DEGENERATE_CORNERS: return "DegenerateCorners";
    case HG_POINT_AT_INFINITY: return "PointAtInfinity";
    case HG_INVALID_PLAN: return "InvalidPlan";
    case HG_OUT_OF_BOUNDS: return "OutOfBounds";
    case HG_SOLVER_DIVERGED: return "SolverDiverged";
    case HG_PROTOCOL_ERROR: return "ProtocolError";
    case HG_LENGTH_MISMATCH: return "LengthMismatch";
    case HG_TOO_FEW_SAMPLES: return "TooFewSamples";
    case HG_EMPTY_LIST: return "EmptyList";
    case HG_DEGENERATE_LABELS: return "DegenerateLabels";
    case HG_INFEASIBLE_DC: return "InfeasibleDc";
    case HG_IO_ERROR: return "IoError";
    case HG_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* hg_last_error(void) { return g_last_error.c_str(); }

void hg_frames_init(hg_frames* frames) {
  if (frames == nullptr) return;
  const FrameConfig f;
  *frames = {f.w_s, f.w_t, f.w_r, f.meters_per_pixel};
}

hg_status hg_dlt(const double src[8], const double dst[8], double h_out[9]) {
  return Guard([&] {
    Require(src && dst && h_out, "null argument");
    const Eigen::Matrix3d& m = Dlt(LoadCorners(src), LoadCorners(dst)).matrix();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) h_out[r * 3 + c] = m(r, c);
  });
}

hg_status hg_apply_homography(const double h[9], const double* points, size_t count, double* out) {
  return Guard([&] {
    Require(h && (count == 0 || (points && out)), "null argument");
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = h[r * 3 + c];
    const Homography homography = Homography::FromMatrix(m);
    std::vector<double> tmp(2 * count);
    for (size_t i = 0; i < count; ++i) {
      const Point2 p = homography.Apply({points[2 * i], points[2 * i + 1]});
      tmp[2 * i] = p.x;
      tmp[2 * i + 1] = p.y;
    }
    std::copy(tmp.begin(), tmp.end(), out);
  });
}

hg_status hg_recover_full_displacement(const double d_crop[8], int crop_x, int crop_y, int crop_size,
                                       const hg_frames* frames, double d_full_out[8]) {
  return Guard([&] {
    Require(d_crop && d_full_out, "null argument");
    const Displacement d = RecoverFullDisplacement(LoadDisplacement(d_crop),
                                                   {crop_x, crop_y, crop_size}, ToFrames(frames));
    StoreMatrix(d.offsets, d_full_out);
  });
}

hg_status hg_generate_crops(hg_sampling method, int o_c, int n_c, uint64_t seed, int w_t,
                            int* crops_out) {
  return Guard([&] {
    Require(crops_out != nullptr, "null argument");
    SamplingPlan plan;
    plan.method = method == HG_SAMPLING_GRID ? SamplingMethod::kGrid : SamplingMethod::kRandom;
    plan.o_c = o_c;
    plan.n_c = n_c;
    plan.seed = seed;
    const std::vector<CropSpec> crops = GenerateCrops(plan, w_t);
    for (size_t i = 0; i < crops.size(); ++i) {
      crops_out[3 * i] = crops[i].x;
      crops_out[3 * i + 1] = crops[i].y;
      crops_out[3 * i + 2] = crops[i].size;
    }
  });
}

hg_status hg_crop_tta_uncertainty(const double* displacements, size_t count, double stds_out[8]) {
  return Guard([&] {
    Require(stds_out != nullptr, "null argument");
    StoreMatrix(CropTtaUncertainty(LoadMany(displacements, count)).stds, stds_out);
  });
}

hg_status hg_merge_uncertainty(const double data[8], const double model[8], hg_merge merge,
                               double out[8]) {
  return Guard([&] {
    Require(data && model && out, "null argument");
    MergeFunction f = MergeFunction::kMax;
    if (merge == HG_MERGE_MIN) f = MergeFunction::kMin;
    else if (merge == HG_MERGE_ADD) f = MergeFunction::kAdd;
    else Require(merge == HG_MERGE_MAX, "unknown merge function");
    const UncertaintyEstimate merged =
        MergeUncertainty({LoadDisplacement(data).offsets}, {LoadDisplacement(model).offsets}, f);
    StoreMatrix(merged.stds, out);
  });
}

hg_status hg_uncertainty_score(const double stds[8], double* score_out) {
  return Guard([&] {
    Require(stds && score_out, "null argument");
    *score_out = UncertaintyScore({LoadDisplacement(stds).offsets});
  });
}

hg_status hg_should_reject(const double stds[8], double s_c, int* reject_out) {
  return Guard([&] {
    Require(stds && reject_out, "null argument");
    *reject_out = ShouldReject({LoadDisplacement(stds).offsets}, s_c) ? 1 : 0;
  });
}

hg_status hg_aggregate(const double* displacements, size_t count, hg_aggregation aggregation,
                       double out[8]) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    const Aggregation a = aggregation == HG_AGG_MEAN ? Aggregation::kMean : Aggregation::kOriginal;
    StoreMatrix(AggregateDisplacement(LoadMany(displacements, count), a).offsets, out);
  });
}

hg_status hg_crop_tta_loss(const double* trajectories, size_t n_views, size_t k, const double gt[8],
                           double gamma, double* loss_out) {
  return Guard([&] {
    Require(gt && loss_out, "null argument");
    const std::vector<Displacement> flat = LoadMany(trajectories, n_views * k);
    std::vector<EstimateTrajectory> views(n_views);
    for (size_t v = 0; v < n_views; ++v) {
      views[v].per_iteration.assign(flat.begin() + static_cast<long>(v * k),
                                    flat.begin() + static_cast<long>((v + 1) * k));
    }
    *loss_out = ComputeCropTtaLoss(views, LoadDisplacement(gt), gamma);
  });
}

hg_status hg_mace(const double pred[8], const double gt[8], const hg_frames* frames, double* out) {
  return Guard([&] {
    Require(pred && gt && out, "null argument");
    *out = Mace(LoadDisplacement(pred), LoadDisplacement(gt), ToFrames(frames));
  });
}

hg_status hg_center_error(const double pred[8], const double gt[8], const hg_frames* frames,
                          double* out) {
  return Guard([&] {
    Require(pred && gt && out, "null argument");
    *out = CenterError(LoadDisplacement(pred), LoadDisplacement(gt), ToFrames(frames));
  });
}

hg_status hg_image_read_pgm(const char* path, hg_image** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    auto image = std::make_unique<hg_image>();
    image->image = ReadPgm(path);
    *out = image.release();
  });
}

hg_status hg_image_write_pgm(const hg_image* image, const char* path) {
  return Guard([&] {
    Require(image && path, "null argument");
    WritePgm(image->image, path);
  });
}

hg_status hg_image_create(int width, int height, const uint8_t* pixels, hg_image** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    Require(width > 0 && height > 0, "image size must be positive");
    auto image = std::make_unique<hg_image>();
    image->image = GrayImage(width, height);
    if (pixels != nullptr) {
      std::copy(pixels, pixels + static_cast<size_t>(width) * height, image->image.pixels.begin());
    }
    *out = image.release();
  });
}

int hg_image_width(const hg_image* image) { return image ? image->image.width : 0; }
int hg_image_height(const hg_image* image) { return image ? image->image.height : 0; }
const uint8_t* hg_image_pixels(const hg_image* image) {
  return image ? image->image.pixels.data() : nullptr;
}
void hg_image_free(hg_image* image) { delete image; }

void hg_generate_options_init(hg_generate_options* options) {
  if (options == nullptr) return;
  const GenerateOptions d;
  options->seed = d.seed;
  options->count = d.count;
  options->d_c_m = d.d_c_m;
  options->categories = nullptr;
  options->clean_fraction = d.clean_fraction;
  options->threads = 1;
  hg_frames_init(&options->frames);
}

hg_status hg_generate_dataset(const hg_generate_options* options, const char* out_dir) {
  return Guard([&] {
    Require(options && out_dir, "null argument");
    GenerateOptions g;
    g.seed = options->seed;
    g.count = options->count;
    g.d_c_m = options->d_c_m;
    g.clean_fraction = options->clean_fraction;
    g.frames = ToFrames(&options->frames);
    if (options->categories != nullptr) {
      g.categories.clear();
      for (const std::string& name : SplitCommas(options->categories)) {
        g.categories.push_back(ParseCategory(name));
      }
    }
    GenerateDataset(g, out_dir, options->threads);
  });
}

void hg_eval_options_init(hg_eval_options* options) {
  if (options == nullptr) return;
  const EvaluationOptions d;
  options->estimator = "classical";
  options->oracle_sigma = 0.0;
  options->method = nullptr;
  options->sampling = HG_SAMPLING_RANDOM;
  options->o_c = d.plan.o_c;
  options->n_c = d.plan.n_c;
  options->n_m = d.consensus.n_m;
  options->merge = HG_MERGE_MAX;
  options->aggregation = HG_AGG_ORIGINAL;
  options->s_c = d.consensus.s_c;
  options->early_stop_k = 0;
  options->iterations = d.stages.k1;
  options->two_stage = 0;
  options->roc_threshold_m = d.roc_threshold_m;
  options->d_c_m = 0.0;
  options->seed = d.seed;
  options->threads = 1;
}

hg_status hg_evaluate(const char* manifest_path, const hg_eval_options* options,
                      hg_evaluation** out) {
  return Guard([&] {
    Require(manifest_path && options && out, "null argument");
    const EvaluationOptions eval = ToEvaluationOptions(options);
    const ManifestSource source(ReadManifest(manifest_path));
    auto evaluation = std::make_unique<hg_evaluation>();
    evaluation->result = RunEvaluation(source, eval);
    evaluation->method = eval.MethodLabel();
    evaluation->roc_threshold_m = eval.roc_threshold_m;
    *out = evaluation.release();
  });
}

hg_status hg_evaluation_summary(const hg_evaluation* evaluation, hg_summary* out) {
  return Guard([&] {
    Require(evaluation && out, "null argument");
    const auto& records = evaluation->result.records;
    hg_summary s{};
    s.count = static_cast<int>(records.size());
    s.estimator_errors = evaluation->result.estimator_errors;
    s.estimator_steps = evaluation->result.estimator_steps;
    s.seconds = evaluation->result.seconds;
    s.mace_m = s.ce_m = s.auc = std::numeric_limits<double>::quiet_NaN();
    if (!records.empty()) {
      double mace = 0.0, ce = 0.0;
      for (const EvalRecord& r : records) {
        if (r.failed()) {
          ++s.failed;
        } else if (!r.rejected) {
          ++s.kept;
          mace += r.mace_m;
          ce += r.ce_m;
        }
      }
      if (s.kept > 0) {
        s.mace_m = mace / s.kept;
        s.ce_m = ce / s.kept;
      }
      s.success_rate = SuccessRate(records);
      try {
        s.auc = ComputeRoc(records, evaluation->roc_threshold_m).auc;
      } catch (const Error&) {
      }
    }
    *out = s;
  });
}

size_t hg_evaluation_record_count(const hg_evaluation* evaluation) {
  return evaluation ? evaluation->result.records.size() : 0;
}

hg_status hg_evaluation_write(const hg_evaluation* evaluation, const char* out_dir) {
  return Guard([&] {
    Require(evaluation && out_dir, "null argument");
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const auto& records = evaluation->result.records;
    WriteRecordsJson(records, dir / "records.json");
    WriteRecordsCsv(records, dir / "records.csv");
    if (!records.empty()) {
      const ResultTable table =
          BuildResultTable(records, evaluation->method, evaluation->roc_threshold_m);
      WriteTableJson(table, dir / "table.json");
      WriteTableCsv(table, dir / "table.csv");
    }
  });
}

void hg_evaluation_free(hg_evaluation* evaluation) { delete evaluation; }

hg_status hg_records_load(const char* path, hg_records** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    auto records = std::make_unique<hg_records>();
    records->records = ReadRecordsJson(path);
    *out = records.release();
  });
}

size_t hg_records_count(const hg_records* records) { return records ? records->records.size() : 0; }
void hg_records_free(hg_records* records) { delete records; }

hg_status hg_roc_compute(const hg_records* records, double error_threshold_m, hg_roc** out) {
  return Guard([&] {
    Require(records && out, "null argument");
    auto roc = std::make_unique<hg_roc>();
    roc->curve = ComputeRoc(records->records, error_threshold_m);
    *out = roc.release();
  });
}

double hg_roc_auc(const hg_roc* roc) {
  return roc ? roc->curve.auc : std::numeric_limits<double>::quiet_NaN();
}
size_t hg_roc_point_count(const hg_roc* roc) { return roc ? roc->curve.points.size() : 0; }

hg_status hg_roc_point(const hg_roc* roc, size_t index, double* threshold, double* fpr, double* tpr) {
  return Guard([&] {
    Require(roc != nullptr, "null argument");
    if (index >= roc->curve.points.size()) Fail(ErrorCode::kOutOfBounds, "ROC point index out of range");
    const RocPoint& p = roc->curve.points[index];
    if (threshold) *threshold = p.threshold;
    if (fpr) *fpr = p.fpr;
    if (tpr) *tpr = p.tpr;
  });
}

hg_status hg_roc_write_csv(const hg_roc* roc, const char* path) {
  return Guard([&] {
    Require(roc && path, "null argument");
    WriteRocCsv(roc->curve, path);
  });
}

void hg_roc_free(hg_roc* roc) { delete roc; }

hg_status hg_histogram_write_csv(const hg_records* records, double bin_width_m, double max_m,
                                 const char* path, size_t* bins_out) {
  return Guard([&] {
    Require(records && path, "null argument");
    const std::vector<HistogramBin> bins = MaceHistogram(records->records, bin_width_m, max_m);
    WriteHistogramCsv(bins, path);
    if (bins_out) *bins_out = bins.size();
  });
}

hg_status hg_parse_axis(const char* name, hg_axis* out) {
  return Guard([&] {
    Require(name && out, "null argument");
    *out = static_cast<hg_axis>(static_cast<int>(ParseAblationAxis(name)));
  });
}

hg_status hg_ablate(const char* manifest_path, const hg_eval_options* base, hg_axis axis,
                    const char* values, const char* out_path) {
  return Guard([&] {
    Require(manifest_path && base && values && out_path, "null argument");
    Require(axis >= HG_AXIS_AGGREGATION && axis <= HG_AXIS_MERGE, "unknown ablation axis");
    const EvaluationOptions options = ToEvaluationOptions(base);
    const ManifestSource source(ReadManifest(manifest_path));
    const std::vector<std::string> list = SplitCommas(values);
    const AblationResult result =
        RunAblation(source, options, static_cast<AblationAxis>(static_cast<int>(axis)), list);
    WriteAblationJson(result, out_path);
  });
}

}  // extern "C"
