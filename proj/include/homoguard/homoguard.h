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

/* C interface to the homoguard library. All objects are opaque handles
 * released with their *_free function. Functions return HG_OK on success;
 * on failure the thread-local message from hg_last_error() describes the
 * problem. Displacements are 2x4 row-major arrays: x offsets of the four
 * corners (TL, TR, BR, BL) followed by the y offsets. Homographies are 3x3
 * row-major. */
#ifndef HOMOGUARD_HOMOGUARD_H_
#define HOMOGUARD_HOMOGUARD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HG_API __declspec(dllexport)
#elif defined(HOMOGUARD_BUILDING_LIBRARY)
#define HG_API __attribute__((visibility("default")))
#else
#define HG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hg_status {
  HG_OK = 0,
  HG_INVALID_ARGUMENT = 1,
  HG_DEGENERATE_CORNERS = 2,
  HG_POINT_AT_INFINITY = 3,
  HG_INVALID_PLAN = 4,
  HG_OUT_OF_BOUNDS = 5,
  HG_SOLVER_DIVERGED = 6,
  HG_PROTOCOL_ERROR = 7,
  HG_LENGTH_MISMATCH = 8,
  HG_TOO_FEW_SAMPLES = 9,
  HG_EMPTY_LIST = 10,
  HG_DEGENERATE_LABELS = 11,
  HG_INFEASIBLE_DC = 12,
  HG_IO_ERROR = 13,
  HG_INTERNAL = 99
} hg_status;

HG_API const char* hg_version(void);
HG_API const char* hg_status_name(hg_status status);
/* Message of the last failure on the calling thread ("" if none). */
HG_API const char* hg_last_error(void);

/* ---- geometry ---------------------------------------------------------- */

typedef struct hg_frames {
  int w_s;
  int w_t;
  int w_r;
  double meters_per_pixel;
} hg_frames;

HG_API void hg_frames_init(hg_frames* frames);

/* src, dst: 4 points as x0,y0,...,x3,y3. */
HG_API hg_status hg_dlt(const double src[8], const double dst[8], double h_out[9]);
HG_API hg_status hg_apply_homography(const double h[9], const double* points, size_t count,
                                     double* out);
HG_API hg_status hg_recover_full_displacement(const double d_crop[8], int crop_x, int crop_y,
                                              int crop_size, const hg_frames* frames,
                                              double d_full_out[8]);

/* ---- sampling and consensus ------------------------------------------- */

typedef enum hg_sampling { HG_SAMPLING_RANDOM = 0, HG_SAMPLING_GRID = 1 } hg_sampling;
typedef enum hg_merge { HG_MERGE_MIN = 0, HG_MERGE_MAX = 1, HG_MERGE_ADD = 2 } hg_merge;
typedef enum hg_aggregation { HG_AGG_ORIGINAL = 0, HG_AGG_MEAN = 1 } hg_aggregation;

/* crops_out holds 3 ints (x, y, size) per crop; n_c entries are written. */
HG_API hg_status hg_generate_crops(hg_sampling method, int o_c, int n_c, uint64_t seed, int w_t,
                                   int* crops_out);

/* displacements: count consecutive 2x4 arrays. */
HG_API hg_status hg_crop_tta_uncertainty(const double* displacements, size_t count,
                                         double stds_out[8]);
HG_API hg_status hg_merge_uncertainty(const double data[8], const double model[8], hg_merge merge,
                                      double out[8]);
HG_API hg_status hg_uncertainty_score(const double stds[8], double* score_out);
HG_API hg_status hg_should_reject(const double stds[8], double s_c, int* reject_out);
HG_API hg_status hg_aggregate(const double* displacements, size_t count, hg_aggregation aggregation,
                              double out[8]);

/* trajectories: n_views blocks of k 2x4 arrays; block 0 is the original view. */
HG_API hg_status hg_crop_tta_loss(const double* trajectories, size_t n_views, size_t k,
                                  const double gt[8], double gamma, double* loss_out);

/* ---- metrics ----------------------------------------------------------- */

HG_API hg_status hg_mace(const double pred[8], const double gt[8], const hg_frames* frames,
                         double* out);
HG_API hg_status hg_center_error(const double pred[8], const double gt[8], const hg_frames* frames,
                                 double* out);

/* ---- images ------------------------------------------------------------ */

typedef struct hg_image hg_image;

HG_API hg_status hg_image_read_pgm(const char* path, hg_image** out);
HG_API hg_status hg_image_write_pgm(const hg_image* image, const char* path);
HG_API hg_status hg_image_create(int width, int height, const uint8_t* pixels, hg_image** out);
HG_API int hg_image_width(const hg_image* image);
HG_API int hg_image_height(const hg_image* image);
HG_API const uint8_t* hg_image_pixels(const hg_image* image);
HG_API void hg_image_free(hg_image* image);

/* ---- dataset ----------------------------------------------------------- */

typedef struct hg_generate_options {
  uint64_t seed;
  int count;
  double d_c_m;
  /* Comma-separated corrupted categories, NULL for all six. */
  const char* categories;
  double clean_fraction;
  int threads;
  hg_frames frames;
} hg_generate_options;

HG_API void hg_generate_options_init(hg_generate_options* options);
/* Writes PGMs and manifest.json into out_dir. */
HG_API hg_status hg_generate_dataset(const hg_generate_options* options, const char* out_dir);

/* ---- evaluation -------------------------------------------------------- */

typedef struct hg_eval_options {
  /* "oracle", "classical" or "external:<command>". */
  const char* estimator;
  double oracle_sigma;
  /* "none", "croptta", "de" or "croptta+de". */
  const char* method;
  hg_sampling sampling;
  int o_c;
  int n_c;
  int n_m;
  hg_merge merge;
  hg_aggregation aggregation;
  double s_c;
  int early_stop_k; /* 0 disables early stopping */
  int iterations;
  int two_stage;
  double roc_threshold_m;
  double d_c_m; /* <= 0 keeps the manifest value */
  uint64_t seed;
  int threads;
} hg_eval_options;

typedef struct hg_summary {
  int count;
  int kept;
  int failed;
  int estimator_errors;
  double mace_m;
  double ce_m;
  double success_rate;
  double auc; /* NaN when labels are single-class */
  long long estimator_steps;
  double seconds;
} hg_summary;

typedef struct hg_evaluation hg_evaluation;

HG_API void hg_eval_options_init(hg_eval_options* options);
HG_API hg_status hg_evaluate(const char* manifest_path, const hg_eval_options* options,
                             hg_evaluation** out);
/* Summary over all records (first ResultTable row when d_c is uniform). */
HG_API hg_status hg_evaluation_summary(const hg_evaluation* evaluation, hg_summary* out);
HG_API size_t hg_evaluation_record_count(const hg_evaluation* evaluation);
/* Writes records.json, records.csv, table.json and table.csv. */
HG_API hg_status hg_evaluation_write(const hg_evaluation* evaluation, const char* out_dir);
HG_API void hg_evaluation_free(hg_evaluation* evaluation);

/* ---- analysis ---------------------------------------------------------- */

typedef struct hg_records hg_records;

HG_API hg_status hg_records_load(const char* path, hg_records** out);
HG_API size_t hg_records_count(const hg_records* records);
HG_API void hg_records_free(hg_records* records);

typedef struct hg_roc hg_roc;

HG_API hg_status hg_roc_compute(const hg_records* records, double error_threshold_m, hg_roc** out);
HG_API double hg_roc_auc(const hg_roc* roc);
HG_API size_t hg_roc_point_count(const hg_roc* roc);
/* threshold may be +inf for the first point. */
HG_API hg_status hg_roc_point(const hg_roc* roc, size_t index, double* threshold, double* fpr,
                              double* tpr);
HG_API hg_status hg_roc_write_csv(const hg_roc* roc, const char* path);
HG_API void hg_roc_free(hg_roc* roc);

/* Writes lo_m,hi_m,count rows; the last bin is the overflow bin at max_m.
 * bins_out (optional) receives the bin count. */
HG_API hg_status hg_histogram_write_csv(const hg_records* records, double bin_width_m, double max_m,
                                        const char* path, size_t* bins_out);

typedef enum hg_axis {
  HG_AXIS_AGGREGATION = 0,
  HG_AXIS_SAMPLING = 1,
  HG_AXIS_CROP_OFFSET = 2,
  HG_AXIS_SAMPLE_NUMBERS = 3,
  HG_AXIS_EARLY_STOPPING = 4,
  HG_AXIS_MERGE = 5
} hg_axis;

/* values: comma-separated axis values. Writes ablation.json to out_path. */
HG_API hg_status hg_ablate(const char* manifest_path, const hg_eval_options* base, hg_axis axis,
                           const char* values, const char* out_path);

HG_API hg_status hg_parse_axis(const char* name, hg_axis* out);

#ifdef __cplusplus
}
#endif

#endif /* HOMOGUARD_HOMOGUARD_H_ */
