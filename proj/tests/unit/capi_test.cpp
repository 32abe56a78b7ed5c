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

// Exercises the shared library through its C header only.
#include "homoguard/homoguard.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <unistd.h>

namespace {

std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("hg_capi_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void SmallFrames(hg_frames* f) {
  hg_frames_init(f);
  f->w_s = 384;
  f->w_t = 128;
  f->w_r = 64;
}

TEST(CApiTest, VersionAndStatusNames) {
  EXPECT_GT(std::strlen(hg_version()), 0u);
  EXPECT_STREQ(hg_status_name(HG_OK), "OK");
  EXPECT_STRNE(hg_status_name(HG_DEGENERATE_CORNERS), hg_status_name(HG_OK));
}

TEST(CApiTest, DltAndApply) {
  const double src[8] = {0, 0, 255, 0, 255, 255, 0, 255};
  const double dst[8] = {10, 10, 265, 10, 265, 265, 10, 265};
  double h[9];
  ASSERT_EQ(hg_dlt(src, dst, h), HG_OK);
  EXPECT_NEAR(h[2], 10.0, 1e-9);
  EXPECT_NEAR(h[5], 10.0, 1e-9);
  EXPECT_NEAR(h[8], 1.0, 1e-12);
  double out[8];
  ASSERT_EQ(hg_apply_homography(h, src, 4, out), HG_OK);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(out[i], dst[i], 1e-9);
}

TEST(CApiTest, DegenerateCornersReported) {
  const double src[8] = {0, 0, 1, 1, 2, 2, 0, 5};
  const double dst[8] = {0, 0, 1, 0, 1, 1, 0, 1};
  double h[9];
  EXPECT_EQ(hg_dlt(src, dst, h), HG_DEGENERATE_CORNERS);
  EXPECT_GT(std::strlen(hg_last_error()), 0u);
  EXPECT_EQ(hg_dlt(nullptr, dst, h), HG_INVALID_ARGUMENT);
}

TEST(CApiTest, RecoverIdentityView) {
  hg_frames f;
  hg_frames_init(&f);
  const double d[8] = {1, 2, 3, 4, 5, 6, 7, 8};
  double full[8];
  ASSERT_EQ(hg_recover_full_displacement(d, 0, 0, f.w_t, &f, full), HG_OK);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(full[i], d[i], 1e-9);
  EXPECT_NE(hg_recover_full_displacement(d, 100, 0, f.w_t, &f, full), HG_OK);
}

TEST(CApiTest, CropsAndUncertainty) {
  int crops[15];
  ASSERT_EQ(hg_generate_crops(HG_SAMPLING_GRID, 32, 5, 0, 512, crops), HG_OK);
  EXPECT_EQ(crops[2], 512);
  EXPECT_EQ(crops[3 * 4 + 0], 32);
  EXPECT_EQ(hg_generate_crops(HG_SAMPLING_GRID, 32, 4, 0, 512, crops), HG_INVALID_PLAN);

  std::vector<double> ds(16, 0.0);
  for (int i = 0; i < 8; ++i) ds[8 + i] = 2.0;
  double stds[8];
  ASSERT_EQ(hg_crop_tta_uncertainty(ds.data(), 2, stds), HG_OK);
  for (double s : stds) EXPECT_DOUBLE_EQ(s, 1.0);
  EXPECT_EQ(hg_crop_tta_uncertainty(ds.data(), 1, stds), HG_TOO_FEW_SAMPLES);

  double score = 0;
  ASSERT_EQ(hg_uncertainty_score(stds, &score), HG_OK);
  EXPECT_DOUBLE_EQ(score, 1.0);
  int reject = -1;
  ASSERT_EQ(hg_should_reject(stds, 0.5, &reject), HG_OK);
  EXPECT_EQ(reject, 1);
  ASSERT_EQ(hg_should_reject(stds, 1.0, &reject), HG_OK);
  EXPECT_EQ(reject, 0);

  const double a[8] = {1, 5, 1, 5, 1, 5, 1, 5}, b[8] = {2, 2, 2, 2, 2, 2, 2, 2};
  double merged[8];
  ASSERT_EQ(hg_merge_uncertainty(a, b, HG_MERGE_ADD, merged), HG_OK);
  EXPECT_DOUBLE_EQ(merged[1], 7.0);
  double agg[8];
  ASSERT_EQ(hg_aggregate(ds.data(), 2, HG_AGG_MEAN, agg), HG_OK);
  EXPECT_DOUBLE_EQ(agg[0], 1.0);
}

TEST(CApiTest, LossAndMetrics) {
  // Two views, one iteration, everything off by 1: 16.
  std::vector<double> traj(16, 1.0);
  const double gt[8] = {0};
  double loss = 0;
  ASSERT_EQ(hg_crop_tta_loss(traj.data(), 2, 1, gt, 0.9, &loss), HG_OK);
  EXPECT_DOUBLE_EQ(loss, 16.0);

  hg_frames f;
  hg_frames_init(&f);
  const double pred[8] = {3, 3, 3, 3, 4, 4, 4, 4};
  double mace = 0, ce = 0;
  ASSERT_EQ(hg_mace(pred, gt, &f, &mace), HG_OK);
  ASSERT_EQ(hg_center_error(pred, gt, &f, &ce), HG_OK);
  EXPECT_DOUBLE_EQ(mace, 5.0 * f.w_s / f.w_r);
  EXPECT_DOUBLE_EQ(ce, mace);
}

TEST(CApiTest, ImageRoundTrip) {
  const std::vector<uint8_t> px = {1, 2, 3, 4, 5, 6};
  hg_image* img = nullptr;
  ASSERT_EQ(hg_image_create(3, 2, px.data(), &img), HG_OK);
  const auto dir = TempDir("img");
  const std::string path = (dir / "a.pgm").string();
  ASSERT_EQ(hg_image_write_pgm(img, path.c_str()), HG_OK);
  hg_image* back = nullptr;
  ASSERT_EQ(hg_image_read_pgm(path.c_str(), &back), HG_OK);
  EXPECT_EQ(hg_image_width(back), 3);
  EXPECT_EQ(hg_image_height(back), 2);
  EXPECT_EQ(std::memcmp(hg_image_pixels(back), px.data(), px.size()), 0);
  hg_image_free(img);
  hg_image_free(back);
  hg_image* missing = nullptr;
  EXPECT_EQ(hg_image_read_pgm((dir / "nope.pgm").string().c_str(), &missing), HG_IO_ERROR);
  std::filesystem::remove_all(dir);
}

TEST(CApiTest, GenerateEvaluateAnalyze) {
  const auto dir = TempDir("pipeline");
  hg_generate_options g;
  hg_generate_options_init(&g);
  g.seed = 4;
  g.count = 8;
  g.d_c_m = 100.0;
  SmallFrames(&g.frames);
  ASSERT_EQ(hg_generate_dataset(&g, dir.string().c_str()), HG_OK) << hg_last_error();
  const std::string manifest = (dir / "manifest.json").string();

  hg_eval_options o;
  hg_eval_options_init(&o);
  o.estimator = "oracle";
  o.o_c = 16;
  hg_evaluation* ev = nullptr;
  ASSERT_EQ(hg_evaluate(manifest.c_str(), &o, &ev), HG_OK) << hg_last_error();
  EXPECT_EQ(hg_evaluation_record_count(ev), 8u);
  hg_summary s;
  ASSERT_EQ(hg_evaluation_summary(ev, &s), HG_OK);
  EXPECT_EQ(s.count, 8);
  EXPECT_DOUBLE_EQ(s.success_rate, 1.0);
  EXPECT_LT(s.mace_m, 1e-6);
  EXPECT_TRUE(std::isnan(s.auc));
  EXPECT_EQ(s.estimator_steps, 8 * 5 * 6);
  const auto out = dir / "eval";
  ASSERT_EQ(hg_evaluation_write(ev, out.string().c_str()), HG_OK);
  hg_evaluation_free(ev);
  for (const char* f : {"records.json", "records.csv", "table.json", "table.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }

  hg_records* recs = nullptr;
  ASSERT_EQ(hg_records_load((out / "records.json").string().c_str(), &recs), HG_OK);
  EXPECT_EQ(hg_records_count(recs), 8u);
  hg_roc* roc = nullptr;
  EXPECT_EQ(hg_roc_compute(recs, 25.0, &roc), HG_DEGENERATE_LABELS);
  size_t bins = 0;
  ASSERT_EQ(hg_histogram_write_csv(recs, 5.0, 50.0, (dir / "hist.csv").string().c_str(), &bins), HG_OK);
  EXPECT_EQ(bins, 11u);
  hg_records_free(recs);

  // Noisy oracle: some errors exceed the threshold, so a ROC exists.
  o.oracle_sigma = 3.0;
  ASSERT_EQ(hg_evaluate(manifest.c_str(), &o, &ev), HG_OK);
  ASSERT_EQ(hg_evaluation_write(ev, out.string().c_str()), HG_OK);
  hg_evaluation_free(ev);
  ASSERT_EQ(hg_records_load((out / "records.json").string().c_str(), &recs), HG_OK);
  ASSERT_EQ(hg_roc_compute(recs, 25.0, &roc), HG_OK) << hg_last_error();
  EXPECT_GE(hg_roc_auc(roc), 0.0);
  EXPECT_LE(hg_roc_auc(roc), 1.0);
  ASSERT_GE(hg_roc_point_count(roc), 2u);
  double thr, fpr, tpr;
  ASSERT_EQ(hg_roc_point(roc, 0, &thr, &fpr, &tpr), HG_OK);
  EXPECT_TRUE(std::isinf(thr));
  EXPECT_EQ(hg_roc_point(roc, 10000, &thr, &fpr, &tpr), HG_OUT_OF_BOUNDS);
  ASSERT_EQ(hg_roc_write_csv(roc, (dir / "roc.csv").string().c_str()), HG_OK);
  hg_roc_free(roc);
  hg_records_free(recs);

  hg_axis axis;
  ASSERT_EQ(hg_parse_axis("early-stopping", &axis), HG_OK);
  EXPECT_EQ(axis, HG_AXIS_EARLY_STOPPING);
  EXPECT_EQ(hg_parse_axis("depth", &axis), HG_INVALID_ARGUMENT);
  const std::string abl = (dir / "ablation.json").string();
  ASSERT_EQ(hg_ablate(manifest.c_str(), &o, axis, "none,3", abl.c_str()), HG_OK) << hg_last_error();
  EXPECT_TRUE(std::filesystem::exists(abl));
  EXPECT_EQ(hg_ablate(manifest.c_str(), &o, axis, "none,30", abl.c_str()), HG_INVALID_ARGUMENT);
  std::filesystem::remove_all(dir);
}

TEST(CApiTest, InfeasibleDcAndBadEstimator) {
  const auto dir = TempDir("bad");
  hg_generate_options g;
  hg_generate_options_init(&g);
  g.count = 1;
  g.d_c_m = 5000.0;
  EXPECT_EQ(hg_generate_dataset(&g, dir.string().c_str()), HG_INFEASIBLE_DC);
  g.d_c_m = 100.0;
  SmallFrames(&g.frames);
  ASSERT_EQ(hg_generate_dataset(&g, dir.string().c_str()), HG_OK);
  hg_eval_options o;
  hg_eval_options_init(&o);
  o.estimator = "telepathy";
  hg_evaluation* ev = nullptr;
  EXPECT_EQ(hg_evaluate((dir / "manifest.json").string().c_str(), &o, &ev), HG_INVALID_ARGUMENT);
  EXPECT_EQ(ev, nullptr);
  std::filesystem::remove_all(dir);
}

}  // namespace
