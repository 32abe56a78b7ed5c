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

#include "homoguard/classical_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "homoguard/error.hpp"
#include "homoguard/rng.hpp"

namespace homoguard {
namespace {

using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix8 = Eigen::Matrix<double, 8, 8>;

constexpr int kMinTemplateWidth = 8;
constexpr double kMinValidFraction = 0.2;
constexpr double kFlatStdDev = 1e-3;

FloatImage Blur(const FloatImage& in) {
  static constexpr float kTaps[5] = {1.f / 16, 4.f / 16, 6.f / 16, 4.f / 16, 1.f / 16};
  const int w = in.width, h = in.height;
  FloatImage tmp(w, h);
  FloatImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const float* src = &in.data[static_cast<size_t>(y) * w];
    float* dst = &tmp.data[static_cast<size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      if (x >= 2 && x + 2 < w) {
        dst[x] = kTaps[0] * (src[x - 2] + src[x + 2]) + kTaps[1] * (src[x - 1] + src[x + 1]) +
                 kTaps[2] * src[x];
        continue;
      }
      float acc = 0.f;
      for (int t = -2; t <= 2; ++t) acc += kTaps[t + 2] * src[std::clamp(x + t, 0, w - 1)];
      dst[x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    const float* rows[5];
    for (int t = -2; t <= 2; ++t) {
      rows[t + 2] = &tmp.data[static_cast<size_t>(std::clamp(y + t, 0, h - 1)) * w];
    }
    float* dst = &out.data[static_cast<size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      dst[x] = kTaps[0] * (rows[0][x] + rows[4][x]) + kTaps[1] * (rows[1][x] + rows[3][x]) +
               kTaps[2] * rows[2][x];
    }
  }
  return out;
}

// Blur then 2x2 box average: level pixel i is centered on fine pixel 2i + 0.5.
FloatImage Downsample(const FloatImage& in) {
  const FloatImage blurred = Blur(in);
  FloatImage out(in.width / 2, in.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.at(x, y) = 0.25f * (blurred.at(2 * x, 2 * y) + blurred.at(2 * x + 1, 2 * y) +
                              blurred.at(2 * x, 2 * y + 1) + blurred.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

std::vector<FloatImage> BuildPyramid(const GrayImage& image, int levels) {
  std::vector<FloatImage> pyramid;
  pyramid.push_back(ToFloat(image));
  for (int l = 1; l < levels; ++l) pyramid.push_back(Downsample(pyramid.back()));
  return pyramid;
}

// Base-frame coordinates -> level-l coordinates.
Homography LevelTransform(int level) { return ResampleTransform(std::ldexp(1.0, level), 1.0); }

Eigen::Matrix3d WarpFromParams(const Vector8& p) {
  Eigen::Matrix3d m;
  m << 1.0 + p(0), p(2), p(4), p(1), 1.0 + p(3), p(5), p(6), p(7), 1.0;
  return m;
}

double PriorScale(const Homography& h, double cx, double cy) {
  // Local area scale of the warp at the template center.
  const Eigen::Matrix3d& m = h.matrix();
  const double w = m(2, 0) * cx + m(2, 1) * cy + m(2, 2);
  const double x = (m(0, 0) * cx + m(0, 1) * cy + m(0, 2)) / w;
  const double y = (m(1, 0) * cx + m(1, 1) * cy + m(1, 2)) / w;
  Eigen::Matrix2d jac;
  jac << (m(0, 0) - x * m(2, 0)) / w, (m(0, 1) - x * m(2, 1)) / w,
      (m(1, 0) - y * m(2, 0)) / w, (m(1, 1) - y * m(2, 1)) / w;
  return std::sqrt(std::abs(jac.determinant()));
}

// Precomputed inverse-compositional data for one template level.
struct TemplateLevel {
  int level = 0;
  Homography to_normalized = Homography::Identity();  // level px -> [-1, 1]
  std::vector<float> u, v;          // normalized coordinates of used pixels
  std::vector<double> values;       // zero-mean, unit-variance intensities
  std::vector<Vector8> steepest;    // steepest-descent rows
};

TemplateLevel PrepareTemplate(const FloatImage& image, int level, std::uint64_t member_seed,
                              double keep_fraction) {
  TemplateLevel t;
  t.level = level;
  const double cx = 0.5 * (image.width - 1);
  const double cy = 0.5 * (image.height - 1);
  const double r = std::max(cx, cy);
  t.to_normalized = Homography::FromMatrix(
      (Eigen::Matrix3d() << 1.0 / r, 0, -cx / r, 0, 1.0 / r, -cy / r, 0, 0, 1).finished());

  std::optional<Pcg32> rng;
  if (member_seed != 0) rng.emplace(MixSeed(member_seed, static_cast<std::uint64_t>(level)));

  std::vector<double> gx, gy;
  for (int y = 1; y + 1 < image.height; ++y) {
    for (int x = 1; x + 1 < image.width; ++x) {
      if (rng && rng->Uniform() >= keep_fraction) continue;
      t.u.push_back(static_cast<float>((x - cx) / r));
      t.v.push_back(static_cast<float>((y - cy) / r));
      t.values.push_back(image.at(x, y));
      gx.push_back(0.5 * (image.at(x + 1, y) - image.at(x - 1, y)) * r);
      gy.push_back(0.5 * (image.at(x, y + 1) - image.at(x, y - 1)) * r);
    }
  }
  const size_t n = t.values.size();
  double mean = 0.0;
  for (double v : t.values) mean += v;
  mean /= std::max<size_t>(n, 1);
  double var = 0.0;
  for (double v : t.values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / std::max<size_t>(n, 1));
  const double inv_sd = sd > kFlatStdDev ? 1.0 / sd : 0.0;

  t.steepest.resize(n);
  for (size_t i = 0; i < n; ++i) {
    t.values[i] = (t.values[i] - mean) * inv_sd;
    const double u = t.u[i], v = t.v[i];
    const double ix = gx[i] * inv_sd, iy = gy[i] * inv_sd;
    t.steepest[i] << ix * u, iy * u, ix * v, iy * v, ix, iy, -u * (ix * u + iy * v),
        -v * (ix * u + iy * v);
  }
  return t;
}

struct Evaluation {
  double cost = std::numeric_limits<double>::infinity();
  size_t valid = 0;
  Vector8 gradient = Vector8::Zero();
  Matrix8 hessian = Matrix8::Zero();
};

// Photometric cost of the normalized-template -> satellite-level mapping.
Evaluation Evaluate(const TemplateLevel& t, const FloatImage& image,
                    const Eigen::Matrix3d& m, bool with_derivatives) {
  Evaluation out;
  const size_t n = t.values.size();
  std::vector<std::uint32_t> idx;
  std::vector<double> samples;
  idx.reserve(n);
  samples.reserve(n);
  const double max_x = image.width - 1, max_y = image.height - 1;
  for (size_t i = 0; i < n; ++i) {
    const double u = t.u[i], v = t.v[i];
    const double w = m(2, 0) * u + m(2, 1) * v + m(2, 2);
    if (!(w > 1e-9)) continue;
    const double x = (m(0, 0) * u + m(0, 1) * v + m(0, 2)) / w;
    const double y = (m(1, 0) * u + m(1, 1) * v + m(1, 2)) / w;
    if (!(x >= 0.0 && y >= 0.0 && x <= max_x && y <= max_y)) continue;
    idx.push_back(static_cast<std::uint32_t>(i));
    samples.push_back(SampleBilinear(image, x, y));
  }
  out.valid = idx.size();
  if (out.valid < std::max<size_t>(16, static_cast<size_t>(kMinValidFraction * n))) return out;

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(out.valid);
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  const double sd = std::sqrt(var / static_cast<double>(out.valid));
  const double inv_sd = sd > kFlatStdDev ? 1.0 / sd : 0.0;

  double cost = 0.0;
  for (size_t k = 0; k < out.valid; ++k) {
    const double e = (samples[k] - mean) * inv_sd - t.values[idx[k]];
    cost += e * e;
    if (with_derivatives) {
      const Vector8& sd_row = t.steepest[idx[k]];
      out.gradient.noalias() += sd_row * e;
      out.hessian.selfadjointView<Eigen::Lower>().rankUpdate(sd_row);
    }
  }
  if (with_derivatives) out.hessian = out.hessian.selfadjointView<Eigen::Lower>();
  out.cost = cost / static_cast<double>(out.valid);
  return out;
}

// Exhaustive integer translation search by normalized cross-correlation at
// a single satellite level, followed by parabolic sub-pixel refinement.
// Returns the translation in level pixels.
Point2 CoarseSearch(const FloatImage& tmpl, const FloatImage& image,
                    const Homography& template_to_image, double radius, double min_overlap) {
  const Homography image_to_template = template_to_image.Inverse();
  const CornerSet tc = CornersOfFrame(tmpl.width);
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const Point2& p : ApplyHomography(template_to_image, tc)) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  const int bx = static_cast<int>(std::floor(min_x));
  const int by = static_cast<int>(std::floor(min_y));
  const int pw = static_cast<int>(std::ceil(max_x)) - bx + 1;
  const int ph = static_cast<int>(std::ceil(max_y)) - by + 1;
  if (pw <= 0 || ph <= 0 || pw > 4 * image.width || ph > 4 * image.height) return {0, 0};

  // Template resampled onto the image grid; mask marks samples inside it.
  std::vector<double> pv(static_cast<size_t>(pw) * ph, 0.0);
  std::vector<double> mask(pv.size(), 0.0);
  size_t n = 0;
  for (int j = 0; j < ph; ++j) {
    for (int i = 0; i < pw; ++i) {
      const Point2 s = image_to_template.Apply({static_cast<double>(bx + i),
                                                static_cast<double>(by + j)});
      if (s.x < 0 || s.y < 0 || s.x > tmpl.width - 1 || s.y > tmpl.height - 1) continue;
      pv[static_cast<size_t>(j) * pw + i] = SampleBilinear(tmpl, s.x, s.y);
      mask[static_cast<size_t>(j) * pw + i] = 1.0;
      ++n;
    }
  }
  if (n < 4) return {0, 0};
  const size_t min_count = std::max<size_t>(4, static_cast<size_t>(min_overlap * n));

  const int limit_x = image.width + pw;
  const int limit_y = image.height + ph;
  const int r = std::isfinite(radius) ? static_cast<int>(std::ceil(radius)) : std::max(limit_x, limit_y);
  const int lo_x = std::max(-r, -(bx + pw)), hi_x = std::min(r, image.width - bx);
  const int lo_y = std::max(-r, -(by + ph)), hi_y = std::min(r, image.height - by);
  if (hi_x < lo_x || hi_y < lo_y) return {0, 0};

  const int sw = hi_x - lo_x + 1;
  const int sh = hi_y - lo_y + 1;
  std::vector<double> score(static_cast<size_t>(sw) * sh, -2.0);
  double best = -2.0;
  int best_x = 0, best_y = 0;
  for (int dy = lo_y; dy <= hi_y; ++dy) {
    const int j0 = std::max(0, -(by + dy));
    const int j1 = std::min(ph, image.height - (by + dy));
    for (int dx = lo_x; dx <= hi_x; ++dx) {
      if (std::hypot(dx, dy) > radius) continue;
      const int i0 = std::max(0, -(bx + dx));
      const int i1 = std::min(pw, image.width - (bx + dx));
      if (i1 <= i0 || j1 <= j0) continue;
      double sp = 0, sp2 = 0, ss = 0, ss2 = 0, sps = 0, count = 0;
      for (int j = j0; j < j1; ++j) {
        const double* prow = &pv[static_cast<size_t>(j) * pw];
        const double* mrow = &mask[static_cast<size_t>(j) * pw];
        const float* srow = &image.data[static_cast<size_t>(by + dy + j) * image.width + bx + dx];
        for (int i = i0; i < i1; ++i) {
          const double p = prow[i];
          const double m = mrow[i];
          const double sv = m * srow[i];
          sp += p;
          sp2 += p * p;
          ss += sv;
          ss2 += sv * srow[i];
          sps += p * srow[i];
          count += m;
        }
      }
      if (count < static_cast<double>(min_count)) continue;
      const double c = count;
      const double cov = sps - sp * ss / c;
      const double vp = sp2 - sp * sp / c;
      const double vs = ss2 - ss * ss / c;
      const double ncc = (vp > 1e-9 && vs > 1e-9) ? cov / std::sqrt(vp * vs) : 0.0;
      score[static_cast<size_t>(dy - lo_y) * sw + (dx - lo_x)] = ncc;
      if (ncc > best) {
        best = ncc;
        best_x = dx;
        best_y = dy;
      }
    }
  }
  if (best <= -2.0) return {0, 0};

  auto at = [&](int dx, int dy) -> double {
    if (dx < lo_x || dx > hi_x || dy < lo_y || dy > hi_y) return -2.0;
    return score[static_cast<size_t>(dy - lo_y) * sw + (dx - lo_x)];
  };
  auto refine = [](double left, double mid, double right) {
    if (left <= -2.0 || right <= -2.0) return 0.0;
    const double denom = left - 2.0 * mid + right;
    if (denom >= -1e-12) return 0.0;
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
  };
  const double sx = refine(at(best_x - 1, best_y), best, at(best_x + 1, best_y));
  const double sy = refine(at(best_x, best_y - 1), best, at(best_x, best_y + 1));
  return {best_x + sx, best_y + sy};
}

}  // namespace

void ClassicalConfig::Validate() const {
  if (pyramid_levels < 1) Fail(ErrorCode::kInvalidArgument, "pyramid_levels must be >= 1");
  if (!(min_overlap > 0.0 && min_overlap <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "min_overlap must lie in (0, 1]");
  }
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "keep_fraction must lie in (0, 1]");
  }
  if (max_damping_trials < 0) Fail(ErrorCode::kInvalidArgument, "max_damping_trials must be >= 0");
}

std::vector<int> IterationSchedule(int iterations, int levels) {
  std::vector<int> schedule(static_cast<size_t>(levels), iterations / levels);
  schedule[0] += iterations % levels;
  return schedule;
}

ClassicalEstimator::ClassicalEstimator(ClassicalConfig config) : config_(std::move(config)) {
  config_.Validate();
}

ClassicalResult ClassicalEstimator::Run(const EstimateRequest& request) const {
  if (request.satellite == nullptr || request.thermal == nullptr) {
    Fail(ErrorCode::kInvalidArgument, "estimate request is missing images");
  }
  if (request.iterations < 1) Fail(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  const GrayImage& satellite = *request.satellite;
  const GrayImage& thermal = *request.thermal;

  Homography warp = request.initial.value_or(config_.prior);

  // Template levels are offset so that template pixels are no coarser than
  // the satellite pixels they land on.
  const double scale = PriorScale(warp, 0.5 * (thermal.width - 1), 0.5 * (thermal.height - 1));
  const int template_offset = scale > 0.0 ? std::max(0, static_cast<int>(std::floor(std::log2(1.0 / scale) + 1e-9))) : 0;
  int levels = config_.pyramid_levels;
  while (levels > 1 && ((satellite.width >> (levels - 1)) < kMinTemplateWidth ||
                        (thermal.width >> (levels - 1 + template_offset)) < kMinTemplateWidth)) {
    --levels;
  }
  int offset = template_offset;
  while (offset > 0 && (thermal.width >> (levels - 1 + offset)) < kMinTemplateWidth) --offset;

  const std::vector<FloatImage> sat_pyramid = BuildPyramid(satellite, levels);
  const std::vector<FloatImage> tmpl_pyramid = BuildPyramid(thermal, levels + offset);

  if (config_.coarse_search && !request.initial) {
    const int l = levels - 1;
    const Homography level_warp =
        LevelTransform(l) * warp * LevelTransform(l + offset).Inverse();
    const Point2 shift = CoarseSearch(tmpl_pyramid[static_cast<size_t>(l + offset)],
                                      sat_pyramid[static_cast<size_t>(l)], level_warp,
                                      config_.search_radius / std::ldexp(1.0, l),
                                      config_.min_overlap);
    warp = Homography::Translation(std::ldexp(shift.x, l), std::ldexp(shift.y, l)) * warp;
  }

  const CornerSet base = CornersOfFrame(thermal.width);
  const std::vector<int> schedule = IterationSchedule(request.iterations, levels);
  const int steps_to_run = request.StepsToRun();

  ClassicalResult result;
  result.trajectory.per_iteration.reserve(static_cast<size_t>(steps_to_run));
  int done = 0;
  for (int l = levels - 1; l >= 0 && done < steps_to_run; --l) {
    const int steps_here = schedule[static_cast<size_t>(l)];
    if (steps_here == 0) continue;
    const TemplateLevel tmpl =
        PrepareTemplate(tmpl_pyramid[static_cast<size_t>(l + offset)], l + offset,
                        config_.member_seed, config_.keep_fraction);
    const FloatImage& image = sat_pyramid[static_cast<size_t>(l)];
    const Homography to_level = LevelTransform(l);
    const Homography from_template =
        LevelTransform(l + offset).Inverse() * tmpl.to_normalized.Inverse();

    for (int s = 0; s < steps_here && done < steps_to_run; ++s, ++done) {
      ClassicalStep step;
      step.level = l;
      Eigen::Matrix3d m = (to_level * warp * from_template).matrix();
      const Evaluation current = Evaluate(tmpl, image, m, true);
      step.cost_before = current.cost;
      step.cost_after = current.cost;
      if (std::isfinite(current.cost)) {
        double lambda = 0.0;
        for (int trial = 0; trial <= config_.max_damping_trials; ++trial) {
          Matrix8 system = current.hessian;
          if (lambda > 0.0) system.diagonal() *= (1.0 + lambda);
          const Vector8 delta = system.ldlt().solve(current.gradient);
          if (!delta.allFinite()) {
            Fail(ErrorCode::kSolverDiverged, "non-finite Gauss-Newton update");
          }
          const Eigen::Matrix3d inc = WarpFromParams(delta);
          if (std::abs(inc.determinant()) > 1e-9) {
            const Eigen::Matrix3d candidate = m * inc.inverse();
            const Evaluation next = Evaluate(tmpl, image, candidate, false);
            if (next.cost <= current.cost) {
              try {
                const Homography updated =
                    to_level.Inverse() * Homography::FromMatrix(candidate) * from_template.Inverse();
                DisplacementFromHomography(updated, base);
                warp = updated;
                step.cost_after = next.cost;
                step.accepted = true;
                step.lambda = lambda;
                break;
              } catch (const Error&) {
                // Degenerate candidate; fall through to a more damped trial.
              }
            }
          }
          lambda = lambda == 0.0 ? 1e-2 : lambda * 10.0;
        }
      }
      result.steps.push_back(step);
      result.trajectory.per_iteration.push_back(DisplacementFromHomography(warp, base));
    }
  }
  result.warp = warp;
  return result;
}

}  // namespace homoguard
