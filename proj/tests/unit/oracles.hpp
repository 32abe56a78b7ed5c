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

// Independent reference implementations used to check the library. They are
// written from the definitions, deliberately avoiding the library's own
// code paths (no SVD, no homography class, no shared helpers).
#ifndef HOMOGUARD_TESTS_ORACLES_HPP_
#define HOMOGUARD_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Quad = std::array<std::array<double, 2>, 4>;
using Mat24 = Eigen::Matrix<double, 2, 4>;

inline Quad Square(double w) { return {{{0, 0}, {w - 1, 0}, {w - 1, w - 1}, {0, w - 1}}}; }

// h33 = 1 parameterization, 8x8 linear solve.
inline Eigen::Matrix3d Dlt(const Quad& src, const Quad& dst) {
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double x = src[i][0], y = src[i][1], u = dst[i][0], v = dst[i][1];
    a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    b(2 * i) = u;
    b(2 * i + 1) = v;
  }
  const Eigen::Matrix<double, 8, 1> h = a.fullPivLu().solve(b);
  Eigen::Matrix3d m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  return m;
}

inline std::array<double, 2> Apply(const Eigen::Matrix3d& m, double x, double y) {
  const double w = m(2, 0) * x + m(2, 1) * y + m(2, 2);
  return {(m(0, 0) * x + m(0, 1) * y + m(0, 2)) / w, (m(1, 0) * x + m(1, 1) * y + m(1, 2)) / w};
}

// Pixel-center resampling of one coordinate.
inline double Resample(double x, double from, double to) { return (x + 0.5) * to / from - 0.5; }

inline Quad Offset(const Quad& base, const Mat24& d) {
  Quad out = base;
  for (int i = 0; i < 4; ++i) {
    out[i][0] += d(0, i);
    out[i][1] += d(1, i);
  }
  return out;
}

// Displacement of the full resized thermal frame implied by a prediction on
// a crop, composed point by point.
inline Mat24 RecoverFull(const Mat24& d_crop, int cx, int cy, int size, int w_t, int w_r) {
  const Quad base = Square(w_r);
  const Eigen::Matrix3d h = Dlt(base, Offset(base, d_crop));
  Mat24 out;
  for (int i = 0; i < 4; ++i) {
    // full resized thermal -> full thermal -> crop -> resized crop
    const double tx = Resample(base[i][0], w_r, w_t) - cx;
    const double ty = Resample(base[i][1], w_r, w_t) - cy;
    const double rx = Resample(tx, size, w_r);
    const double ry = Resample(ty, size, w_r);
    const auto p = Apply(h, rx, ry);
    out(0, i) = p[0] - base[i][0];
    out(1, i) = p[1] - base[i][1];
  }
  return out;
}

inline Mat24 PopulationStd(const std::vector<Mat24>& xs) {
  Mat24 out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 4; ++c) {
      double mean = 0.0;
      for (const Mat24& x : xs) mean += x(r, c);
      mean /= static_cast<double>(xs.size());
      double ss = 0.0;
      for (const Mat24& x : xs) ss += (x(r, c) - mean) * (x(r, c) - mean);
      out(r, c) = std::sqrt(ss / static_cast<double>(xs.size()));
    }
  }
  return out;
}

// trajectories[view][iteration]; view 0 is the original.
inline double Loss(const std::vector<std::vector<Mat24>>& trajectories, const Mat24& gt,
                   double gamma) {
  const int k_total = static_cast<int>(trajectories[0].size());
  double total = 0.0;
  for (int k = 0; k < k_total; ++k) {
    double weight = 1.0;
    for (int e = 0; e < k_total - k - 1; ++e) weight *= gamma;
    double term = 0.0;
    for (const auto& view : trajectories) {
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c) term += std::fabs(view[static_cast<size_t>(k)](r, c) - gt(r, c));
    }
    total += weight * term;
  }
  return total;
}

inline double Mace(const Mat24& pred, const Mat24& gt, double meters_per_unit) {
  double sum = 0.0;
  for (int c = 0; c < 4; ++c) sum += std::hypot(pred(0, c) - gt(0, c), pred(1, c) - gt(1, c));
  return 0.25 * sum * meters_per_unit;
}

inline double CenterError(const Mat24& pred, const Mat24& gt, double meters_per_unit) {
  double dx = 0.0, dy = 0.0;
  for (int c = 0; c < 4; ++c) {
    dx += pred(0, c) - gt(0, c);
    dy += pred(1, c) - gt(1, c);
  }
  return std::hypot(dx / 4.0, dy / 4.0) * meters_per_unit;
}

// Mann-Whitney form of the ROC AUC: P(score_pos > score_neg) + 0.5 P(tie).
inline double PairwiseAuc(const std::vector<std::pair<double, bool>>& scored) {
  double wins = 0.0;
  long pairs = 0;
  for (const auto& [sp, pos] : scored) {
    if (!pos) continue;
    for (const auto& [sn, neg_pos] : scored) {
      if (neg_pos) continue;
      ++pairs;
      wins += sp > sn ? 1.0 : (sp == sn ? 0.5 : 0.0);
    }
  }
  return wins / static_cast<double>(pairs);
}

inline double Cross(const std::array<double, 2>& a, const std::array<double, 2>& b,
                    const std::array<double, 2>& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Random convex quadrilateral: a perturbed square of side ~w, well away from
// degeneracy.
inline Quad RandomQuad(std::mt19937_64& rng, double w, double jitter) {
  std::uniform_real_distribution<double> u(-jitter, jitter);
  std::uniform_real_distribution<double> shift(-3 * w, 3 * w);
  const double sx = shift(rng), sy = shift(rng);
  Quad q = Square(w);
  for (auto& p : q) {
    p[0] += sx + u(rng);
    p[1] += sy + u(rng);
  }
  return q;
}

}  // namespace oracle

#endif  // HOMOGUARD_TESTS_ORACLES_HPP_
