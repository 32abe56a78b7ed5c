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

#include "homoguard/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "homoguard/error.hpp"

namespace homoguard {
namespace {

constexpr double kDepthEpsilon = 1e-12;
constexpr double kDeterminantEpsilon = 1e-12;
constexpr double kCollinearityTolerance = 1e-9;

Eigen::Matrix3d Normalize(const Eigen::Matrix3d& m) {
  if (std::abs(m(2, 2)) > 1e-9) return m / m(2, 2);
  const double norm = m.norm();
  if (norm == 0.0 || !std::isfinite(norm)) {
    Fail(ErrorCode::kInvalidArgument, "homography matrix is zero or non-finite");
  }
  return m / norm;
}

double Cross(Point2 a, Point2 b, Point2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

void CheckNonDegenerate(const CornerSet& pts, const char* which) {
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const Point2& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      Fail(ErrorCode::kInvalidArgument, std::string(which) + " corners are not finite");
    }
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double scale = std::max(max_x - min_x, max_y - min_y);
  const double tolerance = kCollinearityTolerance * scale * scale;
  static constexpr int kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : kTriples) {
    if (scale == 0.0 || std::abs(Cross(pts[t[0]], pts[t[1]], pts[t[2]])) < tolerance) {
      Fail(ErrorCode::kDegenerateCorners,
           std::string(which) + " corners contain three collinear points");
    }
  }
}

// Similarity that moves the centroid to the origin and the mean distance to
// sqrt(2).
Eigen::Matrix3d ConditioningTransform(const CornerSet& pts) {
  double cx = 0.0, cy = 0.0;
  for (const Point2& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= 4.0;
  cy /= 4.0;
  double mean_dist = 0.0;
  for (const Point2& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= 4.0;
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

}  // namespace

Displacement Displacement::Constant(double dx, double dy) {
  Displacement d;
  d.offsets.row(0).setConstant(dx);
  d.offsets.row(1).setConstant(dy);
  return d;
}

Displacement operator+(const Displacement& a, const Displacement& b) {
  return {a.offsets + b.offsets};
}

Displacement operator-(const Displacement& a, const Displacement& b) {
  return {a.offsets - b.offsets};
}

Displacement operator*(double s, const Displacement& d) { return {s * d.offsets}; }

Homography Homography::Identity() { return Homography(Eigen::Matrix3d::Identity()); }

Homography Homography::Translation(double dx, double dy) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = dx;
  m(1, 2) = dy;
  return Homography(m);
}

Homography Homography::Similarity(double scale, double tx, double ty) {
  Eigen::Matrix3d m;
  m << scale, 0, tx, 0, scale, ty, 0, 0, 1;
  return FromMatrix(m);
}

Homography Homography::FromMatrix(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) Fail(ErrorCode::kInvalidArgument, "homography is not finite");
  Eigen::Matrix3d n = Normalize(m);
  if (std::abs(n.determinant()) <= kDeterminantEpsilon) {
    Fail(ErrorCode::kInvalidArgument, "homography is singular");
  }
  return Homography(n);
}

Homography Homography::Inverse() const { return FromMatrix(m_.inverse()); }

Point2 Homography::Apply(Point2 p) const {
  const double x = m_(0, 0) * p.x + m_(0, 1) * p.y + m_(0, 2);
  const double y = m_(1, 0) * p.x + m_(1, 1) * p.y + m_(1, 2);
  const double w = m_(2, 0) * p.x + m_(2, 1) * p.y + m_(2, 2);
  if (!(std::abs(w) > kDepthEpsilon)) {
    Fail(ErrorCode::kPointAtInfinity, "projective depth underflow");
  }
  return {x / w, y / w};
}

Homography operator*(const Homography& a, const Homography& b) {
  return Homography::FromMatrix(a.m_ * b.m_);
}

void FrameConfig::Validate() const {
  if (w_s <= 0 || w_t <= 0 || w_r <= 0) {
    Fail(ErrorCode::kInvalidArgument, "frame widths must be positive");
  }
  if (!(w_r <= w_t && w_t <= w_s)) {
    Fail(ErrorCode::kInvalidArgument, "frame widths must satisfy w_r <= w_t <= w_s");
  }
  if (!(meters_per_pixel > 0.0) || !std::isfinite(meters_per_pixel)) {
    Fail(ErrorCode::kInvalidArgument, "meters_per_pixel must be positive");
  }
}

CornerSet CornersOfFrame(int width) {
  if (width < 2) Fail(ErrorCode::kInvalidArgument, "frame width must be >= 2");
  const double w = width - 1;
  return {Point2{0, 0}, Point2{w, 0}, Point2{w, w}, Point2{0, w}};
}

CornerSet DisplacementToCorners(const Displacement& d, const CornerSet& base) {
  CornerSet out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {base[i].x + d.offsets(0, i), base[i].y + d.offsets(1, i)};
  }
  return out;
}

Displacement CornersToDisplacement(const CornerSet& target, const CornerSet& base) {
  Displacement d;
  for (int i = 0; i < 4; ++i) {
    d.offsets(0, i) = target[i].x - base[i].x;
    d.offsets(1, i) = target[i].y - base[i].y;
  }
  return d;
}

Homography Dlt(const CornerSet& src, const CornerSet& dst) {
  CheckNonDegenerate(src, "source");
  CheckNonDegenerate(dst, "destination");

  const Eigen::Matrix3d t_src = ConditioningTransform(src);
  const Eigen::Matrix3d t_dst = ConditioningTransform(dst);

  Eigen::Matrix<double, 8, 9> a;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d p = t_src * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
    const Eigen::Vector3d q = t_dst * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
    const double x = p.x(), y = p.y(), u = q.x(), v = q.y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography::FromMatrix(t_dst.inverse() * hn * t_src);
}

CornerSet ApplyHomography(const Homography& h, const CornerSet& pts) {
  CornerSet out;
  for (int i = 0; i < 4; ++i) out[i] = h.Apply(pts[i]);
  return out;
}

Homography HomographyFromDisplacement(const Displacement& d, const CornerSet& base) {
  return Dlt(base, DisplacementToCorners(d, base));
}

Displacement DisplacementFromHomography(const Homography& h, const CornerSet& base) {
  return CornersToDisplacement(ApplyHomography(h, base), base);
}

Homography ResampleTransform(double from_width, double to_width) {
  const double k = to_width / from_width;
  const double t = 0.5 * k - 0.5;
  return Homography::Similarity(k, t, t);
}

Homography CropViewTransform(const CropSpec& crop, const FrameConfig& frames) {
  // resized crop -> crop pixels -> thermal pixels -> resized thermal
  const Homography to_crop = ResampleTransform(frames.w_r, crop.size);
  const Homography to_thermal = Homography::Translation(crop.x, crop.y);
  const Homography to_resized = ResampleTransform(frames.w_t, frames.w_r);
  return to_resized * to_thermal * to_crop;
}

Displacement RecoverWithViews(const Displacement& d_view,
                              const Homography& thermal_view,
                              const Homography& satellite_view,
                              const CornerSet& base) {
  const Homography view_estimate = HomographyFromDisplacement(d_view, base);
  const Homography full = satellite_view * view_estimate * thermal_view.Inverse();
  return DisplacementFromHomography(full, base);
}

Displacement RecoverFullDisplacement(const Displacement& d_crop,
                                     const CropSpec& crop,
                                     const FrameConfig& frames) {
  if (crop.size <= 0 || crop.x < 0 || crop.y < 0 || crop.x + crop.size > frames.w_t ||
      crop.y + crop.size > frames.w_t) {
    Fail(ErrorCode::kInvalidArgument, "crop lies outside the thermal frame");
  }
  return RecoverWithViews(d_crop, CropViewTransform(crop, frames),
                          Homography::Identity(), CornersOfFrame(frames.w_r));
}

}  // namespace homoguard
