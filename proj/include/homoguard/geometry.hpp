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

#ifndef HOMOGUARD_GEOMETRY_HPP_
#define HOMOGUARD_GEOMETRY_HPP_

// Four-corner displacement algebra and projective bookkeeping.
//
// Coordinates are continuous pixel coordinates with pixel centers at integer
// positions. Corners are always ordered top-left, top-right, bottom-right,
// bottom-left, and every 2x4 matrix uses the same column order.
//
// A displacement describes where the four corners of the resized thermal
// view land in the resized satellite frame: corner_i + offsets.col(i).

#include <array>

#include <Eigen/Core>

namespace homoguard {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

using CornerSet = std::array<Point2, 4>;
using Matrix24 = Eigen::Matrix<double, 2, 4>;

struct Displacement {
  Matrix24 offsets = Matrix24::Zero();

  static Displacement Zero() { return {}; }
  static Displacement Constant(double dx, double dy);

  bool AllFinite() const { return offsets.allFinite(); }
};

Displacement operator+(const Displacement& a, const Displacement& b);
Displacement operator-(const Displacement& a, const Displacement& b);
Displacement operator*(double s, const Displacement& d);

// 3x3 projective transform. Always stored normalized: bottom-right entry 1
// when |h33| > 1e-9, otherwise unit Frobenius norm. Construction rejects
// matrices that are singular after normalization.
class Homography {
 public:
  static Homography Identity();
  static Homography Translation(double dx, double dy);
  static Homography Similarity(double scale, double tx, double ty);
  static Homography FromMatrix(const Eigen::Matrix3d& m);

  const Eigen::Matrix3d& matrix() const { return m_; }

  Homography Inverse() const;

  // Throws PointAtInfinity when the projective depth underflows.
  Point2 Apply(Point2 p) const;

  // Composition: (a * b).Apply(p) == a.Apply(b.Apply(p)).
  friend Homography operator*(const Homography& a, const Homography& b);

 private:
  explicit Homography(const Eigen::Matrix3d& m) : m_(m) {}
  Eigen::Matrix3d m_;
};

struct FrameConfig {
  int w_s = 1536;  // satellite patch width
  int w_t = 512;   // thermal patch width
  int w_r = 256;   // network input width
  double meters_per_pixel = 1.0;

  void Validate() const;
  // Converts a length in resized-satellite pixels to meters.
  double MetersPerResizedPixel() const {
    return static_cast<double>(w_s) / w_r * meters_per_pixel;
  }
};

// Square crop of the W_T thermal frame. Origin is integer-valued.
struct CropSpec {
  int x = 0;
  int y = 0;
  int size = 0;

  friend bool operator==(const CropSpec&, const CropSpec&) = default;
};

CornerSet CornersOfFrame(int width);

CornerSet DisplacementToCorners(const Displacement& d, const CornerSet& base);
Displacement CornersToDisplacement(const CornerSet& target, const CornerSet& base);

// Exact four-point fit. Throws DegenerateCorners if three points of either
// set are collinear (cross product below 1e-9 of the squared extent).
Homography Dlt(const CornerSet& src, const CornerSet& dst);

CornerSet ApplyHomography(const Homography& h, const CornerSet& pts);

Homography HomographyFromDisplacement(const Displacement& d, const CornerSet& base);
Displacement DisplacementFromHomography(const Homography& h, const CornerSet& base);

// Maps coordinates of a width-`from` raster onto its resampling to width
// `to` (pixel-center aligned): x_to = (x_from + 0.5) * to / from - 0.5.
Homography ResampleTransform(double from_width, double to_width);

// Maps resized-crop coordinates (W_R frame of the crop) to resized full
// thermal coordinates (W_R frame of the whole W_T image).
Homography CropViewTransform(const CropSpec& crop, const FrameConfig& frames);

// Lifts a displacement predicted on a view back to the full frames.
// `thermal_view` maps view-thermal coordinates to full resized thermal
// coordinates; `satellite_view` maps view-satellite coordinates to full
// resized satellite coordinates. Both are identity for an unmodified view.
Displacement RecoverWithViews(const Displacement& d_view,
                              const Homography& thermal_view,
                              const Homography& satellite_view,
                              const CornerSet& base);

// Displacement that the full thermal image induces under the homography
// implied by a crop-view prediction.
Displacement RecoverFullDisplacement(const Displacement& d_crop,
                                     const CropSpec& crop,
                                     const FrameConfig& frames);

}  // namespace homoguard

#endif  // HOMOGUARD_GEOMETRY_HPP_
