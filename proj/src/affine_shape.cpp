// Copyright 2026 The gaf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gaf/affine_shape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gaf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kIsotropyTolerance = 1e-6;

double wrap_half_open_angle(double angle) {
  // Normalizes to (-pi/2, pi/2].
  while (angle <= -kPi / 2) angle += kPi;
  while (angle > kPi / 2) angle -= kPi;
  return angle;
}

}  // namespace

ShapeMatrix AffineFeature::shape() const {
  return to_shape_matrix(short_radius, long_radius, orientation);
}

SymmetricEigen eigen_decompose(const Eigen::Matrix2d& m) {
  const double a = m(0, 0);
  const double b = m(0, 1);
  const double c = m(1, 1);

  const double tr = a + c;
  // tr^2 - 4 det = (a - c)^2 + 4 b^2, non-negative for symmetric input;
  // clamp residual rounding.
  const double disc = std::sqrt(std::max((a - c) * (a - c) + 4.0 * b * b, 0.0));
  double lo = 0.5 * (tr - disc);
  double hi = 0.5 * (tr + disc);

  SymmetricEigen e;
  if (std::abs(hi) >= std::abs(lo)) {
    e.major = hi;
    e.minor = lo;
  } else {
    e.major = lo;
    e.minor = hi;
  }
  e.saddle = e.major * e.minor <= 0.0;
  e.ratio = e.saddle ? 1.0 : e.major / e.minor;

  // Eigenvector of the minor eigenvalue; pick the better-conditioned of the
  // two equivalent forms. Isotropic matrices get angle 0 by convention.
  double vx, vy;
  if (std::abs(e.minor - a) >= std::abs(e.minor - c)) {
    vx = b;
    vy = e.minor - a;
  } else {
    vx = e.minor - c;
    vy = b;
  }
  if (vx == 0.0 && vy == 0.0)
    e.long_axis_angle = 0.0;
  else
    e.long_axis_angle = wrap_half_open_angle(std::atan2(vy, vx));
  return e;
}

double radius_scale_sq(double eigen_ratio) {
  if (eigen_ratio < 1.0)
    throw std::invalid_argument("radius_scale_sq: eigen ratio must be >= 1");
  return (3.0 + eigen_ratio * eigen_ratio) /
         (2.0 * eigen_ratio * (1.0 + eigen_ratio));
}

double aspect_sq(double eigen_ratio, double radius_scale_sq) {
  return (-1.0 + eigen_ratio + radius_scale_sq * eigen_ratio) / radius_scale_sq;
}

std::pair<double, double> radii_from_scale(double sigma, double radius_scale_sq,
                                           double aspect_sq) {
  const double alpha = std::sqrt(radius_scale_sq) * sigma;
  return {alpha, std::sqrt(aspect_sq) * alpha};
}

double normalized_log_response(double contrast, double radius_scale_sq,
                               double aspect_sq) {
  const double h2 = radius_scale_sq;
  const double k2 = aspect_sq;
  const double denom = std::pow((1.0 + h2) * (1.0 + h2 * k2), 1.5);
  return -contrast * h2 * std::sqrt(k2) * (2.0 + h2 * (1.0 + k2)) / denom;
}

double contrast_from_response(double response, double radius_scale_sq,
                              double aspect_sq) {
  const double h2 = radius_scale_sq;
  const double k2 = aspect_sq;
  const double num = std::pow((1.0 + h2) * (1.0 + h2 * k2), 1.5);
  return -response * num / (h2 * std::sqrt(k2) * (2.0 + h2 * (1.0 + k2)));
}

double scale_space_peak(double contrast, double baseline, double radius_scale_sq,
                        double aspect_sq) {
  const double w = std::sqrt(1.0 + 1.0 / radius_scale_sq) *
                   std::sqrt(1.0 + 1.0 / (radius_scale_sq * aspect_sq));
  return baseline + contrast / w;
}

double baseline_from_scale_space(double scale_space_value, double contrast,
                                 double radius_scale_sq, double aspect_sq) {
  const double w = std::sqrt(1.0 + 1.0 / radius_scale_sq) *
                   std::sqrt(1.0 + 1.0 / (radius_scale_sq * aspect_sq));
  return scale_space_value - contrast / w;
}

double orientation_from_eigen(const SymmetricEigen& eigen) {
  if (eigen.ratio < 1.0 + kIsotropyTolerance) return 0.0;
  return eigen.long_axis_angle;
}

ShapeMatrix to_shape_matrix(double short_radius, double long_radius,
                            double orientation) {
  const double alpha = short_radius;
  const double beta = long_radius;
  ShapeMatrix m;
  if (std::abs(std::abs(orientation) - kPi / 2) < 1e-9) {
    m.xx = alpha;
    m.xy = 0.0;
    m.yy = beta;
    return m;
  }
  const double t = std::tan(orientation);
  const double t2 = t * t;
  m.xx = (beta + t2 * alpha) / (1.0 + t2);
  m.xy = t * (alpha - beta) / (1.0 + t2);
  m.yy = (alpha + t2 * beta) / (1.0 + t2);
  return m;
}

double aspect_from_eigen_ratio(double eigen_ratio) {
  const double r = eigen_ratio;
  return std::sqrt((r + 3.0 * r * r * r) / (3.0 + r * r));
}

double eigen_ratio_from_aspect(double aspect) {
  if (aspect <= 1.0) return 1.0;
  double lo = 1.0;
  double hi = 1e7;
  while ((hi - lo) > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (aspect_from_eigen_ratio(mid) < aspect)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double edge_response(double eigen_ratio) {
  return (eigen_ratio + 1.0) * (eigen_ratio + 1.0) / eigen_ratio;
}

bool edge_ratio_accept(const SymmetricEigen& eigen, double max_ratio) {
  return !eigen.saddle && eigen.ratio <= max_ratio;
}

double eigen_ratio_at_blur(double detection_ratio, double blur_sq_ratio) {
  const double h2 = radius_scale_sq(detection_ratio);
  const double k2 = aspect_sq(detection_ratio, h2);
  return (k2 * h2 + blur_sq_ratio) / (h2 + blur_sq_ratio);
}

double detection_ratio_from_measurement(double measured_ratio,
                                        double blur_sq_ratio) {
  if (measured_ratio <= 1.0) return 1.0;
  double lo = 1.0;
  double hi = 2.0;
  while (eigen_ratio_at_blur(hi, blur_sq_ratio) < measured_ratio && hi < 1e12)
    hi *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (eigen_ratio_at_blur(mid, blur_sq_ratio) < measured_ratio)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

AffineFeature recover_feature(double x, double y, double sigma,
                              double eigen_ratio, double long_axis_angle,
                              double response, double scale_space_value) {
  AffineFeature f;
  f.x = x;
  f.y = y;
  f.sigma = sigma;
  f.eigen_ratio = eigen_ratio;
  f.radius_scale_sq = radius_scale_sq(eigen_ratio);
  f.aspect_sq = aspect_sq(eigen_ratio, f.radius_scale_sq);
  std::tie(f.short_radius, f.long_radius) =
      radii_from_scale(sigma, f.radius_scale_sq, f.aspect_sq);
  f.orientation =
      eigen_ratio < 1.0 + kIsotropyTolerance ? 0.0 : wrap_half_open_angle(long_axis_angle);
  f.response = response;
  f.contrast = contrast_from_response(response, f.radius_scale_sq, f.aspect_sq);
  f.scale_space_value = scale_space_value;
  f.baseline = baseline_from_scale_space(scale_space_value, f.contrast,
                                         f.radius_scale_sq, f.aspect_sq);
  return f;
}

std::vector<AffineFeature> filter_false_features(std::vector<AffineFeature> features,
                                                 const FeatureFilterConfig& config) {
  std::erase_if(features, [&](const AffineFeature& f) {
    return std::abs(f.contrast) < config.min_contrast ||
           f.short_radius < config.min_short_radius ||
           f.long_radius < config.min_long_radius;
  });

  // Strongest response first so each duplicate group keeps its best member.
  std::stable_sort(features.begin(), features.end(),
                   [](const AffineFeature& a, const AffineFeature& b) {
                     return std::abs(a.response) > std::abs(b.response);
                   });

  std::vector<AffineFeature> kept;
  kept.reserve(features.size());
  for (const AffineFeature& f : features) {
    bool duplicate = false;
    for (const AffineFeature& g : kept) {
      const double dist = std::hypot(f.x - g.x, f.y - g.y);
      if (dist >= config.merge_dist * std::min(f.short_radius, g.short_radius))
        continue;
      const double rs = std::max(f.short_radius / g.short_radius,
                                 g.short_radius / f.short_radius);
      const double rl = std::max(f.long_radius / g.long_radius,
                                 g.long_radius / f.long_radius);
      if (rs > config.merge_scale || rl > config.merge_scale) continue;
      const bool near_isotropic = std::min(f.aspect(), g.aspect()) < 1.1;
      double da = std::fmod(std::abs(f.orientation - g.orientation), kPi);
      da = std::min(da, kPi - da);
      if (near_isotropic || da < config.merge_angle) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(f);
  }
  return kept;
}

}  // namespace gaf
