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

#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace gaf {

// ---------------------------------------------------------------------------
// The closed-form inversion: a single isotropic-Gaussian blob with short
// radius alpha, long radius beta, contrast c and baseline d produces a
// scale-normalized Laplacian extremum at exactly one scale sigma. Writing
// H = (alpha/sigma)^2 and K = (beta/alpha)^2, the extremum condition ties H
// and K together, and the ratio r of the two Hessian eigenvalues of the
// smoothed image at that point determines both. All functions here are pure
// double-precision algebra on that model.
// ---------------------------------------------------------------------------

/// Symmetric positive definite 2x2 matrix [[xx, xy], [xy, yy]] encoding an
/// ellipse with semi-axes (short_radius, long_radius); linear radius units,
/// not squared. trace == alpha + beta and det == alpha * beta exactly.
struct ShapeMatrix {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;

  double trace() const { return xx + yy; }
  double det() const { return xx * yy - xy * xy; }
  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << xx, xy, xy, yy;
    return m;
  }
};

/// Full parameter set recovered for one blob.
struct AffineFeature {
  double x = 0.0;                  // center, input-image pixels
  double y = 0.0;
  double sigma = 0.0;              // detected scale, input-image pixels
  double eigen_ratio = 1.0;        // r = e1/e2 of the scale-space Hessian, >= 1
  double radius_scale_sq = 1.0;    // H = (alpha/sigma)^2, in [2*sqrt(3)-3, 1]
  double aspect_sq = 1.0;          // K = (beta/alpha)^2, >= 1
  double short_radius = 0.0;       // alpha, pixels
  double long_radius = 0.0;        // beta, pixels
  double orientation = 0.0;        // long-axis angle, radians in (-pi/2, pi/2]
  double contrast = 0.0;           // c, signed intensity units
  double baseline = 0.0;           // d, intensity units
  double response = 0.0;           // normalized LoG value at the extremum
  double scale_space_value = 0.0;  // smoothed intensity G*I at the extremum

  double aspect() const { return long_radius / short_radius; }
  ShapeMatrix shape() const;
};

/// Eigen decomposition of a symmetric 2x2 matrix, ordered by magnitude.
struct SymmetricEigen {
  double major = 0.0;            // eigenvalue of larger magnitude (e1)
  double minor = 0.0;            // eigenvalue of smaller magnitude (e2)
  double ratio = 1.0;            // e1/e2; >= 1 whenever the signs agree
  double long_axis_angle = 0.0;  // direction of the e2 eigenvector, (-pi/2, pi/2]
  bool saddle = false;           // eigenvalues of opposite sign
};

/// Closed-form decomposition: lambda = (tr +- sqrt(tr^2 - 4 det)) / 2.
/// For an elliptic blob the e2 (weaker-curvature) eigenvector points along
/// the blob's long axis. A saddle (opposite-signed pair) is flagged, not an
/// error; callers reject such candidates.
SymmetricEigen eigen_decompose(const Eigen::Matrix2d& m);

/// H = (3 + r^2) / (2 r (1 + r)). Strictly decreasing on [1, 3+2*sqrt(3)],
/// minimum 2*sqrt(3)-3 at r = 3+2*sqrt(3), then rising toward 1/2.
double radius_scale_sq(double eigen_ratio);

/// K = (-1 + r + H r) / H given r and H = radius_scale_sq(r).
double aspect_sq(double eigen_ratio, double radius_scale_sq);

/// (alpha, beta) = (sqrt(H) sigma, sqrt(K) alpha).
std::pair<double, double> radii_from_scale(double sigma, double radius_scale_sq,
                                           double aspect_sq);

/// Normalized LoG value at the center of the model blob with unit-free shape
/// (H, K) and contrast c:  -c H sqrt(K) (2 + H(1+K)) / ((1+H)(1+HK))^(3/2).
double normalized_log_response(double contrast, double radius_scale_sq,
                               double aspect_sq);

/// Exact algebraic inverse of normalized_log_response in c.
double contrast_from_response(double response, double radius_scale_sq,
                              double aspect_sq);

/// Smoothed peak value of the model blob: d + c / (sqrt(1+1/H) sqrt(1+1/(HK))).
double scale_space_peak(double contrast, double baseline, double radius_scale_sq,
                        double aspect_sq);

/// Inverse of scale_space_peak in d.
double baseline_from_scale_space(double scale_space_value, double contrast,
                                 double radius_scale_sq, double aspect_sq);

/// Long-axis direction from the eigen pair; near-isotropic pairs
/// (r < 1 + 1e-6) return 0 by convention since orientation is undefined.
double orientation_from_eigen(const SymmetricEigen& eigen);

/// Ellipse as a symmetric matrix: the rotation of diag(beta, alpha) by the
/// orientation angle, written with t = tan(theta) as
///   xx = (beta + t^2 alpha) / (1 + t^2)
///   xy = t (alpha - beta) / (1 + t^2)
///   yy = (alpha + t^2 beta) / (1 + t^2)
/// with the |theta| = pi/2 limit (alpha, 0, beta).
ShapeMatrix to_shape_matrix(double short_radius, double long_radius,
                            double orientation);

/// Aspect ratio k = beta/alpha reachable at eigen ratio r:
/// k = sqrt((r + 3 r^3) / (3 + r^2)). Strictly increasing.
double aspect_from_eigen_ratio(double eigen_ratio);

/// Inverse of aspect_from_eigen_ratio by bisection on [1, 1e7], relative
/// tolerance 1e-9.
double eigen_ratio_from_aspect(double aspect);

/// Edge statistic tr^2/det = (r+1)^2/r; minimal value 4 at r = 1 and strictly
/// increasing for r > 1.
double edge_response(double eigen_ratio);

/// Accepts blob-like candidates: same-signed eigenvalues with r <= max_ratio.
bool edge_ratio_accept(const SymmetricEigen& eigen, double max_ratio);

/// Eigen ratio of the model blob's Hessian when the image is smoothed at
/// blur_sq_ratio * sigma_det^2 instead of the detection scale itself:
///   (K H + eta) / (H + eta)  with eta = blur_sq_ratio.
/// At eta = 1 this is the detection-scale ratio (1 + HK) / (1 + H).
double eigen_ratio_at_blur(double detection_ratio, double blur_sq_ratio);

/// Inverts eigen_ratio_at_blur in the detection ratio by bisection: given a
/// ratio measured on a level blurred eta times (squared) past the detection
/// scale, returns the equivalent detection-scale ratio. Monotone; exact
/// identity at eta = 1. Measuring on a coarser level and mapping back resolves
/// extreme aspect ratios that unit-spacing differences cannot.
double detection_ratio_from_measurement(double measured_ratio,
                                        double blur_sq_ratio);

/// Chains the closed forms: (H, K) from the eigen ratio, radii from the
/// scale, orientation from the eigenvector, contrast from the normalized LoG
/// response, baseline from the smoothed value.
AffineFeature recover_feature(double x, double y, double sigma,
                              double eigen_ratio, double long_axis_angle,
                              double response, double scale_space_value);

/// Thresholds for dropping sampling artifacts and merging duplicates.
struct FeatureFilterConfig {
  double min_contrast = 8.0;      // |c| floor, intensity units
  double min_short_radius = 1.5;  // alpha floor, pixels
  double min_long_radius = 1.5;   // beta floor, pixels
  double merge_dist = 1.0;        // center distance, units of min short radius
  double merge_scale = 1.5;       // max radius ratio between duplicates
  double merge_angle = 0.26179938779914944;  // 15 degrees
};

/// Drops features below the contrast/radius floors, then merges duplicates
/// (close centers, similar radii, similar orientation); the duplicate with
/// the larger |response| survives. Orientation agreement is not required when
/// either feature is near-isotropic (aspect < 1.1), where the angle carries
/// no information.
std::vector<AffineFeature> filter_false_features(std::vector<AffineFeature> features,
                                                 const FeatureFilterConfig& config);

}  // namespace gaf
