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

#include <string>
#include <vector>

#include "gaf/affine_shape.hpp"
#include "gaf/detector.hpp"
#include "gaf/synth.hpp"

namespace gaf {

struct FeatureMatch {
  int detected = -1;   // index into the detected list
  int truth = -1;      // index into the truth list
  double distance = 0; // center distance, pixels
};

/// Greedy globally-nearest matching by center distance: repeatedly pairs the
/// closest unmatched (detected, truth) pair until nothing within max_dist
/// remains. Each side matches at most once. Deterministic.
std::vector<FeatureMatch> match_features(const std::vector<AffineFeature>& detected,
                                         const std::vector<GaussianSignalSpec>& truths,
                                         double max_dist);

/// Per-match error vectors plus counters. Orientation errors are taken
/// modulo pi and reported as 0 when the true aspect is below 1.1, where
/// orientation is meaningless.
struct EvalReport {
  int n_truth = 0;
  int n_detected = 0;
  int n_matched = 0;
  int false_positive_count = 0;
  std::vector<double> position_err;
  std::vector<double> aspect_ratio_rel_err;
  std::vector<double> short_radius_rel_err;
  std::vector<double> contrast_rel_err;
  std::vector<double> baseline_rel_err;
  std::vector<double> orientation_err;  // radians, mod pi
};

EvalReport parameter_errors(const std::vector<FeatureMatch>& matches,
                            const std::vector<AffineFeature>& detected,
                            const std::vector<GaussianSignalSpec>& truths);

double mean(const std::vector<double>& values);
double median(std::vector<double> values);

/// Smallest angular distance modulo pi.
double orientation_distance(double a, double b);

/// Area(intersection) / area(union) of two ellipses
/// { p : (p - mu)^T M^-2 (p - mu) <= 1 } (semi-axes = the shape radii),
/// estimated by grid sampling over the joint bounding box with at least
/// samples_per_axis cells on the longer side. With scale_normalize both
/// shapes are rescaled about their centers so their geometric-mean nominal
/// radius becomes 30 px (keeps the statistic symmetric in its arguments).
double ellipse_overlap(const Eigen::Vector2d& center1, const ShapeMatrix& shape1,
                       const Eigen::Vector2d& center2, const ShapeMatrix& shape2,
                       bool scale_normalize = false, int samples_per_axis = 200);

/// Renders the spec re-oriented by each angle, runs the full detector, and
/// records the recovered parameters of the match nearest the true center.
struct RotationCovarianceReport {
  std::vector<double> angles;           // applied rotations, radians
  std::vector<bool> detected;           // per angle
  std::vector<double> short_radius;     // recovered, per angle
  std::vector<double> long_radius;
  std::vector<double> contrast;
  std::vector<double> baseline;
  std::vector<double> orientation_err;  // |recovered - expected| mod pi

  bool all_detected() const;
  /// (max - min) / mean of a recovered parameter series.
  static double spread(const std::vector<double>& values);
};

RotationCovarianceReport rotation_covariance_suite(const GaussianSignalSpec& spec,
                                                   const std::vector<double>& angles,
                                                   const DetectorConfig& config,
                                                   int width = 256, int height = 256);

/// Curve tabulation for external plotting.
enum class CurveKind {
  scale_ratio_vs_eigen_ratio,  // "H_vs_r": (r, H(r))
  aspect_vs_eigen_ratio,       // "k_vs_r": (r, k(r))
  response_ridge,              // "ridge": (h, k, normalized response at c=1)
};

/// CSV rows (with header) over a uniform grid. The ridge surface takes the
/// same grid on both axes.
std::string emit_curves(CurveKind kind, double grid_min, double grid_max,
                        int grid_count);

}  // namespace gaf
