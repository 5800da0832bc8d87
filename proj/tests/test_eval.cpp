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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gaf/eval.hpp"

using namespace gaf;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

GaussianSignalSpec truth(double cx, double cy, double alpha, double beta,
                         double theta, double c, double d) {
  GaussianSignalSpec s;
  s.center_x = cx;
  s.center_y = cy;
  s.short_radius = alpha;
  s.long_radius = beta;
  s.orientation = theta;
  s.contrast = c;
  s.baseline = d;
  return s;
}

AffineFeature detection(const GaussianSignalSpec& s) {
  AffineFeature f;
  f.x = s.center_x;
  f.y = s.center_y;
  f.short_radius = s.short_radius;
  f.long_radius = s.long_radius;
  f.orientation = s.orientation;
  f.contrast = s.contrast;
  f.baseline = s.baseline;
  return f;
}

}  // namespace

TEST_CASE("match_features: exact hit") {
  const std::vector<GaussianSignalSpec> truths{truth(50, 50, 5, 5, 0, 100, 30)};
  const std::vector<AffineFeature> detected{detection(truths[0])};
  const auto matches = match_features(detected, truths, 5.0);
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].distance == Approx(0.0));
}

TEST_CASE("match_features: beyond max_dist stays unmatched") {
  const std::vector<GaussianSignalSpec> truths{truth(50, 50, 5, 5, 0, 100, 30)};
  auto moved = detection(truths[0]);
  moved.x += 5.0 + 1e-6;
  CHECK(match_features({moved}, truths, 5.0).empty());
  moved.x = truths[0].center_x + 4.9;
  CHECK(match_features({moved}, truths, 5.0).size() == 1);
}

TEST_CASE("match_features picks the globally nearest pairing") {
  // Truths at x = 0 and 10, detections at x = 4 and -1. Detection-order
  // greedy would bind detection 0 to truth 0 (distance 4); global extraction
  // binds detection 1 to truth 0 first (distance 1), then detection 0 to
  // truth 1 (distance 6). The 2x2 assignment enumeration gives the same.
  const std::vector<GaussianSignalSpec> truths{truth(0, 0, 5, 5, 0, 100, 30),
                                               truth(10, 0, 5, 5, 0, 100, 30)};
  std::vector<AffineFeature> detected{detection(truths[0]), detection(truths[0])};
  detected[0].x = 4.0;
  detected[1].x = -1.0;

  const auto matches = match_features(detected, truths, 50.0);
  REQUIRE(matches.size() == 2);
  CHECK(matches[0].detected == 1);
  CHECK(matches[0].truth == 0);
  CHECK(matches[0].distance == Approx(1.0));
  CHECK(matches[1].detected == 0);
  CHECK(matches[1].truth == 1);
  CHECK(matches[1].distance == Approx(6.0));
}

TEST_CASE("parameter_errors: self comparison is all zeros") {
  const std::vector<GaussianSignalSpec> truths{truth(50, 60, 4, 9, 0.8, -120, 200),
                                               truth(150, 40, 6, 6, 0.0, 80, 10)};
  const std::vector<AffineFeature> detected{detection(truths[0]), detection(truths[1])};
  const auto report =
      parameter_errors(match_features(detected, truths, 5.0), detected, truths);
  CHECK(report.n_matched == 2);
  CHECK(report.false_positive_count == 0);
  CHECK(mean(report.position_err) == Approx(0.0));
  CHECK(mean(report.aspect_ratio_rel_err) == Approx(0.0));
  CHECK(mean(report.short_radius_rel_err) == Approx(0.0));
  CHECK(mean(report.contrast_rel_err) == Approx(0.0));
  CHECK(mean(report.baseline_rel_err) == Approx(0.0));
  CHECK(mean(report.orientation_err) == Approx(0.0));
}

TEST_CASE("parameter_errors: orientation is modulo pi") {
  const std::vector<GaussianSignalSpec> truths{truth(50, 50, 4, 8, 0.4, 100, 30)};
  auto f = detection(truths[0]);
  f.orientation = 0.4 + kPi;
  const auto report =
      parameter_errors(match_features({f}, truths, 5.0), {f}, truths);
  CHECK(report.orientation_err[0] == Approx(0.0).scale(1));
}

TEST_CASE("parameter_errors: near-isotropic truth reports zero orientation error") {
  const std::vector<GaussianSignalSpec> truths{truth(50, 50, 5, 5.25, 0.0, 100, 30)};
  auto f = detection(truths[0]);
  f.orientation = 1.3;  // arbitrary; aspect 1.05 < 1.1 guard
  const auto report =
      parameter_errors(match_features({f}, truths, 5.0), {f}, truths);
  CHECK(report.orientation_err[0] == 0.0);
}

TEST_CASE("ellipse_overlap: identical, disjoint, nested") {
  const ShapeMatrix circle1 = to_shape_matrix(1.0, 1.0, 0.0);
  const ShapeMatrix circle2 = to_shape_matrix(2.0, 2.0, 0.0);
  const Eigen::Vector2d origin(0, 0);

  CHECK(ellipse_overlap(origin, circle2, origin, circle2) == Approx(1.0));
  CHECK(ellipse_overlap(origin, circle1, Eigen::Vector2d(10, 0), circle1) ==
        Approx(0.0));
  // Concentric radius-1 and radius-2 circles: area ratio pi / 4 pi.
  CHECK(ellipse_overlap(origin, circle1, origin, circle2) == Approx(0.25).epsilon(0.04));
}

TEST_CASE("ellipse_overlap is symmetric and rigid-motion invariant") {
  const ShapeMatrix a = to_shape_matrix(2.0, 6.0, 0.3);
  const ShapeMatrix b = to_shape_matrix(3.0, 4.0, -0.9);
  const Eigen::Vector2d ca(1.0, 2.0), cb(3.5, 0.5);

  const double ab = ellipse_overlap(ca, a, cb, b);
  const double ba = ellipse_overlap(cb, b, ca, a);
  CHECK(ab == Approx(ba).epsilon(0.015));

  // Rotate both ellipses and centers by 40 degrees and translate. The shape
  // parameterization places the long axis at world angle -theta, so rotating
  // the ellipse by +phi subtracts phi from the parameter.
  const double phi = 40.0 * kPi / 180.0;
  const auto rotate_world = [&](const ShapeMatrix& m, double angle) {
    const SymmetricEigen e = eigen_decompose(m.matrix());
    // Positive definite: minor eigenvalue is the short radius; the major
    // eigenvector (the actual long axis) sits a quarter turn from it.
    const double world_long_axis = e.long_axis_angle + kPi / 2;
    return to_shape_matrix(e.minor, e.major, -(world_long_axis + angle));
  };
  Eigen::Rotation2D<double> rot(phi);
  const Eigen::Vector2d shift(7.0, -3.0);
  const double moved = ellipse_overlap(rot * ca + shift, rotate_world(a, phi),
                                       rot * cb + shift, rotate_world(b, phi));
  CHECK(moved == Approx(ab).epsilon(0.02));

  // Scale normalization keeps symmetry.
  CHECK(ellipse_overlap(ca, a, cb, b, true) ==
        Approx(ellipse_overlap(cb, b, ca, a, true)).epsilon(0.015));
}

TEST_CASE("rotation_covariance_suite on an isotropic blob") {
  GaussianSignalSpec spec = truth(128, 128, 9, 9, 0, 180, 50);
  const std::vector<double> angles{0.0, kPi / 2};
  const auto report = rotation_covariance_suite(spec, angles, DetectorConfig{});
  REQUIRE(report.all_detected());
  CHECK(RotationCovarianceReport::spread(report.short_radius) < 0.05);
  CHECK(RotationCovarianceReport::spread(report.contrast) < 0.05);
}

TEST_CASE("emit_curves: pinned rows and range invariant") {
  const std::string h_csv = emit_curves(CurveKind::scale_ratio_vs_eigen_ratio, 1.0,
                                        1000.0, 400);
  std::istringstream in(h_csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "r,H");
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "1,");
  CHECK(std::stod(line.substr(2)) == Approx(1.0));

  const double h_min = 2.0 * std::sqrt(3.0) - 3.0;
  while (std::getline(in, line)) {
    const double h = std::stod(line.substr(line.find(',') + 1));
    CHECK(h >= h_min - 1e-12);
    CHECK(h <= 1.0 + 1e-12);
  }

  // Aspect curve at the edge-threshold ratio.
  const std::string k_csv = emit_curves(CurveKind::aspect_vs_eigen_ratio, 535.0,
                                        535.0, 1);
  CHECK(k_csv.find("535,40.06") != std::string::npos);

  // Response ridge at h = k = 1 carries the -1/2 extremum.
  const std::string ridge = emit_curves(CurveKind::response_ridge, 1.0, 1.0, 1);
  CHECK(ridge.find("1,1,-0.5") != std::string::npos);
}
