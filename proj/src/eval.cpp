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

#include "gaf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace gaf {

namespace {

constexpr double kPi = std::numbers::pi;

double relative_error(double measured, double truth) {
  const double denom = std::abs(truth);
  if (denom < 1e-12) return std::abs(measured - truth);
  return std::abs(measured - truth) / denom;
}

}  // namespace

std::vector<FeatureMatch> match_features(const std::vector<AffineFeature>& detected,
                                         const std::vector<GaussianSignalSpec>& truths,
                                         double max_dist) {
  struct Pair {
    double distance;
    int detected;
    int truth;
  };
  std::vector<Pair> pairs;
  pairs.reserve(detected.size() * truths.size());
  for (int i = 0; i < static_cast<int>(detected.size()); ++i)
    for (int j = 0; j < static_cast<int>(truths.size()); ++j) {
      const double d = std::hypot(detected[i].x - truths[j].center_x,
                                  detected[i].y - truths[j].center_y);
      if (d <= max_dist) pairs.push_back({d, i, j});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.detected != b.detected) return a.detected < b.detected;
    return a.truth < b.truth;
  });

  std::vector<bool> used_detected(detected.size(), false);
  std::vector<bool> used_truth(truths.size(), false);
  std::vector<FeatureMatch> matches;
  for (const Pair& p : pairs) {
    if (used_detected[p.detected] || used_truth[p.truth]) continue;
    used_detected[p.detected] = true;
    used_truth[p.truth] = true;
    matches.push_back({p.detected, p.truth, p.distance});
  }
  return matches;
}

double orientation_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

EvalReport parameter_errors(const std::vector<FeatureMatch>& matches,
                            const std::vector<AffineFeature>& detected,
                            const std::vector<GaussianSignalSpec>& truths) {
  EvalReport report;
  report.n_truth = static_cast<int>(truths.size());
  report.n_detected = static_cast<int>(detected.size());
  report.n_matched = static_cast<int>(matches.size());
  report.false_positive_count = report.n_detected - report.n_matched;
  for (const FeatureMatch& m : matches) {
    const AffineFeature& f = detected[m.detected];
    const GaussianSignalSpec& t = truths[m.truth];
    report.position_err.push_back(m.distance);
    report.aspect_ratio_rel_err.push_back(relative_error(f.aspect(), t.aspect()));
    report.short_radius_rel_err.push_back(
        relative_error(f.short_radius, t.short_radius));
    report.contrast_rel_err.push_back(relative_error(f.contrast, t.contrast));
    report.baseline_rel_err.push_back(relative_error(f.baseline, t.baseline));
    report.orientation_err.push_back(
        t.aspect() < 1.1 ? 0.0 : orientation_distance(f.orientation, t.orientation));
  }
  return report;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
  return 0.5 * (values[mid - 1] + hi);
}

namespace {

struct EllipseTest {
  Eigen::Vector2d center;
  Eigen::Matrix2d inv_sq;  // M^-2
  double ext_x, ext_y;     // bounding half extents: row norms of M

  EllipseTest(const Eigen::Vector2d& c, ShapeMatrix m, double scale) {
    ShapeMatrix scaled{m.xx * scale, m.xy * scale, m.yy * scale};
    center = c;
    const Eigen::Matrix2d mat = scaled.matrix();
    inv_sq = (mat * mat).inverse();
    ext_x = mat.row(0).norm();
    ext_y = mat.row(1).norm();
  }
  bool contains(double x, double y) const {
    const Eigen::Vector2d d(x - center.x(), y - center.y());
    return d.dot(inv_sq * d) <= 1.0;
  }
};

}  // namespace

double ellipse_overlap(const Eigen::Vector2d& center1, const ShapeMatrix& shape1,
                       const Eigen::Vector2d& center2, const ShapeMatrix& shape2,
                       bool scale_normalize, int samples_per_axis) {
  double scale = 1.0;
  if (scale_normalize) {
    // Geometric mean of both nominal radii -> 30 px; symmetric in arguments.
    const double nominal = std::pow(shape1.det() * shape2.det(), 0.25);
    scale = 30.0 / nominal;
  }
  const EllipseTest e1(center1, shape1, scale);
  const EllipseTest e2(center2, shape2, scale);

  const double x0 = std::min(e1.center.x() - e1.ext_x, e2.center.x() - e2.ext_x);
  const double x1 = std::max(e1.center.x() + e1.ext_x, e2.center.x() + e2.ext_x);
  const double y0 = std::min(e1.center.y() - e1.ext_y, e2.center.y() - e2.ext_y);
  const double y1 = std::max(e1.center.y() + e1.ext_y, e2.center.y() + e2.ext_y);

  const double step = std::max(x1 - x0, y1 - y0) / samples_per_axis;
  const int nx = static_cast<int>(std::ceil((x1 - x0) / step));
  const int ny = static_cast<int>(std::ceil((y1 - y0) / step));

  long inter = 0;
  long uni = 0;
  for (int iy = 0; iy < ny; ++iy) {
    const double y = y0 + (iy + 0.5) * step;
    for (int ix = 0; ix < nx; ++ix) {
      const double x = x0 + (ix + 0.5) * step;
      const bool a = e1.contains(x, y);
      const bool b = e2.contains(x, y);
      inter += a && b;
      uni += a || b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

bool RotationCovarianceReport::all_detected() const {
  for (bool d : detected)
    if (!d) return false;
  return true;
}

double RotationCovarianceReport::spread(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double m = mean(values);
  return m == 0.0 ? 0.0 : (*hi - *lo) / std::abs(m);
}

RotationCovarianceReport rotation_covariance_suite(const GaussianSignalSpec& spec,
                                                   const std::vector<double>& angles,
                                                   const DetectorConfig& config,
                                                   int width, int height) {
  RotationCovarianceReport report;
  report.angles = angles;
  for (double angle : angles) {
    GaussianSignalSpec rotated = spec;
    rotated.orientation = spec.orientation + angle;
    while (rotated.orientation > kPi / 2) rotated.orientation -= kPi;
    while (rotated.orientation <= -kPi / 2) rotated.orientation += kPi;

    const ImageD img = render(rotated, width, height);
    const std::vector<AffineFeature> features = detect_features(img, config);

    const AffineFeature* best = nullptr;
    double best_dist = 5.0;
    for (const AffineFeature& f : features) {
      const double d = std::hypot(f.x - spec.center_x, f.y - spec.center_y);
      if (d < best_dist) {
        best = &f;
        best_dist = d;
      }
    }
    report.detected.push_back(best != nullptr);
    if (best) {
      report.short_radius.push_back(best->short_radius);
      report.long_radius.push_back(best->long_radius);
      report.contrast.push_back(best->contrast);
      report.baseline.push_back(best->baseline);
      report.orientation_err.push_back(
          orientation_distance(best->orientation, rotated.orientation));
    }
  }
  return report;
}

std::string emit_curves(CurveKind kind, double grid_min, double grid_max,
                        int grid_count) {
  std::ostringstream out;
  char line[128];
  const auto value = [&](double lo, double hi, int i, int n) {
    return n <= 1 ? lo : lo + (hi - lo) * i / (n - 1);
  };
  switch (kind) {
    case CurveKind::scale_ratio_vs_eigen_ratio:
      out << "r,H\n";
      for (int i = 0; i < grid_count; ++i) {
        const double r = value(grid_min, grid_max, i, grid_count);
        std::snprintf(line, sizeof line, "%.9g,%.9g\n", r, radius_scale_sq(r));
        out << line;
      }
      break;
    case CurveKind::aspect_vs_eigen_ratio:
      out << "r,k\n";
      for (int i = 0; i < grid_count; ++i) {
        const double r = value(grid_min, grid_max, i, grid_count);
        std::snprintf(line, sizeof line, "%.9g,%.9g\n", r, aspect_from_eigen_ratio(r));
        out << line;
      }
      break;
    case CurveKind::response_ridge:
      out << "h,k,response\n";
      for (int i = 0; i < grid_count; ++i) {
        const double h = value(grid_min, grid_max, i, grid_count);
        for (int j = 0; j < grid_count; ++j) {
          const double k = value(grid_min, grid_max, j, grid_count);
          const double response = normalized_log_response(1.0, h * h, k * k);
          std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g\n", h, k, response);
          out << line;
        }
      }
      break;
  }
  return out.str();
}

}  // namespace gaf
