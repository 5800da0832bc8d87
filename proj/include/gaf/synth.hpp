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

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gaf/image.hpp"

namespace gaf {

/// Ground-truth generator parameters for one rendered blob.
struct GaussianSignalSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  double short_radius = 1.0;  // alpha
  double long_radius = 1.0;   // beta >= alpha
  double orientation = 0.0;   // long-axis angle, radians
  double contrast = 0.0;      // c, signed
  double baseline = 0.0;      // d, in [0, 255]

  double aspect() const { return long_radius / short_radius; }
  double nominal_radius() const { return std::sqrt(short_radius * long_radius); }
};

namespace detail {

/// Deterministic standard normal: Box-Muller over mt19937_64 uniforms.
/// Same seed, same sequence, on any platform with IEEE doubles.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() {
    return (rng_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
  }
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace detail

/// Evaluates the model blob at pixel centers, clamps to [0, 255], and by
/// default quantizes to 256 integer levels so synthetic tests include
/// digitization effects.
template <typename Scalar = double>
Image<Scalar> render(const GaussianSignalSpec& spec, int width, int height,
                     bool quantize = true) {
  if (spec.short_radius <= 0.0)
    throw std::invalid_argument("render: degenerate radius");
  Image<Scalar> img(height, width);
  const double ct = std::cos(spec.orientation);
  const double st = std::sin(spec.orientation);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double dx = x - spec.center_x;
      const double dy = y - spec.center_y;
      const double along = ct * dx + st * dy;    // long-axis coordinate
      const double across = -st * dx + ct * dy;  // short-axis coordinate
      double v = spec.contrast *
                     std::exp(-0.5 * (along * along / (spec.long_radius * spec.long_radius) +
                                      across * across / (spec.short_radius * spec.short_radius))) +
                 spec.baseline;
      v = std::clamp(v, 0.0, 255.0);
      if (quantize) v = std::round(v);
      img(y, x) = static_cast<Scalar>(v);
    }
  return img;
}

/// Superposition of several blobs over their mean baseline.
template <typename Scalar = double>
Image<Scalar> render(std::span<const GaussianSignalSpec> specs, int width,
                     int height, bool quantize = true) {
  if (specs.empty()) throw std::invalid_argument("render: no specs");
  double baseline = 0.0;
  for (const GaussianSignalSpec& s : specs) baseline += s.baseline;
  baseline /= static_cast<double>(specs.size());

  Image<Scalar> img(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double v = baseline;
      for (const GaussianSignalSpec& s : specs) {
        if (s.short_radius <= 0.0) throw std::invalid_argument("render: degenerate radius");
        const double dx = x - s.center_x;
        const double dy = y - s.center_y;
        const double ct = std::cos(s.orientation);
        const double st = std::sin(s.orientation);
        const double along = ct * dx + st * dy;
        const double across = -st * dx + ct * dy;
        v += s.contrast * std::exp(-0.5 * (along * along / (s.long_radius * s.long_radius) +
                                           across * across / (s.short_radius * s.short_radius)));
      }
      v = std::clamp(v, 0.0, 255.0);
      if (quantize) v = std::round(v);
      img(y, x) = static_cast<Scalar>(v);
    }
  return img;
}

/// Adds i.i.d. zero-mean Gaussian noise and clamps to [0, 255]. The generator
/// (mt19937_64 + Box-Muller, row-major pixel order) is fixed so identical
/// seeds give identical images.
template <typename Scalar>
Image<Scalar> add_gaussian_noise(const Image<Scalar>& img, double stddev,
                                 std::uint64_t seed) {
  if (stddev < 0) throw std::invalid_argument("add_gaussian_noise: stddev must be >= 0");
  if (stddev == 0) return img;
  Image<Scalar> out(img.rows(), img.cols());
  detail::NormalSampler normal(seed);
  for (int y = 0; y < image_height(img); ++y)
    for (int x = 0; x < image_width(img); ++x) {
      const double v = img(y, x) + stddev * normal.next();
      out(y, x) = static_cast<Scalar>(std::clamp(v, 0.0, 255.0));
    }
  return out;
}

/// Sampling ranges for random ground-truth specs.
struct SpecRanges {
  double nominal_min = 5.0;    // sqrt(alpha*beta)
  double nominal_max = 40.0;
  double aspect_min = 1.0;     // beta/alpha
  double aspect_max = 30.0;
  double contrast_floor = 16.0;  // |c| >= floor keeps targets detectable
  double contrast_max = 255.0;
};

/// Uniform sampling within the ranges, constrained so the blob fits the
/// frame: 3*beta plus the center offset stays inside the half-extent, and
/// (d, d+c) both land in [0, 255] so the rendered signal is not clipped.
GaussianSignalSpec random_spec(const SpecRanges& ranges, std::mt19937_64& rng,
                               int width = 256, int height = 256);

}  // namespace gaf
