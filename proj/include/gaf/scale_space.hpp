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
#include <stdexcept>
#include <vector>

#include "gaf/image.hpp"

namespace gaf {

struct PyramidConfig {
  int levels_per_octave = 3;        // s; octaves hold s+3 Gaussian levels
  double base_sigma = 1.6;          // blur of octave 0, level 0
  double assumed_input_blur = 0.5;  // blur already present in the input
  double kernel_truncation = 4.0;   // kernel support, multiples of sigma
  int octave_count = 0;             // 0 = auto: stop when min dimension <= 16

  double level_ratio() const { return std::pow(2.0, 1.0 / levels_per_octave); }
};

/// One octave: s+3 Gaussian levels with blur base_sigma * k^i (in octave
/// pixels) and s+2 difference levels stored in scale-normalized LoG units.
template <typename Scalar>
struct Octave {
  std::vector<Image<Scalar>> gauss;
  std::vector<Image<Scalar>> dog;
  int downsample = 1;  // 2^octave_index, octave pixels -> input pixels
};

template <typename Scalar>
struct ScaleSpacePyramid {
  PyramidConfig config;
  double level_ratio = 1.0;  // k = 2^(1/s)
  std::vector<Octave<Scalar>> octaves;

  /// Octave-relative blur of Gaussian level i: base_sigma * k^i.
  double gauss_sigma(int level) const {
    return config.base_sigma * std::pow(level_ratio, level);
  }
  /// Octave-relative scale attributed to DoG level i. The difference of the
  /// levels at sigma*k and sigma integrates the normalized Laplacian over
  /// that scale interval, so its value belongs to the geometric mean
  /// base_sigma * k^(i + 1/2) rather than to either endpoint.
  double dog_sigma(int level) const {
    return config.base_sigma * std::pow(level_ratio, level + 0.5);
  }
  double gauss_sigma_abs(int octave, int level) const {
    return gauss_sigma(level) * octaves[octave].downsample;
  }
  double dog_sigma_abs(int octave, int level) const {
    return dog_sigma(level) * octaves[octave].downsample;
  }
};

/// Separable convolution with a sampled, L1-normalized Gaussian truncated at
/// truncation*sigma (odd support). Borders are edge-clamped. sigma = 0 is the
/// identity.
template <typename Scalar>
Image<Scalar> gaussian_blur(const Image<Scalar>& img, double sigma,
                            double truncation = 4.0) {
  if (sigma < 0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
  if (sigma == 0) return img;

  const int radius = std::max(1, static_cast<int>(std::ceil(truncation * sigma)));
  std::vector<Scalar> kernel(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i / sigma) * (i / sigma));
    kernel[i + radius] = static_cast<Scalar>(w);
    sum += w;
  }
  for (Scalar& w : kernel) w = static_cast<Scalar>(w / sum);

  const int width = image_width(img);
  const int height = image_height(img);

  Image<Scalar> horiz(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      Scalar acc = 0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * img(y, std::clamp(x + i, 0, width - 1));
      horiz(y, x) = acc;
    }

  Image<Scalar> out(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      Scalar acc = 0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * horiz(std::clamp(y + i, 0, height - 1), x);
      out(y, x) = acc;
    }
  return out;
}

/// Octaves that fit: each octave image must keep its smaller dimension above
/// 16 pixels.
inline int auto_octave_count(int width, int height) {
  int count = 0;
  int w = width, h = height;
  while (std::min(w, h) > 16) {
    ++count;
    w = (w + 1) / 2;
    h = (h + 1) / 2;
  }
  return count;
}

/// Builds the Gaussian levels. Octave 0 level 0 is brought to base_sigma by
/// blurring with sqrt(base_sigma^2 - assumed_input_blur^2); each next octave
/// starts from the level with doubled blur, point-sampled at every second
/// pixel. DoG levels are left empty (see compute_normalized_dog).
template <typename Scalar>
ScaleSpacePyramid<Scalar> build_pyramid(const Image<Scalar>& img,
                                        const PyramidConfig& config) {
  if (config.levels_per_octave < 2)
    throw std::invalid_argument("build_pyramid: levels_per_octave must be >= 2");
  if (config.base_sigma <= config.assumed_input_blur || config.assumed_input_blur < 0)
    throw std::invalid_argument("build_pyramid: need base_sigma > assumed_input_blur >= 0");
  if (config.kernel_truncation < 3.0)
    throw std::invalid_argument("build_pyramid: kernel_truncation must be >= 3");

  const int octaves = config.octave_count > 0
                          ? config.octave_count
                          : auto_octave_count(image_width(img), image_height(img));
  if (octaves < 1)
    throw std::invalid_argument("build_pyramid: image too small for one octave");

  ScaleSpacePyramid<Scalar> pyramid;
  pyramid.config = config;
  pyramid.level_ratio = config.level_ratio();
  const int s = config.levels_per_octave;
  const double k = pyramid.level_ratio;

  const double initial = std::sqrt(config.base_sigma * config.base_sigma -
                                   config.assumed_input_blur * config.assumed_input_blur);
  Image<Scalar> base = gaussian_blur(img, initial, config.kernel_truncation);

  for (int o = 0; o < octaves; ++o) {
    if (std::min(image_width(base), image_height(base)) <= 16)
      throw std::invalid_argument("build_pyramid: image too small for requested octaves");
    Octave<Scalar> octave;
    octave.downsample = 1 << o;
    octave.gauss.reserve(s + 3);
    octave.gauss.push_back(std::move(base));
    for (int i = 1; i < s + 3; ++i) {
      // Incremental blur from level i-1 to level i.
      const double prev = config.base_sigma * std::pow(k, i - 1);
      const double next = config.base_sigma * std::pow(k, i);
      const double inc = std::sqrt(next * next - prev * prev);
      octave.gauss.push_back(
          gaussian_blur(octave.gauss.back(), inc, config.kernel_truncation));
    }
    if (o + 1 < octaves) {
      // Level s carries 2 * base_sigma; halving it restores base_sigma.
      const Image<Scalar>& src = octave.gauss[s];
      const int w2 = (image_width(src) + 1) / 2;
      const int h2 = (image_height(src) + 1) / 2;
      base.resize(h2, w2);
      for (int y = 0; y < h2; ++y)
        for (int x = 0; x < w2; ++x)
          base(y, x) = src(2 * y, 2 * x);
    }
    pyramid.octaves.push_back(std::move(octave));
  }
  return pyramid;
}

/// Fills the DoG levels: dog[i] = (gauss[i+1] - gauss[i]) / ln(k), so the
/// stored value approximates the scale-normalized Laplacian sigma^2 lap(G*I)
/// at the level's attributed scale. The difference of adjacent levels equals
/// the integral of the normalized Laplacian over a log-scale window of width
/// ln(k); dividing by the window width recovers the midpoint value, which is
/// what the contrast and baseline inversions consume.
template <typename Scalar>
void compute_normalized_dog(ScaleSpacePyramid<Scalar>& pyramid) {
  const Scalar norm = static_cast<Scalar>(1.0 / std::log(pyramid.level_ratio));
  for (Octave<Scalar>& octave : pyramid.octaves) {
    octave.dog.clear();
    octave.dog.reserve(octave.gauss.size() - 1);
    for (std::size_t i = 0; i + 1 < octave.gauss.size(); ++i)
      octave.dog.push_back((octave.gauss[i + 1] - octave.gauss[i]) * norm);
  }
}

}  // namespace gaf
