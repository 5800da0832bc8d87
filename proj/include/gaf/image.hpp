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

#include <algorithm>
#include <cmath>

namespace gaf {

/// Grayscale raster. Stored row-major so that img(y, x) addresses the pixel
/// in row y, column x, with (0, 0) at the top-left corner. Intensities are
/// nominally in [0, 255] after loading but any finite value is legal in
/// intermediate results.
template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ImageF = Image<float>;
using ImageD = Image<double>;

template <typename Derived>
int image_width(const Eigen::ArrayBase<Derived>& img) {
  return static_cast<int>(img.cols());
}

template <typename Derived>
int image_height(const Eigen::ArrayBase<Derived>& img) {
  return static_cast<int>(img.rows());
}

/// Pixel access with edge-clamped coordinates.
template <typename Scalar>
Scalar pixel_clamped(const Image<Scalar>& img, int x, int y) {
  x = std::clamp(x, 0, image_width(img) - 1);
  y = std::clamp(y, 0, image_height(img) - 1);
  return img(y, x);
}

/// Bilinear sample at a subpixel position, clamped to the image domain.
template <typename Scalar>
double sample_bilinear(const Image<Scalar>& img, double x, double y) {
  const int w = image_width(img);
  const int h = image_height(img);
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = std::min(static_cast<int>(x), w - 2 >= 0 ? w - 2 : 0);
  const int y0 = std::min(static_cast<int>(y), h - 2 >= 0 ? h - 2 : 0);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  return (1.0 - fy) * ((1.0 - fx) * img(y0, x0) + fx * img(y0, x1)) +
         fy * ((1.0 - fx) * img(y1, x0) + fx * img(y1, x1));
}

/// Counter-clockwise quarter turn: output(x', y') = input(x, y) with
/// x' = y and y' = width - 1 - x. Exact pixel permutation, no resampling.
template <typename Scalar>
Image<Scalar> rotate90_ccw(const Image<Scalar>& img) {
  const int w = image_width(img);
  const int h = image_height(img);
  Image<Scalar> out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out(w - 1 - x, y) = img(y, x);
  return out;
}

}  // namespace gaf
