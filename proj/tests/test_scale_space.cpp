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

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "gaf/scale_space.hpp"
#include "gaf/synth.hpp"

using namespace gaf;
using doctest::Approx;

namespace {

// Least-squares fit of an axis-aligned, zero-baseline Gaussian to a raster:
// ln v = ln A - dx^2/(2 a^2) - dy^2/(2 b^2) is linear in (ln A, 1/a^2, 1/b^2).
struct GaussianFit {
  double amplitude;
  double radius_x;
  double radius_y;
  double rms_residual;  // of the fitted model over the window, intensity units
};

GaussianFit fit_axis_aligned_gaussian(const ImageD& img, double cx, double cy) {
  const double peak = sample_bilinear(img, cx, cy);
  std::vector<Eigen::Vector3d> rows;
  std::vector<double> rhs;
  for (int y = 0; y < image_height(img); ++y)
    for (int x = 0; x < image_width(img); ++x) {
      const double v = img(y, x);
      if (v < 0.05 * peak) continue;
      rows.emplace_back(1.0, -(x - cx) * (x - cx), -(y - cy) * (y - cy));
      rhs.push_back(std::log(v));
    }
  Eigen::MatrixXd a(rows.size(), 3);
  Eigen::VectorXd b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a.row(i) = rows[i];
    b(i) = rhs[i];
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);

  GaussianFit fit;
  fit.amplitude = std::exp(sol(0));
  fit.radius_x = 1.0 / std::sqrt(2.0 * sol(1));
  fit.radius_y = 1.0 / std::sqrt(2.0 * sol(2));
  double ss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double model = std::exp(rows[i].dot(sol));
    ss += (model - std::exp(b(i))) * (model - std::exp(b(i)));
  }
  fit.rms_residual = std::sqrt(ss / rows.size());
  return fit;
}

}  // namespace

TEST_CASE("gaussian_blur: sigma 0 is the identity") {
  ImageD img(4, 5);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) img(y, x) = 3.0 * y + x;
  const ImageD out = gaussian_blur(img, 0.0);
  CHECK((out - img).abs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian_blur preserves constant images") {
  ImageD img = ImageD::Constant(32, 48, 87.5);
  const ImageD out = gaussian_blur(img, 3.7);
  CHECK((out - 87.5).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("gaussian_blur of a unit impulse matches the kernel peak") {
  ImageD img = ImageD::Zero(65, 65);
  img(32, 32) = 1.0;
  const ImageD out = gaussian_blur(img, 2.0);
  // Continuous kernel value at the origin: 1 / (2 pi sigma^2).
  const double expected = 1.0 / (2.0 * std::numbers::pi * 4.0);
  CHECK(out(32, 32) == Approx(expected).epsilon(0.02));
}

TEST_CASE("gaussian_blur rejects negative sigma") {
  ImageD img = ImageD::Zero(8, 8);
  CHECK_THROWS_AS(gaussian_blur(img, -1.0), std::invalid_argument);
}

TEST_CASE("auto octave count stops above 16 px") {
  CHECK(auto_octave_count(256, 256) == 4);  // 256 -> 128 -> 64 -> 32, 16 fails
  CHECK(auto_octave_count(256, 64) == 2);
  CHECK(auto_octave_count(17, 17) == 1);
  CHECK(auto_octave_count(16, 16) == 0);
}

TEST_CASE("build_pyramid: octave layout for a 256x256 input") {
  const ImageD img = ImageD::Constant(256, 256, 50.0);
  PyramidConfig config;
  const auto pyramid = build_pyramid(img, config);

  REQUIRE(pyramid.octaves.size() == 4);
  const int s = config.levels_per_octave;
  int expected_size = 256;
  for (int o = 0; o < 4; ++o) {
    REQUIRE(pyramid.octaves[o].gauss.size() == static_cast<std::size_t>(s + 3));
    CHECK(image_width(pyramid.octaves[o].gauss[0]) == expected_size);
    CHECK(pyramid.octaves[o].downsample == (1 << o));
    expected_size /= 2;
  }

  // Within an octave the blur schedule is exactly base_sigma * k^i.
  const double k = pyramid.level_ratio;
  CHECK(k == Approx(std::pow(2.0, 1.0 / s)).epsilon(1e-15));
  for (int i = 0; i < s + 3; ++i)
    CHECK(pyramid.gauss_sigma(i) == Approx(1.6 * std::pow(k, i)).epsilon(1e-12));
  CHECK(pyramid.dog_sigma(0) == Approx(1.6 * std::pow(k, 0.5)).epsilon(1e-12));
  CHECK(pyramid.gauss_sigma_abs(2, 1) == Approx(1.6 * k * 4).epsilon(1e-12));
}

TEST_CASE("build_pyramid rejects too-small images") {
  const ImageD img = ImageD::Constant(16, 16, 1.0);
  CHECK_THROWS_AS(build_pyramid(img, PyramidConfig{}), std::invalid_argument);
}

TEST_CASE("build_pyramid validates its configuration") {
  const ImageD img = ImageD::Constant(64, 64, 1.0);
  PyramidConfig narrow;
  narrow.kernel_truncation = 2.0;
  CHECK_THROWS_AS(build_pyramid(img, narrow), std::invalid_argument);
  PyramidConfig shallow;
  shallow.levels_per_octave = 1;
  CHECK_THROWS_AS(build_pyramid(img, shallow), std::invalid_argument);
  PyramidConfig blurry;
  blurry.assumed_input_blur = 2.0;  // exceeds base_sigma
  CHECK_THROWS_AS(build_pyramid(img, blurry), std::invalid_argument);
}

TEST_CASE("pyramid levels blur a rendered blob along the model closed form") {
  // A blob with radii (alpha, beta) blurred at sigma becomes a blob with
  // radii (sqrt(alpha^2+sigma^2), sqrt(beta^2+sigma^2)) and amplitude
  // c*alpha*beta/(a*b); fit each level and compare, 3% tolerance.
  GaussianSignalSpec spec;
  spec.center_x = 128.0;
  spec.center_y = 128.0;
  spec.short_radius = 6.0;
  spec.long_radius = 12.0;
  spec.orientation = 0.0;  // long axis on x: radius_x is beta's column
  spec.contrast = 200.0;
  spec.baseline = 0.0;
  const ImageD img = render(spec, 256, 256, /*quantize=*/false);

  PyramidConfig config;
  auto pyramid = build_pyramid(img, config);

  for (const auto& [octave, level] : {std::pair{0, 1}, {1, 0}, {1, 3}, {2, 1}}) {
    const double sigma = pyramid.gauss_sigma_abs(octave, level);
    const int d = pyramid.octaves[octave].downsample;
    const double a = std::sqrt(36.0 + sigma * sigma);   // short radius, input px
    const double b = std::sqrt(144.0 + sigma * sigma);  // long radius, input px
    const double amplitude = 200.0 * 72.0 / (a * b);

    const auto fit = fit_axis_aligned_gaussian(pyramid.octaves[octave].gauss[level],
                                               128.0 / d, 128.0 / d);
    CHECK(fit.radius_x * d == Approx(b).epsilon(0.03));
    CHECK(fit.radius_y * d == Approx(a).epsilon(0.03));
    CHECK(fit.amplitude == Approx(amplitude).epsilon(0.03));
    CHECK(fit.rms_residual <= 0.03 * amplitude);
  }
}

TEST_CASE("normalized DoG: constant image cancels to zero") {
  const ImageD img = ImageD::Constant(64, 64, 200.0);
  auto pyramid = build_pyramid(img, PyramidConfig{});
  compute_normalized_dog(pyramid);
  for (const auto& octave : pyramid.octaves) {
    REQUIRE(octave.dog.size() == octave.gauss.size() - 1);
    for (const auto& dog : octave.dog) CHECK(dog.abs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("normalized DoG center value matches the closed-form extremum") {
  // Isotropic blob alpha = beta = 8, c = 200, d = 30: the strongest level's
  // center value approximates the normalized-LoG extremum -c/2 = -100.
  GaussianSignalSpec spec;
  spec.center_x = 128.0;
  spec.center_y = 128.0;
  spec.short_radius = 8.0;
  spec.long_radius = 8.0;
  spec.contrast = 200.0;
  spec.baseline = 30.0;
  const ImageD img = render(spec, 256, 256);

  auto pyramid = build_pyramid(img, PyramidConfig{});
  compute_normalized_dog(pyramid);

  double best = 0.0;
  for (const auto& octave : pyramid.octaves) {
    const int cx = 128 / octave.downsample;
    for (const auto& dog : octave.dog) {
      const double v = dog(cx, cx);
      if (std::abs(v) > std::abs(best)) best = v;
    }
  }
  CHECK(best == Approx(-100.0).epsilon(0.10));
}

TEST_CASE("normalized DoG is linear in the image") {
  GaussianSignalSpec spec;
  spec.center_x = 40.0;
  spec.center_y = 29.0;
  spec.short_radius = 5.0;
  spec.long_radius = 9.0;
  spec.orientation = 0.7;
  spec.contrast = 100.0;
  spec.baseline = 20.0;
  const ImageD img = render(spec, 80, 64, /*quantize=*/false);

  auto p1 = build_pyramid(img, PyramidConfig{});
  compute_normalized_dog(p1);
  const ImageD scaled = img * 3.0;
  auto p3 = build_pyramid(scaled, PyramidConfig{});
  compute_normalized_dog(p3);

  for (std::size_t o = 0; o < p1.octaves.size(); ++o)
    for (std::size_t l = 0; l < p1.octaves[o].dog.size(); ++l) {
      const double diff =
          (p3.octaves[o].dog[l] - 3.0 * p1.octaves[o].dog[l]).abs().maxCoeff();
      CHECK(diff <= 1e-10 * 3.0 * p1.octaves[o].dog[l].abs().maxCoeff() + 1e-12);
    }
}

TEST_CASE("negating the contrast negates every DoG value") {
  GaussianSignalSpec bright;
  bright.center_x = 32.0;
  bright.center_y = 32.0;
  bright.short_radius = 6.0;
  bright.long_radius = 6.0;
  bright.contrast = 100.0;
  bright.baseline = 128.0;
  GaussianSignalSpec dark = bright;
  dark.contrast = -100.0;

  auto pb = build_pyramid(render(bright, 64, 64, false), PyramidConfig{});
  auto pd = build_pyramid(render(dark, 64, 64, false), PyramidConfig{});
  compute_normalized_dog(pb);
  compute_normalized_dog(pd);

  for (std::size_t o = 0; o < pb.octaves.size(); ++o)
    for (std::size_t l = 0; l < pb.octaves[o].dog.size(); ++l) {
      const double diff =
          (pd.octaves[o].dog[l] + pb.octaves[o].dog[l]).abs().maxCoeff();
      CHECK(diff <= 1e-10 * pb.octaves[o].dog[l].abs().maxCoeff() + 1e-12);
    }
}

TEST_CASE("blurring commutes with quarter turns") {
  GaussianSignalSpec spec;
  spec.center_x = 20.0;
  spec.center_y = 40.0;
  spec.short_radius = 4.0;
  spec.long_radius = 9.0;
  spec.orientation = 0.5;
  spec.contrast = 150.0;
  spec.baseline = 40.0;
  const ImageD img = render(spec, 64, 64, false);

  const ImageD a = gaussian_blur(rotate90_ccw(img), 2.3);
  const ImageD b = rotate90_ccw(gaussian_blur(img, 2.3));
  CHECK((a - b).abs().maxCoeff() <= 1e-9);
}
