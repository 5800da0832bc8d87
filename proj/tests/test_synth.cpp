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
#include <random>

#include "gaf/synth.hpp"

using namespace gaf;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("render: center pixel carries clamp(c + d)") {
  GaussianSignalSpec spec;
  spec.center_x = 20.0;
  spec.center_y = 24.0;
  spec.short_radius = 3.0;
  spec.long_radius = 3.0;
  spec.contrast = 100.0;
  spec.baseline = 30.0;
  CHECK(render(spec, 64, 64)(24, 20) == Approx(130.0));

  spec.contrast = 200.0;
  spec.baseline = 100.0;  // saturates
  CHECK(render(spec, 64, 64)(24, 20) == Approx(255.0));

  spec.contrast = -300.0;
  CHECK(render(spec, 64, 64)(24, 20) == Approx(0.0));
}

TEST_CASE("render: tail decays to the baseline") {
  GaussianSignalSpec spec;
  spec.center_x = 30.0;
  spec.center_y = 30.0;
  spec.short_radius = 2.0;
  spec.long_radius = 4.0;
  spec.contrast = 200.0;
  spec.baseline = 55.0;
  const ImageD img = render(spec, 128, 128);
  CHECK(img(127, 127) == Approx(55.0));  // > 6 beta away
}

TEST_CASE("render: zero contrast is a constant image") {
  GaussianSignalSpec spec;
  spec.center_x = 10.0;
  spec.center_y = 10.0;
  spec.short_radius = 5.0;
  spec.long_radius = 5.0;
  spec.contrast = 0.0;
  spec.baseline = 77.0;
  const ImageD img = render(spec, 32, 32);
  CHECK((img - 77.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("render rejects degenerate radii") {
  GaussianSignalSpec spec;
  spec.short_radius = 0.0;
  spec.long_radius = 4.0;
  CHECK_THROWS_AS(render(spec, 16, 16), std::invalid_argument);
}

TEST_CASE("render orients the long radius along the orientation angle") {
  GaussianSignalSpec spec;
  spec.center_x = 64.0;
  spec.center_y = 64.0;
  spec.short_radius = 3.0;
  spec.long_radius = 12.0;
  spec.orientation = kPi / 3;
  spec.contrast = 200.0;
  spec.baseline = 0.0;
  const ImageD img = render(spec, 128, 128, false);

  // 9 px along the long axis decays by exp(-0.5*(9/12)^2); 9 px across by
  // exp(-0.5*(9/3)^2).
  const double ux = std::cos(spec.orientation), uy = std::sin(spec.orientation);
  const double along = sample_bilinear(img, 64.0 + 9.0 * ux, 64.0 + 9.0 * uy);
  const double across = sample_bilinear(img, 64.0 - 9.0 * uy, 64.0 + 9.0 * ux);
  CHECK(along == Approx(200.0 * std::exp(-0.5 * 0.5625)).epsilon(0.02));
  CHECK(across == Approx(200.0 * std::exp(-0.5 * 9.0)).epsilon(0.25));
}

TEST_CASE("rotating the spec by a quarter turn matches rotating the raster") {
  GaussianSignalSpec spec;
  spec.center_x = 127.5;  // the raster rotation fixes this point
  spec.center_y = 127.5;
  spec.short_radius = 5.0;
  spec.long_radius = 15.0;
  spec.orientation = 0.35;
  spec.contrast = 180.0;
  spec.baseline = 40.0;

  GaussianSignalSpec turned = spec;
  turned.orientation = spec.orientation - kPi / 2;

  const ImageD direct = render(turned, 256, 256);
  const ImageD rotated = rotate90_ccw(render(spec, 256, 256));
  const double rms = std::sqrt((direct - rotated).square().mean());
  CHECK(rms < 1.0);
}

TEST_CASE("multi-spec render superposes over the common baseline") {
  GaussianSignalSpec a;
  a.center_x = 40.0;
  a.center_y = 64.0;
  a.short_radius = 5.0;
  a.long_radius = 5.0;
  a.contrast = 100.0;
  a.baseline = 30.0;
  GaussianSignalSpec b = a;
  b.center_x = 90.0;
  const std::vector<GaussianSignalSpec> specs{a, b};

  const ImageD img = render<double>(specs, 128, 128);
  CHECK(img(64, 40) == Approx(130.0).epsilon(0.01));
  CHECK(img(64, 90) == Approx(130.0).epsilon(0.01));
  CHECK(img(5, 5) == Approx(30.0));
}

TEST_CASE("add_gaussian_noise: zero stddev is the identity") {
  const ImageD img = ImageD::Constant(16, 16, 100.0);
  CHECK((add_gaussian_noise(img, 0.0, 7) - img).abs().maxCoeff() == 0.0);
}

TEST_CASE("add_gaussian_noise: sample mean stays near zero") {
  const ImageD img = ImageD::Constant(256, 256, 128.0);
  const ImageD noisy = add_gaussian_noise(img, 10.0, 12345);
  CHECK(std::abs((noisy - img).mean()) < 0.5);
  const double noise_stddev = std::sqrt((noisy - img).square().mean());
  CHECK(noise_stddev == Approx(10.0).epsilon(0.05));
}

TEST_CASE("add_gaussian_noise: identical seeds give identical images") {
  const ImageD img = ImageD::Constant(64, 64, 90.0);
  const ImageD n1 = add_gaussian_noise(img, 8.0, 99);
  const ImageD n2 = add_gaussian_noise(img, 8.0, 99);
  CHECK((n1 - n2).abs().maxCoeff() == 0.0);
  const ImageD n3 = add_gaussian_noise(img, 8.0, 100);
  CHECK((n1 - n3).abs().maxCoeff() > 0.0);
}

TEST_CASE("random_spec respects its ranges and the fit constraint") {
  SpecRanges ranges;
  std::mt19937_64 rng(321);
  for (int i = 0; i < 500; ++i) {
    const GaussianSignalSpec s = random_spec(ranges, rng);
    CHECK(s.nominal_radius() >= 5.0);
    CHECK(s.nominal_radius() <= 40.0 + 1e-9);
    CHECK(s.aspect() >= 1.0);
    CHECK(s.aspect() <= 30.0 + 1e-9);
    CHECK(std::abs(s.contrast) >= 16.0);
    CHECK(std::abs(s.contrast) <= 255.0);
    CHECK(s.baseline >= 0.0);
    CHECK(s.baseline <= 255.0);
    CHECK(s.baseline + s.contrast >= -1e-9);
    CHECK(s.baseline + s.contrast <= 255.0 + 1e-9);
    const double offset = std::max(std::abs(s.center_x - 128.0),
                                   std::abs(s.center_y - 128.0));
    CHECK(3.0 * s.long_radius + offset <= 128.0 + 1e-9);
  }
}

TEST_CASE("random_spec: unit aspect gives equal radii") {
  SpecRanges ranges;
  ranges.aspect_min = 1.0;
  ranges.aspect_max = 1.0;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const GaussianSignalSpec s = random_spec(ranges, rng);
    CHECK(s.short_radius == Approx(s.long_radius));
    CHECK(s.short_radius == Approx(s.nominal_radius()));
  }
}
