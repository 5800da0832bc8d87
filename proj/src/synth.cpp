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

#include "gaf/synth.hpp"

#include <algorithm>
#include <numbers>

namespace gaf {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = (rng() >> 11) * (1.0 / 9007199254740992.0);
  return lo + u * (hi - lo);
}

}  // namespace

GaussianSignalSpec random_spec(const SpecRanges& ranges, std::mt19937_64& rng,
                               int width, int height) {
  const double half = std::min(width, height) / 2.0;
  const double cx0 = width / 2.0;
  const double cy0 = height / 2.0;

  GaussianSignalSpec spec;
  const double aspect = uniform(rng, ranges.aspect_min, ranges.aspect_max);
  // Cap the nominal radius so 3*beta fits inside the half-extent.
  const double nominal_cap =
      std::min(ranges.nominal_max, half / (3.0 * std::sqrt(aspect)));
  const double nominal = uniform(rng, ranges.nominal_min, std::max(ranges.nominal_min, nominal_cap));
  spec.short_radius = nominal / std::sqrt(aspect);
  spec.long_radius = nominal * std::sqrt(aspect);

  const double budget = std::max(0.0, half - 3.0 * spec.long_radius);
  spec.center_x = cx0 + uniform(rng, -budget, budget);
  spec.center_y = cy0 + uniform(rng, -budget, budget);

  spec.orientation = uniform(rng, -std::numbers::pi / 2, std::numbers::pi / 2);

  const double sign = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
  spec.contrast = sign * uniform(rng, ranges.contrast_floor, ranges.contrast_max);
  // Baseline window keeping both d and d+c inside [0, 255].
  const double lo = std::max(0.0, -spec.contrast);
  const double hi = std::min(255.0, 255.0 - spec.contrast);
  spec.baseline = uniform(rng, lo, hi);
  return spec;
}

}  // namespace gaf
