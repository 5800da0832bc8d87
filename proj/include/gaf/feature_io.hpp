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

#include <string>
#include <vector>

#include "gaf/affine_shape.hpp"
#include "gaf/eval.hpp"
#include "gaf/synth.hpp"

namespace gaf {

/// Feature file (text). Header: a "1.0" line then the feature count; one
/// line per feature:
///   x y sm_x sm_y sm_z sigma alpha beta theta c d dog_value
/// where (sm_x, sm_y, sm_z) are the shape-matrix entries. Values carry nine
/// significant digits, which the reader round-trips losslessly.
void write_feature_file(const std::string& path,
                        const std::vector<AffineFeature>& features);
std::vector<AffineFeature> read_feature_file(const std::string& path);

/// Ground-truth CSV: header "cx,cy,alpha,beta,theta,c,d", one row per spec.
void write_truth_csv(const std::string& path,
                     const std::vector<GaussianSignalSpec>& specs);
std::vector<GaussianSignalSpec> read_truth_csv(const std::string& path);
GaussianSignalSpec parse_spec_csv_row(const std::string& row);

/// Per-match report CSV: one header row, one row per match.
std::string eval_report_csv(const EvalReport& report);

}  // namespace gaf
