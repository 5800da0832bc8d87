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

#include "gaf/feature_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gaf {

namespace {

std::string format_fields(const double* values, int count) {
  std::string line;
  char buf[32];
  for (int i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", values[i]);
    if (i) line += ' ';
    line += buf;
  }
  return line;
}

std::vector<double> parse_fields(const std::string& line, int expected,
                                 const std::string& path, int line_number) {
  std::istringstream in(line);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  if (static_cast<int>(values.size()) != expected) {
    throw std::runtime_error(path + ":" + std::to_string(line_number) +
                             ": expected " + std::to_string(expected) +
                             " numeric fields, got " + std::to_string(values.size()));
  }
  return values;
}

}  // namespace

void write_feature_file(const std::string& path,
                        const std::vector<AffineFeature>& features) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << "1.0\n" << features.size() << "\n";
  for (const AffineFeature& f : features) {
    const ShapeMatrix m = f.shape();
    const double fields[12] = {f.x,           f.y,        m.xx,       m.xy,
                               m.yy,          f.sigma,    f.short_radius,
                               f.long_radius, f.orientation, f.contrast,
                               f.baseline,    f.response};
    out << format_fields(fields, 12) << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<AffineFeature> read_feature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ":1: missing header line");
  if (parse_fields(line, 1, path, 1).front() != 1.0)
    throw std::runtime_error(path + ":1: unsupported feature file version");
  if (!std::getline(in, line))
    throw std::runtime_error(path + ":2: missing feature count");
  const int count = static_cast<int>(parse_fields(line, 1, path, 2).front());
  if (count < 0) throw std::runtime_error(path + ":2: negative feature count");

  std::vector<AffineFeature> features;
  features.reserve(count);
  for (int i = 0; i < count; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error(path + ":" + std::to_string(3 + i) +
                               ": unexpected end of file");
    const std::vector<double> v = parse_fields(line, 12, path, 3 + i);
    AffineFeature f;
    f.x = v[0];
    f.y = v[1];
    f.sigma = v[5];
    f.short_radius = v[6];
    f.long_radius = v[7];
    f.orientation = v[8];
    f.contrast = v[9];
    f.baseline = v[10];
    f.response = v[11];
    // Derived shape factors; consistent with the stored radii and scale.
    f.radius_scale_sq = (f.short_radius / f.sigma) * (f.short_radius / f.sigma);
    f.aspect_sq = (f.long_radius / f.short_radius) * (f.long_radius / f.short_radius);
    f.eigen_ratio = (1.0 + f.radius_scale_sq * f.aspect_sq) / (1.0 + f.radius_scale_sq);
    f.scale_space_value = scale_space_peak(f.contrast, f.baseline,
                                           f.radius_scale_sq, f.aspect_sq);
    features.push_back(f);
  }
  return features;
}

void write_truth_csv(const std::string& path,
                     const std::vector<GaussianSignalSpec>& specs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << "cx,cy,alpha,beta,theta,c,d\n";
  char buf[256];
  for (const GaussianSignalSpec& s : specs) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  s.center_x, s.center_y, s.short_radius, s.long_radius,
                  s.orientation, s.contrast, s.baseline);
    out << buf;
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

GaussianSignalSpec parse_spec_csv_row(const std::string& row) {
  std::istringstream in(row);
  std::vector<double> values;
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw std::runtime_error("invalid spec field \"" + field + "\"");
    }
  }
  if (values.size() != 7)
    throw std::runtime_error("expected 7 comma-separated fields (cx,cy,alpha,beta,theta,c,d)");
  GaussianSignalSpec s;
  s.center_x = values[0];
  s.center_y = values[1];
  s.short_radius = values[2];
  s.long_radius = values[3];
  s.orientation = values[4];
  s.contrast = values[5];
  s.baseline = values[6];
  return s;
}

std::vector<GaussianSignalSpec> read_truth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::vector<GaussianSignalSpec> specs;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    if (line_number == 1 && line.find("cx") != std::string::npos) continue;  // header
    try {
      specs.push_back(parse_spec_csv_row(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_number) + ": " +
                               e.what());
    }
  }
  return specs;
}

std::string eval_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "match,position_err,aspect_ratio_rel_err,short_radius_rel_err,"
         "contrast_rel_err,baseline_rel_err,orientation_err\n";
  char buf[256];
  for (std::size_t i = 0; i < report.position_err.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", i,
                  report.position_err[i], report.aspect_ratio_rel_err[i],
                  report.short_radius_rel_err[i], report.contrast_rel_err[i],
                  report.baseline_rel_err[i], report.orientation_err[i]);
    out << buf;
  }
  return out.str();
}

}  // namespace gaf
