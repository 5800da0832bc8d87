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

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gaf/detector.hpp"
#include "gaf/eval.hpp"
#include "gaf/feature_io.hpp"
#include "gaf/pgm.hpp"
#include "gaf/synth.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

void add_detector_options(CLI::App* cmd, gaf::DetectorConfig& config,
                          double& merge_angle_deg, std::string& config_path) {
  cmd->add_option("--config", config_path,
                  "plain key=value config file; explicit flags win");
  cmd->add_option("--levels-per-octave", config.pyramid.levels_per_octave,
                  "Gaussian levels per octave doubling (s)");
  cmd->add_option("--base-sigma", config.pyramid.base_sigma,
                  "blur of the pyramid base level, px");
  cmd->add_option("--input-blur", config.pyramid.assumed_input_blur,
                  "blur assumed already present in the input, px");
  cmd->add_option("--truncation", config.pyramid.kernel_truncation,
                  "Gaussian kernel support, multiples of sigma");
  cmd->add_option("--octaves", config.pyramid.octave_count,
                  "octave count; 0 = auto");
  cmd->add_option("--prelim-contrast", config.prelim_contrast,
                  "|DoG| floor before refinement");
  cmd->add_option("--max-eigen-ratio", config.max_eigen_ratio,
                  "edge filter threshold on the Hessian eigenvalue ratio");
  cmd->add_option("--min-contrast", config.filter.min_contrast,
                  "|c| floor for surviving features");
  cmd->add_option("--min-radius", config.filter.min_short_radius,
                  "short-radius floor, px");
  cmd->add_option("--min-long-radius", config.filter.min_long_radius,
                  "long-radius floor, px");
  cmd->add_option("--merge-dist", config.filter.merge_dist,
                  "duplicate merge distance, units of min short radius");
  cmd->add_option("--merge-scale", config.filter.merge_scale,
                  "duplicate merge max radius ratio");
  cmd->add_option("--merge-angle", merge_angle_deg,
                  "duplicate merge max orientation difference, degrees");
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, s.find_last_not_of(" \t\r") - begin + 1);
}

/// Plain key=value file with the detector option names; '#' starts a comment.
/// Applied before flag parsing, so explicit flags override config values.
void apply_config_file(const std::string& path, gaf::DetectorConfig& config,
                       double& merge_angle_deg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_number) +
                               ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    double value = 0;
    try {
      value = std::stod(trim(line.substr(eq + 1)));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_number) +
                               ": invalid numeric value");
    }
    if (key == "levels-per-octave")
      config.pyramid.levels_per_octave = static_cast<int>(value);
    else if (key == "base-sigma")
      config.pyramid.base_sigma = value;
    else if (key == "input-blur")
      config.pyramid.assumed_input_blur = value;
    else if (key == "truncation")
      config.pyramid.kernel_truncation = value;
    else if (key == "octaves")
      config.pyramid.octave_count = static_cast<int>(value);
    else if (key == "prelim-contrast")
      config.prelim_contrast = value;
    else if (key == "max-eigen-ratio")
      config.max_eigen_ratio = value;
    else if (key == "min-contrast")
      config.filter.min_contrast = value;
    else if (key == "min-radius")
      config.filter.min_short_radius = value;
    else if (key == "min-long-radius")
      config.filter.min_long_radius = value;
    else if (key == "merge-dist")
      config.filter.merge_dist = value;
    else if (key == "merge-scale")
      config.filter.merge_scale = value;
    else if (key == "merge-angle")
      merge_angle_deg = value;
    else
      throw std::runtime_error(path + ":" + std::to_string(line_number) +
                               ": unknown key \"" + key + "\"");
  }
}

void warn_if_outside_model_ranges(const gaf::GaussianSignalSpec& spec) {
  if (spec.contrast < -255 || spec.contrast > 255)
    std::cerr << "warning: contrast outside [-255, 255]\n";
  if (spec.baseline < 0 || spec.baseline > 255)
    std::cerr << "warning: baseline outside [0, 255]\n";
  if (spec.nominal_radius() < 5 || spec.nominal_radius() > 40)
    std::cerr << "warning: nominal radius outside [5, 40]\n";
  if (spec.aspect() < 1 || spec.aspect() > 30)
    std::cerr << "warning: aspect ratio outside [1, 30]\n";
  if (std::abs(spec.orientation) > kPi / 2)
    std::cerr << "warning: orientation outside (-pi/2, pi/2]\n";
}

/// Recenter specs whose 3*beta envelope plus offset does not fit the frame.
void fit_check(gaf::GaussianSignalSpec& spec, int width, int height) {
  const double half = std::min(width, height) / 2.0;
  const double offset = std::max(std::abs(spec.center_x - width / 2.0),
                                 std::abs(spec.center_y - height / 2.0));
  if (3.0 * spec.long_radius + offset > half) {
    std::cerr << "warning: blob envelope does not fit the frame; recentering\n";
    spec.center_x = width / 2.0;
    spec.center_y = height / 2.0;
  }
}

std::uint64_t noise_seed(std::uint64_t base, std::uint64_t level,
                         std::uint64_t trial) {
  // splitmix64 over the packed identifiers
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (level * 1000003ULL + trial + 1ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int cmd_detect(const std::string& input, const std::string& output,
               const gaf::DetectorConfig& config) {
  const gaf::ImageD img = gaf::load_pgm<double>(input);
  const std::vector<gaf::AffineFeature> features = gaf::detect_features(img, config);
  gaf::write_feature_file(output, features);
  std::cout << "detected " << features.size() << " features -> " << output << "\n";
  return 0;
}

int cmd_eval(const std::string& feature_path, const std::string& truth_path,
             double max_dist, const std::string& report_path) {
  const std::vector<gaf::AffineFeature> detected = gaf::read_feature_file(feature_path);
  const std::vector<gaf::GaussianSignalSpec> truths = gaf::read_truth_csv(truth_path);
  const std::vector<gaf::FeatureMatch> matches =
      gaf::match_features(detected, truths, max_dist);
  const gaf::EvalReport report = gaf::parameter_errors(matches, detected, truths);

  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error(report_path + ": cannot open file for writing");
    out << gaf::eval_report_csv(report);
  }

  std::printf("truth: %d  detected: %d  matched: %d  false positives: %d\n",
              report.n_truth, report.n_detected, report.n_matched,
              report.false_positive_count);
  if (report.n_matched > 0) {
    std::printf("mean position err:      %.4f px\n", gaf::mean(report.position_err));
    std::printf("mean aspect rel err:    %.4f\n", gaf::mean(report.aspect_ratio_rel_err));
    std::printf("mean short-radius err:  %.4f\n", gaf::mean(report.short_radius_rel_err));
    std::printf("mean contrast rel err:  %.4f\n", gaf::mean(report.contrast_rel_err));
    std::printf("mean baseline rel err:  %.4f\n", gaf::mean(report.baseline_rel_err));
    std::printf("mean orientation err:   %.4f deg\n",
                gaf::mean(report.orientation_err) * 180.0 / kPi);
  }
  return 0;
}

struct SweepStats {
  double noise = 0;
  int trials = 0;
  int detected = 0;
  std::vector<double> position, aspect, short_radius, orientation, contrast, baseline;
};

int cmd_sweep(int trials, std::uint64_t seed, const std::vector<double>& noise_levels,
              const gaf::SpecRanges& ranges, const gaf::DetectorConfig& config,
              double max_dist, const std::string& output) {
  // One spec list shared by all noise levels, so levels are comparable.
  std::mt19937_64 rng(seed);
  std::vector<gaf::GaussianSignalSpec> specs;
  specs.reserve(trials);
  for (int t = 0; t < trials; ++t) specs.push_back(gaf::random_spec(ranges, rng));

  std::vector<SweepStats> stats;
  for (std::size_t li = 0; li < noise_levels.size(); ++li) {
    SweepStats s;
    s.noise = noise_levels[li];
    s.trials = trials;
    for (int t = 0; t < trials; ++t) {
      gaf::ImageD img = gaf::render(specs[t], 256, 256);
      if (s.noise > 0) {
        img = gaf::add_gaussian_noise(img, s.noise, noise_seed(seed, li, t));
        img = img.round();
      }
      const std::vector<gaf::AffineFeature> features =
          gaf::detect_features(img, config);
      const std::vector<gaf::GaussianSignalSpec> truth{specs[t]};
      const std::vector<gaf::FeatureMatch> matches =
          gaf::match_features(features, truth, max_dist);
      if (matches.empty()) continue;
      const gaf::EvalReport r = gaf::parameter_errors(matches, features, truth);
      ++s.detected;
      s.position.push_back(r.position_err[0]);
      s.aspect.push_back(r.aspect_ratio_rel_err[0]);
      s.short_radius.push_back(r.short_radius_rel_err[0]);
      s.contrast.push_back(r.contrast_rel_err[0]);
      s.baseline.push_back(r.baseline_rel_err[0]);
      if (specs[t].aspect() >= 1.5) s.orientation.push_back(r.orientation_err[0]);
    }
    stats.push_back(std::move(s));
  }

  std::ostringstream csv;
  csv << "noise,trials,detected,detection_rate,median_position_err,"
         "median_aspect_rel_err,median_short_radius_rel_err,"
         "median_orientation_err_deg,median_contrast_rel_err,"
         "median_baseline_rel_err\n";
  char line[512];
  for (const SweepStats& s : stats) {
    const double rate = s.trials ? static_cast<double>(s.detected) / s.trials : 0.0;
    std::snprintf(line, sizeof line,
                  "%.9g,%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", s.noise,
                  s.trials, s.detected, rate, gaf::median(s.position),
                  gaf::median(s.aspect), gaf::median(s.short_radius),
                  gaf::median(s.orientation) * 180.0 / kPi,
                  gaf::median(s.contrast), gaf::median(s.baseline));
    csv << line;
    std::printf(
        "noise %5.1f: detected %d/%d  pos %.3f px  aspect %.3f  short %.3f  "
        "orient %.2f deg\n",
        s.noise, s.detected, s.trials, gaf::median(s.position),
        gaf::median(s.aspect), gaf::median(s.short_radius),
        gaf::median(s.orientation) * 180.0 / kPi);
  }
  if (!output.empty()) {
    std::ofstream out(output);
    if (!out) throw std::runtime_error(output + ": cannot open file for writing");
    out << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form affine blob detector for Gaussian-like features"};
  app.require_subcommand(1);

  gaf::DetectorConfig detector_config;
  double merge_angle_deg = 15.0;
  std::string config_path;

  // Config values load before flag parsing so that explicit flags win.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      config_path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      config_path = arg.substr(9);
  }
  if (!config_path.empty()) {
    try {
      apply_config_file(config_path, detector_config, merge_angle_deg);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  // --- detect ---
  auto* detect = app.add_subcommand("detect", "detect features in a PGM image");
  std::string detect_input, detect_output = "features.txt";
  detect->add_option("input", detect_input, "input image (binary PGM)")->required();
  detect->add_option("-o,--output", detect_output, "feature file to write");
  add_detector_options(detect, detector_config, merge_angle_deg, config_path);

  // --- synth ---
  auto* synth = app.add_subcommand("synth", "render ground-truth blobs");
  std::vector<std::string> synth_rows;
  std::string synth_csv, synth_out = "synth.pgm", synth_truth = "truth.csv";
  int synth_width = 256, synth_height = 256;
  double synth_noise = 0.0;
  std::uint64_t synth_seed = 1;
  bool no_quantize = false;
  double opt_cx = -1, opt_cy = -1, opt_nominal = 10, opt_aspect = 1, opt_theta = 0,
         opt_contrast = 200, opt_baseline = 30;
  synth->add_option("--spec", synth_rows,
                    "spec row \"cx,cy,alpha,beta,theta,c,d\" (repeatable)");
  synth->add_option("--spec-csv", synth_csv, "read spec rows from a CSV file");
  synth->add_option("--nominal", opt_nominal, "nominal radius sqrt(alpha*beta)");
  synth->add_option("--aspect", opt_aspect, "aspect ratio beta/alpha");
  synth->add_option("--theta", opt_theta, "orientation, radians");
  synth->add_option("--contrast", opt_contrast, "contrast c");
  synth->add_option("--baseline", opt_baseline, "baseline d");
  synth->add_option("--cx", opt_cx, "center x (default: image center)");
  synth->add_option("--cy", opt_cy, "center y (default: image center)");
  synth->add_option("--width", synth_width, "image width");
  synth->add_option("--height", synth_height, "image height");
  synth->add_option("--noise", synth_noise, "additive Gaussian noise stddev");
  synth->add_option("--seed", synth_seed, "noise seed");
  synth->add_flag("--no-quantize", no_quantize, "skip quantization to 256 levels");
  synth->add_option("-o,--out", synth_out, "output PGM path");
  synth->add_option("--truth", synth_truth, "ground-truth CSV path");

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "compare a feature file against truth");
  std::string eval_features, eval_truth, eval_report;
  double eval_max_dist = 5.0;
  eval->add_option("features", eval_features, "feature file")->required();
  eval->add_option("truth", eval_truth, "ground-truth CSV")->required();
  eval->add_option("--max-dist", eval_max_dist, "match radius, px");
  eval->add_option("-o,--report", eval_report, "per-match report CSV");

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "random-spec accuracy sweep");
  int sweep_trials = 100;
  std::uint64_t sweep_seed = 1;
  std::vector<double> sweep_noise{0.0};
  double sweep_max_dist = 5.0;
  gaf::SpecRanges ranges;
  std::string sweep_out;
  sweep->add_option("--trials", sweep_trials, "trials per noise level")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed, "random seed");
  sweep->add_option("--noise", sweep_noise, "noise stddev levels (repeatable)");
  sweep->add_option("--max-dist", sweep_max_dist, "match radius, px");
  sweep->add_option("--nominal-min", ranges.nominal_min, "min nominal radius");
  sweep->add_option("--nominal-max", ranges.nominal_max, "max nominal radius");
  sweep->add_option("--aspect-min", ranges.aspect_min, "min aspect ratio");
  sweep->add_option("--aspect-max", ranges.aspect_max, "max aspect ratio");
  sweep->add_option("--contrast-floor", ranges.contrast_floor, "min |c|");
  sweep->add_option("-o,--out", sweep_out, "aggregate CSV path");
  add_detector_options(sweep, detector_config, merge_angle_deg, config_path);

  // --- curves ---
  auto* curves = app.add_subcommand("curves", "tabulate model curves as CSV");
  std::string curve_name, curves_out;
  double grid_min = 1.0, grid_max = 100.0;
  int grid_count = 200;
  curves->add_option("--which", curve_name, "one of: H_vs_r, k_vs_r, ridge")
      ->required();
  curves->add_option("--min", grid_min, "grid start");
  curves->add_option("--max", grid_max, "grid end");
  curves->add_option("--count", grid_count, "grid points")->check(CLI::PositiveNumber);
  curves->add_option("-o,--out", curves_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);
  detector_config.filter.merge_angle = merge_angle_deg * kPi / 180.0;

  try {
    if (detect->parsed()) return cmd_detect(detect_input, detect_output, detector_config);

    if (synth->parsed()) {
      std::vector<gaf::GaussianSignalSpec> specs;
      for (const std::string& row : synth_rows)
        specs.push_back(gaf::parse_spec_csv_row(row));
      if (!synth_csv.empty())
        for (const gaf::GaussianSignalSpec& s : gaf::read_truth_csv(synth_csv))
          specs.push_back(s);
      if (specs.empty()) {
        gaf::GaussianSignalSpec s;
        s.center_x = opt_cx >= 0 ? opt_cx : synth_width / 2.0;
        s.center_y = opt_cy >= 0 ? opt_cy : synth_height / 2.0;
        s.short_radius = opt_nominal / std::sqrt(opt_aspect);
        s.long_radius = opt_nominal * std::sqrt(opt_aspect);
        s.orientation = opt_theta;
        s.contrast = opt_contrast;
        s.baseline = opt_baseline;
        specs.push_back(s);
      }
      for (gaf::GaussianSignalSpec& s : specs) {
        warn_if_outside_model_ranges(s);
        fit_check(s, synth_width, synth_height);
      }
      gaf::ImageD img = gaf::render<double>(specs, synth_width, synth_height,
                                            !no_quantize);
      if (synth_noise > 0) {
        img = gaf::add_gaussian_noise(img, synth_noise, synth_seed);
        if (!no_quantize) img = img.round();
      }
      gaf::save_pgm(img, synth_out);
      gaf::write_truth_csv(synth_truth, specs);
      std::cout << "wrote " << synth_out << " and " << synth_truth << "\n";
      return 0;
    }

    if (eval->parsed())
      return cmd_eval(eval_features, eval_truth, eval_max_dist, eval_report);

    if (sweep->parsed())
      return cmd_sweep(sweep_trials, sweep_seed, sweep_noise, ranges,
                       detector_config, sweep_max_dist, sweep_out);

    if (curves->parsed()) {
      gaf::CurveKind kind;
      if (curve_name == "H_vs_r")
        kind = gaf::CurveKind::scale_ratio_vs_eigen_ratio;
      else if (curve_name == "k_vs_r")
        kind = gaf::CurveKind::aspect_vs_eigen_ratio;
      else if (curve_name == "ridge")
        kind = gaf::CurveKind::response_ridge;
      else
        throw std::runtime_error("unknown curve name \"" + curve_name +
                                 "\" (expected H_vs_r, k_vs_r or ridge)");
      const std::string csv = gaf::emit_curves(kind, grid_min, grid_max, grid_count);
      if (curves_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(curves_out);
        if (!out) throw std::runtime_error(curves_out + ": cannot open file for writing");
        out << csv;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
