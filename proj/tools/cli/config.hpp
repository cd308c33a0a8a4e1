// Copyright 2026 The urc Authors
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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "urc/optimize.hpp"
#include "urc/superop.hpp"

namespace urc::cli {

enum class Command { optimize, scan_mct, verify };

struct NoiseSpec {
  bool enabled = false;
  bool white = false;
  /// Correlation time in dimensionless time units (exponential only).
  double tau = 1.0;
  /// Variance for exponential noise; for white noise, strength per dimensionless time unit.
  double strength = 1.0;
  /// In units of the model rate.
  double lambda = 0.01;
  std::size_t trajectories = 10000;
  int substeps = 10;
  std::vector<std::string> probes;
  Eigen::Index state = 0;
};

struct VerifySpec {
  /// In units of the model rate.
  std::vector<double> lambdas;
  /// Curvature fits use |lambda| t_f <= fit_window on fit_points points.
  double fit_window = 0.01;
  int fit_points = 11;
  std::size_t random = 20;
  std::vector<std::string> probes;
  std::size_t one_design_samples = 16000;
  std::uint64_t seed = 0;
  NoiseSpec noise;
};

/// One objective to run, with everything needed to label its output.
struct Job {
  std::string id;
  std::string method;
  Objective objective;
  double rate = 1.0;
  double time_unit = 1.0;
  std::vector<Probe> probes;
  std::vector<double> scan_grid;
  std::string job_hash;

  double dimensionless(double t) const { return t / time_unit; }
  Correlation correlation(const NoiseSpec& noise) const;
};

struct ExperimentConfig {
  /// Canonical form stored next to the results; rerunning it reproduces them.
  nlohmann::json resolved;
  std::string hash;
  std::vector<Job> jobs;
  OptimizeOptions options;
  VerifySpec verify;
  std::optional<std::string> output;
};

struct Overrides {
  std::optional<std::string> preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// Positions of values in the source text, keyed by JSON pointer.
using LineMap = std::map<std::string, std::size_t>;

/// Parses JSON text and records the line of every value. Throws ConfigError on syntax errors.
nlohmann::json parse_with_lines(const std::string& text, const std::string& source, LineMap& lines);

/// Schema-checks the document and builds the jobs. Every error names the source line.
ExperimentConfig resolve_config(nlohmann::json doc, const LineMap& lines, const std::string& source,
                                const Overrides& overrides, Command command);

/// Reads `path` (or starts from an empty document) and resolves it.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides,
                             Command command);

/// Probe operators known by name for a model dimension.
std::map<std::string, CMatrix> named_probes(Eigen::Index dim);

}  // namespace urc::cli
