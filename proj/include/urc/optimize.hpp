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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "urc/functionals.hpp"
#include "urc/grad.hpp"

namespace urc {

struct OptimizeOptions {
  int max_iterations = 2000;
  GradientMode gradient = GradientMode::analytic_when_available;
  double fd_step = 1e-6;
  double gradient_tolerance = 1e-9;
  double function_tolerance = 1e-12;
  /// A start succeeds when its total drops below this value.
  double success_threshold = 1e-7;
  /// Stop a start as soon as total < stop_below (0 disables).
  double stop_below = 0.0;
  int n_starts = 1;
  std::uint64_t seed = 0;
  /// Grid index mixed into the per-start seeds, set by scan drivers.
  std::uint64_t grid_index = 0;
  /// Skip the remaining starts once one has succeeded.
  bool stop_at_first_success = false;
  int threads = 1;

  void validate() const;
};

struct TracePoint {
  int iteration = 0;
  double value = 0.0;
};

struct StartResult {
  std::uint64_t seed = 0;
  Pulse pulse = Pulse::zeros(1, 1, 1.0);
  FunctionalValue value;
  std::vector<TracePoint> trace;
  int iterations = 0;
  std::string stop_reason;
  /// False when the start hit a non-finite functional and was discarded.
  bool finite = true;
};

struct OptimizationResult {
  Pulse best = Pulse::zeros(1, 1, 1.0);
  FunctionalValue value;
  std::vector<StartResult> starts;
  std::size_t best_start = 0;
  bool success = false;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

/// Seed of the RNG stream for (start, grid point) under a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t start, std::uint64_t grid = 0);

/// Phases uniform on [0, 2 pi), amplitudes normal with the model scale as deviation.
Pulse initial_guess(const Objective& objective, std::uint64_t seed);

struct MinimizeResult {
  RVector x;
  double f = 0.0;
  std::vector<TracePoint> trace;
  int iterations = 0;
  std::string stop_reason;
};

/// BFGS with a strong-Wolfe line search. `fg` returns f(x) and fills the gradient.
MinimizeResult bfgs_minimize(const std::function<double(const RVector&, RVector*)>& fg, RVector x0,
                             const OptimizeOptions& options);

/// Multistart optimization. When `initial` is given, start 0 uses it instead of a random guess.
OptimizationResult optimize_pulse(const Objective& objective, const OptimizeOptions& options,
                                  const std::optional<Pulse>& initial = std::nullopt);

struct MCTScanResult {
  std::vector<double> grid;
  std::vector<double> best;
  std::vector<bool> success;
  std::vector<OptimizationResult> points;
  std::optional<double> t_mct;
  /// Grid spacing around t_mct (largest neighbouring step).
  double resolution = 0.0;
};

/// `grid` holds durations in the objective's time units. Every point reruns
/// the multistart with N_P fixed. `on_point` is called after each point.
MCTScanResult mct_scan(const Objective& tmpl, const std::vector<double>& grid, const OptimizeOptions& options,
                       const std::function<void(std::size_t, const OptimizationResult&)>& on_point = {},
                       const std::function<std::optional<OptimizationResult>(std::size_t)>& cached = {});

/// A named perturbation used by verification sweeps.
struct Probe {
  std::string name;
  CMatrix op;
};

/// A ready-to-run configuration.
struct Preset {
  std::string name;   // group.method
  std::string group;
  std::string method;
  std::string description;
  Objective objective;
  /// Duration of one dimensionless time unit (2 pi / rate).
  double time_unit = 1.0;
  std::vector<Probe> probes;
  /// Dimensionless scan grid, empty for single-duration presets.
  std::vector<double> scan_grid;

  double dimensionless_time() const { return objective.duration / time_unit; }
};

std::vector<Preset> preset_registry();
/// Throws ConfigError for unknown names.
const Preset& find_preset(const std::string& name);

}  // namespace urc
