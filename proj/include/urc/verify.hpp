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
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "urc/models.hpp"
#include "urc/superop.hpp"

namespace urc {

/// U_lambda(t_f, 0) with lambda V added to every segment generator.
CMatrix perturbed_propagator(const ControlModel& model, const Pulse& pulse, const CMatrix& v, double lambda);

enum class FidelityKind { gate, state };

struct SweepCurve {
  std::vector<double> lambdas;
  std::vector<double> fidelities;
  std::string label;
  FidelityKind kind = FidelityKind::gate;
  std::uint64_t seed = 0;
  /// Per-realization curves of a random-direction sweep (empty otherwise).
  std::vector<std::vector<double>> realizations;

  double at_zero() const;
};

/// F(lambda) against the target. The grid must contain 0.
SweepCurve fidelity_sweep(const ControlModel& model, const Pulse& pulse, const TargetSpec& target, const CMatrix& v,
                          const std::vector<double>& lambdas, std::string label = "");

/// Span from which random perturbation directions are drawn, V = norm * sum_j c_j L_j
/// with c uniform on the unit sphere over the selected classes.
struct DirectionSpace {
  OperatorBasis basis;
  std::set<int> classes;
  double norm = 1.0;

  /// Qubit: V = n . sigma with n a unit vector. Larger d: unit HS sphere of
  /// all traceless classes of the symmetric-subspace basis.
  static DirectionSpace for_dimension(Eigen::Index d);
};

/// Directions for realizations 0..n-1; realization r uses the stream derive_seed(seed, r).
std::vector<CMatrix> sample_directions(const DirectionSpace& space, std::size_t n, std::uint64_t seed);

SweepCurve random_direction_sweep(const ControlModel& model, const Pulse& pulse, const TargetSpec& target,
                                  std::size_t n_realizations, const std::vector<double>& lambdas, std::uint64_t seed,
                                  const std::optional<DirectionSpace>& space = std::nullopt, int threads = 1);

struct CurvatureFit {
  double chi = 0.0;
  double lambda_max = 0.0;
  std::size_t points = 0;
  double residual = 0.0;
  double predicted = 0.0;
  double deviation = 0.0;
};

/// Least-squares fit F(0) - F(lambda) = chi lambda^2 over the points with 1 - F <= 0.05.
CurvatureFit curvature_check(const SweepCurve& curve, double predicted_chi);

struct OneDesignReport {
  /// Deviation per basis element (0 for the identity element).
  std::vector<double> deviations;
  double max_deviation = 0.0;
  double sum_squares = 0.0;
  /// Samples actually used: N_P * (n_samples / N_P).
  std::size_t samples = 0;
  int substeps = 1;
};

/// Deviation of the sampled twirl (1/L) sum U^dagger L U from (Tr L / d) I, on the
/// left Riemann grid with n_samples / N_P points per segment.
OneDesignReport one_design_check(const ControlModel& model, const Pulse& pulse, const OperatorBasis& basis,
                                 std::size_t n_samples);

struct NoiseEstimate {
  double mean = 1.0;
  double stderr_mean = 0.0;
  std::size_t trajectories = 0;
  int substeps = 10;
};

/// Average state fidelity under H0 + lambda xi(t) V for Gaussian xi with white or
/// exponential correlation, xi piecewise constant on segments refined by `substeps`.
NoiseEstimate noise_monte_carlo(const ControlModel& model, const Pulse& pulse, const CMatrix& sigma,
                                const CMatrix& v, const Correlation& corr, double lambda, std::size_t n_traj,
                                std::uint64_t seed, int substeps = 10, int threads = 1);

}  // namespace urc
