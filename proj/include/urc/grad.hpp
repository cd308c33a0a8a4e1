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

#include <functional>
#include <set>

#include "urc/functionals.hpp"
#include "urc/models.hpp"
#include "urc/propagate.hpp"

namespace urc {

enum class GradientMethod { analytic, finite_difference };

/// d f / d(parameter), parameters ordered as Pulse::parameters().
struct Gradient {
  RVector values;
  GradientMethod method = GradientMethod::analytic;
  double step = 0.0;
};

enum class DerivativeMode {
  exact,       // Frechet derivative of the matrix exponential
  short_time,  // -i dt (dH/du) U_k
};

/// dU_k / du_{k,channel}
CMatrix segment_unitary_derivative(const ControlModel& model, const Pulse& pulse, Eigen::Index k,
                                   Eigen::Index channel, DerivativeMode mode = DerivativeMode::exact);
CMatrix segment_unitary_derivative(const ControlModel& model, const Pulse& pulse, const Propagation& prop,
                                   Eigen::Index k, Eigen::Index channel,
                                   DerivativeMode mode = DerivativeMode::exact);

/// Gradient of J_U = (||M0||^2 - 1) / d with M0 the left Riemann sum over the
/// segment starts t_n = n dt, n = 0..N_P-1. Only the universal selection {0}.
Gradient grad_JU_analytic(const ControlModel& model, const Pulse& pulse, const OperatorBasis& basis,
                          const std::set<int>& excluded, DerivativeMode mode = DerivativeMode::exact);

/// Gradient of J_target.
Gradient grad_J_target_analytic(const ControlModel& model, const Pulse& pulse, const TargetSpec& target);

/// Central differences, one pair of evaluations per parameter.
Gradient grad_finite_difference(const std::function<double(const RVector&)>& f, const RVector& x,
                                double h = 1e-6);
Gradient grad_finite_difference(const Objective& objective, const Pulse& pulse, double h = 1e-6);

/// True when objective_gradient can avoid finite differences for this objective.
bool has_analytic_gradient(const Objective& objective);

enum class GradientMode { analytic_when_available, finite_difference };

Gradient objective_gradient(const Objective& objective, const Pulse& pulse,
                            GradientMode mode = GradientMode::analytic_when_available, double h = 1e-6);

/// exp(-i dt H_d) exp(-i dt u W) exp(dt^2 u [H_d, W] / 2): segment unitary of
/// H_d + u W accurate to O(dt^3).
CMatrix bch_segment_unitary(const CMatrix& drift, const CMatrix& w, double u, double dt);

}  // namespace urc
