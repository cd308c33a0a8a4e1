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

#include <set>
#include <span>
#include <vector>
#include <variant>

#include "urc/models.hpp"
#include "urc/propagate.hpp"
#include "urc/superop.hpp"

namespace urc {

struct NoRobustness {};
/// Robustness against one known perturbation V.
struct KnownV {
  CMatrix v;
};
/// Robustness against every basis class not listed in `excluded` (which always holds 0).
struct Universal {
  OperatorBasis basis;
  std::set<int> excluded{0};
};
using Robustness = std::variant<NoRobustness, KnownV, Universal>;

/// Weighted cost (J0 + w Jrob) / (1 + w) for a pulse template of fixed
/// segment count and duration.
struct Objective {
  ControlModel model;
  TargetSpec target;
  Robustness robustness = NoRobustness{};
  double weight = 0.0;
  Eigen::Index segments = 1;
  double duration = 1.0;
  Quadrature quadrature{};

  double dt() const { return duration / static_cast<double>(segments); }
  /// Throws ConfigError when dimensions, weight or template are inconsistent.
  void validate() const;
};

struct FunctionalValue {
  double total = 0.0;
  double j0 = 0.0;
  double jrob = 0.0;
};

/// Values in [-1e-12, 0) are roundoff and reported as 0.
double clamp_roundoff(double value);

/// 1 - gate fidelity, or 1 - Tr(U sigma U^dagger rho_target) for state targets.
double J_target(const CMatrix& u0, const TargetSpec& target);

/// ||Vbar0||^2 / d for the traceless part of V.
double J_known_V(const Propagation& prop, const CMatrix& v, Quadrature q = {});
double J_known_V(const ControlModel& model, const Pulse& pulse, const CMatrix& v, Quadrature q = {});

/// Variance of Vbar0 in sigma divided by d; the state-control analogue of J_known_V.
double J_state_known_V(const Propagation& prop, const CMatrix& sigma, const CMatrix& v,
                       Quadrature q = {});

/// ||M0 (I - sum_{k in excluded} P_k)||_F^2 / d
double J_universal(const Propagation& prop, const OperatorBasis& basis, const std::set<int>& excluded,
                   Quadrature q = {});
double J_universal(const ControlModel& model, const Pulse& pulse, const OperatorBasis& basis,
                   const std::set<int>& excluded, Quadrature q = {});

/// ||P_sigma M0 (I - sum_{k in excluded} P_k)||_F^2 / d; `excluded` may be empty.
double J_state_universal(const Propagation& prop, const CMatrix& sigma, const OperatorBasis& basis,
                         const std::set<int>& excluded, Quadrature q = {});
double J_state_universal(const ControlModel& model, const Pulse& pulse, const CMatrix& sigma,
                         const OperatorBasis& basis, const std::set<int>& excluded,
                         Quadrature q = {});

/// t_f^2 ||Vbar0||^2 / d on the traceless part of V.
double chi_unitary(const Propagation& prop, const CMatrix& v, Quadrature q = {});
double chi_unitary(const ControlModel& model, const Pulse& pulse, const CMatrix& v, Quadrature q = {});
/// Same quantity without removing Tr(V); includes the unphysical global-phase part.
double chi_unitary_raw(const Propagation& prop, const CMatrix& v, Quadrature q = {});

/// t_f^2 times the variance of Vbar0 in sigma.
double chi_state(const Propagation& prop, const CMatrix& v, const CMatrix& sigma, Quadrature q = {});
double chi_state(const ControlModel& model, const Pulse& pulse, const CMatrix& v, const CMatrix& sigma,
                 Quadrature q = {});

/// max(0, 1 - chi lambda^2)
double predicted_fidelity(double chi, double lambda);

/// J0 and the robustness term from a single propagation.
FunctionalValue evaluate(const Objective& objective, const Pulse& pulse);
FunctionalValue evaluate(const Objective& objective, const Propagation& prop);

/// Re-evaluates an objective after the controls of one segment change. The
/// other segments' integrals are cached as prefix and suffix sums, so one
/// update costs O(1) in the segment count.
class SegmentUpdate {
 public:
  SegmentUpdate(const Objective& objective, const Pulse& pulse);

  const FunctionalValue& base() const { return base_; }
  FunctionalValue with_segment(Eigen::Index k, std::span<const double> values) const;

 private:
  FunctionalValue finish(const CMatrix& final_unitary, const CMatrix& integral) const;
  CMatrix segment_integral(const Eigensystem& spectrum, const CMatrix& start) const;

  const Objective& objective_;
  Propagation prop_;
  CMatrix v_;
  CMatrix keep_;
  CMatrix state_projector_;
  std::vector<CMatrix> prefix_;
  std::vector<CMatrix> suffix_;
  FunctionalValue base_;
};

}  // namespace urc
