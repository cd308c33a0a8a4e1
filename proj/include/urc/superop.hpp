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

#include "urc/models.hpp"
#include "urc/propagate.hpp"
#include "urc/qcore.hpp"

namespace urc {

enum class SuperopKind { m0, mtilde, projector, state, kernel };

/// Dense d^2 x d^2 matrix acting on row-stacked operators.
struct Superoperator {
  CMatrix matrix;
  SuperopKind kind = SuperopKind::m0;

  /// Hilbert-space dimension d.
  Eigen::Index dim() const;
  CMatrix apply(const CMatrix& op) const { return devectorize(matrix * vectorize(op)); }
  double frobenius_norm2() const { return matrix.squaredNorm(); }
};

/// How time integrals over [0, t_f] are evaluated. `exact` integrates every
/// constant segment in closed form; `riemann` is a left Riemann sum with
/// `substeps` points per segment.
struct Quadrature {
  enum class Scheme { exact, riemann };
  Scheme scheme = Scheme::exact;
  int substeps = 1;

  static Quadrature exact() { return {}; }
  static Quadrature riemann(int substeps) { return {Scheme::riemann, substeps}; }
};

/// Integral over one segment of U^dagger V U, U(tau) = exp(-i H tau) start.
CMatrix segment_V_integral(const Eigensystem& spectrum, const CMatrix& start, const CMatrix& v, double dt,
                           Quadrature q = {});
/// Integral over one segment of [U (x) U^*]^dagger, U(tau) = exp(-i H tau) start.
CMatrix segment_M0_integral(const Eigensystem& spectrum, const CMatrix& start, double dt, Quadrature q = {});

/// (1/t_f) * integral of U0^dagger(s) V U0(s) ds.
CMatrix time_average_V(const Propagation& prop, const CMatrix& v, Quadrature q = {});
CMatrix time_average_V(const ControlModel& model, const Pulse& pulse, const CMatrix& v,
                       Quadrature q = {});

/// M0 = (1/t_f) * integral of [U0(s) (x) U0(s)^*]^dagger ds, so that M0 |V>> = |Vbar>>.
Superoperator build_M0(const Propagation& prop, Quadrature q = {});
Superoperator build_M0(const ControlModel& model, const Pulse& pulse, Quadrature q = {});

/// |I>><<I| / d
Superoperator projector_identity(Eigen::Index d);
/// Sum of |L_j>><<L_j| over basis elements whose class is in `classes`.
Superoperator projector_subset(const OperatorBasis& basis, const std::set<int>& classes);
/// M0 (I - sum_{k in excluded} P_k). `excluded` must contain the identity class 0.
Superoperator build_Mtilde(const Superoperator& m0, const OperatorBasis& basis,
                           const std::set<int>& excluded);

/// (I - sigma) (x) sigma^*, for a pure sigma.
Superoperator state_projector(const CMatrix& sigma);
/// I - |sigma>><<sigma|. Agrees with state_projector on the range of the latter only.
Superoperator state_projector_rank_form(const CMatrix& sigma);
/// P_sigma M0
Superoperator build_M0_sigma(const Superoperator& m0, const CMatrix& sigma);

/// Classical noise correlation C(t, s) = <xi(t) xi(s)>.
struct Correlation {
  enum class Kind { white, exponential, constant, custom };
  Kind kind = Kind::constant;
  /// white: C = strength * delta(t - s); exponential and constant: variance.
  double strength = 1.0;
  double tau_c = 0.0;
  std::function<double(double, double)> custom_fn;

  static Correlation white(double strength);
  static Correlation exponential(double tau_c, double variance = 1.0);
  static Correlation constant(double value = 1.0);
  static Correlation custom(std::function<double(double, double)> fn);

  /// Smooth part of C; the white-noise delta is handled by the quadrature.
  double operator()(double t, double s) const;
};

/// K = double integral of C(t, s) N_t^dagger P_sigma N_s, N_t = [U0(t) (x) U0(t)^*]^dagger,
/// trapezoidal on the grid of segment boundaries refined by `substeps`.
/// Averaged state fidelity under H0 + lambda xi(t) V is 1 - lambda^2 <<V|K|V>>.
Superoperator noise_kernel(const Propagation& prop, const CMatrix& sigma, const Correlation& corr,
                           int substeps);
Superoperator noise_kernel(const ControlModel& model, const Pulse& pulse, const CMatrix& sigma,
                           const Correlation& corr, int substeps);

/// [U (x) U^*]^dagger = U^dagger (x) U^T
CMatrix conjugation_lift(const CMatrix& u);

}  // namespace urc
