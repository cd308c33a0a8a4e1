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

#include "urc/grad.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "urc/error.hpp"

namespace urc {

namespace {

// Q (Phi o (Q^dagger E Q)) Q^dagger with E = -i dt W and Phi the divided
// differences of the exponential at the eigenvalues -i dt e_a.
CMatrix frechet_exp(const Eigensystem& spec, const CMatrix& w, double dt) {
  const Eigen::Index d = spec.values.size();
  const CMatrix& q = spec.vectors;
  CMatrix inner = q.adjoint() * w * q;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      const double ea = spec.values(a);
      const double eb = spec.values(b);
      const double y = 0.5 * dt * (ea - eb);
      const double sinc = std::abs(y) < 1e-8 ? 1.0 - y * y / 6.0 : std::sin(y) / y;
      const Complex phase = std::polar(1.0, -0.5 * dt * (ea + eb));
      inner(a, b) *= Complex(0.0, -dt) * phase * sinc;
    }
  }
  return q * inner * q.adjoint();
}

CMatrix derivative_from(const ControlModel& model, const Pulse& pulse, const Propagation& prop,
                        Eigen::Index k, Eigen::Index channel, DerivativeMode mode) {
  const CMatrix w = model.control_derivative(pulse.segment(k), channel);
  const auto ks = static_cast<std::size_t>(k);
  if (mode == DerivativeMode::short_time) return Complex(0.0, -prop.dt) * w * prop.segments[ks];
  return frechet_exp(prop.spectra[ks], w, prop.dt);
}

void check_index(const Pulse& pulse, Eigen::Index k, Eigen::Index channel) {
  if (k < 0 || k >= pulse.segments()) throw InputError(fmt::format("segment index {} out of range", k));
  if (channel < 0 || channel >= pulse.channels()) {
    throw InputError(fmt::format("channel index {} out of range", channel));
  }
}

bool universal_only(const std::set<int>& excluded) { return excluded == std::set<int>{0}; }

}  // namespace

CMatrix segment_unitary_derivative(const ControlModel& model, const Pulse& pulse, const Propagation& prop,
                                   Eigen::Index k, Eigen::Index channel, DerivativeMode mode) {
  check_index(pulse, k, channel);
  return derivative_from(model, pulse, prop, k, channel, mode);
}

CMatrix segment_unitary_derivative(const ControlModel& model, const Pulse& pulse, Eigen::Index k,
                                   Eigen::Index channel, DerivativeMode mode) {
  check_index(pulse, k, channel);
  return derivative_from(model, pulse, propagate_segments(model, pulse), k, channel, mode);
}

Gradient grad_JU_analytic(const ControlModel& model, const Pulse& pulse, const OperatorBasis& basis,
                          const std::set<int>& excluded, DerivativeMode mode) {
  if (!universal_only(excluded)) {
    throw UnsupportedError("analytic gradient covers the universal selection {0} only; use finite differences");
  }
  if (basis.dim() != model.dim()) throw ConfigError("basis dimension does not match the model");
  const Propagation prop = propagate_segments(model, pulse);
  const Eigen::Index np = pulse.segments();
  const Eigen::Index nc = pulse.channels();
  const auto& c = prop.cumulative;

  // T_mn = Tr(C_m C_n^dagger) over the Riemann nodes m, n < N_P.
  CMatrix t(np, np);
  for (Eigen::Index m = 0; m < np; ++m) {
    for (Eigen::Index n = 0; n < np; ++n) t(m, n) = (c[m] * c[n].adjoint()).trace();
  }

  // d T_mn / du_k = ([m > k] - [n > k]) Tr(X_k C_n^dagger C_m) with
  // X_k = C_{k+1}^dagger dU_k U_k^dagger C_{k+1}; summed against conj(T_mn):
  // F_k = sum_{m > k >= n} conj(T_mn) C_n^dagger C_m, dJ = (2 / (d N^2)) Re Tr(X_k (F_k - F_k^dagger)).
  const Eigen::Index d = model.dim();
  const double scale = 2.0 / (static_cast<double>(d) * static_cast<double>(np * np));
  RVector g = RVector::Zero(np * nc);
  for (Eigen::Index k = 0; k + 1 < np; ++k) {
    CMatrix f = CMatrix::Zero(d, d);
    for (Eigen::Index n = 0; n <= k; ++n) {
      CMatrix row = CMatrix::Zero(d, d);
      for (Eigen::Index m = k + 1; m < np; ++m) row += std::conj(t(m, n)) * c[m];
      f += c[n].adjoint() * row;
    }
    const CMatrix s = f - f.adjoint();
    const auto ks = static_cast<std::size_t>(k);
    for (Eigen::Index ch = 0; ch < nc; ++ch) {
      const CMatrix du = derivative_from(model, pulse, prop, k, ch, mode);
      const CMatrix x = c[ks + 1].adjoint() * du * prop.segments[ks].adjoint() * c[ks + 1];
      g(k * nc + ch) = scale * (x * s).trace().real();
    }
  }
  return {g, GradientMethod::analytic, 0.0};
}

Gradient grad_J_target_analytic(const ControlModel& model, const Pulse& pulse, const TargetSpec& target) {
  if (target.dim() != model.dim()) throw ConfigError("target dimension does not match the model");
  const Propagation prop = propagate_segments(model, pulse);
  const Eigen::Index np = pulse.segments();
  const Eigen::Index nc = pulse.channels();
  const auto d = static_cast<double>(model.dim());
  const CMatrix& uf = prop.final_unitary();
  RVector g(np * nc);

  // U_f = L_k dU_k R_k with L_k = U_f C_{k+1}^dagger and R_k = C_k.
  // Gate: J = 1 - |tau|^2/d^2, tau = Tr(T^dagger U_f).
  // State: J = 1 - Tr(U_f sigma U_f^dagger rho).
  Complex tau;
  if (target.is_unitary()) tau = (target.unitary_target().adjoint() * uf).trace();
  for (Eigen::Index k = 0; k < np; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const CMatrix left = uf * prop.cumulative[ks + 1].adjoint();
    for (Eigen::Index ch = 0; ch < nc; ++ch) {
      const CMatrix du = derivative_from(model, pulse, prop, k, ch, DerivativeMode::exact);
      const CMatrix duf = left * du * prop.cumulative[ks];
      double value;
      if (target.is_unitary()) {
        const Complex dtau = (target.unitary_target().adjoint() * duf).trace();
        value = -2.0 * (std::conj(tau) * dtau).real() / (d * d);
      } else {
        const CMatrix& sigma = target.initial_state();
        const CMatrix& rho = target.target_state();
        value = -2.0 * (duf * sigma * uf.adjoint() * rho).trace().real();
      }
      g(k * nc + ch) = value;
    }
  }
  return {g, GradientMethod::analytic, 0.0};
}

Gradient grad_finite_difference(const std::function<double(const RVector&)>& f, const RVector& x, double h) {
  if (!(h > 0.0)) throw InputError("finite-difference step must be positive");
  RVector g(x.size());
  RVector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError(fmt::format("non-finite functional value at parameter {}", i));
    }
    g(i) = (up - down) / (2.0 * h);
  }
  return {g, GradientMethod::finite_difference, h};
}

Gradient grad_finite_difference(const Objective& objective, const Pulse& pulse, double h) {
  if (!(h > 0.0)) throw InputError("finite-difference step must be positive");
  const SegmentUpdate update(objective, pulse);
  const Eigen::Index nc = pulse.channels();
  RVector g(pulse.segments() * nc);
  std::vector<double> row(static_cast<std::size_t>(nc));
  // Parameter i sits at segment i / nc, channel i % nc.
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Eigen::Index k = i / nc;
    const auto c = static_cast<std::size_t>(i % nc);
    const auto seg = pulse.segment(k);
    std::copy(seg.begin(), seg.end(), row.begin());
    row[c] = seg[c] + h;
    const double up = update.with_segment(k, row).total;
    row[c] = seg[c] - h;
    const double down = update.with_segment(k, row).total;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError(fmt::format("non-finite functional value at parameter {}", i));
    }
    g(i) = (up - down) / (2.0 * h);
  }
  return {g, GradientMethod::finite_difference, h};
}

bool has_analytic_gradient(const Objective& objective) {
  if (std::holds_alternative<NoRobustness>(objective.robustness) || objective.weight == 0.0) return true;
  if (const auto* u = std::get_if<Universal>(&objective.robustness)) {
    return objective.target.is_unitary() && universal_only(u->excluded) &&
           objective.quadrature.scheme == Quadrature::Scheme::riemann && objective.quadrature.substeps == 1;
  }
  return false;
}

Gradient objective_gradient(const Objective& objective, const Pulse& pulse, GradientMode mode, double h) {
  if (mode == GradientMode::finite_difference || !has_analytic_gradient(objective)) {
    return grad_finite_difference(objective, pulse, h);
  }
  Gradient g = grad_J_target_analytic(objective.model, pulse, objective.target);
  if (const auto* u = std::get_if<Universal>(&objective.robustness); u && objective.weight != 0.0) {
    const Gradient gr = grad_JU_analytic(objective.model, pulse, u->basis, u->excluded);
    g.values = (g.values + objective.weight * gr.values) / (1.0 + objective.weight);
  }
  return g;
}

CMatrix bch_segment_unitary(const CMatrix& drift, const CMatrix& w, double u, double dt) {
  const CMatrix comm = drift * w - w * drift;
  // exp(K) for anti-Hermitian K equals expm_skew(i K, 1).
  const CMatrix correction = expm_skew(Complex(0.0, 0.5 * dt * dt * u) * comm, 1.0);
  return expm_skew(drift, dt) * expm_skew(w, u * dt) * correction;
}

}  // namespace urc
