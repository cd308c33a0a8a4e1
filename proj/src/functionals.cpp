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

#include "urc/functionals.hpp"

#include <cmath>

#include <fmt/format.h>

#include "urc/error.hpp"

namespace urc {

namespace {

void require_hermitian_perturbation(const CMatrix& v, Eigen::Index d) {
  if (v.rows() != d || v.cols() != d) {
    throw ConfigError(fmt::format("perturbation is {}x{}, model dimension is {}", v.rows(), v.cols(), d));
  }
  if (!is_hermitian(v)) throw InvariantError("perturbation is not Hermitian");
}

CMatrix kept_subspace(const OperatorBasis& basis, const std::set<int>& excluded) {
  const Eigen::Index d2 = basis.dim() * basis.dim();
  CMatrix keep = CMatrix::Identity(d2, d2);
  if (!excluded.empty()) keep -= projector_subset(basis, excluded).matrix;
  return keep;
}

double variance(const CMatrix& op, const CMatrix& sigma) {
  const double mean = (sigma * op).trace().real();
  return (sigma * op * op).trace().real() - mean * mean;
}

}  // namespace

void Objective::validate() const {
  const Eigen::Index d = model.dim();
  if (target.dim() != d) {
    throw ConfigError(fmt::format("target dimension {} does not match model dimension {}", target.dim(), d));
  }
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw ConfigError("weight must be non-negative");
  if (segments < 1) throw ConfigError("pulse template needs at least one segment");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
  if (quadrature.substeps < 1) throw ConfigError("quadrature needs at least one substep");
  if (const auto* k = std::get_if<KnownV>(&robustness)) require_hermitian_perturbation(k->v, d);
  if (const auto* u = std::get_if<Universal>(&robustness)) {
    if (u->basis.dim() != d) throw ConfigError("robustness basis dimension does not match the model");
    const auto labels = u->basis.labels();
    for (int k : u->excluded) {
      if (!labels.contains(k)) throw ConfigError(fmt::format("unknown class label {}", k));
    }
    if (target.is_unitary() && !u->excluded.contains(0)) {
      throw ConfigError("robustness selection must exclude the identity class 0");
    }
  }
}

double clamp_roundoff(double value) {
  if (value < 0.0 && value >= -1e-12) return 0.0;
  return value;
}

double J_target(const CMatrix& u0, const TargetSpec& target) {
  if (u0.rows() != target.dim()) throw ConfigError("evolution and target differ in dimension");
  if (target.is_unitary()) return clamp_roundoff(1.0 - gate_fidelity(target.unitary_target(), u0));
  const CMatrix rho = u0 * target.initial_state() * u0.adjoint();
  return clamp_roundoff(1.0 - (rho * target.target_state()).trace().real());
}

double J_known_V(const Propagation& prop, const CMatrix& v, Quadrature q) {
  require_hermitian_perturbation(v, prop.dim());
  const CMatrix vbar = time_average_V(prop, traceless_part(v), q);
  return hs_norm2(vbar) / static_cast<double>(prop.dim());
}

double J_known_V(const ControlModel& model, const Pulse& pulse, const CMatrix& v, Quadrature q) {
  return J_known_V(propagate_segments(model, pulse), v, q);
}

double J_state_known_V(const Propagation& prop, const CMatrix& sigma, const CMatrix& v, Quadrature q) {
  require_hermitian_perturbation(v, prop.dim());
  require_pure_state(sigma, "sigma");
  const CMatrix vbar = time_average_V(prop, v, q);
  return clamp_roundoff(variance(vbar, sigma)) / static_cast<double>(prop.dim());
}

double J_universal(const Propagation& prop, const OperatorBasis& basis, const std::set<int>& excluded,
                   Quadrature q) {
  const Superoperator mt = build_Mtilde(build_M0(prop, q), basis, excluded);
  return mt.frobenius_norm2() / static_cast<double>(prop.dim());
}

double J_universal(const ControlModel& model, const Pulse& pulse, const OperatorBasis& basis,
                   const std::set<int>& excluded, Quadrature q) {
  return J_universal(propagate_segments(model, pulse), basis, excluded, q);
}

double J_state_universal(const Propagation& prop, const CMatrix& sigma, const OperatorBasis& basis,
                         const std::set<int>& excluded, Quadrature q) {
  if (basis.dim() != prop.dim()) throw ConfigError("basis dimension does not match the model");
  const Superoperator ms = build_M0_sigma(build_M0(prop, q), sigma);
  const CMatrix restricted = ms.matrix * kept_subspace(basis, excluded);
  return restricted.squaredNorm() / static_cast<double>(prop.dim());
}

double J_state_universal(const ControlModel& model, const Pulse& pulse, const CMatrix& sigma,
                         const OperatorBasis& basis, const std::set<int>& excluded, Quadrature q) {
  return J_state_universal(propagate_segments(model, pulse), sigma, basis, excluded, q);
}

double chi_unitary(const Propagation& prop, const CMatrix& v, Quadrature q) {
  const double tf = prop.duration();
  return tf * tf * J_known_V(prop, v, q);
}

double chi_unitary(const ControlModel& model, const Pulse& pulse, const CMatrix& v, Quadrature q) {
  return chi_unitary(propagate_segments(model, pulse), v, q);
}

double chi_unitary_raw(const Propagation& prop, const CMatrix& v, Quadrature q) {
  require_hermitian_perturbation(v, prop.dim());
  const double tf = prop.duration();
  return tf * tf * hs_norm2(time_average_V(prop, v, q)) / static_cast<double>(prop.dim());
}

double chi_state(const Propagation& prop, const CMatrix& v, const CMatrix& sigma, Quadrature q) {
  const double tf = prop.duration();
  return tf * tf * prop.dim() * J_state_known_V(prop, sigma, v, q);
}

double chi_state(const ControlModel& model, const Pulse& pulse, const CMatrix& v, const CMatrix& sigma,
                 Quadrature q) {
  return chi_state(propagate_segments(model, pulse), v, sigma, q);
}

double predicted_fidelity(double chi, double lambda) {
  if (chi < 0.0) throw InputError("susceptibility must be non-negative");
  return std::max(0.0, 1.0 - chi * lambda * lambda);
}

FunctionalValue evaluate(const Objective& objective, const Propagation& prop) {
  FunctionalValue out;
  out.j0 = J_target(prop.final_unitary(), objective.target);
  const auto& t = objective.target;
  if (const auto* k = std::get_if<KnownV>(&objective.robustness)) {
    out.jrob = t.is_unitary() ? J_known_V(prop, k->v, objective.quadrature)
                              : J_state_known_V(prop, t.initial_state(), k->v, objective.quadrature);
  } else if (const auto* u = std::get_if<Universal>(&objective.robustness)) {
    out.jrob = t.is_unitary()
                   ? J_universal(prop, u->basis, u->excluded, objective.quadrature)
                   : J_state_universal(prop, t.initial_state(), u->basis, u->excluded, objective.quadrature);
  }
  out.jrob = clamp_roundoff(out.jrob);
  const bool robust = !std::holds_alternative<NoRobustness>(objective.robustness);
  out.total = robust ? (out.j0 + objective.weight * out.jrob) / (1.0 + objective.weight) : out.j0;
  if (!std::isfinite(out.total)) throw NumericError("functional evaluated to a non-finite value");
  return out;
}

FunctionalValue evaluate(const Objective& objective, const Pulse& pulse) {
  if (pulse.segments() != objective.segments) {
    throw ConfigError(fmt::format("pulse has {} segments, objective expects {}", pulse.segments(),
                                  objective.segments));
  }
  return evaluate(objective, propagate_segments(objective.model, pulse));
}

SegmentUpdate::SegmentUpdate(const Objective& objective, const Pulse& pulse)
    : objective_(objective), prop_(propagate_segments(objective.model, pulse)) {
  if (pulse.segments() != objective.segments) {
    throw ConfigError(fmt::format("pulse has {} segments, objective expects {}", pulse.segments(),
                                  objective.segments));
  }
  const auto& t = objective.target;
  if (const auto* k = std::get_if<KnownV>(&objective.robustness)) {
    require_hermitian_perturbation(k->v, prop_.dim());
    v_ = t.is_unitary() ? traceless_part(k->v) : k->v;
  } else if (const auto* u = std::get_if<Universal>(&objective.robustness)) {
    if (u->basis.dim() != prop_.dim()) throw ConfigError("basis dimension does not match the model");
    keep_ = kept_subspace(u->basis, u->excluded);
    if (!t.is_unitary()) state_projector_ = state_projector(t.initial_state()).matrix;
  }
  const std::size_t n = prop_.n_segments();
  if (std::holds_alternative<NoRobustness>(objective.robustness)) {
    base_ = finish(prop_.final_unitary(), CMatrix());
    return;
  }
  std::vector<CMatrix> seg;
  seg.reserve(n);
  for (std::size_t j = 0; j < n; ++j) seg.push_back(segment_integral(prop_.spectra[j], prop_.cumulative[j]));
  const Eigen::Index rows = seg.front().rows();
  prefix_.assign(n + 1, CMatrix::Zero(rows, rows));
  suffix_.assign(n + 1, CMatrix::Zero(rows, rows));
  for (std::size_t j = 0; j < n; ++j) prefix_[j + 1] = prefix_[j] + seg[j];
  for (std::size_t j = n; j-- > 0;) suffix_[j] = suffix_[j + 1] + seg[j];
  base_ = finish(prop_.final_unitary(), prefix_[n]);
}

CMatrix SegmentUpdate::segment_integral(const Eigensystem& spectrum, const CMatrix& start) const {
  if (std::holds_alternative<KnownV>(objective_.robustness)) {
    return segment_V_integral(spectrum, start, v_, prop_.dt, objective_.quadrature);
  }
  return segment_M0_integral(spectrum, start, prop_.dt, objective_.quadrature);
}

FunctionalValue SegmentUpdate::finish(const CMatrix& final_unitary, const CMatrix& integral) const {
  FunctionalValue out;
  const auto& t = objective_.target;
  const double d = static_cast<double>(prop_.dim());
  out.j0 = J_target(final_unitary, t);
  if (std::holds_alternative<KnownV>(objective_.robustness)) {
    CMatrix vbar = integral / prop_.duration();
    vbar = (vbar + vbar.adjoint()).eval() / 2.0;
    out.jrob = t.is_unitary() ? hs_norm2(vbar) / d : clamp_roundoff(variance(vbar, t.initial_state())) / d;
  } else if (std::holds_alternative<Universal>(objective_.robustness)) {
    const CMatrix m0 = integral / prop_.duration();
    out.jrob = t.is_unitary() ? (m0 * keep_).squaredNorm() / d
                              : (state_projector_ * m0 * keep_).squaredNorm() / d;
  }
  out.jrob = clamp_roundoff(out.jrob);
  const bool robust = !std::holds_alternative<NoRobustness>(objective_.robustness);
  out.total = robust ? (out.j0 + objective_.weight * out.jrob) / (1.0 + objective_.weight) : out.j0;
  if (!std::isfinite(out.total)) throw NumericError("functional evaluated to a non-finite value");
  return out;
}

FunctionalValue SegmentUpdate::with_segment(Eigen::Index k, std::span<const double> values) const {
  const std::size_t n = prop_.n_segments();
  if (k < 0 || static_cast<std::size_t>(k) >= n) throw InputError(fmt::format("segment {} out of range", k));
  const auto j = static_cast<std::size_t>(k);
  const Eigensystem spectrum = hermitian_eigensystem(objective_.model.hamiltonian(values));
  const CMatrix& start = prop_.cumulative[j];
  // Later segments start from C_m X instead of C_m.
  const CMatrix x = prop_.cumulative[j + 1].adjoint() * expm_skew(spectrum, prop_.dt) * start;
  const CMatrix final_unitary = prop_.final_unitary() * x;
  if (std::holds_alternative<NoRobustness>(objective_.robustness)) return finish(final_unitary, CMatrix());
  CMatrix integral = prefix_[j] + segment_integral(spectrum, start);
  if (std::holds_alternative<KnownV>(objective_.robustness)) {
    integral += x.adjoint() * suffix_[j + 1] * x;
  } else {
    integral += conjugation_lift(x) * suffix_[j + 1];
  }
  return finish(final_unitary, integral);
}

}  // namespace urc
