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

#include "urc/superop.hpp"

#include <cmath>

#include <fmt/format.h>

#include "urc/error.hpp"

namespace urc {

namespace {

constexpr double kDegenerateFrequency = 1e-12;

// Integral of exp(i w tau) over [0, dt], written through sinc to avoid the
// cancellation of (exp(i w dt) - 1) / (i w) at small w.
Complex segment_phase_integral(double w, double dt) {
  if (std::abs(w) < kDegenerateFrequency) return {dt, 0.0};
  const double half = 0.5 * w * dt;
  return dt * std::polar(std::sin(half) / half, half);
}

// g_ab = integral of exp(i (e_a - e_b) tau), flattened row-major.
CVector phase_integrals(const RVector& energies, double dt) {
  const Eigen::Index d = energies.size();
  CVector g(d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) g(a * d + b) = segment_phase_integral(energies(a) - energies(b), dt);
  }
  return g;
}

void check_quadrature(const Quadrature& q) {
  if (q.substeps < 1) throw ConfigError("quadrature needs at least one substep");
}

// Invokes f(t, U(t, 0), weight) for each left-Riemann node.
template <typename F>
void for_each_riemann_node(const Propagation& prop, int substeps, F&& f) {
  const double h = prop.dt / substeps;
  for (std::size_t j = 0; j < prop.n_segments(); ++j) {
    for (int s = 0; s < substeps; ++s) {
      const double tau = s * h;
      const CMatrix u = s == 0 ? prop.cumulative[j] : CMatrix(expm_skew(prop.spectra[j], tau) * prop.cumulative[j]);
      f(static_cast<double>(j) * prop.dt + tau, u, h);
    }
  }
}

}  // namespace

Eigen::Index Superoperator::dim() const {
  return static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(matrix.rows()))));
}

CMatrix conjugation_lift(const CMatrix& u) { return kron(u.adjoint(), u.transpose()); }

CMatrix segment_V_integral(const Eigensystem& spectrum, const CMatrix& start, const CMatrix& v, double dt,
                           Quadrature q) {
  const Eigen::Index d = start.rows();
  if (q.scheme == Quadrature::Scheme::exact) {
    const CVector g = phase_integrals(spectrum.values, dt);
    CMatrix inner = spectrum.vectors.adjoint() * v * spectrum.vectors;
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) inner(a, b) *= g(a * d + b);
    }
    const CMatrix r = start.adjoint() * spectrum.vectors;
    return r * inner * r.adjoint();
  }
  const double h = dt / q.substeps;
  CMatrix acc = h * (start.adjoint() * v * start);
  for (int s = 1; s < q.substeps; ++s) {
    const CMatrix u = expm_skew(spectrum, s * h) * start;
    acc += h * (u.adjoint() * v * u);
  }
  return acc;
}

CMatrix time_average_V(const Propagation& prop, const CMatrix& v, Quadrature q) {
  check_quadrature(q);
  if (v.rows() != prop.dim() || v.cols() != prop.dim()) {
    throw ConfigError("perturbation dimension does not match the propagation");
  }
  if (!is_hermitian(v)) throw InvariantError("perturbation is not Hermitian");
  const Eigen::Index d = prop.dim();
  CMatrix acc = CMatrix::Zero(d, d);
  for (std::size_t j = 0; j < prop.n_segments(); ++j) {
    acc += segment_V_integral(prop.spectra[j], prop.cumulative[j], v, prop.dt, q);
  }
  acc /= prop.duration();
  return (acc + acc.adjoint()) / 2.0;
}

CMatrix time_average_V(const ControlModel& model, const Pulse& pulse, const CMatrix& v, Quadrature q) {
  return time_average_V(propagate_segments(model, pulse), v, q);
}

CMatrix segment_M0_integral(const Eigensystem& spectrum, const CMatrix& start, double dt, Quadrature q) {
  if (q.scheme == Quadrature::Scheme::exact) {
    // (R (x) R^*) diag(g) (Q (x) Q^*)^dagger with R = W^dagger Q, W = start and
    // H = Q diag(e) Q^dagger.
    const CVector g = phase_integrals(spectrum.values, dt);
    const CMatrix r = start.adjoint() * spectrum.vectors;
    const CMatrix left = kron(r, r.conjugate()) * g.asDiagonal();
    return left * kron(spectrum.vectors, spectrum.vectors.conjugate()).adjoint();
  }
  const double h = dt / q.substeps;
  CMatrix acc = h * conjugation_lift(start);
  for (int s = 1; s < q.substeps; ++s) acc += h * conjugation_lift(expm_skew(spectrum, s * h) * start);
  return acc;
}

Superoperator build_M0(const Propagation& prop, Quadrature q) {
  check_quadrature(q);
  const Eigen::Index d = prop.dim();
  CMatrix m = CMatrix::Zero(d * d, d * d);
  for (std::size_t j = 0; j < prop.n_segments(); ++j) {
    m += segment_M0_integral(prop.spectra[j], prop.cumulative[j], prop.dt, q);
  }
  m /= prop.duration();
  return {std::move(m), SuperopKind::m0};
}

Superoperator build_M0(const ControlModel& model, const Pulse& pulse, Quadrature q) {
  return build_M0(propagate_segments(model, pulse), q);
}

Superoperator projector_identity(Eigen::Index d) {
  if (d < 2) throw ConfigError("identity projector needs d >= 2");
  const CVector v = vectorize(identity(d));
  return {v * v.adjoint() / static_cast<double>(d), SuperopKind::projector};
}

Superoperator projector_subset(const OperatorBasis& basis, const std::set<int>& classes) {
  const std::set<int> known = basis.labels();
  for (int k : classes) {
    if (!known.contains(k)) throw ConfigError(fmt::format("class label {} not present in basis", k));
  }
  const Eigen::Index d2 = basis.dim() * basis.dim();
  CMatrix p = CMatrix::Zero(d2, d2);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (!classes.contains(basis.class_of(j))) continue;
    const CVector v = vectorize(basis.element(j));
    p.noalias() += v * v.adjoint();
  }
  return {std::move(p), SuperopKind::projector};
}

Superoperator build_Mtilde(const Superoperator& m0, const OperatorBasis& basis,
                           const std::set<int>& excluded) {
  if (!excluded.contains(0)) {
    throw ConfigError("robustness selection must exclude the identity class 0");
  }
  if (basis.dim() != m0.dim()) throw ConfigError("basis dimension does not match M0");
  const CMatrix keep = CMatrix::Identity(m0.matrix.rows(), m0.matrix.cols()) -
                       projector_subset(basis, excluded).matrix;
  return {m0.matrix * keep, SuperopKind::mtilde};
}

Superoperator state_projector(const CMatrix& sigma) {
  require_pure_state(sigma, "sigma");
  const CMatrix complement = identity(sigma.rows()) - sigma;
  return {kron(complement, sigma.conjugate()), SuperopKind::projector};
}

Superoperator state_projector_rank_form(const CMatrix& sigma) {
  require_pure_state(sigma, "sigma");
  const CVector v = vectorize(sigma);
  const Eigen::Index d2 = v.size();
  return {CMatrix::Identity(d2, d2) - v * v.adjoint(), SuperopKind::projector};
}

Superoperator build_M0_sigma(const Superoperator& m0, const CMatrix& sigma) {
  if (sigma.rows() != m0.dim()) throw ConfigError("state dimension does not match M0");
  return {state_projector(sigma).matrix * m0.matrix, SuperopKind::state};
}

Correlation Correlation::white(double strength) {
  if (!(strength >= 0.0)) throw ConfigError("white-noise strength must be non-negative");
  Correlation c;
  c.kind = Kind::white;
  c.strength = strength;
  return c;
}

Correlation Correlation::exponential(double tau_c, double variance) {
  if (!(tau_c > 0.0)) throw ConfigError("correlation time must be positive");
  if (!(variance >= 0.0)) throw ConfigError("noise variance must be non-negative");
  Correlation c;
  c.kind = Kind::exponential;
  c.tau_c = tau_c;
  c.strength = variance;
  return c;
}

Correlation Correlation::constant(double value) {
  Correlation c;
  c.kind = Kind::constant;
  c.strength = value;
  return c;
}

Correlation Correlation::custom(std::function<double(double, double)> fn) {
  Correlation c;
  c.kind = Kind::custom;
  c.custom_fn = std::move(fn);
  return c;
}

double Correlation::operator()(double t, double s) const {
  switch (kind) {
    case Kind::white: return 0.0;
    case Kind::exponential: return strength * std::exp(-std::abs(t - s) / tau_c);
    case Kind::constant: return strength;
    case Kind::custom: return custom_fn(t, s);
  }
  return 0.0;
}

Superoperator noise_kernel(const Propagation& prop, const CMatrix& sigma, const Correlation& corr,
                           int substeps) {
  if (substeps < 1) throw ConfigError("noise kernel needs at least one substep");
  const CMatrix p_sigma = state_projector(sigma).matrix;

  // Grid t_i = i h, i = 0..n, trapezoidal weights.
  std::vector<double> times;
  std::vector<double> weights;
  std::vector<CMatrix> lifts;
  for_each_riemann_node(prop, substeps, [&](double t, const CMatrix& u, double h) {
    times.push_back(t);
    weights.push_back(times.size() == 1 ? h / 2 : h);
    lifts.push_back(conjugation_lift(u));
  });
  times.push_back(prop.duration());
  weights.push_back(prop.dt / substeps / 2);
  lifts.push_back(conjugation_lift(prop.final_unitary()));
  const std::size_t n = times.size();

  const Eigen::Index d2 = p_sigma.rows();
  CMatrix k = CMatrix::Zero(d2, d2);
  if (corr.kind == Correlation::Kind::white) {
    // delta(t - s) on the grid: 1 / w_i on the diagonal.
    for (std::size_t i = 0; i < n; ++i) {
      k.noalias() += (corr.strength * weights[i]) * (lifts[i].adjoint() * p_sigma * lifts[i]);
    }
    return {(k + k.adjoint()) / 2.0, SuperopKind::kernel};
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = corr(times[i], times[j]);
      const double b = corr(times[j], times[i]);
      if (!std::isfinite(a) || std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
        throw ConfigError("correlation function must be symmetric and finite");
      }
    }
  }
  std::vector<CMatrix> projected(n);
  for (std::size_t j = 0; j < n; ++j) projected[j] = p_sigma * lifts[j];
  for (std::size_t i = 0; i < n; ++i) {
    CMatrix row = CMatrix::Zero(d2, d2);
    for (std::size_t j = 0; j < n; ++j) row += (weights[j] * corr(times[i], times[j])) * projected[j];
    k.noalias() += weights[i] * (lifts[i].adjoint() * row);
  }
  return {(k + k.adjoint()) / 2.0, SuperopKind::kernel};
}

Superoperator noise_kernel(const ControlModel& model, const Pulse& pulse, const CMatrix& sigma,
                           const Correlation& corr, int substeps) {
  return noise_kernel(propagate_segments(model, pulse), sigma, corr, substeps);
}

}  // namespace urc
