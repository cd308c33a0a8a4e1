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

#include "urc/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "urc/error.hpp"

namespace urc {

ControlChannel ControlChannel::amplitude(CMatrix op) {
  ControlChannel c;
  c.kind = ChannelKind::amplitude;
  c.op = std::move(op);
  return c;
}

ControlChannel ControlChannel::phase(CMatrix x_like, CMatrix y_like, double omega) {
  ControlChannel c;
  c.kind = ChannelKind::phase;
  c.op = std::move(x_like);
  c.op_y = std::move(y_like);
  c.omega = omega;
  return c;
}

ControlModel::ControlModel(std::string label, CMatrix drift, std::vector<ControlChannel> channels,
                           double scale, std::optional<double> clamp)
    : label_(std::move(label)),
      drift_(std::move(drift)),
      channels_(std::move(channels)),
      scale_(scale),
      clamp_(clamp) {
  if (drift_.rows() == 0 || drift_.rows() != drift_.cols()) {
    throw ConfigError("model drift must be a non-empty square matrix");
  }
  if (!is_hermitian(drift_)) throw InvariantError("model drift is not Hermitian");
  const auto check = [&](const CMatrix& op, std::size_t c) {
    if (op.rows() != dim() || op.cols() != dim()) {
      throw ConfigError(fmt::format("control {} has dimension {}, model has {}", c, op.rows(), dim()));
    }
    if (!is_hermitian(op)) throw InvariantError(fmt::format("control {} is not Hermitian", c));
  };
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    check(channels_[c].op, c);
    if (channels_[c].kind == ChannelKind::phase) check(channels_[c].op_y, c);
  }
  if (!(scale_ > 0.0)) throw ConfigError("model scale must be positive");
  if (clamp_ && !(*clamp_ > 0.0)) throw ConfigError("amplitude clamp must be positive");
}

double ControlModel::effective_amplitude(double u) const {
  return clamp_ ? *clamp_ * std::tanh(u / *clamp_) : u;
}

double ControlModel::effective_amplitude_slope(double u) const {
  if (!clamp_) return 1.0;
  const double c = std::cosh(u / *clamp_);
  return 1.0 / (c * c);
}

CMatrix ControlModel::hamiltonian(std::span<const double> values) const {
  if (static_cast<Eigen::Index>(values.size()) != n_channels()) {
    throw ConfigError(
        fmt::format("pulse has {} channels, model '{}' has {}", values.size(), label_, n_channels()));
  }
  CMatrix h = drift_;
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    const auto& ch = channels_[c];
    if (ch.kind == ChannelKind::amplitude) {
      h += effective_amplitude(values[c]) * ch.op;
    } else {
      h += ch.omega * (std::cos(values[c]) * ch.op + std::sin(values[c]) * ch.op_y);
    }
  }
  return h;
}

CMatrix ControlModel::control_derivative(std::span<const double> values, Eigen::Index channel) const {
  if (channel < 0 || channel >= n_channels()) {
    throw ConfigError(fmt::format("channel {} out of range", channel));
  }
  const auto& ch = channels_[static_cast<std::size_t>(channel)];
  const double u = values[static_cast<std::size_t>(channel)];
  if (ch.kind == ChannelKind::amplitude) return effective_amplitude_slope(u) * ch.op;
  return ch.omega * (-std::sin(u) * ch.op + std::cos(u) * ch.op_y);
}

Pulse::Pulse(Table values, double dt) : values_(std::move(values)), dt_(dt) {
  if (values_.rows() < 1) throw ConfigError("pulse needs at least one segment");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ConfigError("segment duration must be positive");
  if (!values_.allFinite()) throw InputError("pulse has non-finite values");
}

Pulse Pulse::zeros(Eigen::Index segments, Eigen::Index channels, double dt) {
  return {Table::Zero(segments, channels), dt};
}

Pulse Pulse::from_parameters(const RVector& params, Eigen::Index segments, Eigen::Index channels,
                             double dt) {
  if (params.size() != segments * channels) {
    throw ConfigError(fmt::format("{} parameters for a {}x{} pulse", params.size(), segments, channels));
  }
  Table t(segments, channels);
  std::copy(params.data(), params.data() + params.size(), t.data());
  return {std::move(t), dt};
}

RVector Pulse::parameters() const {
  RVector p(values_.size());
  std::copy(values_.data(), values_.data() + values_.size(), p.data());
  return p;
}

Pulse Pulse::with_parameters(const RVector& params) const {
  return from_parameters(params, segments(), channels(), dt_);
}

OperatorBasis::OperatorBasis(std::vector<CMatrix> elements, std::vector<int> classes)
    : elements_(std::move(elements)), classes_(std::move(classes)) {
  if (elements_.empty()) throw ConfigError("empty operator basis");
  if (elements_.size() != classes_.size()) throw ConfigError("one class label per basis element");
  const Eigen::Index d = elements_.front().rows();
  const CMatrix lambda0 = identity(d) / std::sqrt(static_cast<double>(d));
  if ((elements_.front() - lambda0).cwiseAbs().maxCoeff() > 1e-14 || classes_.front() != 0) {
    throw InvariantError("basis element 0 must be I/sqrt(d) with class 0");
  }
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].rows() != d || elements_[i].cols() != d) {
      throw ConfigError("basis elements must share one dimension");
    }
    if (!is_hermitian(elements_[i], 1e-10)) throw InvariantError("basis element is not Hermitian");
    if (classes_[i] < 0) throw ConfigError("class labels must be non-negative");
    if (i > 0 && classes_[i] == 0) throw ConfigError("class 0 is reserved for the identity");
  }
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    for (std::size_t j = i; j < elements_.size(); ++j) {
      const Complex ip = hs_inner(elements_[i], elements_[j]);
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(ip - expected) > 1e-10) {
        throw InvariantError(fmt::format("basis not orthonormal at ({}, {})", i, j));
      }
    }
  }
}

std::size_t OperatorBasis::count(int label) const {
  return static_cast<std::size_t>(std::count(classes_.begin(), classes_.end(), label));
}

TargetSpec TargetSpec::unitary(CMatrix u) {
  if (u.rows() != u.cols()) throw ConfigError("unitary target must be square");
  if (!u.allFinite()) throw InputError("unitary target has non-finite entries");
  if (!urc::is_unitary(u)) {
    throw InvariantError(fmt::format("target is not unitary (error {:.3g})", unitarity_error(u)));
  }
  TargetSpec t;
  t.unitary_ = std::move(u);
  return t;
}

TargetSpec TargetSpec::state(const CVector& initial, const CVector& target) {
  if (std::abs(initial.norm() - 1.0) > kPurityTol || std::abs(target.norm() - 1.0) > kPurityTol) {
    throw InputError("state vectors must be normalized");
  }
  return state(ket_projector(initial), ket_projector(target));
}

TargetSpec TargetSpec::state(CMatrix initial, CMatrix target) {
  if (initial.rows() != target.rows()) throw ConfigError("initial and target states differ in dimension");
  require_pure_state(initial, "initial state");
  require_pure_state(target, "target state");
  TargetSpec t;
  t.initial_ = std::move(initial);
  t.target_ = std::move(target);
  return t;
}

Eigen::Index TargetSpec::dim() const { return unitary_ ? unitary_->rows() : initial_.rows(); }

const CMatrix& TargetSpec::unitary_target() const {
  if (!unitary_) throw ConfigError("target is a state transfer, not a gate");
  return *unitary_;
}

const CMatrix& TargetSpec::initial_state() const {
  if (unitary_) throw ConfigError("gate target has no initial state");
  return initial_;
}

const CMatrix& TargetSpec::target_state() const {
  if (unitary_) throw ConfigError("gate target has no target state");
  return target_;
}

SpinOperators spin_operators(int n_qubits) {
  if (n_qubits < 1) throw ConfigError("need at least one qubit");
  const double s = n_qubits / 2.0;
  const Eigen::Index d = n_qubits + 1;
  CMatrix raise = CMatrix::Zero(d, d);
  CMatrix z = CMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double m = s - static_cast<double>(k);
    z(k, k) = m;
    // S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1.
    if (k > 0) raise(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  const CMatrix lower = raise.adjoint();
  return {(raise + lower) / 2.0, (raise - lower) / Complex(0.0, 2.0), z};
}

ControlModel single_qubit_model(double omega) {
  if (!(omega > 0.0)) throw ConfigError("single-qubit rate must be positive");
  return {"single_qubit", CMatrix::Zero(2, 2), {ControlChannel::phase(pauli::x(), pauli::y(), omega)},
          omega};
}

ControlModel single_qubit_rabi_model(double rabi) {
  if (!(rabi > 0.0)) throw ConfigError("Rabi frequency must be positive");
  return {"single_qubit", CMatrix::Zero(2, 2),
          {ControlChannel::phase(pauli::x(), pauli::y(), rabi / 2.0)}, rabi};
}

ControlModel collective_spin_model(double beta, int n_qubits, std::optional<double> clamp) {
  if (!(beta > 0.0)) throw ConfigError("interaction strength must be positive");
  if (n_qubits < 2) throw ConfigError("collective spin model needs at least two qubits");
  const SpinOperators s = spin_operators(n_qubits);
  return {fmt::format("collective_spin_{}", n_qubits),
          beta * s.z * s.z,
          {ControlChannel::amplitude(s.x), ControlChannel::amplitude(s.y)},
          beta,
          clamp};
}

namespace {

// Pauli string digits: 0 = I, 1 = X, 2 = Y, 3 = Z; digit 0 is the leftmost factor.
std::vector<int> string_digits(std::size_t index, int n) {
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (int q = n - 1; q >= 0; --q) {
    digits[static_cast<std::size_t>(q)] = static_cast<int>(index % 4);
    index /= 4;
  }
  return digits;
}

int weight(const std::vector<int>& digits) {
  return static_cast<int>(std::count_if(digits.begin(), digits.end(), [](int p) { return p != 0; }));
}

const CMatrix& single_pauli(int p) {
  static const CMatrix table[4] = {pauli::i(), pauli::x(), pauli::y(), pauli::z()};
  return table[p];
}

// <D_a| P |D_b> for all Dicke indices a, b (a = number of ones).
CMatrix project_symmetric(const std::vector<int>& digits) {
  const int n = static_cast<int>(digits.size());
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> binom(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) binom[static_cast<std::size_t>(k)] = std::round(std::exp(
      std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
  CMatrix out = CMatrix::Zero(n + 1, n + 1);
  for (std::size_t x = 0; x < dim; ++x) {
    std::size_t y = x;
    Complex amp{1.0, 0.0};
    for (int q = 0; q < n; ++q) {
      const std::size_t bit = std::size_t{1} << (n - 1 - q);
      const bool one = (x & bit) != 0;
      switch (digits[static_cast<std::size_t>(q)]) {
        case 1: y ^= bit; break;
        case 2: y ^= bit; amp *= one ? Complex(0, -1) : Complex(0, 1); break;
        case 3: if (one) amp = -amp; break;
        default: break;
      }
    }
    const int b = std::popcount(x);
    const int a = std::popcount(y);
    out(a, b) += amp / std::sqrt(binom[static_cast<std::size_t>(a)] * binom[static_cast<std::size_t>(b)]);
  }
  return out;
}

}  // namespace

OperatorBasis pauli_basis(int n_qubits, std::size_t max_elements) {
  if (n_qubits < 1) throw ConfigError("need at least one qubit");
  if (n_qubits > 15 || (std::size_t{1} << (2 * n_qubits)) > max_elements) {
    throw ConfigError(fmt::format("Pauli basis for {} qubits exceeds the cap of {} elements", n_qubits,
                                  max_elements));
  }
  const std::size_t count = std::size_t{1} << (2 * n_qubits);
  const double norm = 1.0 / std::sqrt(static_cast<double>(std::size_t{1} << n_qubits));
  std::vector<CMatrix> elements;
  std::vector<int> classes;
  elements.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const auto digits = string_digits(s, n_qubits);
    CMatrix m = single_pauli(digits[0]);
    for (int q = 1; q < n_qubits; ++q) m = kron(m, single_pauli(digits[static_cast<std::size_t>(q)]));
    elements.push_back(norm * m);
    classes.push_back(weight(digits));
  }
  return {std::move(elements), std::move(classes)};
}

OperatorBasis symmetric_subspace_basis(int n_qubits) {
  if (n_qubits < 2) throw ConfigError("symmetric subspace basis needs at least two qubits");
  if (n_qubits > 8) throw ConfigError("symmetric subspace basis is capped at 8 qubits");
  const std::size_t count = std::size_t{1} << (2 * n_qubits);
  const Eigen::Index d = n_qubits + 1;

  std::vector<CMatrix> elements{identity(d) / std::sqrt(static_cast<double>(d))};
  std::vector<int> classes{0};
  for (int k = 1; k <= n_qubits; ++k) {
    for (std::size_t s = 0; s < count; ++s) {
      const auto digits = string_digits(s, n_qubits);
      if (weight(digits) != k) continue;
      CMatrix v = project_symmetric(digits);
      // Two passes of modified Gram-Schmidt keep the residual orthogonal to roundoff.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& e : elements) v -= hs_inner(e, v).real() * e;
      }
      v = (v + v.adjoint()) / 2.0;
      const double norm = std::sqrt(hs_norm2(v));
      if (norm < 1e-8) continue;
      elements.push_back(v / norm);
      classes.push_back(k);
    }
  }
  return {std::move(elements), std::move(classes)};
}

CVector dicke_state(int n_qubits, int excitations) {
  if (n_qubits < 1) throw ConfigError("need at least one qubit");
  if (excitations < 0 || excitations > n_qubits) {
    throw ConfigError(fmt::format("excitation index {} outside [0, {}]", excitations, n_qubits));
  }
  CVector v = CVector::Zero(n_qubits + 1);
  v(excitations) = 1.0;
  return v;
}

CMatrix nearest_unitary(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix two_qubit_random_raw() {
  CMatrix u(3, 3);
  u << Complex(0.51762131, 0.11456864), Complex(-0.5988566, -0.16086483),
      Complex(-0.57589678, 0.05271048), Complex(-0.22709248, 0.22335233),
      Complex(0.30541094, 0.57529237), Complex(-0.6568961, -0.20686492),
      Complex(-0.75950102, 0.20160146), Complex(-0.40091574, -0.17470746),
      Complex(-0.13888378, 0.41469292);
  return u;
}

std::map<std::string, TargetSpec> fixture_targets() {
  std::map<std::string, TargetSpec> out;
  out.emplace("single_qubit_z", TargetSpec::unitary(expm_skew(pauli::z(), std::numbers::pi / 2.0)));
  out.emplace("two_qubit_random", TargetSpec::unitary(nearest_unitary(two_qubit_random_raw())));
  const SpinOperators s = spin_operators(2);
  const CMatrix ms_generator = s.x * s.x - 0.5 * s.x;
  out.emplace("ms_gate", TargetSpec::unitary(expm_skew(ms_generator, std::numbers::pi / 2.0)));
  out.emplace("dicke4", TargetSpec::state(dicke_state(4, 0), dicke_state(4, 2)));
  return out;
}

}  // namespace urc
