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

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "urc/qcore.hpp"

namespace urc {

enum class ChannelKind { amplitude, phase };

/// One control channel. An amplitude channel contributes u * op for segment
/// value u; a phase channel contributes omega * (cos(phi) op + sin(phi) op_y).
struct ControlChannel {
  ChannelKind kind = ChannelKind::amplitude;
  CMatrix op;
  CMatrix op_y;
  double omega = 0.0;

  static ControlChannel amplitude(CMatrix op);
  static ControlChannel phase(CMatrix x_like, CMatrix y_like, double omega);
};

/// Drift plus controls, H(u) = drift + sum_c h_c(u_c).
class ControlModel {
 public:
  /// `scale` is the characteristic rate of the model (Omega or beta); it sets
  /// the spread of random initial amplitudes. `clamp`, when set, saturates
  /// amplitude channels smoothly as c * tanh(u / c).
  ControlModel(std::string label, CMatrix drift, std::vector<ControlChannel> channels,
               double scale = 1.0, std::optional<double> clamp = std::nullopt);

  Eigen::Index dim() const { return drift_.rows(); }
  const CMatrix& drift() const { return drift_; }
  std::span<const ControlChannel> channels() const { return channels_; }
  Eigen::Index n_channels() const { return static_cast<Eigen::Index>(channels_.size()); }
  const std::string& label() const { return label_; }
  double scale() const { return scale_; }
  std::optional<double> clamp() const { return clamp_; }

  /// Segment Hamiltonian for one row of control values.
  CMatrix hamiltonian(std::span<const double> values) const;
  /// dH/du_c evaluated at `values`.
  CMatrix control_derivative(std::span<const double> values, Eigen::Index channel) const;

 private:
  double effective_amplitude(double u) const;
  double effective_amplitude_slope(double u) const;

  std::string label_;
  CMatrix drift_;
  std::vector<ControlChannel> channels_;
  double scale_;
  std::optional<double> clamp_;
};

/// Piecewise-constant control table: one row per segment, one column per channel.
class Pulse {
 public:
  using Table = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Pulse(Table values, double dt);
  static Pulse zeros(Eigen::Index segments, Eigen::Index channels, double dt);
  /// Row-major flat parameter vector, index k * channels + c.
  static Pulse from_parameters(const RVector& params, Eigen::Index segments, Eigen::Index channels,
                               double dt);

  Eigen::Index segments() const { return values_.rows(); }
  Eigen::Index channels() const { return values_.cols(); }
  double dt() const { return dt_; }
  double duration() const { return static_cast<double>(segments()) * dt_; }
  const Table& values() const { return values_; }
  std::span<const double> segment(Eigen::Index k) const {
    return {values_.data() + k * channels(), static_cast<std::size_t>(channels())};
  }
  RVector parameters() const;
  Pulse with_parameters(const RVector& params) const;

 private:
  Table values_;
  double dt_;
};

/// Orthonormal Hermitian operator basis with a class label per element
/// (0 = identity, 1 = one-body, 2 = two-body, ...). Element 0 is I / sqrt(d).
class OperatorBasis {
 public:
  OperatorBasis(std::vector<CMatrix> elements, std::vector<int> classes);

  std::size_t size() const { return elements_.size(); }
  Eigen::Index dim() const { return elements_.front().rows(); }
  const CMatrix& element(std::size_t j) const { return elements_[j]; }
  int class_of(std::size_t j) const { return classes_[j]; }
  const std::vector<CMatrix>& elements() const { return elements_; }
  const std::vector<int>& classes() const { return classes_; }
  std::set<int> labels() const { return {classes_.begin(), classes_.end()}; }
  std::size_t count(int label) const;

 private:
  std::vector<CMatrix> elements_;
  std::vector<int> classes_;
};

/// Either a gate target or a pure-state transfer sigma -> rho_target.
class TargetSpec {
 public:
  static TargetSpec unitary(CMatrix u);
  static TargetSpec state(const CVector& initial, const CVector& target);
  static TargetSpec state(CMatrix initial, CMatrix target);

  bool is_unitary() const { return unitary_.has_value(); }
  Eigen::Index dim() const;
  const CMatrix& unitary_target() const;
  const CMatrix& initial_state() const;
  const CMatrix& target_state() const;

 private:
  TargetSpec() = default;
  std::optional<CMatrix> unitary_;
  CMatrix initial_;
  CMatrix target_;
};

/// Spin-S matrices in the basis m = S, S-1, ..., -S.
struct SpinOperators {
  CMatrix x;
  CMatrix y;
  CMatrix z;
};
SpinOperators spin_operators(int n_qubits);

/// Single qubit with phase control: H = omega (cos(phi) sx + sin(phi) sy).
ControlModel single_qubit_model(double omega);
/// Same family parametrized by the Rabi frequency: H = (rabi / 2)(cos(phi) sx + sin(phi) sy).
/// Dimensionless times rabi * t_f / (2 pi) count full Rabi cycles.
ControlModel single_qubit_rabi_model(double rabi);
/// Collective spin of n qubits in the symmetric subspace (d = n + 1):
/// H = beta Sz^2 + u_x Sx + u_y Sy.
ControlModel collective_spin_model(double beta, int n_qubits,
                                   std::optional<double> clamp = std::nullopt);

inline constexpr std::size_t kDefaultBasisCap = 4096;

/// Normalized Pauli strings, class = Pauli weight.
OperatorBasis pauli_basis(int n_qubits, std::size_t max_elements = kDefaultBasisCap);
/// Pauli classes projected into the symmetric subspace and Gram-Schmidt
/// orthonormalized in ascending class order.
OperatorBasis symmetric_subspace_basis(int n_qubits);

/// Symmetric S_z eigenstate with m excitations (eigenvalue n/2 - m), as a
/// vector of the (n + 1)-dimensional collective space.
CVector dicke_state(int n_qubits, int excitations);

/// Polar projection onto the nearest unitary.
CMatrix nearest_unitary(const CMatrix& m);

/// Named targets: single_qubit_z, two_qubit_random, ms_gate, dicke4.
std::map<std::string, TargetSpec> fixture_targets();
/// The two-qubit symmetric-basis matrix exactly as printed (8 decimals).
CMatrix two_qubit_random_raw();

}  // namespace urc
