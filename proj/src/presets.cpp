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

#include <numbers>

#include <fmt/format.h>

#include "urc/error.hpp"
#include "urc/optimize.hpp"

namespace urc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Preset make(std::string group, std::string method, std::string description, Objective objective,
            double time_unit, double dimensionless, std::vector<Probe> probes) {
  objective.duration = dimensionless * time_unit;
  Preset p{group + "." + method, group, std::move(method), std::move(description), std::move(objective),
           time_unit, std::move(probes), {}};
  return p;
}

std::vector<Probe> qubit_probes() { return {{"sx", pauli::x()}, {"sy", pauli::y()}, {"sz", pauli::z()}}; }

std::vector<Probe> spin_probes(int n) {
  const SpinOperators s = spin_operators(n);
  return {{"Sx", s.x}, {"Sz", s.z}, {"Sx2", s.x * s.x}};
}

// Single qubit, Rabi frequency 1: one dimensionless time unit is one Rabi cycle.
void add_single_qubit(std::vector<Preset>& out, const std::string& group, double t_target, double t_robust,
                      double t_urc, const std::string& context) {
  const ControlModel model = single_qubit_rabi_model(1.0);
  const TargetSpec target = fixture_targets().at("single_qubit_z");
  Objective base{model, target, NoRobustness{}, 1.0, 40, 1.0};
  out.push_back(make(group, "target_only", context + ", target fidelity only", base, kTwoPi, t_target,
                     qubit_probes()));
  Objective robust = base;
  robust.robustness = KnownV{pauli::z()};
  out.push_back(make(group, "robust_sz", context + ", robust to a known sigma_z error", robust, kTwoPi, t_robust,
                     qubit_probes()));
  Objective urc = base;
  urc.robustness = Universal{pauli_basis(1), {0}};
  out.push_back(make(group, "urc", context + ", robust to every traceless error", urc, kTwoPi, t_urc,
                     qubit_probes()));
}

// Two qubits in the symmetric subspace, beta = 1.
void add_two_qubit(std::vector<Preset>& out, const std::string& group, const TargetSpec& target, double weight,
                   const std::string& context) {
  const ControlModel model = collective_spin_model(1.0, 2);
  const OperatorBasis basis = symmetric_subspace_basis(2);
  const SpinOperators s = spin_operators(2);
  Objective base{model, target, NoRobustness{}, weight, 50, 1.0};
  out.push_back(make(group, "target_only", context + ", target fidelity only", base, kTwoPi, 5.0, spin_probes(2)));
  Objective sx = base;
  sx.robustness = KnownV{s.x};
  out.push_back(make(group, "robust_sx", context + ", robust to a known S_x error", sx, kTwoPi, 5.0, spin_probes(2)));
  Objective one = base;
  one.robustness = Universal{basis, {0, 2}};
  out.push_back(make(group, "robust_1body", context + ", robust to all one-body errors", one, kTwoPi, 5.0,
                     spin_probes(2)));
  Objective urc = base;
  urc.robustness = Universal{basis, {0}};
  out.push_back(make(group, "urc", context + ", robust to every traceless error", urc, kTwoPi, 5.0, spin_probes(2)));
}

std::vector<Preset> build() {
  std::vector<Preset> out;
  const auto fixtures = fixture_targets();

  add_single_qubit(out, "fig1", 3.5, 3.5, 3.5, "Single-qubit z gate at 3.5 Rabi cycles");
  add_single_qubit(out, "supp_timescales", 1.1, 2.1, 3.5, "Single-qubit z gate just above each minimal time");
  add_single_qubit(out, "mct_single_qubit", 1.0, 2.0, 2.5, "Single-qubit z gate, minimal-time scan");
  for (Preset& p : out) {
    if (p.group != "mct_single_qubit") continue;
    for (int i = 2; i <= 16; ++i) p.scan_grid.push_back(0.25 * i);
  }

  add_two_qubit(out, "fig2", fixtures.at("two_qubit_random"), 0.1, "Random symmetric two-qubit gate");
  add_two_qubit(out, "supp_ms", fixtures.at("ms_gate"), 0.1, "Molmer-Sorensen gate");

  {
    const ControlModel model = collective_spin_model(1.0, 2);
    const OperatorBasis basis = symmetric_subspace_basis(2);
    for (double w : {0.01, 0.1, 1.0}) {
      const std::string tag = fmt::format("w{}", w);
      Objective urc{model, fixtures.at("two_qubit_random"), Universal{basis, {0}}, w, 50, 1.0};
      out.push_back(make("supp_weights", "urc_" + tag, fmt::format("Random two-qubit gate, universal robustness, w = {}", w),
                         urc, kTwoPi, 5.0, spin_probes(2)));
      Objective one = urc;
      one.robustness = Universal{basis, {0, 2}};
      out.push_back(make("supp_weights", "robust_1body_" + tag,
                         fmt::format("Random two-qubit gate, one-body robustness, w = {}", w), one, kTwoPi, 5.0,
                         spin_probes(2)));
    }
  }

  {
    const ControlModel model = collective_spin_model(1.0, 4);
    const OperatorBasis basis = symmetric_subspace_basis(4);
    const SpinOperators s = spin_operators(4);
    const TargetSpec target = fixtures.at("dicke4");
    Objective base{model, target, NoRobustness{}, 0.1, 50, 1.0};
    const std::string ctx = "Four-qubit |0000> to Dicke-0 state transfer";
    out.push_back(make("supp_dicke", "target_only", ctx + ", target fidelity only", base, kTwoPi, 5.0, spin_probes(4)));
    Objective sx = base;
    sx.robustness = KnownV{s.x};
    out.push_back(make("supp_dicke", "robust_sx", ctx + ", robust to a known S_x error", sx, kTwoPi, 5.0,
                       spin_probes(4)));
    Objective b1 = base;
    b1.robustness = Universal{basis, {0, 2, 3, 4}};
    out.push_back(make("supp_dicke", "1b", ctx + ", robust to all one-body errors", b1, kTwoPi, 5.0, spin_probes(4)));
    Objective b2 = base;
    b2.robustness = Universal{basis, {0, 1, 3, 4}};
    out.push_back(make("supp_dicke", "2b", ctx + ", robust to all two-body errors", b2, kTwoPi, 5.0, spin_probes(4)));
  }
  return out;
}

}  // namespace

std::vector<Preset> preset_registry() {
  static const std::vector<Preset> presets = build();
  return presets;
}

const Preset& find_preset(const std::string& name) {
  static const std::vector<Preset> presets = preset_registry();
  for (const Preset& p : presets) {
    if (p.name == name) return p;
  }
  throw ConfigError(fmt::format("unknown preset '{}'", name));
}

}  // namespace urc
