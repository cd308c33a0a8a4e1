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

#include "urc/docs.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "urc/error.hpp"
#include "urc/optimize.hpp"

namespace urc {

namespace {

std::string robustness_label(const Robustness& r) {
  if (std::holds_alternative<NoRobustness>(r)) return "none";
  if (std::holds_alternative<KnownV>(r)) return "known V";
  const auto& u = std::get<Universal>(r);
  std::vector<int> kept;
  for (int c : u.basis.labels()) {
    if (!u.excluded.contains(c)) kept.push_back(c);
  }
  return fmt::format("classes {{{}}}", fmt::join(kept, ","));
}

}  // namespace

std::vector<PresetCatalogEntry> preset_catalog() {
  const std::vector<Preset> presets = preset_registry();
  std::vector<PresetCatalogEntry> out;
  auto group = [&](std::string name, std::string anchor, std::vector<std::string> expectations) {
    PresetCatalogEntry e{name, std::move(anchor), {}, std::move(expectations)};
    for (const Preset& p : presets) {
      if (p.group == name) e.presets.push_back(p.name);
    }
    out.push_back(std::move(e));
  };
  auto check = [&](std::string name, std::string anchor, std::vector<std::string> expectations) {
    out.push_back({std::move(name), std::move(anchor), {}, std::move(expectations)});
  };

  group("fig1", "Single-qubit z gate at Omega t_f / 2pi = 3.5 with N_P = 40 and w = 1",
        {"robust_sz cuts the fitted chi for sigma_z at least 100 fold against target_only",
         "robust_sz is not universal: some random direction keeps chi above 10% of target_only",
         "urc keeps chi below 1e-3 of target_only for sigma_x, sigma_y, sigma_z and 20 seeded random directions",
         "the urc pulse samples a 1-design: the squared deviations sum to |M~0|^2 within 1e-8, the largest stays "
         "below 1e-3"});
  group("mct_single_qubit", "Minimal control times of the single-qubit z gate",
        {"scans on the 0.25 grid with N_P = 40, threshold 1e-7 and 10 starts per point",
         "t_MCT = 1.0 (target_only), 2.0 (robust_sz) and 2.5 (urc) in units of 2pi/Omega, each within one grid step"});
  group("supp_timescales", "Single-qubit z gate just above each minimal time",
        {"each method runs at its own duration: 1.1, 2.1 and 3.5 in units of 2pi/Omega; no acceptance threshold"});
  group("fig2", "Random two-qubit symmetric gate at beta t_f / 2pi = 5 with N_P = 50 and w = 0.1",
        {"robust_1body keeps chi below 1e-2 of target_only for S_x and S_z, but above 1e-1 for S_x^2",
         "urc keeps chi below 1e-1 of target_only for S_x, S_z and S_x^2",
         "for S_x^2 the ordering is urc <= robust_1body <= robust_sx"});
  group("supp_ms", "Molmer-Sorensen gate under the two-qubit settings",
        {"the fig2 robustness classes applied to a fixed entangling target; no acceptance threshold"});
  group("supp_weights", "Random two-qubit gate with robustness weights 0.01, 0.1 and 1",
        {"compares target error and robustness across weights; no acceptance threshold"});
  group("supp_dicke", "Four-qubit transfer from |0000> to the Dicke-0 state, beta t_f / 2pi = 5, N_P = 50, w = 0.1",
        {"every method reaches state infidelity below 1e-4 at lambda = 0",
         "1b cuts chi at least 10 fold for S_x and S_z but not for S_x^2",
         "2b cuts chi at least 10 fold for S_x^2 but not for S_z"});
  check("check.norm_identity", "Removing the identity direction from M0",
        {"|M~0|^2 = |M0|^2 - 1 within 1e-9 for 50 random pulses across all fixtures"});
  check("check.m0_definition", "M0 acting on vectorized perturbations",
        {"devectorize(M0 |V>>) equals direct quadrature of the time-averaged V within 1e-8 relative, 50 random "
         "Hermitian V"});
  check("check.curvature", "Quadratic fidelity loss under weak static perturbations",
        {"fitted curvature equals t_f^2 |V0|^2 / d for gates and t_f^2 (Delta V0)^2 for states within 1%, 10 "
         "random pulses each"});
  check("check.gradient", "Analytic gradient of J_U",
        {"matches central differences of Riemann J_U within 1e-4 relative, 20 random pulses of 10 to 40 segments "
         "with dt Omega <= 0.1"});
  check("check.bound", "Upper bound of J_U",
        {"J_U <= d - 1/d on every sampled pulse",
         "the zero Hamiltonian saturates it: 1.5 for d = 2 and 8/3 for d = 3"});
  check("check.noise_kernel", "Time-dependent noise with exponential correlation",
        {"1 - <F> over 1e4 trajectories matches lambda^2 <<V|K|V>> within 3 standard errors"});
  check("check.determinism", "Command-line reruns",
        {"rerunning each command with the stored config reproduces every numeric table byte for byte"});

  return out;
}

const std::vector<AcceptanceCriterion>& acceptance_criteria() {
  static const std::vector<AcceptanceCriterion> criteria = {
      {1, "norm identity of M~0", "check.norm_identity"},
      {2, "defining property of M0", "check.m0_definition"},
      {3, "curvature theorem", "check.curvature"},
      {4, "single-qubit minimal control times", "mct_single_qubit"},
      {5, "single-qubit robustness ordering", "fig1"},
      {6, "two-qubit generalized robustness", "fig2"},
      {7, "1-design identity", "fig1"},
      {8, "analytic gradient", "check.gradient"},
      {9, "bound on J_U", "check.bound"},
      {10, "Dicke state control", "supp_dicke"},
      {11, "noise kernel", "check.noise_kernel"},
      {12, "determinism", "check.determinism"},
  };
  return criteria;
}

std::string generate_preset_catalog() {
  const std::vector<Preset> presets = preset_registry();
  const std::vector<PresetCatalogEntry> entries = preset_catalog();

  std::map<std::string, int> listed;
  for (const auto& e : entries) {
    for (const auto& p : e.presets) ++listed[p];
  }
  for (const Preset& p : presets) {
    if (listed[p.name] != 1) {
      throw InvariantError(fmt::format("preset '{}' appears {} times in the catalog", p.name, listed[p.name]));
    }
  }
  std::map<std::string, std::vector<int>> by_entry;
  for (const auto& c : acceptance_criteria()) {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.name == c.entry; });
    if (it == entries.end()) {
      throw InvariantError(fmt::format("criterion {} references unregistered entry '{}'", c.number, c.entry));
    }
    by_entry[c.entry].push_back(c.number);
  }

  std::string out = "# Preset catalog\n\n";
  out += "Generated from the preset registry by `urc catalog`. Durations are in units of 2pi/rate.\n";
  for (const auto& e : entries) {
    out += fmt::format("\n## {}\n\n{}.\n", e.name, e.anchor);
    if (!e.presets.empty()) {
      out += "\n| preset | model | segments | duration | weight | robustness | probes |\n";
      out += "|---|---|---|---|---|---|---|\n";
      for (const std::string& name : e.presets) {
        const Preset& p = find_preset(name);
        std::vector<std::string> probes;
        for (const Probe& q : p.probes) probes.push_back(q.name);
        out += fmt::format("| `{}` | {} | {} | {:g} | {:g} | {} | {} |\n", p.name, p.objective.model.label(),
                           p.objective.segments, p.dimensionless_time(), p.objective.weight,
                           robustness_label(p.objective.robustness), fmt::join(probes, ", "));
      }
      const Preset& first = find_preset(e.presets.front());
      if (!first.scan_grid.empty()) {
        out += fmt::format("\nScan grid: {:g} to {:g}, {} points.\n", first.scan_grid.front(), first.scan_grid.back(),
                           first.scan_grid.size());
      }
    }
    out += "\nExpected:\n\n";
    for (const auto& x : e.expectations) out += "- " + x + "\n";
    if (auto it = by_entry.find(e.name); it != by_entry.end()) {
      out += fmt::format("\nAcceptance criteria: {}.\n", fmt::join(it->second, ", "));
    }
  }
  out += "\n## Acceptance criteria\n\n| # | criterion | entry |\n|---|---|---|\n";
  for (const auto& c : acceptance_criteria()) out += fmt::format("| {} | {} | {} |\n", c.number, c.title, c.entry);
  return out;
}

}  // namespace urc
