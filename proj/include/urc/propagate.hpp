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

#include <vector>

#include "urc/models.hpp"
#include "urc/qcore.hpp"

namespace urc {

/// Ideal evolution of a piecewise-constant pulse.
/// cumulative[k] = U(t_k, 0) = segments[k-1] * cumulative[k-1], cumulative[0] = I.
struct Propagation {
  double dt = 0.0;
  std::vector<Eigensystem> spectra;
  std::vector<CMatrix> segments;
  std::vector<CMatrix> cumulative;

  Eigen::Index dim() const { return cumulative.front().rows(); }
  std::size_t n_segments() const { return segments.size(); }
  double duration() const { return static_cast<double>(segments.size()) * dt; }
  const CMatrix& final_unitary() const { return cumulative.back(); }
  /// U(t, 0) for any t in [0, t_f], exact inside segments.
  CMatrix at(double t) const;
};

Propagation propagate_segments(const ControlModel& model, const Pulse& pulse);
/// Same, with `extra` added to every segment generator (exponentiated jointly).
Propagation propagate_segments(const ControlModel& model, const Pulse& pulse, const CMatrix& extra);

}  // namespace urc
