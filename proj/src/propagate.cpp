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

#include "urc/propagate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "urc/error.hpp"

namespace urc {

namespace {

Propagation propagate_impl(const ControlModel& model, const Pulse& pulse, const CMatrix* extra) {
  if (pulse.channels() != model.n_channels()) {
    throw ConfigError(fmt::format("pulse has {} channels, model '{}' has {}", pulse.channels(),
                                  model.label(), model.n_channels()));
  }
  if (extra && (extra->rows() != model.dim() || extra->cols() != model.dim())) {
    throw ConfigError("perturbation dimension does not match the model");
  }
  Propagation p;
  p.dt = pulse.dt();
  const auto n = static_cast<std::size_t>(pulse.segments());
  p.spectra.reserve(n);
  p.segments.reserve(n);
  p.cumulative.reserve(n + 1);
  p.cumulative.push_back(identity(model.dim()));
  for (Eigen::Index k = 0; k < pulse.segments(); ++k) {
    CMatrix h = model.hamiltonian(pulse.segment(k));
    if (extra) h += *extra;
    p.spectra.push_back(hermitian_eigensystem(h));
    p.segments.push_back(expm_skew(p.spectra.back(), p.dt));
    p.cumulative.push_back(p.segments.back() * p.cumulative.back());
  }
  return p;
}

}  // namespace

CMatrix Propagation::at(double t) const {
  const double tf = duration();
  if (t < 0.0 || t > tf * (1.0 + 1e-12)) throw ConfigError("time outside [0, t_f]");
  auto k = static_cast<std::size_t>(std::floor(t / dt));
  k = std::min(k, segments.size());
  const double tau = t - static_cast<double>(k) * dt;
  if (k == segments.size() || tau <= 0.0) return cumulative[k];
  return expm_skew(spectra[k], tau) * cumulative[k];
}

Propagation propagate_segments(const ControlModel& model, const Pulse& pulse) {
  return propagate_impl(model, pulse, nullptr);
}

Propagation propagate_segments(const ControlModel& model, const Pulse& pulse, const CMatrix& extra) {
  if (!is_hermitian(extra)) throw InvariantError("perturbation is not Hermitian");
  return propagate_impl(model, pulse, &extra);
}

}  // namespace urc
