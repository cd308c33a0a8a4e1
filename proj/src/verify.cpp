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

#include "urc/verify.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "urc/error.hpp"
#include "urc/optimize.hpp"
#include "urc/parallel.hpp"
#include "urc/propagate.hpp"

namespace urc {

namespace {

void require_perturbation(const CMatrix& v, Eigen::Index d) {
  if (v.rows() != d || v.cols() != d) throw ConfigError("perturbation dimension does not match the model");
  if (!is_hermitian(v)) throw InvariantError("perturbation is not Hermitian");
}

double fidelity_of(const CMatrix& u, const TargetSpec& target) {
  if (target.is_unitary()) return gate_fidelity(target.unitary_target(), u);
  const CMatrix rho = u * target.initial_state() * u.adjoint();
  return (rho * target.target_state()).trace().real();
}

std::vector<double> sweep_values(const ControlModel& model, const Pulse& pulse, const TargetSpec& target,
                                 const CMatrix& v, const std::vector<double>& lambdas) {
  std::vector<double> f;
  f.reserve(lambdas.size());
  for (double lam : lambdas) f.push_back(fidelity_of(perturbed_propagator(model, pulse, v, lam), target));
  return f;
}

void check_grid(const std::vector<double>& lambdas) {
  if (std::find(lambdas.begin(), lambdas.end(), 0.0) == lambdas.end()) {
    throw ConfigError("lambda grid must contain 0");
  }
}

CVector pure_ket(const CMatrix& sigma) {
  require_pure_state(sigma, "sigma");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma);
  return es.eigenvectors().col(sigma.rows() - 1);
}

}  // namespace

CMatrix perturbed_propagator(const ControlModel& model, const Pulse& pulse, const CMatrix& v, double lambda) {
  require_perturbation(v, model.dim());
  if (lambda == 0.0) return propagate_segments(model, pulse).final_unitary();
  return propagate_segments(model, pulse, CMatrix(lambda * v)).final_unitary();
}

double SweepCurve::at_zero() const {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] == 0.0) return fidelities[i];
  }
  throw ConfigError("sweep has no lambda = 0 point");
}

SweepCurve fidelity_sweep(const ControlModel& model, const Pulse& pulse, const TargetSpec& target, const CMatrix& v,
                          const std::vector<double>& lambdas, std::string label) {
  check_grid(lambdas);
  if (target.dim() != model.dim()) throw ConfigError("target dimension does not match the model");
  SweepCurve c;
  c.lambdas = lambdas;
  c.fidelities = sweep_values(model, pulse, target, v, lambdas);
  c.label = std::move(label);
  c.kind = target.is_unitary() ? FidelityKind::gate : FidelityKind::state;
  return c;
}

DirectionSpace DirectionSpace::for_dimension(Eigen::Index d) {
  if (d == 2) return {pauli_basis(1), {1}, std::sqrt(2.0)};
  if (d < 2) throw ConfigError("dimension must be at least 2");
  OperatorBasis b = symmetric_subspace_basis(static_cast<int>(d) - 1);
  std::set<int> classes = b.labels();
  classes.erase(0);
  return {std::move(b), std::move(classes), 1.0};
}

std::vector<CMatrix> sample_directions(const DirectionSpace& space, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> members;
  for (std::size_t j = 0; j < space.basis.size(); ++j) {
    if (space.classes.contains(space.basis.class_of(j))) members.push_back(j);
  }
  if (members.empty()) throw ConfigError("direction space selects no basis elements");
  std::vector<CMatrix> out;
  for (std::size_t r = 0; r < n; ++r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::normal_distribution<double> normal(0.0, 1.0);
    RVector c(static_cast<Eigen::Index>(members.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
    c /= c.norm();
    CMatrix v = CMatrix::Zero(space.basis.dim(), space.basis.dim());
    for (std::size_t i = 0; i < members.size(); ++i) v += c(static_cast<Eigen::Index>(i)) * space.basis.element(members[i]);
    out.push_back(space.norm * v);
  }
  return out;
}

SweepCurve random_direction_sweep(const ControlModel& model, const Pulse& pulse, const TargetSpec& target,
                                  std::size_t n_realizations, const std::vector<double>& lambdas, std::uint64_t seed,
                                  const std::optional<DirectionSpace>& space, int threads) {
  if (n_realizations < 1) throw ConfigError("need at least one realization");
  check_grid(lambdas);
  const DirectionSpace ds = space ? *space : DirectionSpace::for_dimension(model.dim());
  if (ds.basis.dim() != model.dim()) throw ConfigError("direction space dimension does not match the model");
  const std::vector<CMatrix> dirs = sample_directions(ds, n_realizations, seed);
  SweepCurve c;
  c.lambdas = lambdas;
  c.kind = target.is_unitary() ? FidelityKind::gate : FidelityKind::state;
  c.seed = seed;
  c.label = fmt::format("random, {} realizations", n_realizations);
  c.realizations.resize(n_realizations);
  parallel_for(n_realizations, threads,
               [&](std::size_t r) { c.realizations[r] = sweep_values(model, pulse, target, dirs[r], lambdas); });
  c.fidelities.assign(lambdas.size(), 0.0);
  for (const auto& curve : c.realizations) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) c.fidelities[i] += curve[i];
  }
  for (double& f : c.fidelities) f /= static_cast<double>(n_realizations);
  return c;
}

CurvatureFit curvature_check(const SweepCurve& curve, double predicted_chi) {
  const double f0 = curve.at_zero();
  double num = 0.0;
  double den = 0.0;
  CurvatureFit fit;
  std::vector<std::pair<double, double>> window;
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    if (1.0 - curve.fidelities[i] > 0.05) continue;
    const double l2 = curve.lambdas[i] * curve.lambdas[i];
    const double y = f0 - curve.fidelities[i];
    window.emplace_back(l2, y);
    num += y * l2;
    den += l2 * l2;
    fit.lambda_max = std::max(fit.lambda_max, std::abs(curve.lambdas[i]));
  }
  fit.points = window.size();
  if (fit.points < 5 || den == 0.0) {
    throw InputError(fmt::format("curvature fit needs at least 5 points in the window, got {}", fit.points));
  }
  fit.chi = num / den;
  double rss = 0.0;
  for (const auto& [l2, y] : window) rss += (y - fit.chi * l2) * (y - fit.chi * l2);
  fit.residual = std::sqrt(rss / static_cast<double>(window.size()));
  fit.predicted = predicted_chi;
  fit.deviation = std::abs(fit.chi - predicted_chi) / std::max(predicted_chi, 1e-8);
  return fit;
}

OneDesignReport one_design_check(const ControlModel& model, const Pulse& pulse, const OperatorBasis& basis,
                                 std::size_t n_samples) {
  const auto np = static_cast<std::size_t>(pulse.segments());
  if (n_samples < np) throw ConfigError("need at least one sample per segment");
  if (basis.dim() != model.dim()) throw ConfigError("basis dimension does not match the model");
  const Propagation prop = propagate_segments(model, pulse);
  OneDesignReport r;
  r.substeps = static_cast<int>(n_samples / np);
  r.samples = np * static_cast<std::size_t>(r.substeps);
  const Eigen::Index d = model.dim();
  std::vector<CMatrix> acc(basis.size(), CMatrix::Zero(d, d));
  const double h = prop.dt / r.substeps;
  for (std::size_t j = 0; j < np; ++j) {
    for (int s = 0; s < r.substeps; ++s) {
      const CMatrix u = s == 0 ? prop.cumulative[j] : CMatrix(expm_skew(prop.spectra[j], s * h) * prop.cumulative[j]);
      for (std::size_t k = 0; k < basis.size(); ++k) acc[k] += u.adjoint() * basis.element(k) * u;
    }
  }
  r.deviations.resize(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const CMatrix& l = basis.element(k);
    const CMatrix avg = acc[k] / static_cast<double>(r.samples);
    const CMatrix dev = avg - (l.trace() / static_cast<double>(d)) * identity(d);
    r.deviations[k] = std::sqrt(hs_norm2(dev));
    if (basis.class_of(k) == 0) r.deviations[k] = 0.0;
    r.max_deviation = std::max(r.max_deviation, r.deviations[k]);
    r.sum_squares += r.deviations[k] * r.deviations[k];
  }
  return r;
}

NoiseEstimate noise_monte_carlo(const ControlModel& model, const Pulse& pulse, const CMatrix& sigma, const CMatrix& v,
                                const Correlation& corr, double lambda, std::size_t n_traj, std::uint64_t seed,
                                int substeps, int threads) {
  require_perturbation(v, model.dim());
  if (corr.kind != Correlation::Kind::white && corr.kind != Correlation::Kind::exponential) {
    throw ConfigError("Monte Carlo supports white and exponential correlations only");
  }
  if (corr.kind == Correlation::Kind::exponential && !(corr.tau_c > 0.0)) {
    throw ConfigError("correlation time must be positive");
  }
  if (n_traj < 100) throw ConfigError("need at least 100 trajectories");
  if (substeps < 1) throw ConfigError("need at least one substep");
  const CVector psi0 = pure_ket(sigma);
  const Propagation prop = propagate_segments(model, pulse);
  const CVector ideal = prop.final_unitary() * psi0;
  const Eigen::Index np = pulse.segments();
  const double h = prop.dt / substeps;
  std::vector<CMatrix> hams;
  for (Eigen::Index k = 0; k < np; ++k) hams.push_back(model.hamiltonian(pulse.segment(k)));

  const bool white = corr.kind == Correlation::Kind::white;
  const double a = white ? 0.0 : std::exp(-h / corr.tau_c);
  const double step_sd = white ? std::sqrt(corr.strength / h) : std::sqrt(corr.strength * (1.0 - a * a));
  std::vector<double> fid(n_traj, 1.0);
  parallel_for(n_traj, threads, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(seed, t));
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector psi = psi0;
    double xi = white ? 0.0 : std::sqrt(corr.strength) * normal(rng);
    bool first = true;
    for (Eigen::Index k = 0; k < np; ++k) {
      for (int s = 0; s < substeps; ++s) {
        if (white) {
          xi = step_sd * normal(rng);
        } else if (!first) {
          xi = a * xi + step_sd * normal(rng);
        }
        first = false;
        const CMatrix hk = hams[static_cast<std::size_t>(k)] + (lambda * xi) * v;
        psi = expm_skew(hk, h) * psi;
      }
    }
    fid[t] = std::norm(ideal.dot(psi));
  });
  double sum = 0.0;
  for (double f : fid) sum += f;
  const double mean = sum / static_cast<double>(n_traj);
  double var = 0.0;
  for (double f : fid) var += (f - mean) * (f - mean);
  var /= static_cast<double>(n_traj - 1);
  return {mean, std::sqrt(var / static_cast<double>(n_traj)), n_traj, substeps};
}

}  // namespace urc
