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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "urc/error.hpp"
#include "urc/grad.hpp"

using namespace urc;
using std::numbers::pi;

namespace {

double max_rel_error(const RVector& a, const RVector& b) {
  const double scale = b.cwiseAbs().maxCoeff();
  return (a - b).cwiseAbs().maxCoeff() / std::max(scale, 1e-300);
}

// dU_k by central differences of the Pade exponential.
CMatrix fd_segment_derivative(const ControlModel& m, const Pulse& p, Eigen::Index k, Eigen::Index c) {
  const double h = 1e-6;
  Pulse::Table up = p.values();
  Pulse::Table down = p.values();
  up(k, c) += h;
  down(k, c) -= h;
  const auto hu = oracle::segment_hamiltonians(m, Pulse(up, p.dt()))[static_cast<std::size_t>(k)];
  const auto hd = oracle::segment_hamiltonians(m, Pulse(down, p.dt()))[static_cast<std::size_t>(k)];
  return (oracle::expm(hu, p.dt()) - oracle::expm(hd, p.dt())) / (2 * h);
}

}  // namespace

TEST_CASE("segment unitary derivative") {
  std::mt19937_64 rng(1);
  for (const ControlModel& m : {single_qubit_model(1.0), collective_spin_model(1.0, 2)}) {
    const Pulse p = oracle::random_pulse(rng, m, 5, 0.3);
    for (Eigen::Index k = 0; k < 5; ++k) {
      for (Eigen::Index c = 0; c < m.n_channels(); ++c) {
        const CMatrix exact = segment_unitary_derivative(m, p, k, c);
        CHECK((exact - fd_segment_derivative(m, p, k, c)).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
  // Channel operator commuting with the drift: the short-time form is exact.
  const ControlModel commuting("z", pauli::z(), {ControlChannel::amplitude(0.5 * pauli::z())});
  Pulse::Table t(1, 1);
  t << 0.7;
  const Pulse p(t, 0.4);
  const CMatrix a = segment_unitary_derivative(commuting, p, 0, 0, DerivativeMode::exact);
  const CMatrix b = segment_unitary_derivative(commuting, p, 0, 0, DerivativeMode::short_time);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
  const ControlModel off("off", pauli::z(), {ControlChannel::amplitude(CMatrix::Zero(2, 2))});
  CHECK(segment_unitary_derivative(off, p, 0, 0).norm() == 0.0);
  CHECK_THROWS_AS(segment_unitary_derivative(off, p, 1, 0), InputError);
  CHECK_THROWS_AS(segment_unitary_derivative(off, p, 0, 1), InputError);
}

TEST_CASE("short-time derivative error is second order in dt") {
  const ControlModel m = single_qubit_model(1.0);
  Pulse::Table t(1, 1);
  t << 0.9;
  double prev = 0.0;
  for (double dt : {0.2, 0.1, 0.05, 0.025}) {
    const Pulse p(t, dt);
    const double err = (segment_unitary_derivative(m, p, 0, 0, DerivativeMode::exact) -
                        segment_unitary_derivative(m, p, 0, 0, DerivativeMode::short_time)).norm();
    if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("analytic J_U gradient against finite differences") {
  std::mt19937_64 rng(77);
  const ControlModel m = single_qubit_model(1.0);
  const OperatorBasis b = pauli_basis(1);
  for (Eigen::Index np : {1, 10, 25, 40}) {
    const Pulse p = oracle::random_pulse(rng, m, np, 0.1);
    const Gradient g = grad_JU_analytic(m, p, b, {0});
    CHECK(g.values.size() == np);
    auto f = [&](const RVector& x) { return J_universal(m, p.with_parameters(x), b, {0}, Quadrature::riemann(1)); };
    const Gradient fd = grad_finite_difference(f, p.parameters(), 1e-6);
    if (np == 1) {
      CHECK(std::abs(g.values(0) - fd.values(0)) < 1e-9);
    } else {
      CHECK(max_rel_error(g.values, fd.values) < 1e-4);
    }
    // A common phase offset rotates the frame about z and leaves J_U unchanged.
    CHECK(std::abs(g.values.sum()) < 1e-8);
  }
  const ControlModel spin = collective_spin_model(1.0, 2);
  const OperatorBasis bs = symmetric_subspace_basis(2);
  const Pulse ps = oracle::random_pulse(rng, spin, 12, 0.05);
  auto fs = [&](const RVector& x) { return J_universal(spin, ps.with_parameters(x), bs, {0}, Quadrature::riemann(1)); };
  CHECK(max_rel_error(grad_JU_analytic(spin, ps, bs, {0}).values,
                      grad_finite_difference(fs, ps.parameters()).values) < 1e-4);
  CHECK_THROWS_AS(grad_JU_analytic(spin, ps, bs, {0, 2}), UnsupportedError);
}

TEST_CASE("phase offset invariance of J_U") {
  std::mt19937_64 rng(78);
  const ControlModel m = single_qubit_model(1.0);
  const Pulse p = oracle::random_pulse(rng, m, 20, 0.2);
  const double base = J_universal(m, p, pauli_basis(1), {0});
  for (double c : {0.3, 1.7, -2.2}) {
    const RVector shifted = p.parameters().array() + c;
    CHECK(std::abs(J_universal(m, p.with_parameters(shifted), pauli_basis(1), {0}) - base) < 1e-9);
  }
}

TEST_CASE("analytic target gradient") {
  std::mt19937_64 rng(79);
  const auto fixtures = fixture_targets();
  struct Case {
    ControlModel model;
    TargetSpec target;
  };
  const std::vector<Case> cases = {
      {single_qubit_model(1.0), fixtures.at("single_qubit_z")},
      {collective_spin_model(1.0, 2), fixtures.at("two_qubit_random")},
      {collective_spin_model(1.0, 4), fixtures.at("dicke4")},
  };
  for (const Case& c : cases) {
    const Pulse p = oracle::random_pulse(rng, c.model, 8, 0.2);
    const Gradient g = grad_J_target_analytic(c.model, p, c.target);
    auto f = [&](const RVector& x) { return J_target(propagate_segments(c.model, p.with_parameters(x)).final_unitary(), c.target); };
    CHECK(max_rel_error(g.values, grad_finite_difference(f, p.parameters()).values) < 1e-6);
  }
}

TEST_CASE("finite differences") {
  RVector c(3);
  c << 1.5, -2.0, 0.25;
  auto linear = [&](const RVector& x) { return c.dot(x); };
  CHECK((grad_finite_difference(linear, RVector::Random(3)).values - c).cwiseAbs().maxCoeff() < 1e-9);
  auto quad = [](const RVector& x) { return x.squaredNorm(); };
  CHECK(grad_finite_difference(quad, RVector::Zero(4)).values.norm() == 0.0);
  CHECK_THROWS_AS(grad_finite_difference(quad, RVector::Zero(2), 0.0), InputError);
  auto bad = [](const RVector& x) { return x(0) > 0 ? NAN : 0.0; };
  CHECK_THROWS_AS(grad_finite_difference(bad, RVector::Zero(1)), NumericError);

  // Step halving: central differences are second order, so the Richardson
  // combination agrees with both steps.
  std::mt19937_64 rng(80);
  const ControlModel m = single_qubit_model(1.0);
  const Pulse p = oracle::random_pulse(rng, m, 6, 0.3);
  const TargetSpec t = fixture_targets().at("single_qubit_z");
  auto j0 = [&](const RVector& x) { return J_target(propagate_segments(m, p.with_parameters(x)).final_unitary(), t); };
  const RVector g1 = grad_finite_difference(j0, p.parameters(), 1e-3).values;
  const RVector g2 = grad_finite_difference(j0, p.parameters(), 5e-4).values;
  const RVector rich = (4 * g2 - g1) / 3;
  CHECK((g1 - rich).norm() < 1e-5 * rich.norm());
  CHECK((g2 - rich).norm() < 0.3 * (g1 - rich).norm());
}

TEST_CASE("descent along the objective gradient") {
  std::mt19937_64 rng(81);
  const auto fixtures = fixture_targets();
  const ControlModel q = single_qubit_model(1.0);
  const ControlModel s = collective_spin_model(1.0, 2);
  const ControlModel s4 = collective_spin_model(1.0, 4);
  std::vector<Objective> objectives;
  auto add = [&](const ControlModel& m, const TargetSpec& t, Robustness r) {
    Objective o{m, t, std::move(r), 1.0, 8, 1.6};
    objectives.push_back(o);
  };
  add(q, fixtures.at("single_qubit_z"), NoRobustness{});
  add(q, fixtures.at("single_qubit_z"), KnownV{pauli::z()});
  add(q, fixtures.at("single_qubit_z"), Universal{pauli_basis(1), {0}});
  add(s, fixtures.at("ms_gate"), Universal{symmetric_subspace_basis(2), {0, 2}});
  add(s4, fixtures.at("dicke4"), Universal{symmetric_subspace_basis(4), {0, 2, 3, 4}});
  for (Objective& o : objectives) {
    for (int r = 0; r < 20; ++r) {
      const Pulse p = oracle::random_pulse(rng, o.model, o.segments, o.dt());
      const Gradient g = objective_gradient(o, p);
      const double n = g.values.norm();
      if (n <= 1e-6) continue;
      const RVector x = p.parameters() - (1e-4 / n) * g.values;
      CHECK(evaluate(o, p.with_parameters(x)).total < evaluate(o, p).total);
    }
  }
  Objective riemann{q, fixtures.at("single_qubit_z"), Universal{pauli_basis(1), {0}}, 1.0, 8, 0.8,
                    Quadrature::riemann(1)};
  CHECK(has_analytic_gradient(riemann));
  CHECK(!has_analytic_gradient(objectives[2]));
  const Pulse p = oracle::random_pulse(rng, q, 8, 0.1);
  CHECK(max_rel_error(objective_gradient(riemann, p).values,
                      objective_gradient(riemann, p, GradientMode::finite_difference).values) < 1e-4);
}

TEST_CASE("BCH segment splitting is third order") {
  const SpinOperators s = spin_operators(2);
  const CMatrix drift = s.z * s.z;
  double prev = 0.0;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    const double err = (bch_segment_unitary(drift, s.x, 1.3, dt) - oracle::expm(drift + 1.3 * s.x, dt)).norm();
    if (prev > 0) CHECK(prev / err == doctest::Approx(8.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("single-segment updates match a full re-evaluation") {
  std::mt19937_64 rng(82);
  const auto fixtures = fixture_targets();
  const ControlModel q = single_qubit_model(1.0);
  const ControlModel s = collective_spin_model(1.0, 2);
  const ControlModel s4 = collective_spin_model(1.0, 4);
  std::vector<Objective> objectives;
  for (const Quadrature quad : {Quadrature{}, Quadrature::riemann(3)}) {
    auto add = [&](const ControlModel& m, const TargetSpec& t, Robustness r) {
      objectives.push_back(Objective{m, t, std::move(r), 0.7, 6, 1.3, quad});
    };
    add(q, fixtures.at("single_qubit_z"), NoRobustness{});
    add(q, fixtures.at("single_qubit_z"), KnownV{pauli::z() + 0.3 * identity(2)});
    add(q, fixtures.at("single_qubit_z"), Universal{pauli_basis(1), {0}});
    add(s, fixtures.at("ms_gate"), Universal{symmetric_subspace_basis(2), {0, 2}});
    add(s4, fixtures.at("dicke4"), KnownV{spin_operators(4).z});
    add(s4, fixtures.at("dicke4"), Universal{symmetric_subspace_basis(4), {0, 1, 3, 4}});
  }
  for (const Objective& o : objectives) {
    const Pulse p = oracle::random_pulse(rng, o.model, o.segments, o.dt());
    const SegmentUpdate update(o, p);
    const FunctionalValue full = evaluate(o, p);
    CHECK(std::abs(update.base().total - full.total) < 1e-12);
    for (Eigen::Index k = 0; k < o.segments; ++k) {
      const Pulse other = oracle::random_pulse(rng, o.model, o.segments, o.dt());
      Pulse::Table changed = p.values();
      changed.row(k) = other.values().row(k);
      const FunctionalValue ref = evaluate(o, Pulse(changed, p.dt()));
      const FunctionalValue got = update.with_segment(k, other.segment(k));
      CHECK(std::abs(got.j0 - ref.j0) < 1e-12);
      CHECK(std::abs(got.jrob - ref.jrob) < 1e-12);
      CHECK(std::abs(got.total - ref.total) < 1e-12);
    }
    auto f = [&](const RVector& x) { return evaluate(o, p.with_parameters(x)).total; };
    const RVector plain = grad_finite_difference(f, p.parameters()).values;
    const RVector fast = grad_finite_difference(o, p).values;
    CHECK((fast - plain).cwiseAbs().maxCoeff() < 1e-8);
  }
  const Objective& o = objectives.front();
  const SegmentUpdate update(o, oracle::random_pulse(rng, o.model, o.segments, o.dt()));
  const std::vector<double> row(1, 0.0);
  CHECK_THROWS_AS(update.with_segment(o.segments, row), InputError);
}
