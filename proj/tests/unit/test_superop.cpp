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
#include "urc/superop.hpp"

using namespace urc;
using std::numbers::pi;

namespace {

std::vector<ControlModel> fixture_models() {
  return {single_qubit_model(1.0), single_qubit_rabi_model(2 * pi), collective_spin_model(1.0, 2),
          collective_spin_model(0.6, 4)};
}

double rel_err(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("time_average_V closed forms") {
  const ControlModel idle("idle", CMatrix::Zero(2, 2), {ControlChannel::amplitude(pauli::x())});
  const Pulse zero = Pulse::zeros(5, 1, 0.2);
  CHECK((time_average_V(idle, zero, pauli::z()) - pauli::z()).norm() < 1e-14);

  // Constant Omega sigma_x for half a period: sigma_z averages to zero.
  const ControlModel m = single_qubit_model(1.3);
  const Pulse half_turn = Pulse::zeros(7, 1, pi / 1.3 / 7);
  CHECK(time_average_V(m, half_turn, pauli::z()).norm() < 1e-13);
  CHECK(time_average_V(m, half_turn, pauli::x()).isApprox(pauli::x(), 1e-13));
  CHECK(build_M0(m, half_turn).apply(pauli::z()).norm() < 1e-13);

  std::mt19937_64 rng(2);
  const Pulse p = oracle::random_pulse(rng, m, 9, 0.3);
  CHECK((time_average_V(m, p, identity(2)) - identity(2)).norm() < 1e-13);
  CHECK_THROWS_AS(time_average_V(m, p, identity(3)), ConfigError);
}

TEST_CASE("time_average_V against Simpson quadrature") {
  std::mt19937_64 rng(7);
  for (const ControlModel& model : fixture_models()) {
    for (int r = 0; r < 3; ++r) {
      const Pulse p = oracle::random_pulse(rng, model, 12, 0.15);
      const CMatrix v = oracle::random_hermitian(rng, model.dim());
      const CMatrix vbar = time_average_V(model, p, v);
      CHECK(rel_err(vbar, oracle::simpson_time_average(model, p, v)) < 1e-9);
      CHECK(is_hermitian(vbar, 1e-10));
      const CMatrix vt = traceless_part(v);
      CHECK(std::abs(time_average_V(model, p, vt).trace()) < 1e-10);
    }
  }
}

TEST_CASE("build_M0 properties") {
  std::mt19937_64 rng(13);
  const ControlModel idle("idle", CMatrix::Zero(3, 3), {ControlChannel::amplitude(spin_operators(2).x)});
  CHECK((build_M0(idle, Pulse::zeros(3, 1, 0.5)).matrix - CMatrix::Identity(9, 9)).norm() < 1e-14);
  for (const ControlModel& model : fixture_models()) {
    const Eigen::Index d = model.dim();
    const Pulse p = oracle::random_pulse(rng, model, 15, 0.2);
    const Propagation prop = propagate_segments(model, p);
    const Superoperator m0 = build_M0(prop);
    CHECK((m0.apply(identity(d)) - identity(d)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(m0.frobenius_norm2() <= d * d + 1e-9);
    for (int r = 0; r < 10; ++r) {
      const CMatrix v = oracle::random_hermitian(rng, d);
      CHECK(rel_err(m0.apply(v), time_average_V(prop, v)) < 1e-9);
    }
    // Exact integration does not depend on substeps.
    const double n1 = build_M0(prop, {Quadrature::Scheme::exact, 1}).matrix.norm();
    const double n2 = build_M0(prop, {Quadrature::Scheme::exact, 2}).matrix.norm();
    CHECK(std::abs(n1 - n2) < 1e-8);
    // Left Riemann converges at first order to the exact value.
    const double e1 = (build_M0(prop, Quadrature::riemann(8)).matrix - m0.matrix).norm();
    const double e2 = (build_M0(prop, Quadrature::riemann(16)).matrix - m0.matrix).norm();
    const double e3 = (build_M0(prop, Quadrature::riemann(32)).matrix - m0.matrix).norm();
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(e2 / e3 == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("projectors") {
  const Superoperator p0 = projector_identity(2);
  CHECK((p0.apply(identity(2)) - identity(2)).norm() < 1e-15);
  CHECK(p0.apply(pauli::x()).norm() < 1e-15);
  CHECK(std::abs(p0.matrix.trace() - 1.0) < 1e-15);
  CHECK_THROWS_AS(projector_identity(1), ConfigError);

  const OperatorBasis b1 = pauli_basis(1);
  CHECK((projector_subset(b1, {0}).matrix - p0.matrix).norm() < 1e-14);
  CHECK((projector_subset(b1, {0, 1}).matrix - CMatrix::Identity(4, 4)).norm() < 1e-14);
  const Superoperator p1 = projector_subset(pauli_basis(2), {1});
  CHECK(std::abs(p1.matrix.trace() - 6.0) < 1e-12);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(p1.matrix);
  int rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) rank += es.eigenvalues()(i) > 0.5;
  CHECK(rank == 6);
  CHECK((p1.matrix * p1.matrix - p1.matrix).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p1.matrix - p1.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(projector_subset(b1, {2}), ConfigError);
}

TEST_CASE("Mtilde norm relation and selections") {
  const ControlModel idle("idle", CMatrix::Zero(2, 2), {ControlChannel::amplitude(pauli::x())});
  const OperatorBasis b1 = pauli_basis(1);
  const Superoperator m_idle = build_M0(idle, Pulse::zeros(2, 1, 1.0));
  CHECK(build_Mtilde(m_idle, b1, {0}).frobenius_norm2() == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(build_Mtilde(m_idle, b1, {1}), ConfigError);

  std::mt19937_64 rng(17);
  for (const ControlModel& model : fixture_models()) {
    const OperatorBasis basis = model.dim() == 2 ? pauli_basis(1) : symmetric_subspace_basis(static_cast<int>(model.dim()) - 1);
    for (int r = 0; r < 5; ++r) {
      const Superoperator m0 = build_M0(model, oracle::random_pulse(rng, model, 10, 0.25));
      const double mt = build_Mtilde(m0, basis, {0}).frobenius_norm2();
      CHECK(std::abs(mt - (m0.frobenius_norm2() - 1.0)) < 1e-9);
    }
  }
  const ControlModel spin = collective_spin_model(1.0, 2);
  const OperatorBasis bs = symmetric_subspace_basis(2);
  const Superoperator m0 = build_M0(spin, oracle::random_pulse(rng, spin, 10, 0.3));
  const Superoperator mt = build_Mtilde(m0, bs, {0, 2});
  for (std::size_t j = 0; j < bs.size(); ++j) {
    if (bs.class_of(j) == 2) CHECK(mt.apply(bs.element(j)).norm() < 1e-12);
  }
}

TEST_CASE("state projector") {
  const CMatrix s0 = ket_projector(CVector::Unit(2, 0));
  const Superoperator ps = state_projector(s0);
  auto quad = [&](const Superoperator& p, const CMatrix& v) {
    return vec_inner(vectorize(v), p.matrix * vectorize(v)).real();
  };
  CHECK(quad(ps, pauli::z()) == doctest::Approx(0.0));
  CHECK(quad(ps, pauli::x()) == doctest::Approx(1.0));
  // The rank form disagrees off the range of the tensor form.
  CHECK(quad(state_projector_rank_form(s0), pauli::z()) == doctest::Approx(1.0));

  std::mt19937_64 rng(23);
  for (Eigen::Index d : {2, 3, 5}) {
    const CMatrix sigma = ket_projector(oracle::random_ket(rng, d));
    const Superoperator p = state_projector(sigma);
    const Superoperator pr = state_projector_rank_form(sigma);
    CHECK((p.matrix * p.matrix - p.matrix).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pr.matrix * pr.matrix - pr.matrix).cwiseAbs().maxCoeff() < 1e-12);
    for (int r = 0; r < 5; ++r) {
      const CMatrix v = oracle::random_hermitian(rng, d);
      const double mean = (sigma * v).trace().real();
      const double var = (sigma * v * v).trace().real() - mean * mean;
      CHECK(std::abs(quad(p, v) - var) < 1e-10);
      // On the range of P_sigma both forms give the same quadratic form.
      const CVector w = p.matrix * vectorize(oracle::random_matrix(rng, d));
      const double a = vec_inner(w, p.matrix * w).real();
      const double b = vec_inner(w, pr.matrix * w).real();
      CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, a));
    }
  }
  CHECK_THROWS_AS(state_projector(0.5 * identity(2)), InputError);
}

TEST_CASE("M0 sigma") {
  std::mt19937_64 rng(29);
  const CMatrix s0 = ket_projector(CVector::Unit(2, 0));
  const ControlModel idle("idle", CMatrix::Zero(2, 2), {ControlChannel::amplitude(pauli::x())});
  const Superoperator ms_idle = build_M0_sigma(build_M0(idle, Pulse::zeros(1, 1, 1.0)), s0);
  CHECK(ms_idle.apply(pauli::x()).squaredNorm() == doctest::Approx(1.0));
  for (const ControlModel& model : fixture_models()) {
    const Eigen::Index d = model.dim();
    const Propagation prop = propagate_segments(model, oracle::random_pulse(rng, model, 10, 0.25));
    const Superoperator m0 = build_M0(prop);
    const CMatrix sigma = ket_projector(oracle::random_ket(rng, d));
    const Superoperator ms = build_M0_sigma(m0, sigma);
    CHECK(ms.apply(identity(d)).norm() < 1e-12);
    for (int r = 0; r < 5; ++r) {
      const CMatrix v = oracle::random_hermitian(rng, d);
      const CMatrix vbar = time_average_V(prop, v);
      const double mean = (sigma * vbar).trace().real();
      const double var = (sigma * vbar * vbar).trace().real() - mean * mean;
      const double form = (ms.matrix * vectorize(v)).squaredNorm();
      CHECK(std::abs(form - var) < 1e-9);
      CHECK(form <= (m0.matrix * vectorize(v)).squaredNorm() + 1e-12);
    }
  }
}

TEST_CASE("noise kernel") {
  std::mt19937_64 rng(31);
  const ControlModel m = single_qubit_model(1.0);
  const Pulse p = oracle::random_pulse(rng, m, 8, 0.2);
  const Propagation prop = propagate_segments(m, p);
  const CMatrix sigma = ket_projector(CVector::Unit(2, 0));

  // Constant correlation factorizes into t_f^2 (M0^s)^dagger M0^s; trapezoid converges at second order.
  const Superoperator ms = build_M0_sigma(build_M0(prop), sigma);
  const CMatrix expect = prop.duration() * prop.duration() * ms.matrix.adjoint() * ms.matrix;
  const double e1 = (noise_kernel(prop, sigma, Correlation::constant(), 10).matrix - expect).norm();
  const double e2 = (noise_kernel(prop, sigma, Correlation::constant(), 20).matrix - expect).norm();
  CHECK(e1 < 1e-3 * expect.norm());
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));

  for (const Correlation& c : {Correlation::white(0.3), Correlation::exponential(0.5, 2.0)}) {
    const Superoperator k = noise_kernel(prop, sigma, c, 5);
    CHECK((k.matrix - k.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(k.matrix);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
    for (int r = 0; r < 5; ++r) {
      const CVector v = vectorize(oracle::random_hermitian(rng, 2));
      CHECK(vec_inner(v, k.matrix * v).real() >= -1e-12);
    }
  }
  const auto skew = Correlation::custom([](double t, double s) { return std::exp(-(t - 2 * s) * (t - 2 * s)); });
  CHECK_THROWS_AS(noise_kernel(prop, sigma, skew, 2), ConfigError);
  CHECK_THROWS_AS(Correlation::exponential(0.0), ConfigError);
}
