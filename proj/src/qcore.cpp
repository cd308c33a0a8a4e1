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

#include "urc/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "urc/error.hpp"

namespace urc {

bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

double unitarity_error(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - identity(u.rows())).cwiseAbs().maxCoeff();
}

bool is_unitary(const CMatrix& u, double tol) { return unitarity_error(u) < tol; }

Eigensystem hermitian_eigensystem(const CMatrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw ConfigError(fmt::format("expected a non-empty square matrix, got {}x{}", h.rows(), h.cols()));
  }
  if (!h.allFinite()) throw InputError("matrix has non-finite entries");
  if (!is_hermitian(h)) throw InvariantError("generator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix expm_skew(const Eigensystem& spectrum, double tau) {
  if (!std::isfinite(tau)) throw InputError("evolution time is not finite");
  const CVector phases =
      (spectrum.values * (-tau)).unaryExpr([](double a) { return std::polar(1.0, a); });
  return spectrum.vectors * phases.asDiagonal() * spectrum.vectors.adjoint();
}

CMatrix expm_skew(const CMatrix& h, double tau) { return expm_skew(hermitian_eigensystem(h), tau); }

CMatrix identity(Eigen::Index d) { return CMatrix::Identity(d, d); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix ket_projector(const CVector& psi) { return psi * psi.adjoint(); }

double gate_fidelity(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(fmt::format("gate fidelity of {}x{} and {}x{} matrices", a.rows(), a.cols(),
                                  b.rows(), b.cols()));
  }
  const double d = static_cast<double>(a.rows());
  return std::norm((a.adjoint() * b).trace()) / (d * d);
}

void require_pure_state(const CMatrix& rho, const char* what) {
  if (rho.rows() != rho.cols()) throw ConfigError(fmt::format("{} is not square", what));
  if (!rho.allFinite()) throw InputError(fmt::format("{} has non-finite entries", what));
  if (!is_hermitian(rho, 1e-10)) throw InputError(fmt::format("{} is not Hermitian", what));
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > kPurityTol) {
    throw InputError(fmt::format("{} has trace {} (expected 1)", what, tr.real()));
  }
  const double purity = (rho * rho).trace().real();
  if (purity <= 1.0 - kPurityTol) {
    throw InputError(fmt::format("{} is not pure: Tr(rho^2) = {}", what, purity));
  }
}

double state_fidelity(const CMatrix& rho, const CMatrix& rho_other) {
  if (rho.rows() != rho_other.rows()) throw ConfigError("state fidelity: dimension mismatch");
  require_pure_state(rho, "state");
  require_pure_state(rho_other, "reference state");
  return (rho * rho_other).trace().real();
}

CVector vectorize(const CMatrix& a) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  CVector v(rows * cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) v(i * cols + j) = a(i, j);
  }
  return v;
}

CMatrix devectorize(const CVector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) {
    throw ConfigError(fmt::format("cannot devectorize a vector of length {}", v.size()));
  }
  CMatrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = v(i * d + j);
  }
  return a;
}

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError("Hilbert-Schmidt inner product: dimension mismatch");
  }
  // Tr(A^dagger B) = sum_ij conj(A_ij) B_ij, the same sum as <<A|B>>.
  Complex acc{0.0, 0.0};
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc += std::conj(a(i, j)) * b(i, j);
  }
  return acc;
}

Complex vec_inner(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw ConfigError("vector inner product: length mismatch");
  Complex acc{0.0, 0.0};
  for (Eigen::Index k = 0; k < a.size(); ++k) acc += std::conj(a(k)) * b(k);
  return acc;
}

double hs_norm2(const CMatrix& a) { return a.squaredNorm(); }

CMatrix traceless_part(const CMatrix& a) {
  return a - (a.trace() / static_cast<double>(a.rows())) * identity(a.rows());
}

namespace pauli {
CMatrix i() { return identity(2); }
CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
CMatrix y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

}  // namespace urc
