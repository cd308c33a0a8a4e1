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

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace urc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kPurityTol = 1e-8;

/// Spectral decomposition H = Q diag(values) Q^dagger of a Hermitian matrix.
struct Eigensystem {
  RVector values;
  CMatrix vectors;
};

bool is_hermitian(const CMatrix& a, double tol = kHermitianTol);
/// max_ij |(U^dagger U - I)_ij|
double unitarity_error(const CMatrix& u);
bool is_unitary(const CMatrix& u, double tol = kUnitaryTol);

/// Throws InputError on NaN/inf entries, InvariantError on non-Hermitian input.
Eigensystem hermitian_eigensystem(const CMatrix& h);

/// exp(-i H tau) with hbar = 1, through the spectrum of H.
CMatrix expm_skew(const CMatrix& h, double tau);
CMatrix expm_skew(const Eigensystem& spectrum, double tau);

CMatrix identity(Eigen::Index d);
CMatrix kron(const CMatrix& a, const CMatrix& b);
/// |psi><psi|
CMatrix ket_projector(const CVector& psi);

/// |Tr(A^dagger B)|^2 / d^2
double gate_fidelity(const CMatrix& a, const CMatrix& b);
/// Tr(rho rho') for pure density matrices.
double state_fidelity(const CMatrix& rho, const CMatrix& rho_other);

/// Validates a pure density matrix: Hermitian, unit trace, Tr(rho^2) > 1 - 1e-8.
void require_pure_state(const CMatrix& rho, const char* what);

// Row-stacking convention: component i*d + j holds A(i, j), so that
// vectorize(B A C^T) == kron(B, C) * vectorize(A).
CVector vectorize(const CMatrix& a);
CMatrix devectorize(const CVector& v);

/// Hilbert-Schmidt inner product Tr(A^dagger B).
Complex hs_inner(const CMatrix& a, const CMatrix& b);
/// <<a|b>> on vectorized operators; same summation order as hs_inner.
Complex vec_inner(const CVector& a, const CVector& b);
/// Tr(A^dagger A)
double hs_norm2(const CMatrix& a);

/// Removes the identity component: A - (Tr A / d) I.
CMatrix traceless_part(const CMatrix& a);

namespace pauli {
CMatrix i();
CMatrix x();
CMatrix y();
CMatrix z();
}  // namespace pauli

}  // namespace urc
