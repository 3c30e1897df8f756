// Copyright 2026 The stoqtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>

#include "stoq/errors.hpp"

// Dense complex linear algebra for small Hilbert spaces. Units: hbar = 1.
namespace stoq {

template <typename Real>
using ComplexT = std::complex<Real>;
template <typename Real>
using OperatorT = Eigen::Matrix<ComplexT<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using StateVectorT = Eigen::Matrix<ComplexT<Real>, Eigen::Dynamic, 1>;

using Complex = ComplexT<double>;
using Operator = OperatorT<double>;
using StateVector = StateVectorT<double>;
// Hermitian, trace one for normalized states. Same storage as Operator.
using DensityMatrix = Operator;

/// Elementwise Hermiticity tolerance, for entries of order one.
inline constexpr double kHermitianTolerance = 1e-12;

template <typename Derived>
typename Derived::RealScalar hermitian_defect(const Eigen::MatrixBase<Derived>& a) {
    if (a.size() == 0) return 0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double tolerance = kHermitianTolerance) {
    return a.rows() == a.cols() && hermitian_defect(a) <= tolerance;
}

template <typename Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& a) {
    return a.allFinite();
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be a non-empty square matrix");
    }
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& a, const char* what,
                       double tolerance = kHermitianTolerance) {
    require_square(a, what);
    if (!a.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
    }
    if (hermitian_defect(a) > tolerance) {
        throw Error(ErrorCode::NonHermitianInput,
                    std::string(what) + " is not Hermitian (max|A - A^dag| = " +
                        std::to_string(double(hermitian_defect(a))) + ")");
    }
}

template <typename DA, typename DB>
void require_same_shape(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimension mismatch (" +
                                                      std::to_string(a.rows()) + " vs " +
                                                      std::to_string(b.rows()) + ")");
    }
}

template <typename DA, typename DB>
auto commutator(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    require_same_shape(a, b, "commutator");
    using Scalar = typename DA::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = a * b;
    out.noalias() -= b * a;
    return out;
}

template <typename DA, typename DB>
auto anticommutator(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    require_same_shape(a, b, "anticommutator");
    using Scalar = typename DA::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = a * b;
    out.noalias() += b * a;
    return out;
}

namespace detail {

// exp(-i * scale * M) for Hermitian M. No validation; M is symmetrized first.
// Qubits use the closed-form eigendecomposition M = a0 + a.sigma.
template <typename Derived>
OperatorT<typename Derived::RealScalar> expm_hermitian(const Eigen::MatrixBase<Derived>& m,
                                                       typename Derived::RealScalar scale) {
    using Real = typename Derived::RealScalar;
    using C = ComplexT<Real>;
    const Eigen::Index n = m.rows();
    const C minus_i(0, -1);
    if (n == 2) {
        const Real a0 = Real(0.5) * (m(0, 0).real() + m(1, 1).real());
        const Real az = Real(0.5) * (m(0, 0).real() - m(1, 1).real());
        const C off = Real(0.5) * (m(1, 0) + std::conj(m(0, 1)));  // ax + i ay
        const Real norm = std::sqrt(az * az + std::norm(off));
        const Real angle = scale * norm;
        const Real c = std::cos(angle);
        // sin(angle) / norm, continuous at norm = 0
        const Real s_over = norm > Real(0) ? std::sin(angle) / norm : scale;
        const C phase = std::exp(minus_i * (scale * a0));
        OperatorT<Real> u(2, 2);
        u(0, 0) = phase * C(c, -s_over * az);
        u(1, 1) = phase * C(c, s_over * az);
        u(1, 0) = phase * (minus_i * s_over * off);
        u(0, 1) = phase * (minus_i * s_over * std::conj(off));
        return u;
    }
    const OperatorT<Real> herm = Real(0.5) * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<OperatorT<Real>> solver(herm);
    const auto& vecs = solver.eigenvectors();
    const auto phases = (minus_i * scale * solver.eigenvalues().template cast<C>()).array().exp().matrix();
    return vecs * phases.asDiagonal() * vecs.adjoint();
}

}  // namespace detail

/// U = exp(-i * scale * M) via the Hermitian eigendecomposition M = V diag(lambda) V^dag,
/// so the result is unitary up to rounding.
template <typename Derived>
OperatorT<typename Derived::RealScalar> expm_generator(const Eigen::MatrixBase<Derived>& m,
                                                       typename Derived::RealScalar scale,
                                                       double tolerance = kHermitianTolerance) {
    require_hermitian(m, "generator", tolerance);
    return detail::expm_hermitian(m, scale);
}

template <typename DA, typename DB>
typename DA::RealScalar trace_distance(const Eigen::MatrixBase<DA>& rho1, const Eigen::MatrixBase<DB>& rho2) {
    require_same_shape(rho1, rho2, "trace_distance");
    using Real = typename DA::RealScalar;
    const OperatorT<Real> diff = rho1 - rho2;
    const OperatorT<Real> herm = Real(0.5) * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<OperatorT<Real>> solver(herm, Eigen::EigenvaluesOnly);
    return Real(0.5) * solver.eigenvalues().cwiseAbs().sum();
}

/// Tr(rho^2).
template <typename Derived>
typename Derived::RealScalar purity(const Eigen::MatrixBase<Derived>& rho) {
    require_square(rho, "density matrix");
    return (rho * rho).trace().real();
}

template <typename Derived>
typename Derived::RealScalar min_eigenvalue(const Eigen::MatrixBase<Derived>& rho) {
    using Real = typename Derived::RealScalar;
    const OperatorT<Real> herm = Real(0.5) * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<OperatorT<Real>> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

/// Largest singular value.
template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& a) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(a);
    return svd.singularValues()(0);
}

template <typename Derived>
typename Derived::RealScalar unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
    using Scalar = typename Derived::Scalar;
    const auto id = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(u.rows(), u.cols());
    return (u.adjoint() * u - id).cwiseAbs().maxCoeff();
}

template <typename Derived>
DensityMatrix projector(const Eigen::MatrixBase<Derived>& psi) {
    return psi * psi.adjoint();
}

// Qubit basis |0>, |1>; |1> is the excited state.
inline Operator identity(Eigen::Index dim) { return Operator::Identity(dim, dim); }

inline Operator pauli_x() {
    Operator m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Operator pauli_y() {
    Operator m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline Operator pauli_z() {
    Operator m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

/// |0><1|, lowers |1> to |0>.
inline Operator sigma_minus() {
    Operator m(2, 2);
    m << 0, 1, 0, 0;
    return m;
}

inline StateVector basis_state(Eigen::Index dim, Eigen::Index k) {
    StateVector v = StateVector::Zero(dim);
    v(k) = 1;
    return v;
}

inline StateVector plus_state() {
    StateVector v(2);
    v << 1, 1;
    return v / std::sqrt(2.0);
}

}  // namespace stoq
