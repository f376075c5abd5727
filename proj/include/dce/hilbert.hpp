// Copyright 2026 The dce-qfi Authors
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

// Truncated qubit (x) single-mode field Hilbert space: operators, tensor
// products, partial trace/transpose and Hermitian eigendecomposition.
//
// Basis convention: composite index = qubit * n_fock + m, qubit index major
// and Fock index minor, with qubit basis order (|e>, |g>).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "dce/errors.hpp"

namespace dce {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class Space { field, qubit, composite };

inline const char* to_string(Space s) {
    switch (s) {
    case Space::field: return "field";
    case Space::qubit: return "qubit";
    case Space::composite: return "composite";
    }
    return "?";
}

inline constexpr Index kQubitDim = 2;
inline constexpr Index kExcited = 0;
inline constexpr Index kGround = 1;

struct HilbertConfig {
    int n_fock = 120;

    void validate() const {
        if (n_fock < 2)
            throw std::invalid_argument("n_fock must be >= 2, got " + std::to_string(n_fock));
    }
    Index total_dim() const { return kQubitDim * n_fock; }
    Index dim(Space s) const {
        switch (s) {
        case Space::field: return n_fock;
        case Space::qubit: return kQubitDim;
        case Space::composite: return total_dim();
        }
        return 0;
    }
    /// Index of |q, m> in the composite basis.
    Index index(Index qubit, Index m) const { return qubit * n_fock + m; }

    static HilbertConfig from_composite_dim(Index d) {
        if (d % kQubitDim != 0 || d < 2 * kQubitDim)
            throw std::invalid_argument("composite dimension " + std::to_string(d) +
                                        " is not 2*n_fock with n_fock >= 2");
        HilbertConfig c{static_cast<int>(d / kQubitDim)};
        return c;
    }
};

struct Operator {
    Matrix matrix;
    Space space = Space::composite;

    Index dim() const { return matrix.rows(); }
};

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |M - M^dagger| over all entries.
inline double hermiticity_error(const Matrix& m) {
    return max_abs(m - m.adjoint());
}

struct DensityTolerances {
    double herm = 1e-10;
    double trace = 1e-8;
    double pos = 1e-9;
};

/// Hermitian, unit-trace density operator tagged with its subsystem.
/// Construction checks Hermiticity and trace; positivity is checked where
/// the spectrum is computed (see clamp_probabilities).
class DensityMatrix {
public:
    DensityMatrix(Matrix m, Space space, const DensityTolerances& tol = {})
        : m_(std::move(m)), space_(space) {
        if (m_.rows() != m_.cols())
            throw std::invalid_argument("density matrix must be square");
        if (space_ == Space::qubit && m_.rows() != kQubitDim)
            throw std::invalid_argument("qubit density matrix must be 2x2");
        if (space_ == Space::composite)
            HilbertConfig::from_composite_dim(m_.rows());
        if (space_ == Space::field && m_.rows() < 2)
            throw std::invalid_argument("field density matrix needs n_fock >= 2");
        const double herm = hermiticity_error(m_);
        if (herm > tol.herm)
            throw std::invalid_argument("density matrix not Hermitian (max|rho-rho^+| = " +
                                        std::to_string(herm) + ")");
        const double tr_err = std::abs(m_.trace() - cplx(1.0, 0.0));
        if (tr_err > tol.trace)
            throw std::invalid_argument("density matrix trace error " + std::to_string(tr_err));
    }

    static DensityMatrix pure(const Vector& psi, Space space) {
        return DensityMatrix(psi * psi.adjoint(), space);
    }

    const Matrix& matrix() const { return m_; }
    Space space() const { return space_; }
    Index dim() const { return m_.rows(); }

private:
    Matrix m_;
    Space space_;
};

// ---------------------------------------------------------------- operators

struct LadderOps {
    Operator a;
    Operator a_dagger;
    Operator n;
};

inline LadderOps fock_ladder(const HilbertConfig& config) {
    config.validate();
    const Index N = config.n_fock;
    Matrix a = Matrix::Zero(N, N);
    for (Index m = 1; m < N; ++m)
        a(m - 1, m) = std::sqrt(static_cast<double>(m));
    Matrix ad = a.adjoint();
    Matrix n = ad * a;
    return {{std::move(a), Space::field}, {std::move(ad), Space::field}, {std::move(n), Space::field}};
}

struct QubitOps {
    Operator sigma_z;
    Operator sigma_plus;
    Operator sigma_minus;
};

inline QubitOps qubit_ops() {
    Matrix sz = Matrix::Zero(2, 2);
    sz(kExcited, kExcited) = 1.0;
    sz(kGround, kGround) = -1.0;
    Matrix sp = Matrix::Zero(2, 2);
    sp(kExcited, kGround) = 1.0; // |e><g|
    Matrix sm = sp.adjoint();
    return {{std::move(sz), Space::qubit}, {std::move(sp), Space::qubit}, {std::move(sm), Space::qubit}};
}

inline Operator identity(Space space, const HilbertConfig& config) {
    const Index d = config.dim(space);
    return {Matrix::Identity(d, d), space};
}

/// Quadratures x1 = a + a^+ and x2 = (a - a^+)/i on the truncated field.
struct Quadratures {
    Operator x1;
    Operator x2;
};

inline Quadratures quadratures(const HilbertConfig& config) {
    const auto ops = fock_ladder(config);
    const cplx minus_i(0.0, -1.0);
    return {{ops.a.matrix + ops.a_dagger.matrix, Space::field},
            {minus_i * (ops.a.matrix - ops.a_dagger.matrix), Space::field}};
}

/// Kronecker product in the fixed qubit (x) field order.
inline Operator tensor(const Operator& q, const Operator& f) {
    if (q.space != Space::qubit || f.space != Space::field)
        throw std::invalid_argument(std::string("tensor expects (qubit, field), got (") +
                                    to_string(q.space) + ", " + to_string(f.space) + ")");
    if (q.matrix.rows() != kQubitDim || q.matrix.cols() != kQubitDim)
        throw std::invalid_argument("qubit factor must be 2x2");
    if (f.matrix.rows() != f.matrix.cols() || f.matrix.rows() < 2)
        throw std::invalid_argument("field factor must be square with dimension >= 2");
    const Index N = f.matrix.rows();
    Matrix out(kQubitDim * N, kQubitDim * N);
    for (Index i = 0; i < kQubitDim; ++i)
        for (Index j = 0; j < kQubitDim; ++j)
            out.block(i * N, j * N, N, N) = q.matrix(i, j) * f.matrix;
    return {std::move(out), Space::composite};
}

inline Operator lift_qubit(const Operator& q, const HilbertConfig& config) {
    return tensor(q, identity(Space::field, config));
}

inline Operator lift_field(const Operator& f) {
    return tensor({Matrix::Identity(kQubitDim, kQubitDim), Space::qubit}, f);
}

// ------------------------------------------------ partial trace / transpose

inline void require_composite(const Matrix& rho, const char* who) {
    if (rho.rows() != rho.cols())
        throw std::invalid_argument(std::string(who) + ": matrix is not square");
    HilbertConfig::from_composite_dim(rho.rows());
}

/// Tr_qubit of a composite matrix: sum of the two diagonal N x N blocks.
inline Matrix partial_trace_qubit(const Matrix& rho) {
    require_composite(rho, "partial_trace_qubit");
    const Index N = rho.rows() / kQubitDim;
    return rho.topLeftCorner(N, N) + rho.bottomRightCorner(N, N);
}

inline DensityMatrix partial_trace_qubit(const DensityMatrix& rho,
                                         const DensityTolerances& tol = {}) {
    if (rho.space() != Space::composite)
        throw std::invalid_argument("partial_trace_qubit expects a composite density matrix");
    return DensityMatrix(partial_trace_qubit(rho.matrix()), Space::field, tol);
}

/// Transpose on the qubit index only: the off-diagonal N x N blocks swap.
inline Matrix partial_transpose(const Matrix& rho) {
    require_composite(rho, "partial_transpose");
    const Index N = rho.rows() / kQubitDim;
    Matrix out = rho;
    out.topRightCorner(N, N) = rho.bottomLeftCorner(N, N);
    out.bottomLeftCorner(N, N) = rho.topRightCorner(N, N);
    return out;
}

inline Matrix partial_transpose(const DensityMatrix& rho) {
    if (rho.space() != Space::composite)
        throw std::invalid_argument("partial_transpose expects a composite density matrix");
    return partial_transpose(rho.matrix());
}

// ------------------------------------------------------------ eigensolver

struct SpectralDecomposition {
    RealVector eigenvalues; // ascending
    Matrix eigenvectors;    // columns
};

namespace detail {
inline void require_hermitian(const Matrix& m, double tol_herm, const char* who) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(who) + ": matrix is not square");
    const double scale = std::max(1.0, max_abs(m));
    if (hermiticity_error(m) > tol_herm * scale)
        throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
}
} // namespace detail

inline SpectralDecomposition hermitian_eig(const Matrix& m, double tol_herm = 1e-10) {
    detail::require_hermitian(m, tol_herm, "hermitian_eig");
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian_eig: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const Matrix& m, double tol_herm = 1e-10) {
    detail::require_hermitian(m, tol_herm, "hermitian_eigenvalues");
    const Matrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("hermitian_eigenvalues: eigensolver did not converge");
    return solver.eigenvalues();
}

/// Density-matrix spectrum as probabilities: values within -tol_pos of zero
/// are clamped to 0, values above 1 to 1. Anything more negative is a
/// positivity violation and throws.
inline RealVector clamp_probabilities(const RealVector& eigenvalues, double tol_pos = 1e-9) {
    if (eigenvalues.size() > 0 && eigenvalues.minCoeff() < -tol_pos)
        throw NumericalError("density matrix has eigenvalue " +
                             std::to_string(eigenvalues.minCoeff()) + " below -" +
                             std::to_string(tol_pos));
    return eigenvalues.cwiseMax(0.0).cwiseMin(1.0);
}

} // namespace dce
