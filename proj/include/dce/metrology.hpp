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

// Quantum Fisher information of the cavity field.
//
// Normalization: phase QFI carries a prefactor 1/2 and the displacement
// matrix none, so that for a pure state F_ph = Var(n) and every classical
// state satisfies F_ph <= <n>, M_av <= 1, M_opt <= 1. Both are 1/4 of the
// standard SLD quantum Fisher information for the same generator
// (F_disp_kk = 2 * F_SLD(x_k) / 4).
//
// Eigenvalue pairs with p_i + p_j < p_cut are skipped. The kernel
// (p_i - p_j)^2 / (p_i + p_j) is bounded by p_i + p_j, so the truncation
// error is at most d^2 * p_cut * max|G_ij|^2 for a d-level state.

#pragma once

#include <Eigen/SVD>

#include <cmath>
#include <optional>
#include <stdexcept>

#include "dce/hilbert.hpp"

namespace dce {

inline constexpr double kQfiPairCutoff = 1e-12;

struct QfiDisplacementMatrix {
    Eigen::Matrix2d entries = Eigen::Matrix2d::Zero();

    double operator()(int k, int l) const { return entries(k, l); }
};

namespace detail {

inline void require_field(const Matrix& rho, const char* who) {
    if (rho.rows() != rho.cols() || rho.rows() < 2)
        throw std::invalid_argument(std::string(who) + ": expected a square field matrix");
}

/// Symmetric weight matrix W_ij = (p_i - p_j)^2 / (p_i + p_j).
inline Eigen::MatrixXd qfi_weights(const RealVector& p, double p_cut) {
    const Index d = p.size();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) {
            const double s = p(i) + p(j);
            if (s >= p_cut) {
                const double diff = p(i) - p(j);
                w(i, j) = diff * diff / s;
            }
        }
    return w;
}

/// Generator matrix elements in the eigenbasis of rho: V^+ G V.
inline Matrix in_eigenbasis(const SpectralDecomposition& s, const Matrix& g) {
    return s.eigenvectors.adjoint() * g * s.eigenvectors;
}

inline Matrix number_operator(Index d) {
    Matrix n = Matrix::Zero(d, d);
    for (Index m = 0; m < d; ++m) n(m, m) = static_cast<double>(m);
    return n;
}

} // namespace detail

/// Spectrum of a field state with eigenvalues clamped to [0, 1].
inline SpectralDecomposition field_spectrum(const Matrix& rho_cav, double tol_pos = 1e-9) {
    detail::require_field(rho_cav, "field_spectrum");
    SpectralDecomposition s = hermitian_eig(rho_cav);
    s.eigenvalues = clamp_probabilities(s.eigenvalues, tol_pos);
    return s;
}

/// F_ph = 1/2 sum_ij (p_i - p_j)^2 / (p_i + p_j) |<i|n|j>|^2 from a clamped spectrum.
inline double qfi_phase(const SpectralDecomposition& spectrum, double p_cut = kQfiPairCutoff) {
    const Index d = spectrum.eigenvalues.size();
    const Eigen::MatrixXd w = detail::qfi_weights(spectrum.eigenvalues, p_cut);
    const Matrix n_ij = detail::in_eigenbasis(spectrum, detail::number_operator(d));
    return 0.5 * (w.array() * n_ij.array().abs2()).sum();
}

inline double qfi_phase(const Matrix& rho_cav, double p_cut = kQfiPairCutoff) {
    return qfi_phase(field_spectrum(rho_cav), p_cut);
}

inline double qfi_phase(const DensityMatrix& rho_cav, double p_cut = kQfiPairCutoff) {
    if (rho_cav.space() != Space::field) throw std::invalid_argument("qfi_phase expects a field state");
    return qfi_phase(rho_cav.matrix(), p_cut);
}

/// F_kl = sum_ij (p_i - p_j)^2 / (p_i + p_j) <i|x_k|j><j|x_l|i>,
/// x_1 = a + a^+, x_2 = (a - a^+)/i.
inline QfiDisplacementMatrix qfi_displacement(const SpectralDecomposition& spectrum,
                                              double p_cut = kQfiPairCutoff) {
    const Index d = spectrum.eigenvalues.size();
    const Eigen::MatrixXd w = detail::qfi_weights(spectrum.eigenvalues, p_cut);
    const auto quad = quadratures(HilbertConfig{static_cast<int>(d)});
    const Matrix x1 = detail::in_eigenbasis(spectrum, quad.x1.matrix);
    const Matrix x2 = detail::in_eigenbasis(spectrum, quad.x2.matrix);
    QfiDisplacementMatrix f;
    f.entries(0, 0) = (w.array() * x1.array().abs2()).sum();
    f.entries(1, 1) = (w.array() * x2.array().abs2()).sum();
    // sum_ij w_ij x1_ij x2_ji = sum_ij w_ij x1_ij conj(x2_ij); real by symmetry of w.
    const double cross = (w.array() * (x1.array() * x2.array().conjugate()).real()).sum();
    f.entries(0, 1) = f.entries(1, 0) = cross;
    return f;
}

inline QfiDisplacementMatrix qfi_displacement(const Matrix& rho_cav, double p_cut = kQfiPairCutoff) {
    return qfi_displacement(field_spectrum(rho_cav), p_cut);
}

inline QfiDisplacementMatrix qfi_displacement(const DensityMatrix& rho_cav,
                                              double p_cut = kQfiPairCutoff) {
    if (rho_cav.space() != Space::field)
        throw std::invalid_argument("qfi_displacement expects a field state");
    return qfi_displacement(rho_cav.matrix(), p_cut);
}

/// M_av = Tr(F)/4, the displacement QFI averaged over quadrature directions.
inline double m_av(const QfiDisplacementMatrix& f) { return 0.25 * f.entries.trace(); }

/// M_opt = lambda_max(F)/2, the best quadrature direction.
inline double m_opt(const QfiDisplacementMatrix& f) {
    const double mean = 0.5 * (f(0, 0) + f(1, 1));
    const double half_diff = 0.5 * (f(0, 0) - f(1, 1));
    return 0.5 * (mean + std::hypot(half_diff, f(0, 1)));
}

inline constexpr double kVacuumMeanCutoff = 1e-9;

/// r = F_ph / (2 (<n>^2 + <n>)); r = 1 matches squeezed vacuum of equal <n>.
/// Empty for (near-)vacuum input.
inline std::optional<double> ratio_r(double f_ph, double n_mean) {
    if (!(n_mean >= kVacuumMeanCutoff)) return std::nullopt;
    return 0.5 * f_ph / (n_mean * n_mean + n_mean);
}

/// Independent QFI estimate from the Uhlmann fidelity between rho and
/// e^{-i delta G} rho e^{i delta G}:
///   QFI ~ 2 (1 - Tr sqrt(sqrt(rho) sigma sqrt(rho))) / delta^2,
/// which converges to the same normalization as qfi_phase for G = n.
/// Generator pairing with the displacement matrix: G = c1 x1 + c2 x2
/// returns c^T F_disp c / 2; in particular G = x_k gives F_kk / 2.
///
/// rho is regularized to full rank (rho + p_floor I, renormalized). The
/// root fidelity is evaluated as the nuclear norm of sqrt(rho) U sqrt(rho),
/// which avoids square roots of near-zero eigenvalues.
inline double qfi_fidelity_oracle(const Matrix& rho, const Matrix& generator, double delta,
                                  double p_floor = 1e-10) {
    detail::require_field(rho, "qfi_fidelity_oracle");
    if (generator.rows() != rho.rows() || generator.cols() != rho.cols())
        throw std::invalid_argument("qfi_fidelity_oracle: generator dimension mismatch");
    if (!(delta >= 1e-4 && delta <= 1e-2))
        throw std::invalid_argument("qfi_fidelity_oracle: delta must lie in [1e-4, 1e-2]");
    const Index d = rho.rows();
    Matrix reg = rho + p_floor * Matrix::Identity(d, d);
    reg /= reg.trace().real();

    const SpectralDecomposition s = hermitian_eig(reg);
    if (s.eigenvalues.minCoeff() <= 0.0)
        throw NumericalError("qfi_fidelity_oracle: regularized state is not full rank");
    const Matrix sqrt_rho =
        s.eigenvectors * s.eigenvalues.cwiseSqrt().cast<cplx>().asDiagonal() * s.eigenvectors.adjoint();

    const SpectralDecomposition gs = hermitian_eig(generator);
    Vector phases(d);
    for (Index i = 0; i < d; ++i) phases(i) = std::polar(1.0, -delta * gs.eigenvalues(i));
    const Matrix u = gs.eigenvectors * phases.asDiagonal() * gs.eigenvectors.adjoint();

    Eigen::JacobiSVD<Matrix> svd(sqrt_rho * u * sqrt_rho);
    const double root_fidelity = svd.singularValues().sum();
    if (!std::isfinite(root_fidelity))
        throw NumericalError("qfi_fidelity_oracle: fidelity evaluation failed");
    return 2.0 * (1.0 - root_fidelity) / (delta * delta);
}

} // namespace dce
