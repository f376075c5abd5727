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

// GKSL master equation
//   d rho/dt = -i[H, rho] + gamma D[sigma_-] + gamma_phi D[sigma_z] + kappa D[a]
// with D[L]rho = L rho L^+ - (L^+ L rho + rho L^+ L)/2, zero temperature.
//
// master_rhs is the dense reference built from explicit operator products.
// LindbladGenerator evaluates the same right-hand side in O(d^2) using the
// tridiagonal structure of the coupling, in the lab or rotating frame.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "dce/hilbert.hpp"
#include "dce/model.hpp"

namespace dce {

enum class Frame { lab, rotating };

inline const char* to_string(Frame f) { return f == Frame::lab ? "lab" : "rotating"; }

inline Matrix dissipator(const Matrix& L, const Matrix& rho) {
    if (L.rows() != L.cols() || rho.rows() != rho.cols() || L.rows() != rho.rows())
        throw std::invalid_argument("dissipator: dimension mismatch");
    const Matrix LdL = L.adjoint() * L;
    return L * rho * L.adjoint() - 0.5 * (LdL * rho + rho * LdL);
}

inline Matrix dissipator(const Operator& L, const DensityMatrix& rho) {
    if (L.space != rho.space())
        throw std::invalid_argument("dissipator: operator and state live on different spaces");
    return dissipator(L.matrix, rho.matrix());
}

/// Dense reference right-hand side in the lab frame.
inline Matrix master_rhs(double t, const Matrix& rho, const SystemParams& p) {
    require_composite(rho, "master_rhs");
    const HilbertConfig config = HilbertConfig::from_composite_dim(rho.rows());
    const Matrix H = hamiltonian(t, p, config).matrix;
    const auto f = fock_ladder(config);
    const auto q = qubit_ops();
    const cplx minus_i(0.0, -1.0);
    Matrix out = minus_i * (H * rho - rho * H);
    if (p.gamma != 0.0)
        out += p.gamma * dissipator(lift_qubit(q.sigma_minus, config).matrix, rho);
    if (p.gamma_phi != 0.0)
        out += p.gamma_phi * dissipator(lift_qubit(q.sigma_z, config).matrix, rho);
    if (p.kappa != 0.0)
        out += p.kappa * dissipator(lift_field(f.a).matrix, rho);
    return out;
}

inline Matrix master_rhs(double t, const DensityMatrix& rho, const SystemParams& p) {
    return master_rhs(t, rho.matrix(), p);
}

/// Diagonal of H0 = nu n + omega0 sigma_z / 2, the part removed by the
/// rotating frame.
inline RealVector bare_energies(const SystemParams& p, const HilbertConfig& config) {
    const Index N = config.n_fock;
    RealVector e(config.total_dim());
    for (Index m = 0; m < N; ++m) {
        e(config.index(kExcited, m)) = 0.5 * p.omega0 + p.nu * static_cast<double>(m);
        e(config.index(kGround, m)) = -0.5 * p.omega0 + p.nu * static_cast<double>(m);
    }
    return e;
}

/// rho -> U^+ rho U with U(t) = exp[-i t (nu n + omega0 sigma_z/2)].
inline Matrix to_rotating_frame(const Matrix& rho, double t, const SystemParams& p) {
    require_composite(rho, "to_rotating_frame");
    const RealVector e = bare_energies(p, HilbertConfig::from_composite_dim(rho.rows()));
    Matrix out(rho.rows(), rho.cols());
    for (Index c = 0; c < rho.cols(); ++c)
        for (Index r = 0; r < rho.rows(); ++r)
            out(r, c) = rho(r, c) * std::polar(1.0, (e(r) - e(c)) * t);
    return out;
}

inline Matrix from_rotating_frame(const Matrix& rho, double t, const SystemParams& p) {
    return to_rotating_frame(rho, -t, p);
}

inline DensityMatrix to_rotating_frame(const DensityMatrix& rho, double t, const SystemParams& p) {
    return DensityMatrix(to_rotating_frame(rho.matrix(), t, p), rho.space());
}

inline DensityMatrix from_rotating_frame(const DensityMatrix& rho, double t, const SystemParams& p) {
    return DensityMatrix(from_rotating_frame(rho.matrix(), t, p), rho.space());
}

/// Structured evaluation of the master-equation right-hand side.
///
/// In both frames the Hamiltonian has the block form
///   [[diag(E_e), c_e X], [c_g X, diag(E_g)]],  X = u a + conj(u) a^+,
/// lab:      E = +-Omega(t)/2 + nu m, u = 1, c_e = c_g = g;
/// rotating: E = +-eps sin(eta(t) t)/2, u = e^{-i nu t},
///           c_e = g e^{i omega0 t}, c_g = conj(c_e).
/// The dissipators are unchanged by the frame transformation.
class LindbladGenerator {
public:
    LindbladGenerator(const SystemParams& p, const HilbertConfig& config, Frame frame)
        : p_(p), config_(config), frame_(frame) {
        config_.validate();
        const Index N = config_.n_fock;
        sqrt_up_.resize(N);
        sqrt_dn_.resize(N);
        decay_e_.resize(N);
        decay_g_.resize(N);
        for (Index m = 0; m < N; ++m) {
            sqrt_up_[m] = m + 1 < N ? std::sqrt(static_cast<double>(m + 1)) : 0.0;
            sqrt_dn_[m] = std::sqrt(static_cast<double>(m));
            decay_g_[m] = 0.5 * p_.kappa * static_cast<double>(m);
            decay_e_[m] = decay_g_[m] + 0.5 * p_.gamma;
        }
    }

    const SystemParams& params() const { return p_; }
    const HilbertConfig& config() const { return config_; }
    Frame frame() const { return frame_; }

    void operator()(double t, const Matrix& rho, Matrix& out) const {
        const Index N = config_.n_fock;
        const Index d = 2 * N;
        if (rho.rows() != d || rho.cols() != d)
            throw std::invalid_argument("LindbladGenerator: state dimension mismatch");
        out.resize(d, d);

        // Diagonal energies: E(q, m) = +-half_split + level_spacing * m.
        cplx u(1.0, 0.0), ce(p_.g, 0.0), cg(p_.g, 0.0);
        double half_split = 0.0;
        double level_spacing = 0.0;
        if (frame_ == Frame::lab) {
            half_split = 0.5 * qubit_frequency(t, p_);
            level_spacing = p_.nu;
        } else {
            half_split = 0.5 * p_.eps * std::sin(modulation_phase(t, p_));
            u = std::polar(1.0, -p_.nu * t);
            ce = std::polar(p_.g, p_.omega0 * t);
            cg = std::conj(ce);
        }
        const cplx uc = std::conj(u);

        const cplx* R = rho.data();
        cplx* O = out.data();
        for (Index qc = 0; qc < 2; ++qc) {
            const Index qc_bar = 1 - qc;
            const double split_c = qc == kExcited ? half_split : -half_split;
            const double* decay_c = qc == kExcited ? decay_e_.data() : decay_g_.data();
            // rho H couples column (qc,k) to columns (qc_bar, k+-1) through c_{qc_bar}.
            const cplx c_bar = qc_bar == kExcited ? ce : cg;
            for (Index k = 0; k < N; ++k) {
                const Index col = qc * N + k;
                const cplx* rc = R + col * d;
                const cplx* r_up = k + 1 < N ? R + (qc_bar * N + k + 1) * d : nullptr;
                const cplx* r_dn = k > 0 ? R + (qc_bar * N + k - 1) * d : nullptr;
                const cplx* r_jump_a = k + 1 < N ? R + (qc * N + k + 1) * d : nullptr;
                const cplx* r_jump_s = qc == kGround ? R + (kExcited * N + k) * d : nullptr;
                // i c_bar (conj(u) sqrt(k+1) rho[., (qc_bar,k+1)] + u sqrt(k) rho[., (qc_bar,k-1)])
                const cplx w_up = cplx(0.0, 1.0) * c_bar * uc * sqrt_up_[k];
                const cplx w_dn = cplx(0.0, 1.0) * c_bar * u * sqrt_dn_[k];
                const double kappa_k = p_.kappa * sqrt_up_[k];
                const double e_c = split_c + level_spacing * static_cast<double>(k);
                const double decay_col = decay_c[k];
                cplx* o = O + col * d;

                for (Index qr = 0; qr < 2; ++qr) {
                    const Index qr_bar = 1 - qr;
                    const double split_r = qr == kExcited ? half_split : -half_split;
                    const double* decay_r = qr == kExcited ? decay_e_.data() : decay_g_.data();
                    const double dephase = qr != qc ? 2.0 * p_.gamma_phi : 0.0;
                    // -i c_qr (u sqrt(m+1) rho[(qr_bar,m+1), col] + conj(u) sqrt(m) rho[(qr_bar,m-1), col])
                    const cplx c_r = qr == kExcited ? ce : cg;
                    const cplx v_up = cplx(0.0, -1.0) * c_r * u;
                    const cplx v_dn = cplx(0.0, -1.0) * c_r * uc;
                    const Index row0 = qr * N;
                    const Index bar0 = qr_bar * N;
                    const bool jump_s = r_jump_s != nullptr && qr == kGround;

                    for (Index m = 0; m < N; ++m) {
                        const Index r = row0 + m;
                        const double re_diag = -decay_r[m] - decay_col - dephase;
                        const double im_diag = e_c - split_r - level_spacing * static_cast<double>(m);
                        cplx acc = mul(cplx(re_diag, im_diag), rc[r]);
                        if (m + 1 < N) acc += mul(v_up, rc[bar0 + m + 1]) * sqrt_up_[m];
                        if (m > 0) acc += mul(v_dn, rc[bar0 + m - 1]) * sqrt_dn_[m];
                        if (r_up) acc += mul(w_up, r_up[r]);
                        if (r_dn) acc += mul(w_dn, r_dn[r]);
                        if (r_jump_a && m + 1 < N) acc += (kappa_k * sqrt_up_[m]) * r_jump_a[r + 1];
                        if (jump_s) acc += p_.gamma * r_jump_s[m];
                        o[r] = acc;
                    }
                }
            }
        }
    }

    Matrix operator()(double t, const Matrix& rho) const {
        Matrix out;
        (*this)(t, rho, out);
        return out;
    }

private:
    // Plain complex product; avoids the NaN-recovery branch of operator*.
    static cplx mul(const cplx& a, const cplx& b) {
        return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
    }

    SystemParams p_;
    HilbertConfig config_;
    Frame frame_;
    std::vector<double> sqrt_up_, sqrt_dn_, decay_e_, decay_g_;
};

} // namespace dce
