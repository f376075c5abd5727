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

// Reference field states in the Fock basis, built by exact amplitude
// recursions (no matrix exponentials).

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "dce/hilbert.hpp"

namespace dce::states {

inline Vector fock(Index n_fock, Index m) {
    if (m < 0 || m >= n_fock) throw std::invalid_argument("fock: level outside truncation");
    Vector v = Vector::Zero(n_fock);
    v(m) = 1.0;
    return v;
}

/// Truncated coherent state |alpha>; amplitudes e^{-|alpha|^2/2} alpha^m / sqrt(m!).
/// Not renormalized, so the missing tail shows up as a norm deficit.
inline Vector coherent(Index n_fock, cplx alpha) {
    Vector v(n_fock);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (Index m = 1; m < n_fock; ++m)
        v(m) = v(m - 1) * alpha / std::sqrt(static_cast<double>(m));
    return v;
}

/// Squeezed vacuum S(z)|0> with z = r e^{i phi}: only even levels populated,
///   c_0 = 1/sqrt(cosh r),
///   c_{2k+2} = -e^{i phi} tanh(r) sqrt((2k+1)/(2k+2)) c_{2k}.
/// Mean photon number sinh^2 r.
inline Vector squeezed_vacuum(Index n_fock, double r, double phi = 0.0) {
    Vector v = Vector::Zero(n_fock);
    v(0) = 1.0 / std::sqrt(std::cosh(r));
    const cplx ratio = -std::polar(std::tanh(r), phi);
    for (Index m = 2; m < n_fock; m += 2) {
        const double k2 = static_cast<double>(m - 2);
        v(m) = v(m - 2) * ratio * std::sqrt((k2 + 1.0) / (k2 + 2.0));
    }
    return v;
}

/// Squeezing magnitude giving mean photon number n_mean.
inline double squeezing_for_mean(double n_mean) { return std::asinh(std::sqrt(n_mean)); }

/// Thermal state with mean occupation n_th, truncated and renormalized.
inline Matrix thermal(Index n_fock, double n_th) {
    Matrix rho = Matrix::Zero(n_fock, n_fock);
    if (n_th <= 0.0) {
        rho(0, 0) = 1.0;
        return rho;
    }
    const double q = n_th / (1.0 + n_th);
    double p = 1.0 / (1.0 + n_th), total = 0.0;
    for (Index m = 0; m < n_fock; ++m, p *= q) {
        rho(m, m) = p;
        total += p;
    }
    return rho / total;
}

inline Matrix projector(const Vector& psi) { return psi * psi.adjoint(); }

} // namespace dce::states
