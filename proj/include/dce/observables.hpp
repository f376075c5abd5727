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

// Non-metrological observables of the qubit-field state.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dce/hilbert.hpp"

namespace dce {

/// P_e = Tr[rho |e><e|].
inline double atomic_excitation(const Matrix& rho) {
    require_composite(rho, "atomic_excitation");
    const Index N = rho.rows() / kQubitDim;
    return rho.block(kExcited * N, kExcited * N, N, N).trace().real();
}

inline double atomic_excitation(const DensityMatrix& rho) {
    if (rho.space() != Space::composite)
        throw std::invalid_argument("atomic_excitation expects a composite state");
    return atomic_excitation(rho.matrix());
}

struct PhotonMoments {
    double mean = 0.0;
    double std = 0.0;
};

inline PhotonMoments photon_moments(const Matrix& rho_cav) {
    double n1 = 0.0, n2 = 0.0;
    for (Index m = 0; m < rho_cav.rows(); ++m) {
        const double p = rho_cav(m, m).real();
        const double md = static_cast<double>(m);
        n1 += md * p;
        n2 += md * md * p;
    }
    return {std::max(n1, 0.0), std::sqrt(std::max(n2 - n1 * n1, 0.0))};
}

inline PhotonMoments photon_moments(const DensityMatrix& rho_cav) {
    if (rho_cav.space() != Space::field) throw std::invalid_argument("photon_moments expects a field state");
    return photon_moments(rho_cav.matrix());
}

/// S_L = 1 - Tr(rho^2); for Hermitian rho, Tr(rho^2) = sum |rho_ij|^2.
inline double linear_entropy(const Matrix& rho) {
    return 1.0 - rho.squaredNorm();
}

inline double linear_entropy(const DensityMatrix& rho) { return linear_entropy(rho.matrix()); }

/// Absolute sum of the negative eigenvalues of the qubit-side partial transpose.
inline double negativity(const Matrix& rho) {
    const RealVector ev = hermitian_eigenvalues(partial_transpose(rho));
    double neg = 0.0;
    for (Index i = 0; i < ev.size(); ++i)
        if (ev(i) < 0.0) neg += ev(i);
    return std::abs(neg);
}

inline double negativity(const DensityMatrix& rho) {
    if (rho.space() != Space::composite) throw std::invalid_argument("negativity expects a composite state");
    return negativity(rho.matrix());
}

inline constexpr double kDistributionFloor = -1e-10;

struct PhotonDistribution {
    double t = 0.0;
    std::vector<double> probabilities;
};

/// Fock-basis populations of the field, clamped to [-1e-10, 1].
inline PhotonDistribution photon_distribution(const Matrix& rho_cav, double t) {
    PhotonDistribution out{t, std::vector<double>(static_cast<std::size_t>(rho_cav.rows()))};
    for (Index m = 0; m < rho_cav.rows(); ++m)
        out.probabilities[static_cast<std::size_t>(m)] =
            std::clamp(rho_cav(m, m).real(), kDistributionFloor, 1.0);
    return out;
}

inline PhotonDistribution photon_distribution(const DensityMatrix& rho_cav, double t) {
    if (rho_cav.space() != Space::field)
        throw std::invalid_argument("photon_distribution expects a field state");
    return photon_distribution(rho_cav.matrix(), t);
}

inline constexpr int kTailLevels = 5;

/// Population of the top kTailLevels Fock levels retained by the truncation.
inline double tail_population(const Matrix& rho_cav) {
    const Index N = rho_cav.rows();
    double tail = 0.0;
    for (Index m = std::max<Index>(0, N - kTailLevels); m < N; ++m) tail += rho_cav(m, m).real();
    return tail;
}

} // namespace dce
