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

// Quantum Rabi Hamiltonian with a chirped sinusoidal qubit-frequency
// modulation. Units: nu sets the frequency scale (nu = 1 by default), times
// are in 1/nu, the chirp rate alpha in nu^2.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dce/hilbert.hpp"

namespace dce {

struct SystemParams {
    double nu = 1.0;
    double g = 0.0;
    double omega0 = 1.0;
    double eps = 0.0;   // modulation amplitude
    double eta0 = 0.0;  // initial modulation frequency
    double alpha = 0.0; // chirp rate, may be negative
    double gamma = 0.0;
    double gamma_phi = 0.0;
    double kappa = 0.0;

    /// Throws std::invalid_argument on a violated invariant, returns
    /// non-fatal warnings.
    std::vector<std::string> validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
        if (!(nu > 0.0)) fail("nu must be > 0");
        if (!(g >= 0.0)) fail("g must be >= 0");
        if (!(eps >= 0.0)) fail("eps must be >= 0");
        if (!(gamma >= 0.0) || !(gamma_phi >= 0.0) || !(kappa >= 0.0))
            fail("dissipation rates must be >= 0");
        if (!(eps < omega0)) fail("eps must be strictly smaller than omega0");
        if (!std::isfinite(eta0) || !std::isfinite(alpha)) fail("eta0 and alpha must be finite");
        std::vector<std::string> warnings;
        if (eps > 0.2 * omega0)
            warnings.push_back("eps = " + std::to_string(eps) + " exceeds 0.2*omega0; weak-modulation regime not satisfied");
        return warnings;
    }

    SystemParams without_dissipation() const {
        SystemParams p = *this;
        p.gamma = p.gamma_phi = p.kappa = 0.0;
        return p;
    }
};

/// eta(t) = eta0 + alpha t
inline double modulation_frequency(double t, const SystemParams& p) {
    return p.eta0 + p.alpha * t;
}

/// Phase of the modulation, eta(t) * t. The chirped frequency multiplies t
/// directly; it is not integrated.
inline double modulation_phase(double t, const SystemParams& p) {
    return modulation_frequency(t, p) * t;
}

/// Omega(t) = omega0 + eps sin[eta(t) t]
inline double qubit_frequency(double t, const SystemParams& p) {
    return p.omega0 + p.eps * std::sin(modulation_phase(t, p));
}

/// H = Omega(t)/2 sigma_z + nu n + g (a + a^+)(sigma_+ + sigma_-), dense.
inline Operator hamiltonian(double t, const SystemParams& p, const HilbertConfig& config) {
    config.validate();
    const auto f = fock_ladder(config);
    const auto q = qubit_ops();
    const Operator sx{q.sigma_plus.matrix + q.sigma_minus.matrix, Space::qubit};
    const Operator x{f.a.matrix + f.a_dagger.matrix, Space::field};
    Matrix h = 0.5 * qubit_frequency(t, p) * lift_qubit(q.sigma_z, config).matrix +
               p.nu * lift_field(f.n).matrix + p.g * tensor(sx, x).matrix;
    return {std::move(h), Space::composite};
}

} // namespace dce
