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

// Trajectory sampling: integrates the master equation and analyzes the state
// at a fixed schedule of sample times.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "dce/errors.hpp"
#include "dce/hilbert.hpp"
#include "dce/integrator.hpp"
#include "dce/master_equation.hpp"
#include "dce/metrology.hpp"
#include "dce/model.hpp"
#include "dce/observables.hpp"

namespace dce {

struct TrajectoryRecord {
    double t = 0.0;
    double P_e = 0.0;
    double n_mean = 0.0;
    double n_std = 0.0;
    double S_L = 0.0;
    double negativity = 0.0;
    double F_ph = 0.0;
    std::optional<double> r;
    double M_av = 0.0;
    double M_opt = 0.0;
    double trace_error = 0.0;
    double tail_population = 0.0;
    // Diagnostics kept out of the CSV schema.
    double hermiticity_drift = 0.0;
    double min_eigenvalue = 0.0;
    std::optional<PhotonDistribution> photon_distribution;
};

/// Run-failure thresholds checked at every sample.
struct HygieneLimits {
    double trace_error = 1e-5;
    double tail_population = 1e-6;
    double min_eigenvalue = -1e-7;
    double hermiticity_drift = 1e-9;
};

/// |g, 0><g, 0|
inline Matrix ground_vacuum(const HilbertConfig& config) {
    const Index d = config.total_dim();
    Matrix rho = Matrix::Zero(d, d);
    const Index i = config.index(kGround, 0);
    rho(i, i) = 1.0;
    return rho;
}

/// All reported quantities for one state. The state is symmetrized once
/// here; the stored integrator state is never modified. Every scalar is
/// invariant under the rotating-frame transformation.
inline TrajectoryRecord analyze_state(double t, const Matrix& rho, bool with_distribution = false,
                                      double tol_pos = DensityTolerances{}.pos) {
    require_composite(rho, "analyze_state");
    TrajectoryRecord rec;
    rec.t = t;
    rec.hermiticity_drift = hermiticity_error(rho);
    const Matrix sym = 0.5 * (rho + rho.adjoint());
    rec.trace_error = std::abs(sym.trace().real() - 1.0);

    const Matrix rho_cav = partial_trace_qubit(sym);
    rec.tail_population = tail_population(rho_cav);
    rec.P_e = atomic_excitation(sym);
    const PhotonMoments mom = photon_moments(rho_cav);
    rec.n_mean = mom.mean;
    rec.n_std = mom.std;
    rec.S_L = linear_entropy(rho_cav);
    rec.negativity = negativity(sym);
    rec.min_eigenvalue = hermitian_eigenvalues(sym).minCoeff();

    try {
        const SpectralDecomposition spectrum = field_spectrum(rho_cav, tol_pos);
        rec.F_ph = qfi_phase(spectrum);
        const QfiDisplacementMatrix f = qfi_displacement(spectrum);
        rec.M_av = m_av(f);
        rec.M_opt = m_opt(f);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (field state at t = " + std::to_string(t) + ")", t);
    }
    rec.r = ratio_r(rec.F_ph, rec.n_mean);
    if (with_distribution) rec.photon_distribution = photon_distribution(rho_cav, t);
    return rec;
}

/// Throws if a record breaches the run-failure thresholds.
inline void check_hygiene(const TrajectoryRecord& rec, const HygieneLimits& limits) {
    auto fail = [&](const char* what, double value, double bound) {
        std::ostringstream msg;
        msg << what << " = " << value << " beyond " << bound << " at t = " << rec.t;
        return msg.str();
    };
    if (rec.tail_population > limits.tail_population)
        throw TruncationError(fail("tail population", rec.tail_population, limits.tail_population), rec.t);
    if (!(rec.trace_error <= limits.trace_error))
        throw NumericalError(fail("trace error", rec.trace_error, limits.trace_error), rec.t);
    if (rec.min_eigenvalue < limits.min_eigenvalue)
        throw NumericalError(fail("minimum eigenvalue", rec.min_eigenvalue, limits.min_eigenvalue), rec.t);
    if (rec.hermiticity_drift > limits.hermiticity_drift)
        throw NumericalError(fail("hermiticity drift", rec.hermiticity_drift, limits.hermiticity_drift), rec.t);
}

inline bool same_time(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

/// Multiples of sample_stride up to t_final, plus t_final itself and any
/// snapshot times inside [0, t_final]; sorted, duplicates merged.
inline std::vector<double> sample_schedule(const IntegratorConfig& ic, const std::vector<double>& snapshots = {}) {
    std::vector<double> times;
    const auto count = static_cast<long>(std::floor(ic.t_final / ic.sample_stride + 1e-9));
    for (long k = 0; k <= count; ++k) times.push_back(static_cast<double>(k) * ic.sample_stride);
    times.push_back(ic.t_final);
    for (double s : snapshots)
        if (s >= 0.0 && s <= ic.t_final) times.push_back(s);
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    for (double t : times)
        if (out.empty() || !same_time(out.back(), t)) out.push_back(t);
    return out;
}

/// Receives each record together with the integrator state it was computed from.
using RecordSink = std::function<void(const TrajectoryRecord&, const IntegratorState&)>;

struct SimulationSetup {
    SystemParams params;
    HilbertConfig hilbert;
    IntegratorConfig integrator;
    std::vector<double> snapshot_times;
    HygieneLimits limits;
};

/// Continues `state` through every scheduled sample time after state.t (and
/// at state.t itself when `include_current` is set). Each record is passed
/// to `sink` before the hygiene check, so a failing sample is still emitted.
inline std::vector<TrajectoryRecord> continue_trajectory(IntegratorState& state, const SimulationSetup& setup,
                                                         const RecordSink& sink, bool include_current) {
    setup.hilbert.validate();
    setup.integrator.validate();
    const LindbladGenerator generator(setup.params, setup.hilbert, setup.integrator.frame);
    AdaptiveStepper<LindbladGenerator> stepper(generator, setup.integrator.rtol, setup.integrator.atol,
                                               setup.integrator.max_step);
    const std::vector<double> schedule = sample_schedule(setup.integrator, setup.snapshot_times);
    auto is_snapshot = [&](double t) {
        return std::any_of(setup.snapshot_times.begin(), setup.snapshot_times.end(),
                           [&](double s) { return same_time(s, t); });
    };

    std::vector<TrajectoryRecord> records;
    for (double t : schedule) {
        const bool current = same_time(t, state.t);
        if (t < state.t && !current) continue;
        if (current && !include_current) continue;
        if (!current) stepper.advance_to(state, t);
        // Field eigenvalues may dip as far as the state's own positivity limit.
        TrajectoryRecord rec = analyze_state(t, state.rho, is_snapshot(t), -setup.limits.min_eigenvalue);
        if (sink) sink(rec, state);
        check_hygiene(rec, setup.limits);
        records.push_back(std::move(rec));
    }
    return records;
}

/// Integrates from rho0 at t = 0 and returns one record per scheduled sample.
inline std::vector<TrajectoryRecord> integrate(const Matrix& rho0, const SimulationSetup& setup,
                                               const RecordSink& sink = {}) {
    if (rho0.rows() != setup.hilbert.total_dim() || rho0.cols() != setup.hilbert.total_dim())
        throw std::invalid_argument("integrate: initial state does not match the Hilbert space");
    IntegratorState state;
    state.t = 0.0;
    state.rho = rho0;
    state.h = setup.integrator.initial_step;
    return continue_trajectory(state, setup, sink, true);
}

} // namespace dce
