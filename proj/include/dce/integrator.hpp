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

// Adaptive explicit Runge-Kutta integration of matrix-valued ODEs with the
// Verner 6(5) embedded pair (8 stages) and a PI step-size controller.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dce/errors.hpp"
#include "dce/hilbert.hpp"
#include "dce/master_equation.hpp"

namespace dce {

struct IntegratorConfig {
    double rtol = 1e-8;
    double atol = 1e-12;
    double max_step = 1.0;
    double initial_step = 1e-2;
    double t_final = 3.0e4;
    double sample_stride = 20.0;
    Frame frame = Frame::lab;

    void validate() const {
        if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("rtol and atol must be > 0");
        if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be >= 0");
        if (!(sample_stride > 0.0)) throw std::invalid_argument("sample_stride must be > 0");
        if (!(max_step > 0.0) || !(initial_step > 0.0))
            throw std::invalid_argument("max_step and initial_step must be > 0");
    }
};

/// Order of the propagated solution; the embedded estimate is one order lower.
inline constexpr int kStepperOrder = 6;
inline constexpr double kMinStep = 1e-12;

/// Everything needed to continue an integration bit-for-bit.
struct IntegratorState {
    double t = 0.0;
    Matrix rho;
    double h = 1e-2;        // next step-size proposal
    double err_prev = 1e-4; // PI controller memory
    long accepted = 0;
    long rejected = 0;
};

namespace verner65 {
// Verner's 6(5) pair as used by DVERK.
inline constexpr int kStages = 8;
inline constexpr std::array<double, kStages> c = {
    0.0, 1.0 / 6.0, 4.0 / 15.0, 2.0 / 3.0, 5.0 / 6.0, 1.0, 1.0 / 15.0, 1.0};
inline constexpr double a[kStages][kStages - 1] = {
    {},
    {1.0 / 6.0},
    {4.0 / 75.0, 16.0 / 75.0},
    {5.0 / 6.0, -8.0 / 3.0, 5.0 / 2.0},
    {-165.0 / 64.0, 55.0 / 6.0, -425.0 / 64.0, 85.0 / 96.0},
    {12.0 / 5.0, -8.0, 4015.0 / 612.0, -11.0 / 36.0, 88.0 / 255.0},
    {-8263.0 / 15000.0, 124.0 / 75.0, -643.0 / 680.0, -81.0 / 250.0, 2484.0 / 10625.0, 0.0},
    {3501.0 / 1720.0, -300.0 / 43.0, 297275.0 / 52632.0, -319.0 / 2322.0, 24068.0 / 84065.0, 0.0,
     3850.0 / 26703.0}};
// Sixth-order weights (propagated).
inline constexpr std::array<double, kStages> b = {
    3.0 / 40.0, 0.0, 875.0 / 2244.0, 23.0 / 72.0, 264.0 / 1955.0, 0.0, 125.0 / 11592.0, 43.0 / 616.0};
// Fifth-order weights (error estimate).
inline constexpr std::array<double, kStages> b_hat = {
    13.0 / 160.0, 0.0, 2375.0 / 5984.0, 5.0 / 16.0, 12.0 / 85.0, 3.0 / 44.0, 0.0, 0.0};
} // namespace verner65

/// Adaptive Verner 6(5) stepper for y' = f(t, y) with y a complex matrix.
/// `Rhs` is callable as rhs(t, y, dydt_out).
template <class Rhs>
class AdaptiveStepper {
public:
    AdaptiveStepper(const Rhs& rhs, double rtol, double atol, double max_step)
        : rhs_(rhs), rtol_(rtol), atol_(atol), max_step_(max_step) {}

    /// Advances `s` until s.t == t_target exactly; the final step is
    /// shortened to land on the target.
    void advance_to(IntegratorState& s, double t_target) {
        if (t_target < s.t) throw std::invalid_argument("advance_to: target lies in the past");
        while (s.t < t_target) {
            double h = std::min(s.h, max_step_);
            bool landing = false;
            if (s.t + h >= t_target - 1e-12 * std::max(1.0, std::abs(t_target))) {
                h = t_target - s.t;
                landing = true;
            }
            if (h < kMinStep) {
                if (landing) { // target within roundoff of the current time
                    s.t = t_target;
                    break;
                }
                std::ostringstream msg;
                msg << "step size underflow (h = " << h << ") at t = " << s.t;
                throw NumericalError(msg.str(), s.t);
            }
            const double err = try_step(s.t, s.rho, h);
            if (!std::isfinite(err)) {
                s.h = 0.25 * h;
                ++s.rejected;
                if (s.h < kMinStep) throw NumericalError("non-finite state encountered", s.t);
                continue;
            }
            const double fac_pi = std::pow(err, kExpo1);
            if (err <= 1.0) {
                double fac = fac_pi / std::pow(s.err_prev, kBeta);
                fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
                double h_new = h / fac;
                if (last_rejected_) h_new = std::min(h_new, h);
                s.err_prev = std::max(err, 1e-4);
                s.rho.swap(y_new_);
                s.t = landing ? t_target : s.t + h;
                s.h = landing ? std::max(h_new, s.h) : h_new;
                ++s.accepted;
                last_rejected_ = false;
            } else {
                s.h = h / std::min(1.0 / kFacMin, fac_pi / kSafety);
                ++s.rejected;
                last_rejected_ = true;
            }
        }
    }

    const Rhs& rhs() const { return rhs_; }

private:
    static constexpr double kSafety = 0.9;
    static constexpr double kBeta = 0.04;
    static constexpr double kExpo1 = 1.0 / kStepperOrder - 0.75 * kBeta;
    static constexpr double kFacMin = 0.2; // largest shrink per step
    static constexpr double kFacMax = 10.0;

    static constexpr Index kChunk = 512; // doubles per cache block

    // y_out = y + sum_j w[j] * k[j], in cache-sized chunks over the entries
    // viewed as interleaved doubles.
    void combine(const Matrix& y, const double* w, int terms, Matrix& y_out) {
        y_out.resize(y.rows(), y.cols());
        const Index n = 2 * y.size();
        const double* src = reinterpret_cast<const double*>(y.data());
        double* dst = reinterpret_cast<double*>(y_out.data());
        const double* kp[verner65::kStages];
        double kw[verner65::kStages];
        int used = 0;
        for (int j = 0; j < terms; ++j)
            if (w[j] != 0.0) {
                kp[used] = reinterpret_cast<const double*>(k_[j].data());
                kw[used++] = w[j];
            }
        for (Index lo = 0; lo < n; lo += kChunk) {
            const Index hi = std::min(n, lo + kChunk);
            for (Index i = lo; i < hi; ++i) dst[i] = src[i];
            for (int j = 0; j < used; ++j) {
                const double wj = kw[j];
                const double* kj = kp[j];
                for (Index i = lo; i < hi; ++i) dst[i] += wj * kj[i];
            }
        }
    }

    // One trial step of size h from (t, y). Leaves the proposal in y_new_ and
    // returns the scaled RMS error estimate.
    double try_step(double t, const Matrix& y, double h) {
        using namespace verner65;
        double w[kStages];
        rhs_(t, y, k_[0]);
        for (int i = 1; i < kStages; ++i) {
            for (int j = 0; j < i; ++j) w[j] = h * a[i][j];
            combine(y, w, i, y_stage_);
            rhs_(t + c[i] * h, y_stage_, k_[i]);
        }
        for (int j = 0; j < kStages; ++j) w[j] = h * b[j];
        combine(y, w, kStages, y_new_);
        // Error estimate h * sum (b - b_hat) k, reusing the stage buffer.
        for (int j = 0; j < kStages; ++j) w[j] = h * (b[j] - b_hat[j]);
        y_stage_.setZero(y.rows(), y.cols());
        combine(y_stage_, w, kStages, err_);

        double sum = 0.0;
        const Index n = y.size();
        const cplx* y0 = y.data();
        const cplx* y1 = y_new_.data();
        const cplx* e = err_.data();
        for (Index i = 0; i < n; ++i) {
            const double scale = atol_ + rtol_ * std::sqrt(std::max(std::norm(y0[i]), std::norm(y1[i])));
            sum += std::norm(e[i]) / (scale * scale);
        }
        return std::sqrt(sum / static_cast<double>(n));
    }

    const Rhs& rhs_;
    double rtol_, atol_, max_step_;
    bool last_rejected_ = false;
    std::array<Matrix, verner65::kStages> k_;
    Matrix y_stage_;
    Matrix y_new_;
    Matrix err_;
};

} // namespace dce
