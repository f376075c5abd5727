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

#include <gtest/gtest.h>

#include <random>

#include "dce/metrology.hpp"
#include "dce/states.hpp"
#include "support/test_support.hpp"

namespace dce {
namespace {

using states::projector;

Matrix phase_rotate(const Matrix& rho, double theta) {
    Vector ph(rho.rows());
    for (Index m = 0; m < rho.rows(); ++m) ph(m) = std::polar(1.0, -theta * static_cast<double>(m));
    return ph.asDiagonal() * rho * ph.conjugate().asDiagonal();
}

Matrix number_op(Index d) { return fock_ladder(HilbertConfig{static_cast<int>(d)}).n.matrix; }

double expect(const Matrix& rho, const Matrix& op) { return (rho * op).trace().real(); }

// Pure-state oracle: F_ph = Var(n), F_kl = 2 (Re<x_k x_l> - <x_k><x_l>).
struct PureOracle {
    double f_ph;
    Eigen::Matrix2d f;
};

PureOracle pure_oracle(const Vector& psi) {
    const Index d = psi.size();
    const auto q = quadratures(HilbertConfig{static_cast<int>(d)});
    const Matrix n = number_op(d);
    const auto ev = [&](const Matrix& op) { return psi.dot(op * psi); };
    PureOracle out;
    out.f_ph = (ev(n * n) - ev(n) * ev(n)).real();
    const Matrix* x[2] = {&q.x1.matrix, &q.x2.matrix};
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            out.f(k, l) = 2.0 * (ev(*x[k] * *x[l]).real() - ev(*x[k]).real() * ev(*x[l]).real());
    return out;
}

TEST(QfiPhase, VanishesOnFockDiagonalStates) {
    EXPECT_EQ(qfi_phase(states::thermal(30, 1.7)), 0.0);
    EXPECT_EQ(qfi_phase(projector(states::fock(10, 3))), 0.0);
    Matrix mix = 0.25 * projector(states::fock(12, 2)) + 0.75 * states::thermal(12, 0.4);
    EXPECT_LT(qfi_phase(mix), 1e-12);
}

TEST(QfiPhase, SqueezedVacuumBenchmark) {
    const Vector psi = states::squeezed_vacuum(60, states::squeezing_for_mean(1.0));
    ASSERT_NEAR(psi.squaredNorm(), 1.0, 1e-9);
    const Matrix rho = projector(psi.normalized());
    const double n = expect(rho, number_op(60));
    EXPECT_NEAR(n, 1.0, 1e-7);
    const double f = qfi_phase(rho);
    EXPECT_NEAR(f, 4.0, 1e-6);
    EXPECT_NEAR(*ratio_r(f, n), 1.0, 1e-6);
}

TEST(QfiPhase, SqueezedVacuumFamily) {
    for (double nbar : {0.1, 0.5, 2.0}) {
        const Matrix rho = projector(states::squeezed_vacuum(200, states::squeezing_for_mean(nbar)));
        EXPECT_NEAR(qfi_phase(rho), 2.0 * (nbar * nbar + nbar), 1e-7 * (1.0 + nbar * nbar)) << nbar;
    }
}

TEST(QfiPhase, SuperpositionOfZeroAndTwo) {
    Vector psi = Vector::Zero(5);
    psi(0) = psi(2) = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(qfi_phase(projector(psi)), 1.0, 1e-12);
}

TEST(QfiPhase, TypeAndSpaceChecks) {
    EXPECT_THROW(qfi_phase(DensityMatrix(Matrix::Identity(4, 4) / 4.0, Space::composite)), std::invalid_argument);
    Matrix bad = Matrix::Zero(3, 3);
    bad(0, 0) = 1.1;
    bad(1, 1) = -0.1;
    EXPECT_THROW(qfi_phase(bad), NumericalError);
}

TEST(RatioR, Examples) {
    EXPECT_DOUBLE_EQ(*ratio_r(4.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(*ratio_r(0.0, 3.0), 0.0);
    const double n = 2.5;
    EXPECT_DOUBLE_EQ(*ratio_r(n, n), 1.0 / (2.0 * (n + 1.0)));
    EXPECT_FALSE(ratio_r(0.0, 0.0).has_value());
}

TEST(RatioR, CoherentStateBelowHalf) {
    for (double amp : {0.3, 1.0, 2.0}) {
        const Matrix rho = projector(states::coherent(60, amp));
        const double n = expect(rho, number_op(60));
        EXPECT_NEAR(n, amp * amp, 1e-10);
        const double r = *ratio_r(qfi_phase(rho), n);
        EXPECT_NEAR(r, 1.0 / (2.0 * (n + 1.0)), 1e-8);
        EXPECT_LT(r, 0.5);
    }
}

TEST(QfiDisplacement, VacuumAndOnePhoton) {
    const auto f0 = qfi_displacement(projector(states::fock(6, 0)));
    EXPECT_LT((f0.entries - 2.0 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(m_av(f0), 1.0, 1e-9);
    EXPECT_NEAR(m_opt(f0), 1.0, 1e-9);

    const auto f1 = qfi_displacement(projector(states::fock(6, 1)));
    EXPECT_LT((f1.entries - 6.0 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(m_av(f1), 3.0, 1e-12);
    EXPECT_NEAR(m_opt(f1), 3.0, 1e-12);
}

TEST(QfiDisplacement, CoherentStateIsClassical) {
    for (cplx amp : {cplx(1.0, 0.0), cplx(0.7, -1.1)}) {
        const auto f = qfi_displacement(projector(states::coherent(40, amp)));
        EXPECT_LT((f.entries - 2.0 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(MetrologyScalars, Arithmetic) {
    QfiDisplacementMatrix f;
    f.entries << 2.0, 0.0, 0.0, 6.0;
    EXPECT_DOUBLE_EQ(m_av(f), 2.0);
    EXPECT_DOUBLE_EQ(m_opt(f), 3.0);
    f.entries << 4.0, 1.0, 1.0, 4.0;
    EXPECT_DOUBLE_EQ(m_opt(f), 2.5);
}

TEST(Metrology, PureStatesMatchCovarianceOracle) {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        // Support on the first 8 levels of a 10-level space.
        Vector psi = Vector::Zero(10);
        psi.head(8) = testing::random_pure(8, rng);
        const PureOracle o = pure_oracle(psi);
        const Matrix rho = projector(psi);
        EXPECT_NEAR(qfi_phase(rho), o.f_ph, 1e-9 * (1.0 + o.f_ph));
        const auto f = qfi_displacement(rho);
        EXPECT_LT((f.entries - o.f).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + o.f.norm()));
    }
}

TEST(Metrology, SpectralFormulaAgreesWithFidelityOracle) {
    std::mt19937_64 rng(71);
    const auto q = quadratures(HilbertConfig{8});
    const Matrix n = number_op(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix rho = testing::random_density(8, rng, 4);
        const double fph = qfi_phase(rho);
        const auto fd = qfi_displacement(rho);
        EXPECT_NEAR(qfi_fidelity_oracle(rho, n, 1e-3), fph, 1e-3 * fph);
        EXPECT_NEAR(qfi_fidelity_oracle(rho, q.x1.matrix, 1e-3), 0.5 * fd(0, 0), 5e-4 * fd(0, 0));
        EXPECT_NEAR(qfi_fidelity_oracle(rho, q.x2.matrix, 1e-3), 0.5 * fd(1, 1), 5e-4 * fd(1, 1));
        // Mixed generator recovers the off-diagonal entry: c = (1, 1)/sqrt(2).
        const Matrix mixed = (q.x1.matrix + q.x2.matrix) / std::sqrt(2.0);
        const double expected = 0.25 * (fd(0, 0) + fd(1, 1) + 2.0 * fd(0, 1));
        EXPECT_NEAR(qfi_fidelity_oracle(rho, mixed, 1e-3), expected, 1e-3 * expected);
    }
}

TEST(FidelityOracle, Examples) {
    EXPECT_NEAR(qfi_fidelity_oracle(states::thermal(10, 0.8), number_op(10), 1e-3), 0.0, 1e-8);
    Vector psi = Vector::Zero(6);
    psi(0) = psi(2) = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(qfi_fidelity_oracle(projector(psi), number_op(6), 1e-3), 1.0, 1e-3);
    // Vacuum with generator x2: F_22 / 2 = 1.
    const auto q = quadratures(HilbertConfig{6});
    EXPECT_NEAR(qfi_fidelity_oracle(projector(states::fock(6, 0)), q.x2.matrix, 1e-3), 1.0, 1e-3);
    EXPECT_NEAR(qfi_fidelity_oracle(projector(states::fock(6, 0)), q.x1.matrix, 1e-3), 1.0, 1e-3);
}

TEST(FidelityOracle, ArgumentChecks) {
    const Matrix rho = states::thermal(4, 0.5);
    EXPECT_THROW(qfi_fidelity_oracle(rho, number_op(4), 0.5), std::invalid_argument);
    EXPECT_THROW(qfi_fidelity_oracle(rho, number_op(4), 1e-6), std::invalid_argument);
    EXPECT_THROW(qfi_fidelity_oracle(rho, number_op(5), 1e-3), std::invalid_argument);
}

TEST(Metrology, PhaseCovariance) {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix rho = testing::random_density(9, rng, 1 + trial % 5);
        const double theta = angle(rng);
        const Matrix rot = phase_rotate(rho, theta);
        const double f = qfi_phase(rho);
        EXPECT_GE(f, 0.0);
        EXPECT_NEAR(qfi_phase(rot), f, 1e-9);
        const auto fd = qfi_displacement(rho);
        const auto fr = qfi_displacement(rot);
        EXPECT_NEAR(fd.entries.trace(), fr.entries.trace(), 1e-9);
        EXPECT_NEAR(m_opt(fd), m_opt(fr), 1e-9);
        EXPECT_EQ(fd(0, 1), fd(1, 0));
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(fd.entries);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
        // The quadrature rotation acts on F as an orthogonal conjugation.
        Eigen::Matrix2d R;
        R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        const Eigen::Matrix2d a = R * fd.entries * R.transpose();
        const Eigen::Matrix2d b = R.transpose() * fd.entries * R;
        const double dev = std::min((a - fr.entries).cwiseAbs().maxCoeff(), (b - fr.entries).cwiseAbs().maxCoeff());
        EXPECT_LT(dev, 1e-9);
    }
}

TEST(Metrology, QfiIsConvex) {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix r1 = testing::random_density(6, rng, 2);
        const Matrix r2 = testing::random_density(6, rng, 2);
        const double w = 0.3;
        EXPECT_LE(qfi_phase(w * r1 + (1 - w) * r2), w * qfi_phase(r1) + (1 - w) * qfi_phase(r2) + 1e-10);
    }
}

// Classical states: mixtures of coherent states, including thermal states.
TEST(Metrology, ClassicalStatesRespectBounds) {
    std::mt19937_64 rng(83);
    std::normal_distribution<double> nd(0.0, 1.2);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const Index N = 60;
    const Matrix n = number_op(N);
    std::vector<Matrix> suite = {states::thermal(N, 0.0), states::thermal(N, 0.5), states::thermal(N, 3.0)};
    for (int trial = 0; trial < 15; ++trial) {
        const int components = 1 + trial % 4;
        Matrix rho = Matrix::Zero(N, N);
        double total = 0.0;
        for (int c = 0; c < components; ++c) {
            const double w = 0.1 + ud(rng);
            Vector v = states::coherent(N, cplx(nd(rng), nd(rng)));
            v /= v.norm();
            rho += w * projector(v);
            total += w;
        }
        suite.push_back(rho / total);
    }
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const Matrix& rho = suite[i];
        const double nbar = expect(rho, n);
        const auto fd = qfi_displacement(rho);
        EXPECT_LE(qfi_phase(rho), nbar + 1e-6) << "state " << i;
        EXPECT_LE(m_av(fd), 1.0 + 1e-6) << "state " << i;
        EXPECT_LE(m_opt(fd), 1.0 + 1e-6) << "state " << i;
    }
}

TEST(Metrology, PairCutoffSkipsOnlyNegligiblePairs) {
    Matrix rho = projector(states::fock(5, 0)) * (1.0 - 1e-13);
    rho(4, 4) = 1e-13;
    Vector psi = Vector::Zero(5);
    psi(0) = psi(2) = 1.0 / std::sqrt(2.0);
    const Matrix pure = projector(psi);
    EXPECT_NEAR(qfi_phase(pure, 1e-15), qfi_phase(pure), 1e-15);
    EXPECT_NEAR(qfi_phase(rho), 0.0, 1e-12);
}

} // namespace
} // namespace dce
