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

#include "dce/master_equation.hpp"
#include "support/test_support.hpp"

namespace dce {
namespace {

using testing::random_density;

SystemParams dissipative() {
    SystemParams p;
    p.g = 0.05;
    p.omega0 = 0.5;
    p.eps = 0.04;
    p.eta0 = 2.00655;
    p.alpha = 2e-8;
    p.gamma = 0.013;
    p.gamma_phi = 0.007;
    p.kappa = 0.021;
    return p;
}

Matrix basis_projector(Index dim, Index i, Index j) {
    Matrix m = Matrix::Zero(dim, dim);
    m(i, j) = 1.0;
    return m;
}

TEST(Dissipator, CavityDecayOfOnePhoton) {
    const HilbertConfig cfg{4};
    const auto f = fock_ladder(cfg);
    const Matrix out = dissipator(f.a, DensityMatrix(basis_projector(4, 1, 1), Space::field));
    EXPECT_LT(max_abs(out - (basis_projector(4, 0, 0) - basis_projector(4, 1, 1))), 1e-15);
}

TEST(Dissipator, DephasingKillsNothingDiagonal) {
    const auto q = qubit_ops();
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 0.3;
    rho(1, 1) = 0.7;
    EXPECT_EQ(max_abs(dissipator(q.sigma_z, DensityMatrix(rho, Space::qubit))), 0.0);
}

TEST(Dissipator, QubitDecay) {
    const auto q = qubit_ops();
    const Matrix out = dissipator(q.sigma_minus, DensityMatrix(basis_projector(2, kExcited, kExcited), Space::qubit));
    EXPECT_EQ(out, basis_projector(2, kGround, kGround) - basis_projector(2, kExcited, kExcited));
}

TEST(Dissipator, Errors) {
    EXPECT_THROW(dissipator(Matrix(Matrix::Identity(2, 2)), Matrix(Matrix::Identity(3, 3))), std::invalid_argument);
    const auto f = fock_ladder(HilbertConfig{2});
    EXPECT_THROW(dissipator(f.a, DensityMatrix(Matrix::Identity(2, 2) / 2.0, Space::qubit)), std::invalid_argument);
}

TEST(MasterRhs, StationaryWhenCommuting) {
    SystemParams p;
    p.omega0 = 0.5;
    const HilbertConfig cfg{5};
    const Matrix rho = basis_projector(10, cfg.index(kGround, 2), cfg.index(kGround, 2));
    EXPECT_EQ(max_abs(master_rhs(3.0, rho, p)), 0.0);
}

TEST(MasterRhs, CoherenceRotatesAtQubitFrequency) {
    SystemParams p;
    p.omega0 = 1.0;
    const HilbertConfig cfg{3};
    const Matrix rho = basis_projector(6, cfg.index(kExcited, 0), cfg.index(kGround, 0));
    EXPECT_LT(max_abs(master_rhs(0.7, rho, p) - cplx(0.0, -1.0) * p.omega0 * rho), 1e-15);
}

TEST(MasterRhs, TracelessAndHermiticityPreserving) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ud(0.0, 3e4);
    const SystemParams p = dissipative();
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix rho = testing::random_hermitian(12, rng);
        const Matrix out = master_rhs(ud(rng), rho, p);
        EXPECT_LT(std::abs(out.trace()), 1e-13);
        EXPECT_LT(hermiticity_error(out), 1e-13);
    }
}

class GeneratorTest : public ::testing::TestWithParam<int> {};

TEST_P(GeneratorTest, LabFrameMatchesDenseReference) {
    const HilbertConfig cfg{GetParam()};
    const SystemParams p = dissipative();
    const LindbladGenerator gen(p, cfg, Frame::lab);
    std::mt19937_64 rng(31 + GetParam());
    for (double t : {0.0, 1.3, 2.7e4}) {
        const Matrix rho = random_density(cfg.total_dim(), rng);
        const Matrix ref = master_rhs(t, rho, p);
        EXPECT_LT(max_abs(gen(t, rho) - ref), 1e-13 * std::max(1.0, max_abs(ref))) << "t=" << t;
    }
}

TEST_P(GeneratorTest, LabFrameIsLinearOnNonHermitianInput) {
    const HilbertConfig cfg{GetParam()};
    const SystemParams p = dissipative();
    const LindbladGenerator gen(p, cfg, Frame::lab);
    std::mt19937_64 rng(37);
    const Matrix x = testing::random_complex(cfg.total_dim(), cfg.total_dim(), rng);
    EXPECT_LT(max_abs(gen(0.4, x) - master_rhs(0.4, x, p)), 1e-12);
}

TEST_P(GeneratorTest, RotatingFrameIsTransformedEquation) {
    // d(rho~)/dt = i[H0, rho~] + U^+ L(U rho~ U^+) U
    const HilbertConfig cfg{GetParam()};
    const SystemParams p = dissipative();
    const LindbladGenerator gen(p, cfg, Frame::rotating);
    const RealVector e0 = bare_energies(p, cfg);
    const Matrix H0 = e0.cast<cplx>().asDiagonal();
    std::mt19937_64 rng(41 + GetParam());
    for (double t : {0.0, 0.9, 17.3, 1.2e3}) {
        const Matrix rt = random_density(cfg.total_dim(), rng);
        const Matrix ref = cplx(0.0, 1.0) * (H0 * rt - rt * H0) +
                           to_rotating_frame(master_rhs(t, from_rotating_frame(rt, t, p), p), t, p);
        EXPECT_LT(max_abs(gen(t, rt) - ref), 1e-11) << "t=" << t;
    }
}

INSTANTIATE_TEST_SUITE_P(Truncations, GeneratorTest, ::testing::Values(2, 3, 7));

TEST(RotatingFrame, IdentityAtZeroAndRoundTrip) {
    std::mt19937_64 rng(43);
    const SystemParams p = dissipative();
    const Matrix rho = random_density(10, rng);
    EXPECT_EQ(to_rotating_frame(rho, 0.0, p), rho);
    for (double t : {0.3, 77.0, 2.5e4}) {
        EXPECT_LT(max_abs(from_rotating_frame(to_rotating_frame(rho, t, p), t, p) - rho), 1e-14);
    }
}

TEST(RotatingFrame, MatchesExplicitUnitary) {
    std::mt19937_64 rng(47);
    const SystemParams p = dissipative();
    const HilbertConfig cfg{4};
    const double t = 3.1;
    const RealVector e0 = bare_energies(p, cfg);
    Vector phases(8);
    for (Index i = 0; i < 8; ++i) phases(i) = std::polar(1.0, -e0(i) * t);
    const Matrix U = phases.asDiagonal();
    const Matrix rho = random_density(8, rng);
    EXPECT_LT(max_abs(to_rotating_frame(rho, t, p) - U.adjoint() * rho * U), 1e-15);
}

TEST(RotatingFrame, PopulationsAndDissipatorsUnchanged) {
    std::mt19937_64 rng(53);
    const SystemParams p = dissipative();
    const HilbertConfig cfg{5};
    const Matrix rho = random_density(10, rng);
    const Matrix rt = to_rotating_frame(rho, 12.5, p);
    EXPECT_LT((rho.diagonal() - rt.diagonal()).cwiseAbs().maxCoeff(), 1e-15);
    const Matrix A = lift_field(fock_ladder(cfg).a).matrix;
    // D[a] commutes with the frame map up to the phase of a, which cancels.
    EXPECT_LT(max_abs(to_rotating_frame(dissipator(A, rho), 12.5, p) - dissipator(A, rt)), 1e-14);
}

TEST(Generator, OutputTracelessAndHermitianInBothFrames) {
    std::mt19937_64 rng(59);
    const HilbertConfig cfg{6};
    for (Frame f : {Frame::lab, Frame::rotating}) {
        const LindbladGenerator gen(dissipative(), cfg, f);
        const Matrix out = gen(100.0, random_density(12, rng));
        EXPECT_LT(std::abs(out.trace()), 1e-14);
        EXPECT_LT(hermiticity_error(out), 1e-14);
    }
}

} // namespace
} // namespace dce
