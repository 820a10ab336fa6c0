// Copyright 2026 The mipt-quan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mipt/circuits.h"
#include "mipt/stats.h"

namespace mipt {
namespace {

double max_abs(const Eigen::Matrix4cd &m) { return m.cwiseAbs().maxCoeff(); }

TEST(Circuits, ScrambleGateEntryAndUnitarity) {
    Gate2Q us = gate_us();
    EXPECT_LT(unitarity_error(us.matrix), 1e-12);
    EXPECT_NEAR(us.matrix(0, 0).real(), 0.3644, 1e-3);
    EXPECT_NEAR(us.matrix(0, 0).imag(), 0.3086, 1e-3);
    EXPECT_EQ(max_abs(gate_us().matrix - us.matrix), 0.0);
}

TEST(Circuits, MonitoredGateEntryAndUnitarity) {
    Gate2Q um = gate_um();
    EXPECT_LT(unitarity_error(um.matrix), 1e-12);
    EXPECT_NEAR(um.matrix(0, 0).real(), 0.9167, 1e-3);
    EXPECT_NEAR(um.matrix(0, 0).imag(), -0.1057, 1e-3);
    EXPECT_GT(max_abs(um.matrix - gate_us().matrix), 0.1);
}

TEST(Circuits, DistinguishCouplingLimits) {
    EXPECT_LT(max_abs(coupling_distinguish(0.0).matrix - Eigen::Matrix4cd::Identity()), 1e-15);
    Eigen::Matrix4cd c1 = coupling_distinguish(1.0).matrix;
    // controlled-(i sigma_x): |1,0> -> i|1,1>
    EXPECT_NEAR(std::abs(c1(3, 2) - Complex(0, 1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(c1(2, 3) - Complex(0, 1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(c1(2, 2)), 0.0, 1e-12);
    Eigen::Matrix4cd half = coupling_distinguish(0.5).matrix;
    double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(half(2, 2) - r), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(half(2, 3) - Complex(0, r)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(half(3, 2) - Complex(0, r)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(half(3, 3) - r), 0.0, 1e-12);
}

TEST(Circuits, PhaseCouplingLimits) {
    EXPECT_LT(max_abs(coupling_phase(1.0).matrix - coupling_distinguish(1.0).matrix), 1e-12);
    Eigen::Matrix4cd c0 = coupling_phase(0.0).matrix;
    double r = 1 / std::sqrt(2.0);
    for (int b = 0; b < 2; b++) {
        EXPECT_NEAR(std::abs(c0(2 * b, 2 * b) - r), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(c0(2 * b + 1, 2 * b) - Complex(0, r)), 0.0, 1e-12);
    }
}

TEST(Circuits, CouplingRejectsOutOfRangeGamma) {
    EXPECT_THROW(coupling_distinguish(1.5), std::invalid_argument);
    EXPECT_THROW(coupling_phase(-0.1), std::invalid_argument);
}

TEST(Circuits, ScrambleZeroDepthIsProductState) {
    Rng rng(1);
    PureState s = scramble(InitialState::Psi0, 4, NoiseModel{}, rng, size_t(0));
    EXPECT_NEAR(std::abs(s.amplitudes[0]), 1.0, 1e-15);
    PureState p = scramble(InitialState::Phi0, 4, NoiseModel{}, rng, size_t(0));
    for (const auto &a : p.amplitudes) EXPECT_NEAR(std::abs(a), 0.25, 1e-15);
}

TEST(Circuits, ScrambleNormAndCollision) {
    Rng rng(1);
    const size_t L = 8;
    for (InitialState init : {InitialState::Psi0, InitialState::Phi0}) {
        PureState s = scramble(init, L, NoiseModel{}, rng);
        EXPECT_LT(std::abs(s.norm_squared() - 1.0), 1e-10);
        double collision = 0;
        for (const auto &a : s.amplitudes) collision += std::norm(a) * std::norm(a);
        // E[p^2] under Beta(1, D-1) is 2 / (D (D + 1)); summed over D outcomes.
        double D = double(s.dim());
        double expected = 2.0 / (D + 1.0);
        EXPECT_NEAR(collision / expected, 1.0, 0.15);
    }
}

TEST(Circuits, DistinguishSweepAtZeroIsAllZeros) {
    Rng rng(3);
    for (int rep = 0; rep < 20; rep++) {
        PureState s = tensor(scramble(InitialState::Phi0, 4, NoiseModel{}, rng), PureState::zeros(1));
        auto bits = weak_measure_sweep(s, 4, 0.0, TaskKind::StateDistinguish, NoiseModel{}, rng);
        for (uint8_t b : bits) EXPECT_EQ(b, 0);
    }
}

TEST(Circuits, DistinguishSweepAtOneReadsAllOnes) {
    Rng rng(3);
    PureState sys = PureState::zeros(4);
    for (size_t q = 0; q < 4; q++) apply_1q(sys, gate_pauli(1), q);
    PureState s = tensor(sys, PureState::zeros(1));
    auto bits = weak_measure_sweep(s, 4, 1.0, TaskKind::StateDistinguish, NoiseModel{}, rng);
    for (uint8_t b : bits) EXPECT_EQ(b, 1);
}

TEST(Circuits, PhaseSweepAtZeroIsUnbiased) {
    const size_t L = 4;
    const int sweeps = 10000;
    std::vector<double> ones(L, 0);
    Rng rng(17);
    PureState sys = scramble(InitialState::Psi0, L, NoiseModel{}, rng);
    for (int i = 0; i < sweeps; i++) {
        Rng r(5, i);
        PureState s = tensor(sys, PureState::zeros(1));
        auto bits = weak_measure_sweep(s, L, 0.0, TaskKind::PhaseRecognition, NoiseModel{}, r);
        for (size_t x = 0; x < L; x++) ones[x] += bits[x];
    }
    double sigma = std::sqrt(0.25 / sweeps);
    for (size_t x = 0; x < L; x++) EXPECT_NEAR(ones[x] / sweeps, 0.5, 4 * sigma);
}

TEST(Circuits, TrajectoryShapeAndDeterminism) {
    CircuitConfig c;
    c.L = 6;
    c.gamma = 0.4;
    c.task = TaskKind::PhaseRecognition;
    c.master_seed = 123;
    TrajectoryRecord a = run_trajectory(c, 9);
    TrajectoryRecord b = run_trajectory(c, 9);
    EXPECT_EQ(a.num_slices(), 12u);
    EXPECT_EQ(a.bits.size(), 72u);
    EXPECT_EQ(a.bits, b.bits);
    EXPECT_EQ(a.label, 0);
    EXPECT_NE(run_trajectory(c, 10).trajectory_seed, a.trajectory_seed);
}

TEST(Circuits, DistinguishAtZeroGivesZeroGrid) {
    CircuitConfig c;
    c.L = 4;
    c.gamma = 0.0;
    c.initial = InitialState::Phi0;
    TrajectoryRecord r = run_trajectory(c, 0);
    for (uint8_t b : r.bits) EXPECT_EQ(b, 0);
    EXPECT_EQ(r.label, 1);
}

TEST(Circuits, FastPathMatchesExplicitAncilla) {
    for (TaskKind task : {TaskKind::StateDistinguish, TaskKind::PhaseRecognition}) {
        for (double g : {0.2, 0.7}) {
            CircuitConfig c;
            c.L = 4;
            c.gamma = g;
            c.task = task;
            c.master_seed = 77;
            CircuitConfig e = c;
            e.explicit_ancilla = true;
            for (uint64_t i = 0; i < 5; i++) {
                if (task == TaskKind::StateDistinguish) {
                    DualLikelihood a = run_trajectory_dual(c, i);
                    DualLikelihood b = run_trajectory_dual(e, i);
                    EXPECT_EQ(a.record.bits, b.record.bits);
                    EXPECT_NEAR(a.logp_psi, b.logp_psi, 1e-9);
                    EXPECT_NEAR(a.logp_phi, b.logp_phi, 1e-9);
                } else {
                    EXPECT_EQ(run_trajectory(c, i).bits, run_trajectory(e, i).bits);
                }
            }
        }
    }
}

TEST(Circuits, DualAtZeroHasZeroLogLikelihoods) {
    CircuitConfig c;
    c.L = 4;
    c.gamma = 0.0;
    DualLikelihood d = run_trajectory_dual(c, 3);
    EXPECT_EQ(d.logp_psi, 0.0);
    EXPECT_EQ(d.logp_phi, 0.0);
}

TEST(Circuits, DualTrueLikelihoodFavorsTrueState) {
    CircuitConfig c;
    c.L = 6;
    c.gamma = 0.7;
    c.master_seed = 5;
    double diff = 0;
    const int n = 500;
    for (int i = 0; i < n; i++) {
        c.initial = i % 2 ? InitialState::Phi0 : InitialState::Psi0;
        DualLikelihood d = run_trajectory_dual(c, i);
        diff += d.logp_true() - d.logp_other();
    }
    EXPECT_GT(diff / n, 0.0);
}

TEST(Circuits, DualMatchesRecordedMeasurementProbabilities) {
    // Replay the record with forced outcomes on an explicit ancilla.
    CircuitConfig c;
    c.L = 4;
    c.gamma = 0.6;
    c.master_seed = 8;
    c.explicit_ancilla = true;
    DualLikelihood d = run_trajectory_dual(c, 2);
    EXPECT_TRUE(std::isfinite(d.logp_psi));
    EXPECT_LE(d.logp_psi, 0.0);
    EXPECT_LE(d.logp_phi, 0.0);
    CircuitConfig f = c;
    f.explicit_ancilla = false;
    EXPECT_NEAR(std::exp(run_trajectory_dual(f, 2).logp_true()), std::exp(d.logp_true()),
                1e-9 * std::exp(d.logp_true()));
}

TEST(Circuits, ReferenceQubitLimits) {
    CircuitConfig c;
    c.L = 8;
    c.task = TaskKind::ReferenceQubit;
    c.gamma = 0.0;
    for (uint64_t i = 0; i < 3; i++) EXPECT_NEAR(run_reference_qubit(c, i).s_q, 1.0, 1e-9);
    c.gamma = 1.0;
    for (uint64_t i = 0; i < 3; i++) EXPECT_NEAR(run_reference_qubit(c, i).s_q, 0.0, 1e-9);
    c.gamma = 0.3;
    for (uint64_t i = 0; i < 10; i++) {
        double s = run_reference_qubit(c, i).s_q;
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 1.0);
    }
}

TEST(Circuits, NoisyTrajectoriesStayNormalizedAndDeterministic) {
    CircuitConfig c;
    c.L = 4;
    c.gamma = 0.5;
    c.task = TaskKind::PhaseRecognition;
    c.noise = NoiseModel{0.01, 0.02};
    EXPECT_EQ(run_trajectory(c, 1).bits, run_trajectory(c, 1).bits);
}

TEST(Circuits, ConfigValidation) {
    CircuitConfig c;
    c.L = 5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.L = 4;
    c.gamma = 2;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace mipt
