// Copyright 2026 The nvrepeater Authors
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

#include "nvrepeater/state_algebra.hpp"
#include "test_support.hpp"

namespace nvrepeater {
namespace {

using testing::max_abs_diff;
using testing::random_state;

DensityMatrix bell(BellState b) { return DensityMatrix::from_state(bell_state(b)); }

TEST(ApplyChannel, UnitDepolarizingIsIdentity) {
  std::mt19937_64 rng(1);
  const auto rho = random_state(3, rng);
  const auto out = apply_channel(rho, Depolarizing{1.0, 2}, {1});
  EXPECT_LT(max_abs_diff(rho, out), 1e-15);
}

TEST(ApplyChannel, FullDephasingKillsCoherence) {
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const auto out =
      apply_channel(DensityMatrix::from_state(plus), Dephasing{0.5}, {0});
  EXPECT_LT(max_abs_diff(out, DensityMatrix::maximally_mixed(1)), 1e-15);
}

TEST(ApplyChannel, DepolarizedBellFidelity) {
  const auto out = apply_channel(bell(BellState::kPhiPlus),
                                 Depolarizing{0.95, 2}, {1});
  // Written out by hand: 0.95 |Phi+><Phi+| + 0.05 (I/2 (x) I/2).
  Matrix expected = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) expected(i, i) = 0.05 / 4.0;
  for (int i : {0, 3}) {
    for (int j : {0, 3}) expected(i, j) += 0.95 * 0.5;
  }
  EXPECT_LT(max_abs_diff(out, DensityMatrix(expected)), 1e-15);
  EXPECT_NEAR(out.overlap(bell_state(BellState::kPhiPlus)), 0.9625, 1e-15);
}

TEST(ApplyChannel, AmplitudeDampingPopulations) {
  const auto out = apply_channel(DensityMatrix::from_state(basis_ket(2, 1)),
                                 AmplitudeDamping{0.3}, {0});
  EXPECT_NEAR(out(0, 0).real(), 0.3, 1e-15);
  EXPECT_NEAR(out(1, 1).real(), 0.7, 1e-15);
}

TEST(ApplyChannel, JointDepolarizingNeedsMatchingDimension) {
  std::mt19937_64 rng(2);
  const auto rho = random_state(2, rng);
  EXPECT_THROW(apply_channel(rho, Depolarizing{0.9, 2}, {0, 1}),
               std::invalid_argument);
  const auto out = apply_channel(rho, Depolarizing{0.0, 4}, {0, 1});
  EXPECT_LT(max_abs_diff(out, DensityMatrix::maximally_mixed(2)), 1e-15);
}

TEST(ApplyChannel, RejectsBadTargetsAndNonCptpKraus) {
  std::mt19937_64 rng(3);
  const auto rho = random_state(2, rng);
  EXPECT_THROW(apply_channel(rho, Dephasing{0.9}, {2}), std::invalid_argument);
  EXPECT_THROW(apply_channel(rho, Dephasing{0.9}, {0, 0}),
               std::invalid_argument);
  Matrix k = 1.1 * pauli_i();
  EXPECT_THROW(apply_channel(rho, KrausChannel{{k}}, {0}), std::domain_error);
  EXPECT_THROW(apply_channel(rho, Dephasing{1.5}, {0}), std::domain_error);
}

TEST(ApplyChannel, CustomKrausMatchesBuiltInDamping) {
  std::mt19937_64 rng(4);
  const auto rho = random_state(2, rng);
  const KrausChannel k{{amplitude_damping_kraus(0.37, 0),
                        amplitude_damping_kraus(0.37, 1)}};
  EXPECT_LT(max_abs_diff(apply_channel(rho, k, {1}),
                         apply_channel(rho, AmplitudeDamping{0.37}, {1})),
            1e-15);
}

TEST(ChannelProperties, CptpOnRandomStates) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = random_state(2, rng);
    const int q = trial % 2;
    const std::vector<QuantumChannel> channels{
        Dephasing{0.5 + 0.5 * u(rng)}, Depolarizing{u(rng), 2},
        AmplitudeDamping{u(rng)}, PauliZCorrection{},
        KrausChannel{{amplitude_damping_kraus(0.2, 0),
                      amplitude_damping_kraus(0.2, 1)}}};
    for (const auto& ch : channels) {
      const auto out = apply_channel(rho, ch, {q});
      EXPECT_NEAR(out.trace(), 1.0, tolerance::kTrace);
      EXPECT_LT(hermiticity_error(out), tolerance::kHermitian);
      EXPECT_GT(min_eigenvalue(out), -tolerance::kEigenvalue);
    }
    const auto joint = apply_channel(rho, Depolarizing{u(rng), 4}, {0, 1});
    EXPECT_NEAR(joint.trace(), 1.0, tolerance::kTrace);
    EXPECT_GT(min_eigenvalue(joint), -tolerance::kEigenvalue);
  }
}

TEST(ChannelProperties, DephasingCommutesWithDepolarizing) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rho = random_state(2, rng);
    const auto a = apply_channel(
        apply_channel(rho, Dephasing{0.83}, {1}), Depolarizing{0.71, 2}, {1});
    const auto b = apply_channel(
        apply_channel(rho, Depolarizing{0.71, 2}, {1}), Dephasing{0.83}, {1});
    EXPECT_LT(max_abs_diff(a, b), 1e-12);
  }
}

TEST(PartialTrace, Examples) {
  const auto zz = DensityMatrix::from_state(basis_ket(4, 0));
  EXPECT_LT(max_abs_diff(partial_trace(zz, {0}),
                         DensityMatrix::from_state(basis_ket(2, 0))),
            1e-15);
  EXPECT_LT(max_abs_diff(partial_trace(bell(BellState::kPsiPlus), {0}),
                         DensityMatrix::maximally_mixed(1)),
            1e-15);
  EXPECT_THROW(partial_trace(zz, {}), std::invalid_argument);
  EXPECT_THROW(partial_trace(zz, {3}), std::invalid_argument);
}

TEST(PartialTrace, ProductStates) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_state(1 + trial % 2, rng);
    const auto b = random_state(2, rng);
    const auto ab = tensor(a, b);
    std::vector<int> keep_a(a.qubits());
    for (int i = 0; i < a.qubits(); ++i) keep_a[i] = i;
    EXPECT_LT(max_abs_diff(partial_trace(ab, keep_a), a), 1e-12);
    EXPECT_LT(max_abs_diff(partial_trace(ab, {a.qubits(), a.qubits() + 1}), b),
              1e-12);
  }
}

TEST(PermuteQubits, SwapsFactors) {
  std::mt19937_64 rng(8);
  const auto a = random_state(1, rng);
  const auto b = random_state(2, rng);
  const auto swapped = permute_qubits(tensor(a, b), {1, 2, 0});
  EXPECT_LT(max_abs_diff(swapped, tensor(b, a)), 1e-15);
  EXPECT_THROW(permute_qubits(tensor(a, b), {0, 1}), std::invalid_argument);
}

TEST(ProjectAndRenormalize, Examples) {
  const Vector pp = bell_state(BellState::kPsiPlus);
  const Matrix P = pp * pp.adjoint();
  const auto r = project_and_renormalize(bell(BellState::kPsiPlus), P);
  EXPECT_NEAR(r.weight, 1.0, 1e-15);
  EXPECT_LT(max_abs_diff(r.state, bell(BellState::kPsiPlus)), 1e-15);

  const Vector fp = bell_state(BellState::kPhiPlus);
  const auto m = project_and_renormalize(DensityMatrix::maximally_mixed(2),
                                         Matrix(fp * fp.adjoint()));
  EXPECT_NEAR(m.weight, 0.25, 1e-15);
  EXPECT_LT(max_abs_diff(m.state, bell(BellState::kPhiPlus)), 1e-15);
}

TEST(ProjectAndRenormalize, ZeroWeightAndInvalidElement) {
  const Vector fp = bell_state(BellState::kPhiPlus);
  const auto z = project_and_renormalize(bell(BellState::kPsiPlus),
                                         Matrix(fp * fp.adjoint()));
  EXPECT_EQ(z.weight, 0.0);
  EXPECT_EQ(z.state.matrix().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(project_and_renormalize(bell(BellState::kPsiPlus),
                                       Matrix(2.0 * Matrix::Identity(4, 4))),
               std::domain_error);
}

TEST(ProjectSubsystem, BellSwapTeleportsCorrelations) {
  // (Psi+ (x) Psi+) with the middle pair found in Phi+ leaves the outer pair
  // in Phi+ with weight 1/4.
  const auto joint = tensor(bell(BellState::kPsiPlus), bell(BellState::kPsiPlus));
  const auto s =
      project_subsystem(joint, bell_state(BellState::kPhiPlus), {1, 2});
  EXPECT_NEAR(s.trace(), 0.25, 1e-15);
  EXPECT_NEAR(s.overlap(bell_state(BellState::kPhiPlus)) / s.trace(), 1.0,
              1e-15);
}

TEST(DensityMatrix, ValidatesShape) {
  EXPECT_THROW(DensityMatrix(Matrix::Identity(3, 3)), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(Matrix::Zero(2, 4)), std::invalid_argument);
  EXPECT_THROW(check_normalized(DensityMatrix::zero(2)), std::domain_error);
  EXPECT_NO_THROW(check_normalized(DensityMatrix::maximally_mixed(3)));
}

}  // namespace
}  // namespace nvrepeater
