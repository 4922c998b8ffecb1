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

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "channel_models.hpp"
#include "keyrate.hpp"
#include "state_algebra.hpp"

namespace nvrepeater {

// Spin-photon link heralded by a single click behind a balanced beam
// splitter placed midway between the two emitters. Spin |0> emits no
// photon; spin |1> emits one.
struct SinglePhotonLink {
  double theta = std::numbers::pi / 4;
  double eta = 1.0;           // per-arm emission-to-detection probability
  double lambda_phase = 1.0;  // dephasing on Alice's photon
  double p_d = 0.0;           // dark-count probability per detector
  double F_prep = 1.0;

  void validate() const {
    if (!(theta > 0.0 && theta <= std::numbers::pi / 2 + 1e-15)) {
      throw std::domain_error("theta must lie in (0, pi/2]");
    }
    check_unit_interval(eta, "eta");
    check_unit_interval(p_d, "dark-count probability");
    check_unit_interval(F_prep, "F_prep");
    if (!(lambda_phase >= 0.5 && lambda_phase <= 1.0)) {
      throw std::domain_error("phase dephasing parameter must lie in [1/2, 1]");
    }
  }
};

// Link between two nodes a distance L_link apart; each arm is L_link / 2.
inline SinglePhotonLink make_single_photon_link(const HardwareParameters& p,
                                                double theta, double t_w,
                                                double L_link,
                                                double conversion = 1.0) {
  SinglePhotonLink s;
  s.theta = theta;
  s.eta = p.p_ce * p.p_zpl * std::sqrt(fiber_transmissivity(L_link, p.L0)) *
          p.p_det * window_capture(t_w, p) * conversion;
  s.lambda_phase = phase_dephasing_parameter(p.delta_phi);
  s.p_d = dark_count_probability(t_w, p.d);
  s.F_prep = p.F_prep;
  s.validate();
  return s;
}

// Measurement operators on the two photonic modes for non-resolving
// detectors: left click, right click, no click.
inline std::array<Matrix, 3> bell_povm() {
  const Matrix pp = bell_state(BellState::kPsiPlus) *
                    bell_state(BellState::kPsiPlus).adjoint();
  const Matrix pm = bell_state(BellState::kPsiMinus) *
                    bell_state(BellState::kPsiMinus).adjoint();
  Matrix both = Matrix::Zero(4, 4);
  both(3, 3) = 1.0 / std::sqrt(2.0);
  Matrix none = Matrix::Zero(4, 4);
  none(0, 0) = 1.0;
  return {Matrix(pp + both), Matrix(pm + both), none};
}

struct OutcomeProbabilities {
  double p0, p1, p2;
};

inline OutcomeProbabilities outcome_probabilities(const SinglePhotonLink& l) {
  l.validate();
  const double c2 = std::cos(l.theta) * std::cos(l.theta);
  const double x = l.eta * c2;
  const double p01 = x * (1.0 - 0.5 * x);
  return {p01, p01, (1.0 - x) * (1.0 - x)};
}

inline double single_photon_yield(const SinglePhotonLink& l) {
  const auto p = outcome_probabilities(l);
  return (p.p0 + p.p1) * (1.0 - l.p_d) + 2.0 * p.p2 * l.p_d * (1.0 - l.p_d);
}

namespace detail {

// Prepared spin-photon pair [spin, photon] after preparation noise,
// optional phase noise and loss.
inline DensityMatrix emitted_pair(const SinglePhotonLink& l, bool phase_noisy) {
  Vector psi = Vector::Zero(4);
  psi(0) = std::sin(l.theta);
  psi(3) = std::cos(l.theta);
  DensityMatrix rho = DensityMatrix::from_state(psi);
  rho = apply_channel(rho, Dephasing{l.F_prep}, {1});
  if (phase_noisy) rho = apply_channel(rho, Dephasing{l.lambda_phase}, {1});
  return apply_channel(rho, AmplitudeDamping{1.0 - l.eta}, {1});
}

// Unnormalized spin states for each optical outcome, Bob's Z already applied
// for the right-detector outcome.
inline std::array<DensityMatrix, 3> spin_branches(const SinglePhotonLink& l) {
  // [sA, phA, sB, phB] -> [sA, phA, phB, sB]
  const DensityMatrix joint = permute_qubits(
      tensor(emitted_pair(l, true), emitted_pair(l, false)), {0, 1, 3, 2});
  const auto povm = bell_povm();
  std::array<DensityMatrix, 3> out{DensityMatrix::zero(2),
                                   DensityMatrix::zero(2),
                                   DensityMatrix::zero(2)};
  for (int k = 0; k < 3; ++k) {
    const DensityMatrix branch =
        conjugate(joint, embed_operator(povm[k], {1, 2}, 4));
    out[k] = partial_trace(branch, {0, 3});
  }
  out[1] = apply_pauli_z(out[1], 1);
  return out;
}

}  // namespace detail

// Accepted spin state before normalization; its trace is the yield.
// A real photon click is kept only if the other detector stays dark; a
// no-photon event is accepted when exactly one detector fires dark.
inline DensityMatrix accepted_branch(const SinglePhotonLink& l) {
  l.validate();
  const auto br = detail::spin_branches(l);
  const double pd = l.p_d;
  return (1.0 - pd) * (br[0] + br[1]) +
         pd * (1.0 - pd) * (br[2] + apply_pauli_z(br[2], 1));
}

inline DensityMatrix post_selected_state(const SinglePhotonLink& l) {
  DensityMatrix acc = accepted_branch(l);
  const double y = acc.trace();
  if (!(y > 0.0)) throw std::domain_error("zero-yield operating point");
  return (1.0 / y) * acc;
}

inline DensityMatrix with_measurement_noise(const DensityMatrix& rho,
                                            double F_m,
                                            const std::vector<int>& qubits) {
  DensityMatrix out = rho;
  for (int q : qubits) out = apply_channel(out, Depolarizing{F_m, 2}, {q});
  return out;
}

inline QberTriple single_photon_qber(const SinglePhotonLink& l, double F_m) {
  check_unit_interval(F_m, "F_m");
  return qber_against_psi_plus(
      with_measurement_noise(post_selected_state(l), F_m, {0, 1}));
}

}  // namespace nvrepeater
