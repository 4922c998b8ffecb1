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
#include <string>
#include <string_view>
#include <vector>

#include "channel_models.hpp"
#include "keyrate.hpp"
#include "nv_memory.hpp"
#include "single_photon.hpp"
#include "state_algebra.hpp"

namespace nvrepeater {

enum class Scheme { kSiSQuaRe, kSinglePhoton, kSPADS, kSPOTL };

inline constexpr Scheme kAllSchemes[] = {Scheme::kSinglePhoton, Scheme::kSPADS,
                                         Scheme::kSiSQuaRe, Scheme::kSPOTL};

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kSiSQuaRe: return "sisquare";
    case Scheme::kSinglePhoton: return "single-photon";
    case Scheme::kSPADS: return "spads";
    case Scheme::kSPOTL: return "spotl";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

// Schemes with a time-bin photon measured directly by an end user.
inline bool uses_time_bin(Scheme s) {
  return s == Scheme::kSiSQuaRe || s == Scheme::kSPADS;
}

inline bool uses_theta(Scheme s) { return s != Scheme::kSiSQuaRe; }
inline bool uses_cutoff(Scheme s) { return s != Scheme::kSinglePhoton; }

inline int mode_count(Scheme s) { return uses_time_bin(s) ? 2 : 1; }

inline double default_position(Scheme s) {
  return s == Scheme::kSPADS ? 2.0 / 3.0 : 0.5;
}

inline constexpr double kMinWindow = 5e-9;
inline constexpr double kMaxWindow = 30e-9;

struct SchemeConfig {
  Scheme scheme = Scheme::kSinglePhoton;
  double theta = std::numbers::pi / 4;
  Cutoff n_star = Cutoff::infinite();
  double t_w = 10e-9;
  double position = 0.5;  // fraction of L between Alice and the repeater
  Protocol protocol = Protocol::kAuto;
  double conversion_efficiency = 1.0;  // multiplies each arm's detection

  static SchemeConfig defaults(Scheme s) {
    SchemeConfig c;
    c.scheme = s;
    c.position = default_position(s);
    return c;
  }

  void validate() const {
    if (uses_theta(scheme) &&
        !(theta > 0.0 && theta <= std::numbers::pi / 2 + 1e-15)) {
      throw ConfigError("theta must lie in (0, pi/2]");
    }
    if (!(t_w >= kMinWindow * (1 - 1e-12) && t_w <= kMaxWindow * (1 + 1e-12))) {
      throw ConfigError("time window must lie in [5 ns, 30 ns]");
    }
    if (!(position > 0.0 && position < 1.0)) {
      throw ConfigError("repeater position must lie in (0, 1)");
    }
    if (!(conversion_efficiency > 0.0 && conversion_efficiency <= 1.0)) {
      throw ConfigError("conversion efficiency must lie in (0, 1]");
    }
    if (uses_time_bin(scheme) && protocol == Protocol::kSixStateAsymAD) {
      throw ConfigError(
          "time-bin measurements cannot run the asymmetric six-state protocol");
    }
  }
};

struct SchemeResult {
  double yield = 0.0;
  QberTriple qber;
  int n_modes = 1;
  Protocol protocol = Protocol::kAuto;
  double key_fraction = 0.0;
  double rate = 0.0;
};

// Mean of N_A + N_B when Bob's side restarts after n_star failures.
inline double expected_channel_uses(double p_A, double p_B, Cutoff n_star) {
  if (!(p_A > 0.0 && p_A <= 1.0) || !(p_B > 0.0 && p_B <= 1.0)) {
    throw std::domain_error("unreachable configuration: zero success rate");
  }
  double succ = 1.0;
  if (!n_star.is_infinite()) {
    succ = -std::expm1(double(n_star.value()) * std::log1p(-p_B));
  }
  return 1.0 / (p_A * succ) + 1.0 / p_B;
}

inline Detection detection_for(Protocol p) {
  return p == Protocol::kBB84AsymOneWay ? Detection::kBB84
                                        : Detection::kSixState;
}

// Electron (or carbon) and time-bin photon: F Psi+ + (1 - F) Psi-.
inline DensityMatrix timebin_pair(double F_prep) {
  return F_prep * DensityMatrix::from_state(bell_state(BellState::kPsiPlus)) +
         (1.0 - F_prep) *
             DensityMatrix::from_state(bell_state(BellState::kPsiMinus));
}

namespace detail {

inline const std::array<Matrix, 4>& bell_corrections() {
  // Pauli on Bob that returns the ideal swapped state to Psi+.
  static const std::array<Matrix, 4> table = [] {
    const DensityMatrix ideal =
        tensor(DensityMatrix::from_state(bell_state(BellState::kPsiPlus)),
               DensityMatrix::from_state(bell_state(BellState::kPsiPlus)));
    const std::array<Matrix, 4> paulis{pauli_i(), pauli_x(), pauli_y(),
                                       pauli_z()};
    std::array<Matrix, 4> out;
    for (int k = 0; k < 4; ++k) {
      const DensityMatrix s =
          project_subsystem(ideal, bell_state(kAllBellStates[k]), {1, 2});
      double best = -1.0;
      for (const auto& u : paulis) {
        const double f = conjugate(s, embed_operator(u, {1}, 2))
                             .overlap(bell_state(BellState::kPsiPlus)) /
                         s.trace();
        if (f > best) {
          best = f;
          out[k] = u;
        }
      }
    }
    return out;
  }();
  return table;
}

}  // namespace detail

struct SwapOutcomes {
  std::array<double, 4> weight{};  // phi+, phi-, psi+, psi-
  std::array<QberTriple, 4> qber{};
  QberTriple average;
};

// Noisy Bell measurement on the repeater pair of [A, C] (x) [E, B], with
// Bob's Pauli correction applied per outcome.
inline SwapOutcomes swap_outcomes(const DensityMatrix& rho_AC,
                                  const DensityMatrix& rho_EB,
                                  const HardwareParameters& p) {
  DensityMatrix joint = tensor(rho_AC, rho_EB);
  const auto g = GateNoise::from(p);
  joint = apply_channel(joint, Depolarizing{g.F_bell_meas, 2}, {2});
  joint = apply_channel(joint, Depolarizing{g.F_bell_gate, 4}, {1, 2});
  const auto& fix = detail::bell_corrections();
  SwapOutcomes out;
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    DensityMatrix s =
        project_subsystem(joint, bell_state(kAllBellStates[k]), {1, 2});
    s = conjugate(s, embed_operator(fix[k], {1}, 2));
    const double w = s.trace();
    out.weight[k] = w;
    total += w;
    if (w > 0.0) {
      out.qber[k] = qber_against_psi_plus(s);
      out.average.e_x += w * out.qber[k].e_x;
      out.average.e_y += w * out.qber[k].e_y;
      out.average.e_z += w * out.qber[k].e_z;
    }
  }
  out.average.e_x /= total;
  out.average.e_y /= total;
  out.average.e_z /= total;
  return out;
}

// A memory-assisted scheme at fixed (theta, t_w, L, detection) with the
// carbon storage left open. The averaged output is affine in the storage
// mix, so q holds the QBER of the stored pair, of its Z-flipped version and
// of its carbon-depolarized version.
struct MemorySchemeModel {
  double p_A = 0.0;
  double p_B = 0.0;
  MemoryDecay decay;
  std::array<QberTriple, 3> q{};

  QberTriple qber(const StorageMix& m) const {
    const double w0 = m.x2, w1 = m.x1 - m.x2, w2 = 1.0 - m.x1;
    QberTriple e;
    e.e_x = w0 * q[0].e_x + w1 * q[1].e_x + w2 * q[2].e_x;
    e.e_y = w0 * q[0].e_y + w1 * q[1].e_y + w2 * q[2].e_y;
    e.e_z = w0 * q[0].e_z + w1 * q[1].e_z + w2 * q[2].e_z;
    return e;
  }
};

struct YieldQber {
  double yield = 0.0;
  QberTriple qber;
};

inline YieldQber evaluate(const MemorySchemeModel& m, Cutoff n_star) {
  const StorageMix mix = averaged_storage(m.decay, m.p_B, n_star);
  return {1.0 / expected_channel_uses(m.p_A, m.p_B, n_star), m.qber(mix)};
}

struct ElementaryPair {
  DensityMatrix state;
  double success;
};

namespace detail {

inline ElementaryPair timebin_arm(const HardwareParameters& p,
                                  const SchemeConfig& c, double L_arm,
                                  Detection det, int photon_qubit) {
  const double eta_f = fiber_transmissivity(L_arm, p.L0);
  const double app = apparatus_efficiency(c.t_w, p) * c.conversion_efficiency;
  const double pd = dark_count_probability(c.t_w, p.d);
  const double alpha = squash_depolarizing(det, eta_f, app, pd);
  return {apply_channel(timebin_pair(p.F_prep), Depolarizing{alpha, 2},
                        {photon_qubit}),
          click_probability(det, eta_f, app, pd)};
}

inline ElementaryPair single_photon_arm(const HardwareParameters& p,
                                        const SchemeConfig& c, double L_link,
                                        int user_qubit) {
  const auto link =
      make_single_photon_link(p, c.theta, c.t_w, L_link, c.conversion_efficiency);
  const double y = single_photon_yield(link);
  if (!(y > 0.0)) throw std::domain_error("zero-yield operating point");
  return {with_measurement_noise(post_selected_state(link), p.F_m, {user_qubit}),
          y};
}

}  // namespace detail

inline MemorySchemeModel build_memory_model(const HardwareParameters& p,
                                            const SchemeConfig& c, double L,
                                            Detection det) {
  if (c.scheme == Scheme::kSinglePhoton) {
    throw std::invalid_argument("single-photon scheme has no memory stage");
  }
  if (!(L >= 0.0)) throw std::domain_error("distance must be >= 0");
  const double L_A = c.position * L;
  const double L_B = (1.0 - c.position) * L;

  // [A, QR electron] before the swap, [QR electron, B] for Bob's side.
  ElementaryPair alice = c.scheme == Scheme::kSiSQuaRe
                             ? detail::timebin_arm(p, c, L_A, det, 0)
                             : detail::single_photon_arm(p, c, L_A, 0);
  ElementaryPair bob = c.scheme == Scheme::kSPOTL
                           ? detail::single_photon_arm(p, c, L_B, 1)
                           : detail::timebin_arm(p, c, L_B, det, 1);

  MemorySchemeModel m;
  m.p_A = alice.success;
  m.p_B = bob.success;
  if (!(m.p_A > 0.0) || !(m.p_B > 0.0)) {
    throw std::domain_error("zero click probability");
  }
  const double L_s = c.scheme == Scheme::kSPOTL ? L_B : 2.0 * L_B;
  m.decay = decay_rates(p, L_s);

  const auto g = GateNoise::from(p);
  const DensityMatrix stored =
      apply_channel(alice.state, Depolarizing{g.F_swap, 2}, {1});
  const std::array<DensityMatrix, 3> parts{
      stored, apply_pauli_z(stored, 1),
      replace_with_maximally_mixed(stored, {1})};
  for (int i = 0; i < 3; ++i) {
    m.q[i] = swap_outcomes(parts[i], bob.state, p).average;
  }
  return m;
}

inline SchemeResult finalize(const YieldQber& yq, int n_modes, Protocol p) {
  SchemeResult r;
  r.yield = yq.yield;
  r.qber = yq.qber;
  r.n_modes = n_modes;
  r.protocol = p;
  r.key_fraction = secret_key_fraction(p, yq.qber);
  r.rate = assemble_rate(yq.yield, r.key_fraction, n_modes);
  return r;
}

// Protocols tried for a scheme under the requested choice.
inline std::vector<Protocol> candidate_protocols(Scheme s, Protocol requested) {
  if (requested != Protocol::kAuto) return {requested};
  if (uses_time_bin(s)) {
    return {Protocol::kBB84AsymOneWay, Protocol::kSixStateSymAD};
  }
  return {Protocol::kSixStateAsymAD};
}

inline SchemeResult best_of(const SchemeResult& a, const SchemeResult& b) {
  return b.rate > a.rate ? b : a;
}

namespace detail {

inline SchemeResult memory_scheme_rates(const HardwareParameters& p,
                                        const SchemeConfig& c, double L) {
  c.validate();
  SchemeResult best;
  bool first = true;
  for (Protocol proto : candidate_protocols(c.scheme, c.protocol)) {
    const auto model = build_memory_model(p, c, L, detection_for(proto));
    const auto res = finalize(evaluate(model, c.n_star), mode_count(c.scheme),
                              proto);
    best = first ? res : best_of(best, res);
    first = false;
  }
  return best;
}

}  // namespace detail

inline SchemeResult sisquare_rates(const HardwareParameters& p,
                                   SchemeConfig c, double L) {
  c.scheme = Scheme::kSiSQuaRe;
  return detail::memory_scheme_rates(p, c, L);
}

inline SchemeResult spads_rates(const HardwareParameters& p, SchemeConfig c,
                                double L) {
  c.scheme = Scheme::kSPADS;
  return detail::memory_scheme_rates(p, c, L);
}

inline SchemeResult spotl_rates(const HardwareParameters& p, SchemeConfig c,
                                double L) {
  c.scheme = Scheme::kSPOTL;
  return detail::memory_scheme_rates(p, c, L);
}

inline YieldQber single_photon_point(const HardwareParameters& p,
                                     const SchemeConfig& c, double L) {
  const auto link =
      make_single_photon_link(p, c.theta, c.t_w, L, c.conversion_efficiency);
  return {single_photon_yield(link), single_photon_qber(link, p.F_m)};
}

inline SchemeResult single_photon_rates(const HardwareParameters& p,
                                        SchemeConfig c, double L) {
  c.scheme = Scheme::kSinglePhoton;
  c.validate();
  const auto yq = single_photon_point(p, c, L);
  SchemeResult best;
  bool first = true;
  for (Protocol proto : candidate_protocols(c.scheme, c.protocol)) {
    const auto res = finalize(yq, 1, proto);
    best = first ? res : best_of(best, res);
    first = false;
  }
  return best;
}

// Alice's spin with a time-bin photon sent straight to Bob over L.
inline YieldQber direct_transmission_point(const HardwareParameters& p,
                                           double t_w, double L,
                                           Detection det,
                                           double conversion = 1.0) {
  const double eta_f = fiber_transmissivity(L, p.L0);
  const double app = apparatus_efficiency(t_w, p) * conversion;
  const double pd = dark_count_probability(t_w, p.d);
  const double alpha = squash_depolarizing(det, eta_f, app, pd);
  DensityMatrix rho = timebin_pair(p.F_prep);
  rho = apply_channel(rho, Depolarizing{p.F_m, 2}, {0});
  rho = apply_channel(rho, Depolarizing{alpha, 2}, {1});
  return {click_probability(det, eta_f, app, pd), qber_against_psi_plus(rho)};
}

inline SchemeResult direct_transmission_rates(const HardwareParameters& p,
                                              double t_w, double L,
                                              double conversion = 1.0,
                                              Protocol protocol = Protocol::kAuto) {
  if (!(t_w >= kMinWindow * (1 - 1e-12) && t_w <= kMaxWindow * (1 + 1e-12))) {
    throw ConfigError("time window must lie in [5 ns, 30 ns]");
  }
  if (protocol == Protocol::kSixStateAsymAD) {
    throw ConfigError(
        "time-bin measurements cannot run the asymmetric six-state protocol");
  }
  SchemeResult best;
  bool first = true;
  for (Protocol proto : candidate_protocols(Scheme::kSPADS, protocol)) {
    const auto yq = direct_transmission_point(p, t_w, L, detection_for(proto),
                                              conversion);
    const auto res = finalize(yq, 2, proto);
    best = first ? res : best_of(best, res);
    first = false;
  }
  return best;
}

inline SchemeResult scheme_rates(const HardwareParameters& p,
                                 const SchemeConfig& c, double L) {
  switch (c.scheme) {
    case Scheme::kSiSQuaRe: return sisquare_rates(p, c, L);
    case Scheme::kSinglePhoton: return single_photon_rates(p, c, L);
    case Scheme::kSPADS: return spads_rates(p, c, L);
    case Scheme::kSPOTL: return spotl_rates(p, c, L);
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace nvrepeater
