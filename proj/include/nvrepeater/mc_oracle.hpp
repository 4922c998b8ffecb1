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

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "nv_memory.hpp"
#include "single_photon.hpp"

namespace nvrepeater::mc {

// Counter-based generator: the k-th draw of stream (seed) is
// splitmix64(seed + k * golden), so any draw can be recomputed in isolation.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    return mix(seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform in [0, 1).
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  // Uniform in (0, 1].
  double uniform_open_zero() { return double((next() >> 11) + 1) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Number of trials up to and including the first success.
inline std::int64_t sample_geometric(CounterRng& rng, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("p must lie in (0, 1]");
  if (p == 1.0) return 1;
  const double g = std::floor(std::log(rng.uniform_open_zero()) / std::log1p(-p));
  return std::int64_t(g) + 1;
}

// Best-Fisher rejection sampler for the von Mises distribution around 0.
inline double sample_von_mises(CounterRng& rng, double kappa) {
  if (!(kappa >= 0.0)) throw std::domain_error("kappa must be >= 0");
  if (kappa < 1e-8) return std::numbers::pi * (2.0 * rng.uniform() - 1.0);
  const double t = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (t - std::sqrt(2.0 * t)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  for (;;) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform_open_zero();
    const double u3 = rng.uniform();
    const double z = std::cos(std::numbers::pi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double a = std::acos(std::clamp(f, -1.0, 1.0));
      return u3 > 0.5 ? a : -a;
    }
  }
}

struct Estimate {
  double value = 0.0;
  double se = 0.0;

  double z_score(double reference) const {
    if (se > 0.0) return (value - reference) / se;
    return value == reference ? 0.0 : std::numeric_limits<double>::infinity();
  }
};

inline Estimate proportion(std::int64_t hits, std::int64_t total) {
  if (total <= 0) return {0.0, 0.0};
  const double p = double(hits) / double(total);
  return {p, std::sqrt(p * (1.0 - p) / double(total))};
}

enum class ClickPattern { kLeft, kRight, kNone, kBoth };

struct TrialOutcome {
  ClickPattern click_pattern = ClickPattern::kNone;
  std::array<bool, 2> emitted{};
  std::array<bool, 2> survived{};
  std::array<bool, 2> dark{};
};

struct SinglePhotonOptions {
  double F_m = 1.0;
  // When set, Alice's photon picks up a von Mises phase of this width
  // instead of the equivalent dephasing with the link's lambda_phase.
  std::optional<double> delta_phi;
};

struct SinglePhotonEstimate {
  std::int64_t trials = 0;
  std::int64_t accepted = 0;
  Estimate yield;
  Estimate e_x, e_y, e_z;

  // Both estimators share the accepted states; the bound on the error
  // assumes full correlation.
  Estimate e_xy() const {
    return {0.5 * (e_x.value + e_y.value), 0.5 * (e_x.se + e_y.se)};
  }
};

namespace detail {

// Amplitudes over [spin A, photon A, photon B, spin B], qubit 0 = MSB.
using Amplitudes = std::array<std::complex<double>, 16>;
using SpinPair = std::array<std::complex<double>, 4>;

inline constexpr int kBit[4] = {8, 4, 2, 1};

inline double norm2(const Amplitudes& v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return s;
}

inline void scale(Amplitudes& v, double f) {
  for (auto& a : v) a *= f;
}

inline void flip_phase(Amplitudes& v, int q) {
  for (int i = 0; i < 16; ++i) {
    if (i & kBit[q]) v[i] = -v[i];
  }
}

inline void lose_photon_maybe(Amplitudes& v, int q, double eta, CounterRng& rng,
                              bool& lost) {
  double occupied = 0.0;
  for (int i = 0; i < 16; ++i) {
    if (i & kBit[q]) occupied += std::norm(v[i]);
  }
  lost = rng.bernoulli((1.0 - eta) * occupied);
  if (lost) {
    Amplitudes w{};
    for (int i = 0; i < 16; ++i) {
      if (i & kBit[q]) w[i ^ kBit[q]] = v[i];
    }
    v = w;
  } else {
    const double s = std::sqrt(eta);
    for (int i = 0; i < 16; ++i) {
      if (i & kBit[q]) v[i] *= s;
    }
  }
  scale(v, 1.0 / std::sqrt(norm2(v)));
}

// Beam splitter plus two non-resolving detectors acting on the photon
// modes. Outcome 0 and 1 keep the |11> amplitude scaled by 1/sqrt(2).
inline Amplitudes apply_detector(const Amplitudes& v, int k) {
  Amplitudes w{};
  const double h = 1.0 / std::sqrt(2.0);
  for (int sa = 0; sa < 2; ++sa) {
    for (int sb = 0; sb < 2; ++sb) {
      const int base = sa * 8 + sb;
      const auto c00 = v[base], c01 = v[base | 2], c10 = v[base | 4],
                 c11 = v[base | 6];
      if (k == 2) {
        w[base] = c00;
        continue;
      }
      const double sign = k == 0 ? 1.0 : -1.0;
      const auto s = 0.5 * (c01 + sign * c10);
      w[base | 2] = s;
      w[base | 4] = sign * s;
      w[base | 6] = h * c11;
    }
  }
  return w;
}

inline std::array<std::complex<double>, 2> rotate(
    std::complex<double> a0, std::complex<double> a1, int basis) {
  const double h = 1.0 / std::sqrt(2.0);
  const std::complex<double> i(0.0, 1.0);
  switch (basis) {
    case 0: return {a0, a1};
    case 1: return {h * (a0 + a1), h * (a0 - a1)};
    default: return {h * (a0 - i * a1), h * (a0 + i * a1)};
  }
}

// Samples both spins in basis 0 = Z, 1 = X, 2 = Y. Depolarized spins
// report a uniform bit.
inline std::array<int, 2> measure(const SpinPair& c, int basis, double F_m,
                                  CounterRng& rng) {
  // Rotate spin A then spin B; index = a * 2 + b.
  SpinPair r{};
  for (int b = 0; b < 2; ++b) {
    const auto t = rotate(c[b], c[2 + b], basis);
    r[b] = t[0];
    r[2 + b] = t[1];
  }
  for (int a = 0; a < 2; ++a) {
    const auto t = rotate(r[2 * a], r[2 * a + 1], basis);
    r[2 * a] = t[0];
    r[2 * a + 1] = t[1];
  }
  double u = rng.uniform();
  int outcome = 3;
  for (int k = 0; k < 4; ++k) {
    u -= std::norm(r[k]);
    if (u < 0.0) {
      outcome = k;
      break;
    }
  }
  std::array<int, 2> bits{outcome >> 1, outcome & 1};
  for (int& bit : bits) {
    if (!rng.bernoulli(F_m)) bit = rng.bernoulli(0.5) ? 1 : 0;
  }
  return bits;
}

}  // namespace detail

// One heralding attempt. On acceptance `spins` holds the post-selected,
// Z-corrected two-spin state.
inline TrialOutcome sample_trial(const SinglePhotonLink& l,
                                 const SinglePhotonOptions& opt,
                                 CounterRng& rng, detail::SpinPair& spins) {
  using namespace detail;
  TrialOutcome out;
  Amplitudes v{};
  const double s = std::sin(l.theta), c = std::cos(l.theta);
  const double a[2][2] = {{s, 0.0}, {0.0, c}};  // a[spin][photon]
  for (int i = 0; i < 16; ++i) {
    const int sa = (i >> 3) & 1, pa = (i >> 2) & 1, pb = (i >> 1) & 1,
              sb = i & 1;
    v[i] = a[sa][pa] * a[sb][pb];
  }

  for (int q : {1, 2}) {
    if (!rng.bernoulli(l.F_prep)) flip_phase(v, q);
  }
  if (opt.delta_phi) {
    const double phi =
        *opt.delta_phi > 0.0
            ? sample_von_mises(rng, 1.0 / (*opt.delta_phi * *opt.delta_phi))
            : 0.0;
    const std::complex<double> ph = std::polar(1.0, phi);
    for (int i = 0; i < 16; ++i) {
      if (i & kBit[1]) v[i] *= ph;
    }
  } else if (!rng.bernoulli(l.lambda_phase)) {
    flip_phase(v, 1);
  }

  std::array<bool, 2> lost{};
  bool lost_q = false;
  lose_photon_maybe(v, 1, l.eta, rng, lost_q);
  lost[0] = lost_q;
  lose_photon_maybe(v, 2, l.eta, rng, lost_q);
  lost[1] = lost_q;

  // Sample the optical outcome.
  std::array<Amplitudes, 3> branch{apply_detector(v, 0), apply_detector(v, 1),
                                   apply_detector(v, 2)};
  double u = rng.uniform();
  int k = 2;
  for (int j = 0; j < 3; ++j) {
    u -= norm2(branch[j]);
    if (u < 0.0) {
      k = j;
      break;
    }
  }
  v = branch[k];
  scale(v, 1.0 / std::sqrt(norm2(v)));

  out.dark = {rng.bernoulli(l.p_d), rng.bernoulli(l.p_d)};
  const bool left = k == 0 || out.dark[0];
  const bool right = k == 1 || out.dark[1];
  out.click_pattern = left && right ? ClickPattern::kBoth
                      : left        ? ClickPattern::kLeft
                      : right       ? ClickPattern::kRight
                                    : ClickPattern::kNone;

  // Read out the photon numbers, which leaves the spins in a pure state.
  double w[4] = {};
  for (int i = 0; i < 16; ++i) w[(i >> 1) & 3] += std::norm(v[i]);
  double r = rng.uniform();
  int ph = 3;
  for (int j = 0; j < 4; ++j) {
    r -= w[j];
    if (r < 0.0) {
      ph = j;
      break;
    }
  }
  out.survived = {bool(ph & 2), bool(ph & 1)};
  out.emitted = {out.survived[0] || lost[0], out.survived[1] || lost[1]};

  const double norm = std::sqrt(w[ph]);
  for (int sa = 0; sa < 2; ++sa) {
    for (int sb = 0; sb < 2; ++sb) {
      spins[sa * 2 + sb] = v[sa * 8 + ph * 2 + sb] / norm;
    }
  }
  if (out.click_pattern == ClickPattern::kRight) {
    spins[1] = -spins[1];
    spins[3] = -spins[3];
  }
  return out;
}

inline SinglePhotonEstimate simulate_single_photon(
    const SinglePhotonLink& l, std::int64_t trials, std::uint64_t seed,
    const SinglePhotonOptions& opt = {}) {
  l.validate();
  check_unit_interval(opt.F_m, "F_m");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  CounterRng rng(seed);
  std::int64_t accepted = 0;
  std::array<std::int64_t, 3> errors{};
  detail::SpinPair spins{};
  for (std::int64_t t = 0; t < trials; ++t) {
    const auto o = sample_trial(l, opt, rng, spins);
    if (o.click_pattern != ClickPattern::kLeft &&
        o.click_pattern != ClickPattern::kRight) {
      continue;
    }
    ++accepted;
    for (int basis = 0; basis < 3; ++basis) {
      const auto bits = detail::measure(spins, basis, opt.F_m, rng);
      const bool equal = bits[0] == bits[1];
      // Psi+ is anticorrelated in Z and correlated in X and Y.
      if (basis == 0 ? equal : !equal) ++errors[basis];
    }
  }
  SinglePhotonEstimate e;
  e.trials = trials;
  e.accepted = accepted;
  e.yield = proportion(accepted, trials);
  e.e_z = proportion(errors[0], accepted);
  e.e_x = proportion(errors[1], accepted);
  e.e_y = proportion(errors[2], accepted);
  return e;
}

// Alice retries until success, then Bob gets up to n_star tries; a Bob
// failure streak of n_star restarts the episode. Returns the mean of
// N_A + N_B.
inline Estimate simulate_restart_process(double p_A, double p_B, Cutoff n_star,
                                         std::int64_t episodes,
                                         std::uint64_t seed) {
  if (!(p_A > 0.0 && p_A <= 1.0) || !(p_B > 0.0 && p_B <= 1.0)) {
    throw std::domain_error("success probabilities must lie in (0, 1]");
  }
  if (episodes < 2) throw std::invalid_argument("need at least two episodes");
  CounterRng rng(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t e = 0; e < episodes; ++e) {
    std::int64_t n = 0;
    for (;;) {
      n += sample_geometric(rng, p_A);
      const std::int64_t b = sample_geometric(rng, p_B);
      if (n_star.is_infinite() || b <= n_star.value()) {
        n += b;
        break;
      }
      n += n_star.value();
    }
    const double x = double(n);
    const double d = x - mean;
    mean += d / double(e + 1);
    m2 += d * (x - mean);
  }
  const double var = m2 / double(episodes - 1);
  return {mean, std::sqrt(var / double(episodes))};
}

}  // namespace nvrepeater::mc
