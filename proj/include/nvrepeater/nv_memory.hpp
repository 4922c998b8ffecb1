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

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "channel_models.hpp"
#include "state_algebra.hpp"

namespace nvrepeater {

// Maximum number of Bob-side attempts; infinite means no restart.
class Cutoff {
 public:
  explicit constexpr Cutoff(std::int64_t n) : n_(n) {
    if (n < 1) throw std::invalid_argument("cutoff must be >= 1");
  }
  static constexpr Cutoff infinite() { return Cutoff(); }

  constexpr bool is_infinite() const { return n_ == 0; }
  constexpr std::int64_t value() const {
    if (is_infinite()) throw std::logic_error("infinite cutoff has no value");
    return n_;
  }
  std::string to_string() const {
    return is_infinite() ? "inf" : std::to_string(n_);
  }

  friend constexpr bool operator==(Cutoff a, Cutoff b) { return a.n_ == b.n_; }
  // Infinite orders after every finite cutoff.
  friend constexpr bool operator<(Cutoff a, Cutoff b) {
    if (a.is_infinite()) return false;
    if (b.is_infinite()) return true;
    return a.n_ < b.n_;
  }

 private:
  constexpr Cutoff() = default;
  std::int64_t n_ = 0;
};

struct MemoryDecay {
  double a = 0.0;    // dephasing rate per attempt
  double b = 0.0;    // depolarizing rate per attempt
  double L_s = 0.0;  // km

  double lambda1(double n) const { return 0.5 * (1.0 + std::exp(-a * n)); }
  double lambda2(double n) const { return std::exp(-b * n); }
};

// Time per Bob-side attempt enters through L_s n_ri / c + t_prep.
inline MemoryDecay decay_rates(const HardwareParameters& p, double L_s) {
  if (!(L_s >= 0.0)) throw std::domain_error("signal length must be >= 0");
  const double t = L_s * p.n_ri / p.c_vacuum + p.t_prep;
  return {p.a0 + p.a1 * t, p.b0 + p.b1 * t, L_s};
}

struct GateNoise {
  double F_swap;
  double F_bell_gate;
  double F_bell_meas;
  double F_gm;

  static GateNoise from(const HardwareParameters& p) {
    const double g2 = p.F_g * p.F_g;
    const double m2 = p.F_m * p.F_m;
    return {g2, g2, m2, g2 * g2 * m2};
  }
};

struct StorageChannel {
  Dephasing dephase;
  Depolarizing depolarize;

  DensityMatrix apply(const DensityMatrix& rho, int qubit) const {
    return apply_channel(apply_channel(rho, dephase, {qubit}), depolarize,
                         {qubit});
  }
};

inline StorageChannel storage_channel(const MemoryDecay& m, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("attempt count must be >= 0");
  return {Dephasing{m.lambda1(double(n))}, Depolarizing{m.lambda2(double(n)), 2}};
}

// <exp(-c n)> over n ~ geometric(p_B) conditioned on n <= n_star.
inline double averaged_exponential(double c, double p_B, Cutoff n_star) {
  if (!(c >= 0.0)) throw std::domain_error("rate must be >= 0");
  if (!(p_B > 0.0 && p_B <= 1.0)) {
    throw std::domain_error("success probability must lie in (0, 1]");
  }
  const double lq = std::log1p(-p_B);  // log(1 - p_B), -inf at p_B = 1
  const double head = p_B * std::exp(-c);
  const double denom = -std::expm1(lq - c);
  if (n_star.is_infinite()) return head / denom;
  const double n = double(n_star.value());
  const double succ = -std::expm1(n * lq);
  const double tail = -std::expm1(n * (lq - c));
  return head / succ * tail / denom;
}

// Linear storage action averaged over the attempt count:
//   rho -> x2 rho + (x1 - x2) Z rho Z + (1 - x1) Tr[rho] I/2
// with x1 = <e^{-bn}> and x2 = <e^{-bn} (1 + e^{-an})/2>.
struct StorageMix {
  double x1 = 1.0;
  double x2 = 1.0;

  DensityMatrix apply(const DensityMatrix& rho, int qubit) const {
    const double lam = x1 > 0.0 ? x2 / x1 : 1.0;
    return apply_channel(apply_channel(rho, Dephasing{lam}, {qubit}),
                         Depolarizing{x1, 2}, {qubit});
  }
};

inline StorageMix averaged_storage(const MemoryDecay& m, double p_B,
                                   Cutoff n_star) {
  const double eb = averaged_exponential(m.b, p_B, n_star);
  const double eab = averaged_exponential(m.a + m.b, p_B, n_star);
  return {eb, 0.5 * (eb + eab)};
}

}  // namespace nvrepeater
