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
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "benchmarks.hpp"
#include "channel_models.hpp"
#include "keyrate.hpp"
#include "optimizer.hpp"

namespace nvrepeater {

// P(S <= k) for S ~ Binomial(n, p).
inline double binomial_lower_tail(std::int64_t n, double p, std::int64_t k) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (k < 0 || k > n) throw std::invalid_argument("k must lie in [0, n]");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must lie in [0, 1]");
  if (k == n || p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  return boost::math::ibetac(double(k + 1), double(n - k), p);
}

// P(S >= k) for S ~ Binomial(n, p).
inline double binomial_upper_tail(std::int64_t n, double p, std::int64_t k) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (k < 0 || k > n + 1) throw std::invalid_argument("k must lie in [0, n+1]");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must lie in [0, 1]");
  if (k == 0) return 1.0;
  if (k == n + 1) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  return boost::math::ibeta(double(k), double(n - k + 1), p);
}

inline constexpr double kAttemptDuration = 8.5e-6;  // s, preparation + readout

inline std::int64_t attempts_for_hours(double hours,
                                       double attempt_s = kAttemptDuration) {
  if (!(hours >= 0.0)) throw std::domain_error("hours must be >= 0");
  if (!(attempt_s > 0.0)) throw std::domain_error("attempt time must be > 0");
  return std::int64_t(std::floor(hours * 3600.0 / attempt_s));
}

struct CertificationPlan {
  std::int64_t n_attempts = 5'000'000'000;
  double t_Y = 2e-7;
  double t_e = 0.015;

  // Raw bits per basis.
  std::int64_t samples_per_basis(double Y) const {
    return std::int64_t(std::floor(double(n_attempts) / 3.0 * (Y - t_Y)));
  }

  void validate(double Y) const {
    if (n_attempts < 1) throw ConfigError("attempt count must be >= 1");
    if (!(t_Y > 0.0) || !(t_e > 0.0)) {
      throw ConfigError("margins must be > 0");
    }
    if (!(Y > t_Y)) throw ConfigError("yield margin exceeds the yield");
    if (samples_per_basis(Y) < 1) {
      throw ConfigError("plan yields no raw bits per basis");
    }
  }
};

struct Certification {
  std::int64_t samples_per_basis = 0;
  double tail_yield = 0.0;
  double tail_e_x = 0.0;
  double tail_e_y = 0.0;
  double tail_e_z = 0.0;
  double confidence = 0.0;
  double certified_rate = 0.0;
  double capacity = 0.0;
  double capacity_ratio = 0.0;
  bool certifiable = false;  // certified rate beats the capacity
};

inline Certification certification_confidence(const HardwareParameters& p,
                                              const RatePoint& op,
                                              const CertificationPlan& plan) {
  const double Y = op.result.yield;
  plan.validate(Y);
  const std::int64_t n = plan.n_attempts;
  const std::int64_t m = plan.samples_per_basis(Y);
  Certification c;
  c.samples_per_basis = m;
  c.tail_yield = binomial_lower_tail(
      n, Y, std::int64_t(std::floor(double(n) * (Y - plan.t_Y))));
  auto qber_tail = [&](double e) {
    const double k = std::ceil(double(m) * (e + plan.t_e));
    if (k > double(m)) return 0.0;
    return binomial_upper_tail(m, e, std::int64_t(k));
  };
  const QberTriple& e = op.result.qber;
  c.tail_e_x = qber_tail(e.e_x);
  c.tail_e_y = qber_tail(e.e_y);
  c.tail_e_z = qber_tail(e.e_z);
  c.confidence = (1.0 - c.tail_e_x) * (1.0 - c.tail_e_y) *
                 (1.0 - c.tail_e_z) * (1.0 - c.tail_yield);

  QberTriple worst{std::min(1.0, e.e_x + plan.t_e),
                   std::min(1.0, e.e_y + plan.t_e),
                   std::min(1.0, e.e_z + plan.t_e)};
  // Worst-case raw statistics can leave the physical region; that is "no
  // key", not a modelling error.
  double r = 0.0;
  try {
    r = secret_key_fraction(op.result.protocol, worst);
  } catch (const std::domain_error&) {
    r = 0.0;
  }
  c.certified_rate = assemble_rate(Y - plan.t_Y, r, op.result.n_modes);
  const double eta_f = fiber_transmissivity(op.L, p.L0);
  c.capacity = pure_loss_capacity(eta_f);
  c.capacity_ratio = c.capacity > 0.0 ? c.certified_rate / c.capacity : 0.0;
  c.certifiable = c.certified_rate > c.capacity;
  return c;
}

}  // namespace nvrepeater
