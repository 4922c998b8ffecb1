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
#include <limits>
#include <numbers>
#include <stdexcept>

#include "channel_models.hpp"

namespace nvrepeater {

// Repeaterless reference rates, in secret bits per channel use.
struct BenchmarkSet {
  double capacity = 0.0;
  double extended = 0.0;
  double thermal = 0.0;
  double direct_nv = 0.0;
};

inline double pure_loss_capacity(double eta_f) {
  if (!(eta_f >= 0.0 && eta_f < 1.0)) {
    throw std::domain_error("transmissivity must lie in [0, 1)");
  }
  return -std::log1p(-eta_f) / std::numbers::ln2;
}

inline double extended_channel_bound(double eta_f, double p_app) {
  const double x = eta_f * p_app;
  if (!(x >= 0.0 && x < 1.0)) {
    throw std::domain_error("effective transmissivity must lie in [0, 1)");
  }
  return -std::log1p(-x) / std::numbers::ln2;
}

// g(n) = (n + 1) log2(n + 1) - n log2 n
inline double thermal_entropy(double nbar) {
  if (!(nbar >= 0.0)) throw std::domain_error("photon number must be >= 0");
  if (nbar == 0.0) return 0.0;
  return ((nbar + 1.0) * std::log1p(nbar) - nbar * std::log(nbar)) /
         std::numbers::ln2;
}

inline double thermal_bound(double eta_f, double p_app, double nbar) {
  const double x = eta_f * p_app;
  if (!(x >= 0.0 && x < 1.0)) {
    throw std::domain_error("effective transmissivity must lie in [0, 1)");
  }
  if (!(nbar >= 0.0)) throw std::domain_error("photon number must be >= 0");
  if (nbar == 0.0) return extended_channel_bound(eta_f, p_app);
  if (x == 0.0 || nbar > x / (1.0 - x)) return 0.0;
  const double v =
      -(std::log1p(-x) + nbar * std::log(x)) / std::numbers::ln2 -
      thermal_entropy(nbar);
  return std::max(0.0, v);
}

// Window used for the thermal-noise photon number.
inline constexpr double kBenchmarkWindow = 5e-9;

// capacity, extended and thermal at distance L; direct_nv is left to the
// caller. `conversion` scales the apparatus efficiency.
inline BenchmarkSet repeaterless_benchmarks(const HardwareParameters& p,
                                            double L,
                                            double conversion = 1.0) {
  const double eta_f = fiber_transmissivity(L, p.L0);
  const double p_app = p.p_app() * conversion;
  BenchmarkSet b;
  if (eta_f >= 1.0) {
    b.capacity = std::numeric_limits<double>::infinity();
  } else {
    b.capacity = pure_loss_capacity(eta_f);
  }
  b.extended = extended_channel_bound(eta_f, p_app);
  b.thermal = thermal_bound(eta_f, p_app, kBenchmarkWindow * p.d);
  return b;
}

}  // namespace nvrepeater
