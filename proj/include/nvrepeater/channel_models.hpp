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
#include <numbers>
#include <stdexcept>
#include <string>

namespace nvrepeater {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Hardware constants. Units: seconds, per-second, km, km/s, radians.
struct HardwareParameters {
  double a0 = 1.0 / 2000.0;
  double b0 = 1.0 / 5000.0;
  double a1 = 1.0 / 3.0;
  double b1 = 1.0 / 3.0;
  double t_prep = 6e-6;
  double F_m = 0.95;
  double F_g = 0.98;
  double F_prep = 0.99;
  double p_ce = 0.49;
  double p_zpl = 0.46;
  double p_det = 0.8;
  double d = 10.0;
  double tau = 6.48e-9;
  double t_w_offset = 1.28e-9;
  double L0 = 0.542;
  double n_ri = 1.44;
  double delta_phi = 14.3 * std::numbers::pi / 180.0;
  double c_vacuum = 299792.458;

  static HardwareParameters table1() { return {}; }

  // Apparatus efficiency without the time-window factor.
  double p_app() const { return p_ce * p_zpl * p_det; }

  void validate() const {
    auto prob = [](double v, const char* k) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(std::string(k) + " must lie in [0, 1]");
      }
    };
    auto fid = [](double v, const char* k) {
      if (!(v > 0.0 && v <= 1.0)) {
        throw ConfigError(std::string(k) + " must lie in (0, 1]");
      }
    };
    auto nonneg = [](double v, const char* k) {
      if (!(v >= 0.0 && std::isfinite(v))) {
        throw ConfigError(std::string(k) + " must be finite and >= 0");
      }
    };
    auto pos = [](double v, const char* k) {
      if (!(v > 0.0 && std::isfinite(v))) {
        throw ConfigError(std::string(k) + " must be finite and > 0");
      }
    };
    nonneg(a0, "a0");
    nonneg(b0, "b0");
    nonneg(a1, "a1");
    nonneg(b1, "b1");
    nonneg(t_prep, "t_prep");
    fid(F_m, "F_m");
    fid(F_g, "F_g");
    fid(F_prep, "F_prep");
    prob(p_ce, "p_ce");
    prob(p_zpl, "p_zpl");
    prob(p_det, "p_det");
    nonneg(d, "d");
    pos(tau, "tau");
    nonneg(t_w_offset, "t_w_offset");
    pos(L0, "L0");
    pos(n_ri, "n_ri");
    nonneg(delta_phi, "delta_phi");
    pos(c_vacuum, "c_vacuum");
  }
};

enum class Detection { kBB84, kSixState };

inline int detector_count(Detection m) {
  return m == Detection::kBB84 ? 2 : 6;
}

struct LinkBudget {
  double eta_f;
  double p_in;
  double p_app_prime;
  double eta_total;
  double p_d;
};

inline double fiber_transmissivity(double L, double L0) {
  if (!(L >= 0.0)) throw std::domain_error("distance must be >= 0");
  if (!(L0 > 0.0)) throw std::domain_error("attenuation length must be > 0");
  return std::exp(-L / L0);
}

// Fraction of the exponential emission falling in [offset, offset + t_w].
inline double window_capture(double t_w, const HardwareParameters& p) {
  if (!(t_w >= 0.0)) throw std::domain_error("time window must be >= 0");
  return std::exp(-p.t_w_offset / p.tau) * -std::expm1(-t_w / p.tau);
}

inline double dark_count_probability(double t_w, double d) {
  if (!(t_w >= 0.0) || !(d >= 0.0)) {
    throw std::domain_error("time window and dark-count rate must be >= 0");
  }
  return -std::expm1(-t_w * d);
}

inline double apparatus_efficiency(double t_w, const HardwareParameters& p) {
  return p.p_app() * window_capture(t_w, p);
}

inline LinkBudget link_budget(double L, double t_w,
                              const HardwareParameters& p) {
  LinkBudget b{};
  b.eta_f = fiber_transmissivity(L, p.L0);
  b.p_in = window_capture(t_w, p);
  b.p_app_prime = p.p_app() * b.p_in;
  b.eta_total = b.p_app_prime * b.eta_f;
  b.p_d = dark_count_probability(t_w, p.d);
  return b;
}

namespace detail {

inline void check_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0, 1]");
  }
}

// log[(1 - x)(1 - p_d)^k]
inline double log_no_click(double x, double p_d, int k) {
  return std::log1p(-x) + k * std::log1p(-p_d);
}

}  // namespace detail

// At least one of the k detectors fires.
inline double click_probability(Detection m, double eta_link,
                                double p_app_prime, double p_d) {
  detail::check_probability(eta_link, "transmissivity");
  detail::check_probability(p_app_prime, "apparatus efficiency");
  detail::check_probability(p_d, "dark-count probability");
  const double x = p_app_prime * eta_link;
  if (x >= 1.0 || p_d >= 1.0) return 1.0;
  return -std::expm1(detail::log_no_click(x, p_d, detector_count(m)));
}

// Depolarizing parameter of the squashed time-bin measurement.
inline double squash_depolarizing(Detection m, double eta_link,
                                  double p_app_prime, double p_d) {
  const double click = click_probability(m, eta_link, p_app_prime, p_d);
  if (click <= 0.0) return 0.0;
  const double x = p_app_prime * eta_link;
  if (p_d >= 1.0) return 0.0;
  const int k = detector_count(m);
  const double clean = x * std::exp((k - 1) * std::log1p(-p_d));
  return std::min(1.0, clean / click);
}

namespace detail {

// I1(k)/I0(k) from the power series; used for k <= 15.
inline double bessel_ratio_series(double k) {
  const double q = 0.25 * k * k;
  double t0 = 1.0;
  double t1 = 0.5 * k;
  double s0 = t0;
  double s1 = t1;
  for (int j = 1; j < 200; ++j) {
    t0 *= q / (double(j) * j);
    t1 *= q / (double(j) * (j + 1));
    s0 += t0;
    s1 += t1;
    if (t0 < 1e-17 * s0 && t1 < 1e-17 * s1) break;
  }
  return s1 / s0;
}

// I1(k)/I0(k) from the large-argument expansion; the common e^k/sqrt(2 pi k)
// prefactor cancels.
inline double bessel_ratio_asymptotic(double k) {
  double s0 = 1.0;
  double s1 = 1.0;
  double t0 = 1.0;
  double t1 = 1.0;
  for (int j = 1; j < 60; ++j) {
    const double odd = double(2 * j - 1) * (2 * j - 1);
    const double n0 = (0.0 - odd) / (8.0 * j * k);
    const double n1 = (4.0 - odd) / (8.0 * j * k);
    const double next0 = -t0 * n0;
    const double next1 = -t1 * n1;
    if (std::abs(next0) > std::abs(t0) || std::abs(next1) > std::abs(t1)) {
      break;
    }
    t0 = next0;
    t1 = next1;
    s0 += t0;
    s1 += t1;
    if (std::abs(t0) < 1e-17 && std::abs(t1) < 1e-17) break;
  }
  return s1 / s0;
}

}  // namespace detail

inline double bessel_i1_over_i0(double kappa) {
  if (!(kappa >= 0.0)) throw std::domain_error("kappa must be >= 0");
  if (std::isinf(kappa)) return 1.0;
  return kappa <= 15.0 ? detail::bessel_ratio_series(kappa)
                       : detail::bessel_ratio_asymptotic(kappa);
}

// Dephasing parameter from a von Mises phase spread delta_phi (radians).
inline double phase_dephasing_parameter(double delta_phi) {
  if (!(delta_phi >= 0.0)) {
    throw std::domain_error("phase uncertainty must be >= 0");
  }
  if (delta_phi == 0.0) return 1.0;
  if (std::isinf(delta_phi)) return 0.5;
  return 0.5 * bessel_i1_over_i0(1.0 / (delta_phi * delta_phi)) + 0.5;
}

}  // namespace nvrepeater
