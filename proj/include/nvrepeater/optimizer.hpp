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
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "benchmarks.hpp"
#include "channel_models.hpp"
#include "composite_schemes.hpp"
#include "nv_memory.hpp"

namespace nvrepeater {

// Telecom-wavelength operation: lossier conversion stage, longer
// attenuation length and a better spin readout.
struct FrequencyConversion {
  double efficiency = 0.3;
  double L0 = 22.0;
  double F_m = 0.98;

  HardwareParameters apply(HardwareParameters p) const {
    p.L0 = L0;
    p.F_m = F_m;
    p.validate();
    return p;
  }
};

struct OptimizationGrid {
  std::vector<double> thetas;
  std::vector<Cutoff> n_stars;
  std::vector<double> t_ws;
  std::vector<double> positions;  // empty: scheme default

  static std::vector<double> default_thetas(int count = 200) {
    std::vector<double> out;
    out.reserve(count);
    const double step = (std::numbers::pi / 2) / (count + 1);
    for (int i = 0; i < count; ++i) out.push_back((i + 1) * step);
    return out;
  }

  static std::vector<Cutoff> default_n_stars() {
    std::vector<Cutoff> out;
    for (std::int64_t n : {1, 2, 3, 5, 8, 12, 20, 35, 60, 100, 200, 500, 1000,
                           2000, 5000}) {
      out.emplace_back(n);
    }
    out.push_back(Cutoff::infinite());
    return out;
  }

  static std::vector<double> default_t_ws() {
    std::vector<double> out;
    for (int ns = 5; ns <= 30; ++ns) out.push_back(ns * 1e-9);
    return out;
  }

  static OptimizationGrid defaults() {
    return {default_thetas(), default_n_stars(), default_t_ws(), {}};
  }

  void validate() const {
    if (thetas.empty() || n_stars.empty() || t_ws.empty()) {
      throw ConfigError("optimization grids must be non-empty");
    }
    for (double t : thetas) {
      if (!(t > 0.0 && t <= std::numbers::pi / 2)) {
        throw ConfigError("theta grid must lie in (0, pi/2]");
      }
    }
    for (double t : t_ws) {
      if (!(t >= kMinWindow * (1 - 1e-12) && t <= kMaxWindow * (1 + 1e-12))) {
        throw ConfigError("time-window grid must lie in [5 ns, 30 ns]");
      }
    }
    for (double x : positions) {
      if (!(x > 0.0 && x < 1.0)) {
        throw ConfigError("position grid must lie in (0, 1)");
      }
    }
  }
};

struct RatePoint {
  double L = 0.0;  // km
  SchemeConfig config;
  SchemeResult result;
  BenchmarkSet benchmarks;
  bool has_key = false;  // false: sentinel config, rate 0
};

namespace detail {

// Strictly better rate wins; exact ties go to smaller n*, larger theta,
// smaller t_w, then the position closest to the scheme default.
inline bool preferred(const SchemeConfig& a, double ra, const SchemeConfig& b,
                      double rb) {
  if (ra != rb) return ra > rb;
  if (!(a.n_star == b.n_star)) return a.n_star < b.n_star;
  if (a.theta != b.theta) return a.theta > b.theta;
  if (a.t_w != b.t_w) return a.t_w < b.t_w;
  const double d0 = default_position(a.scheme);
  return std::abs(a.position - d0) < std::abs(b.position - d0);
}

struct Incumbent {
  SchemeConfig config;
  SchemeResult result;
  bool seen = false;

  void offer(const SchemeConfig& c, const SchemeResult& r) {
    if (!(r.rate > 0.0)) return;
    if (!seen || preferred(c, r.rate, config, result.rate)) {
      config = c;
      result = r;
      seen = true;
    }
  }
};

}  // namespace detail

// Exhaustive grid search of R at distance L. Grid points that hit a zero
// yield count as zero rate.
inline RatePoint optimize_point(Scheme scheme, const HardwareParameters& p,
                                double L, const OptimizationGrid& grid,
                                double conversion = 1.0,
                                Protocol protocol = Protocol::kAuto) {
  grid.validate();
  if (!(L >= 0.0)) throw ConfigError("distance must be >= 0");
  detail::Incumbent best;
  std::vector<double> positions = grid.positions;
  if (positions.empty()) positions.push_back(default_position(scheme));
  const std::vector<double> no_theta{std::numbers::pi / 4};
  const auto& thetas = uses_theta(scheme) ? grid.thetas : no_theta;

  for (double pos : positions) {
    for (double theta : thetas) {
      for (double t_w : grid.t_ws) {
        SchemeConfig c = SchemeConfig::defaults(scheme);
        c.theta = theta;
        c.t_w = t_w;
        c.position = pos;
        c.protocol = protocol;
        c.conversion_efficiency = conversion;
        c.validate();
        if (scheme == Scheme::kSinglePhoton) {
          try {
            best.offer(c, single_photon_rates(p, c, L));
          } catch (const std::domain_error&) {
          }
          continue;
        }
        for (Protocol proto : candidate_protocols(scheme, protocol)) {
          MemorySchemeModel model;
          try {
            model = build_memory_model(p, c, L, detection_for(proto));
          } catch (const std::domain_error&) {
            continue;
          }
          for (Cutoff n : grid.n_stars) {
            SchemeConfig cn = c;
            cn.n_star = n;
            try {
              best.offer(cn, finalize(evaluate(model, n), mode_count(scheme),
                                      proto));
            } catch (const std::domain_error&) {
            }
          }
        }
      }
    }
  }

  RatePoint out;
  out.L = L;
  if (best.seen) {
    out.config = best.config;
    out.result = best.result;
    out.has_key = true;
  } else {
    out.config = SchemeConfig::defaults(scheme);
    out.config.protocol = protocol;
    out.config.conversion_efficiency = conversion;
    out.result.n_modes = mode_count(scheme);
    out.result.protocol = protocol;
  }
  return out;
}

// Direct-transmission benchmark optimized over the window only.
inline SchemeResult optimize_direct_nv(const HardwareParameters& p, double L,
                                       const std::vector<double>& t_ws,
                                       double conversion = 1.0) {
  SchemeResult best;
  best.n_modes = 2;
  bool seen = false;
  for (double t_w : t_ws) {
    const auto r = direct_transmission_rates(p, t_w, L, conversion);
    if (!seen || r.rate > best.rate) {
      best = r;
      seen = true;
    }
  }
  return best;
}

inline BenchmarkSet all_benchmarks(const HardwareParameters& p, double L,
                                   const std::vector<double>& t_ws,
                                   double conversion = 1.0) {
  BenchmarkSet b = repeaterless_benchmarks(p, L, conversion);
  b.direct_nv = optimize_direct_nv(p, L, t_ws, conversion).rate;
  return b;
}

struct SweepSpec {
  Scheme scheme = Scheme::kSinglePhoton;
  double L_min = 0.0;  // km
  double L_max = 0.0;
  int L_steps = 0;
  OptimizationGrid grid = OptimizationGrid::defaults();
  std::optional<FrequencyConversion> frequency_conversion;

  std::vector<double> distances() const {
    if (L_steps < 0) throw ConfigError("step count must be >= 0");
    if (!(L_min >= 0.0 && L_max >= L_min)) {
      throw ConfigError("distance range must satisfy 0 <= from <= to");
    }
    std::vector<double> out;
    out.reserve(L_steps);
    for (int i = 0; i < L_steps; ++i) {
      out.push_back(L_steps == 1 ? L_min
                                 : L_min + (L_max - L_min) * i / (L_steps - 1));
    }
    return out;
  }
};

// One optimized point per distance, benchmarks attached, ascending in L.
inline std::vector<RatePoint> sweep(const SweepSpec& spec,
                                    const HardwareParameters& base) {
  const HardwareParameters p = spec.frequency_conversion
                                   ? spec.frequency_conversion->apply(base)
                                   : base;
  const double conv =
      spec.frequency_conversion ? spec.frequency_conversion->efficiency : 1.0;
  std::vector<RatePoint> out;
  for (double L : spec.distances()) {
    RatePoint rp = optimize_point(spec.scheme, p, L, spec.grid, conv);
    rp.benchmarks = all_benchmarks(p, L, spec.grid.t_ws, conv);
    out.push_back(rp);
  }
  return out;
}

}  // namespace nvrepeater
