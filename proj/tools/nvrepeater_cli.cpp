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

// nvrepeater command-line front end.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include "CLI11.hpp"
#endif
#include <nlohmann/json.hpp>

#include "nvrepeater/nvrepeater.hpp"
#include "nvrepeater/parameter_file.hpp"

#ifndef NVREPEATER_VERSION
#define NVREPEATER_VERSION "dev"
#endif

namespace {

using namespace nvrepeater;
using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kConfig = 2, kZeroRate = 3, kValidation = 4 };

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Shared by every subcommand.
struct Common {
  std::string params = "table1";
  bool telecom = false;
};

struct Context {
  HardwareParameters p;
  double conversion = 1.0;
};

Context load(const Common& c) {
  Context ctx{params_io::load(c.params), 1.0};
  if (c.telecom) {
    const FrequencyConversion fc;
    ctx.p = fc.apply(ctx.p);
    ctx.conversion = fc.efficiency;
  }
  return ctx;
}

struct Manifest {
  std::string command;
  std::string params_digest;
  std::string spec_digest;
  std::optional<std::uint64_t> seed;

  Manifest(std::string cmd, const HardwareParameters& p,
           const std::string& spec, std::optional<std::uint64_t> s = {})
      : command(std::move(cmd)),
        params_digest(hex(fnv1a(params_io::to_string(p)))),
        spec_digest(hex(fnv1a(spec))),
        seed(s) {}

  std::string line() const {
    std::string out = "# nvrepeater " NVREPEATER_VERSION " command=" + command +
                      " params=fnv1a:" + params_digest +
                      " spec=fnv1a:" + spec_digest;
    if (seed) out += " seed=" + std::to_string(*seed);
    return out;
  }

  json to_json() const {
    json j{{"tool", "nvrepeater " NVREPEATER_VERSION},
           {"command", command},
           {"params_digest", "fnv1a:" + params_digest},
           {"spec_digest", "fnv1a:" + spec_digest}};
    if (seed) j["seed"] = *seed;
    return j;
  }
};

Cutoff parse_cutoff(const std::string& s) {
  if (s == "inf" || s == "infinite") return Cutoff::infinite();
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad cutoff '" + s + "'");
  }
  if (pos != s.size() || v < 1) throw ConfigError("bad cutoff '" + s + "'");
  return Cutoff(v);
}

Protocol parse_protocol(const std::string& s) {
  for (Protocol p : {Protocol::kBB84AsymOneWay, Protocol::kSixStateSymAD,
                     Protocol::kSixStateAsymAD, Protocol::kAuto}) {
    if (s == to_string(p)) return p;
  }
  throw ConfigError("unknown protocol '" + s + "'");
}

double distance_km(const std::optional<double>& km,
                   const std::optional<double>& l0, const HardwareParameters& p) {
  if (km && l0) throw ConfigError("give --distance-km or --distance-l0, not both");
  const double L = km ? *km : l0 ? *l0 * p.L0 : 17.0 * p.L0;
  if (!(L >= 0.0) || !std::isfinite(L)) throw ConfigError("distance must be >= 0");
  return L;
}

json qber_json(const QberTriple& e) {
  return {{"e_x", e.e_x}, {"e_y", e.e_y}, {"e_z", e.e_z}};
}

json point_json(const RatePoint& rp, const HardwareParameters& p) {
  const auto& c = rp.config;
  json j;
  j["scheme"] = to_string(c.scheme);
  j["L_km"] = rp.L;
  j["L_over_L0"] = rp.L / p.L0;
  j["has_key"] = rp.has_key;
  j["config"] = {{"theta", c.theta},
                 {"n_star", c.n_star.to_string()},
                 {"t_w_ns", c.t_w * 1e9},
                 {"position", c.position},
                 {"protocol", to_string(rp.result.protocol)},
                 {"conversion_efficiency", c.conversion_efficiency}};
  j["yield"] = rp.result.yield;
  j["qber"] = qber_json(rp.result.qber);
  j["skf"] = rp.result.key_fraction;
  j["n_modes"] = rp.result.n_modes;
  j["rate"] = rp.result.rate;
  j["benchmarks"] = {{"cap_pure_loss", rp.benchmarks.capacity},
                     {"cap_extended", rp.benchmarks.extended},
                     {"cap_thermal", rp.benchmarks.thermal},
                     {"rate_direct_nv", rp.benchmarks.direct_nv}};
  j["rate_over_capacity"] =
      rp.benchmarks.capacity > 0 ? rp.result.rate / rp.benchmarks.capacity : 0.0;
  return j;
}

// ---- rate / optimize ------------------------------------------------------

struct RateArgs {
  Common common;
  std::string scheme;
  std::optional<double> km, l0, theta, t_w_ns, position;
  std::optional<std::string> n_star;
  std::string protocol = "auto";
};

int cmd_rate(const RateArgs& a, const std::string& name) {
  const Context ctx = load(a.common);
  const Scheme s = parse_scheme(a.scheme);
  const double L = distance_km(a.km, a.l0, ctx.p);
  OptimizationGrid g = OptimizationGrid::defaults();
  if (a.theta) g.thetas = {*a.theta};
  if (a.t_w_ns) g.t_ws = {*a.t_w_ns * 1e-9};
  if (a.n_star) g.n_stars = {parse_cutoff(*a.n_star)};
  if (a.position) g.positions = {*a.position};
  const Protocol proto = parse_protocol(a.protocol);
  if (uses_time_bin(s) && proto == Protocol::kSixStateAsymAD) {
    throw ConfigError(
        "time-bin measurements cannot run the asymmetric six-state protocol");
  }
  RatePoint rp = optimize_point(s, ctx.p, L, g, ctx.conversion, proto);
  rp.benchmarks = all_benchmarks(ctx.p, L, g.t_ws, ctx.conversion);

  std::ostringstream spec;
  spec << name << ' ' << a.scheme << ' ' << num(L) << ' ' << a.protocol << ' '
       << a.common.telecom << ' ' << g.thetas.size() << ' ' << num(g.thetas[0])
       << ' ' << g.t_ws.size() << ' ' << num(g.t_ws[0]) << ' '
       << g.n_stars.size() << ' ' << g.n_stars[0].to_string() << ' '
       << (a.position ? num(*a.position) : "default");
  json out;
  out["manifest"] = Manifest(name, ctx.p, spec.str()).to_json();
  const json point = point_json(rp, ctx.p);
  for (const auto& [k, v] : point.items()) out[k] = v;
  std::cout << out.dump(2) << '\n';
  if (!rp.has_key) {
    std::cerr << "no secret key at this point\n";
    return kZeroRate;
  }
  return kOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  Common common;
  std::string scheme = "all";
  double from = 0.0, to = 0.0;
  int steps = 0;
  std::string out;
};

int cmd_sweep(const SweepArgs& a) {
  const Context ctx = load(a.common);
  std::vector<Scheme> schemes;
  if (a.scheme == "all") {
    schemes.assign(std::begin(kAllSchemes), std::end(kAllSchemes));
  } else {
    schemes.push_back(parse_scheme(a.scheme));
  }
  SweepSpec spec;
  spec.L_min = a.from;
  spec.L_max = a.to;
  spec.L_steps = a.steps;
  if (a.common.telecom) spec.frequency_conversion = FrequencyConversion{};
  const auto distances = spec.distances();  // validates the range

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw ConfigError("cannot write output file " + a.out);
  }
  std::ostream& os = a.out.empty() ? std::cout : file;

  std::ostringstream sd;
  sd << "sweep " << a.scheme << ' ' << num(a.from) << ' ' << num(a.to) << ' '
     << a.steps << ' ' << a.common.telecom;
  os << Manifest("sweep", ctx.p, sd.str()).line() << '\n';
  os << "L_km,L_over_L0,scheme,theta,n_star,t_w_ns,yield,e_x,e_y,e_z,skf,"
        "n_modes,rate,cap_pure_loss,cap_extended,cap_thermal,rate_direct_nv\n";

  // Benchmarks do not depend on the scheme.
  std::vector<BenchmarkSet> bench;
  for (double L : distances) {
    bench.push_back(all_benchmarks(ctx.p, L, spec.grid.t_ws, ctx.conversion));
  }
  for (Scheme s : schemes) {
    for (std::size_t i = 0; i < distances.size(); ++i) {
      const double L = distances[i];
      const RatePoint rp = optimize_point(s, ctx.p, L, spec.grid, ctx.conversion);
      const auto& r = rp.result;
      const auto& b = bench[i];
      os << num(L) << ',' << num(L / ctx.p.L0) << ',' << to_string(s) << ','
         << num(rp.config.theta) << ',' << rp.config.n_star.to_string() << ','
         << num(rp.config.t_w * 1e9) << ',' << num(r.yield) << ','
         << num(r.qber.e_x) << ',' << num(r.qber.e_y) << ',' << num(r.qber.e_z)
         << ',' << num(r.key_fraction) << ',' << r.n_modes << ','
         << num(r.rate) << ',' << num(b.capacity) << ',' << num(b.extended)
         << ',' << num(b.thermal) << ',' << num(b.direct_nv) << '\n';
    }
  }
  os.flush();
  if (!os) throw ConfigError("failed writing output");
  return kOk;
}

// ---- benchmarks -----------------------------------------------------------

struct BenchArgs {
  Common common;
  double from = 0.0, to = 0.0;
  int steps = 11;
};

int cmd_benchmarks(const BenchArgs& a) {
  const Context ctx = load(a.common);
  SweepSpec spec;
  spec.L_min = a.from;
  spec.L_max = a.to;
  spec.L_steps = a.steps;
  const auto distances = spec.distances();
  std::ostringstream sd;
  sd << "benchmarks " << num(a.from) << ' ' << num(a.to) << ' ' << a.steps
     << ' ' << a.common.telecom;
  std::cout << Manifest("benchmarks", ctx.p, sd.str()).line() << '\n'
            << "L_km,L_over_L0,cap_pure_loss,cap_extended,cap_thermal,"
               "rate_direct_nv\n";
  for (double L : distances) {
    const auto b = all_benchmarks(ctx.p, L, spec.grid.t_ws, ctx.conversion);
    std::cout << num(L) << ',' << num(L / ctx.p.L0) << ',' << num(b.capacity)
              << ',' << num(b.extended) << ',' << num(b.thermal) << ','
              << num(b.direct_nv) << '\n';
  }
  return kOk;
}

// ---- validate -------------------------------------------------------------

struct ValidateArgs {
  std::int64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  int points = 20;
  double eta_bias = 0.0;  // relative error planted in the analytic side
  double z_max = 3.0;
};

int cmd_validate(const ValidateArgs& a) {
  if (a.trials < 10'000) throw ConfigError("trials must be >= 10000");
  if (a.points < 1) throw ConfigError("points must be >= 1");
  const auto p = HardwareParameters::table1();
  std::ostringstream sd;
  sd << "validate " << a.trials << ' ' << a.points << ' ' << num(a.eta_bias);
  std::cout << Manifest("validate", p, sd.str(), a.seed).line() << '\n';

  // Operating points drawn around the default link at short distance, where
  // the yield is large enough for the trial budget.
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int outliers = 0;
  std::printf("point,theta,eta,p_d,z_yield,z_e_z,z_e_xy\n");
  for (int i = 0; i < a.points; ++i) {
    SinglePhotonLink l;
    l.theta = 0.3 + 1.2 * u(rng);
    l.eta = 0.05 + 0.9 * u(rng);
    l.p_d = 0.01 * u(rng);
    l.F_prep = p.F_prep;
    l.lambda_phase = phase_dephasing_parameter(p.delta_phi);
    mc::SinglePhotonOptions opt;
    opt.F_m = p.F_m;
    const auto e = mc::simulate_single_photon(l, a.trials, a.seed * 1000 + i, opt);
    SinglePhotonLink analytic = l;
    analytic.eta = std::min(1.0, l.eta * (1.0 + a.eta_bias));
    const auto q = single_photon_qber(analytic, opt.F_m);
    const double zy = e.yield.z_score(single_photon_yield(analytic));
    const double zz = e.e_z.z_score(q.e_z);
    const double zxy = e.e_xy().z_score(q.e_xy());
    if (std::abs(zy) > a.z_max || std::abs(zz) > a.z_max ||
        std::abs(zxy) > a.z_max) {
      ++outliers;
    }
    std::printf("%d,%.6f,%.6f,%.6g,%.3f,%.3f,%.3f\n", i, l.theta, l.eta, l.p_d,
                zy, zz, zxy);
  }
  const std::int64_t episodes = std::max<std::int64_t>(a.trials, 10'000);
  const auto r = mc::simulate_restart_process(0.5, 0.5, Cutoff(1), episodes,
                                              a.seed + 7);
  const double zr = r.z_score(expected_channel_uses(0.5, 0.5, Cutoff(1)));
  const int allowed = std::max(1, a.points / 20);
  const bool ok = outliers <= allowed && std::abs(zr) <= 4.0;
  std::printf("restart,E[N]=%.6f,se=%.6f,z=%.3f\n", r.value, r.se, zr);
  std::printf("outliers %d of %d (allowed %d): %s\n", outliers, a.points,
              allowed, ok ? "PASS" : "FAIL");
  return ok ? kOk : kValidation;
}

// ---- runtime --------------------------------------------------------------

struct RuntimeArgs {
  Common common;
  std::optional<double> km, l0;
  double hours = 12.0;
  std::optional<std::int64_t> attempts;
  double t_Y = 2e-7;
  double t_e = 0.015;
};

int cmd_runtime(const RuntimeArgs& a) {
  const Context ctx = load(a.common);
  const double L = distance_km(a.km, a.l0, ctx.p);
  CertificationPlan plan;
  plan.n_attempts = a.attempts ? *a.attempts : attempts_for_hours(a.hours);
  plan.t_Y = a.t_Y;
  plan.t_e = a.t_e;
  const RatePoint rp = optimize_point(Scheme::kSinglePhoton, ctx.p, L,
                                      OptimizationGrid::defaults(),
                                      ctx.conversion);
  if (!rp.has_key) throw ConfigError("no key at this distance");
  const auto c = certification_confidence(ctx.p, rp, plan);

  std::ostringstream sd;
  sd << "runtime " << num(L) << ' ' << plan.n_attempts << ' ' << num(a.t_Y)
     << ' ' << num(a.t_e) << ' ' << a.common.telecom;
  std::cout << Manifest("runtime", ctx.p, sd.str()).line() << '\n';
  std::printf("distance_km %.6g\n", L);
  std::printf("attempts %lld\n", static_cast<long long>(plan.n_attempts));
  std::printf("samples_per_basis %lld\n",
              static_cast<long long>(c.samples_per_basis));
  std::printf("yield %.6e\n", rp.result.yield);
  std::printf("qber %.6f %.6f %.6f\n", rp.result.qber.e_x, rp.result.qber.e_y,
              rp.result.qber.e_z);
  std::printf("tail_yield %.4e\n", c.tail_yield);
  std::printf("tail_e_x %.4e\n", c.tail_e_x);
  std::printf("tail_e_y %.4e\n", c.tail_e_y);
  std::printf("tail_e_z %.4e\n", c.tail_e_z);
  std::printf("confidence %.8f\n", c.confidence);
  std::printf("certified_rate %.6e\n", c.certified_rate);
  std::printf("capacity %.6e\n", c.capacity);
  std::printf("capacity_ratio %.4f\n", c.capacity_ratio);
  std::printf("certifiable %s\n", c.certifiable ? "yes" : "no");
  return kOk;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--params", c.params,
                  "parameter file, or 'table1' for the built-in preset");
  sub->add_flag("--telecom", c.telecom,
                "telecom conversion: L0 = 22 km, F_m = 0.98, efficiency 0.3");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NV-centre quantum repeater key-rate calculator"};
  app.set_version_flag("--version", NVREPEATER_VERSION);
  app.require_subcommand(1);

  RateArgs rate;
  auto add_rate = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, rate.common);
    sub->add_option("--scheme", rate.scheme,
                    "single-photon, spads, sisquare or spotl")
        ->required();
    sub->add_option("--distance-km", rate.km, "total distance in km");
    sub->add_option("--distance-l0", rate.l0, "total distance in units of L0");
    sub->add_option("--theta", rate.theta, "fix theta (radians)");
    sub->add_option("--n-star", rate.n_star, "fix the cutoff (integer or inf)");
    sub->add_option("--t-w-ns", rate.t_w_ns, "fix the time window (ns)");
    sub->add_option("--position", rate.position,
                    "repeater position as a fraction of L from Alice");
    sub->add_option("--protocol", rate.protocol,
                    "auto, bb84-asym-oneway, sixstate-sym-ad, sixstate-asym-ad");
    return sub;
  };
  auto* rate_cmd = add_rate("rate", "rate at one distance; free parameters are optimized");
  auto* opt_cmd = add_rate("optimize", "alias of rate");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "optimized rate over a distance range (CSV)");
  add_common(sweep_cmd, sw.common);
  sweep_cmd->add_option("--scheme", sw.scheme, "scheme name or 'all'");
  sweep_cmd->add_option("--from", sw.from, "first distance (km)")->required();
  sweep_cmd->add_option("--to", sw.to, "last distance (km)")->required();
  sweep_cmd->add_option("--steps", sw.steps, "number of distances")->required();
  sweep_cmd->add_option("--out", sw.out, "CSV path (default stdout)");

  BenchArgs bn;
  auto* bench_cmd = app.add_subcommand("benchmarks", "repeaterless benchmarks (CSV)");
  add_common(bench_cmd, bn.common);
  bench_cmd->add_option("--from", bn.from, "first distance (km)");
  bench_cmd->add_option("--to", bn.to, "last distance (km)");
  bench_cmd->add_option("--steps", bn.steps, "number of distances");

  ValidateArgs va;
  auto* val_cmd = app.add_subcommand("validate", "Monte-Carlo check of the analytic model");
  val_cmd->add_option("--trials", va.trials, "trials per operating point");
  val_cmd->add_option("--seed", va.seed, "random seed");
  val_cmd->add_option("--points", va.points, "number of operating points");
  val_cmd->add_option("--inject-eta-bias", va.eta_bias,
                      "relative bias planted in the analytic eta (negative control)");

  RuntimeArgs rt;
  auto* run_cmd = app.add_subcommand("runtime", "certification plan for the single-photon scheme");
  add_common(run_cmd, rt.common);
  run_cmd->add_option("--distance-km", rt.km, "total distance in km");
  run_cmd->add_option("--distance-l0", rt.l0, "total distance in units of L0 (default 17)");
  run_cmd->add_option("--hours", rt.hours, "measurement time");
  run_cmd->add_option("--attempts", rt.attempts, "attempt count (overrides --hours)");
  run_cmd->add_option("--t-y", rt.t_Y, "yield margin");
  run_cmd->add_option("--t-e", rt.t_e, "QBER margin per basis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    if (*rate_cmd) code = cmd_rate(rate, "rate");
    else if (*opt_cmd) code = cmd_rate(rate, "optimize");
    else if (*sweep_cmd) code = cmd_sweep(sw);
    else if (*bench_cmd) code = cmd_benchmarks(bn);
    else if (*val_cmd) code = cmd_validate(va);
    else if (*run_cmd) code = cmd_runtime(rt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  std::cerr << "wall time " << num(wall) << " s\n";
  return code;
}
