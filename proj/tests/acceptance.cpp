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

// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nvrepeater/nvrepeater.hpp"
#include "test_support.hpp"

namespace {

using namespace nvrepeater;

int g_failures = 0;

void report(int id, bool ok, const std::string& detail, double seconds) {
  std::printf("criterion %d: %s  %s  [%.1f s]\n", id, ok ? "PASS" : "FAIL",
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string mark(bool ok) { return ok ? "ok" : "NO"; }

bool within_rel(double v, double ref, double rel) {
  return std::abs(v - ref) <= rel * std::abs(ref);
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

const HardwareParameters kTable1 = HardwareParameters::table1();

RatePoint single_photon_17() {
  static const RatePoint rp = optimize_point(
      Scheme::kSinglePhoton, kTable1, 17 * kTable1.L0, OptimizationGrid::defaults());
  return rp;
}

void criterion1() {
  Timer t;
  const double c = pure_loss_capacity(std::exp(-17.0));
  report(1, c >= 5.95e-8 && c <= 5.97e-8, fmt("capacity(e^-17) = %.5e", c),
         t.seconds());
}

void criterion2() {
  Timer t;
  const auto rp = single_photon_17();
  const double Y = rp.result.yield;
  const double ez = rp.result.qber.e_z;
  const double exy = rp.result.qber.e_xy();
  const bool y_ok = within_rel(Y, 5.6e-6, 0.15);
  const bool z_ok = std::abs(ez - 0.171) <= 0.01;
  const bool xy_ok = std::abs(exy - 0.141) <= 0.01;
  report(2, rp.has_key && y_ok && z_ok && xy_ok,
         fmt("Y = %.4e ", Y) + mark(y_ok) + fmt(", e_z = %.4f ", ez) +
             mark(z_ok) + fmt(", e_xy = %.4f ", exy) + mark(xy_ok) +
             fmt(" (theta = %.4f", rp.config.theta) +
             fmt(", t_w = %.0f ns)", rp.config.t_w * 1e9),
         t.seconds());
}

void criterion3() {
  Timer t;
  const auto rp = single_photon_17();
  const double ratio = rp.result.rate / pure_loss_capacity(std::exp(-17.0));
  report(3, ratio >= 6.0 && ratio <= 8.0,
         fmt("R = %.4e", rp.result.rate) + fmt(", R / capacity = %.3f", ratio),
         t.seconds());
}

void criterion4() {
  Timer t;
  const auto c = certification_confidence(kTable1, single_photon_17(),
                                          CertificationPlan{});
  const double f = 1.2;
  const bool ty = c.tail_yield <= f * 9.2e-10;
  const bool tz = c.tail_e_z <= f * 9.0e-5;
  const bool tx = c.tail_e_x <= f * 2.7e-5 && c.tail_e_y <= f * 2.7e-5;
  const bool conf = c.confidence >= 1.0 - 1.5e-4;
  const bool rate = within_rel(c.certified_rate, 1.97e-7, 0.10);
  const bool ratio = within_rel(c.capacity_ratio, 3.29, 0.05);
  report(4, ty && tz && tx && conf && rate && ratio,
         fmt("tail_Y = %.3e ", c.tail_yield) + mark(ty) +
             fmt(", tail_z = %.3e ", c.tail_e_z) + mark(tz) +
             fmt(", tail_x = %.3e ", c.tail_e_x) +
             fmt("tail_y = %.3e ", c.tail_e_y) + mark(tx) +
             fmt(", 1 - confidence = %.4e ", 1.0 - c.confidence) + mark(conf) +
             fmt(", certified R = %.4e ", c.certified_rate) + mark(rate) +
             fmt(", ratio = %.3f ", c.capacity_ratio) + mark(ratio),
         t.seconds());
}

struct Ordering {
  double sp, spads, sisquare, spotl;
};

Ordering ordering_at_12_5() {
  static const Ordering o = [] {
    const double L = 12.5 * kTable1.L0;
    const auto g = OptimizationGrid::defaults();
    return Ordering{
        optimize_point(Scheme::kSinglePhoton, kTable1, L, g).result.rate,
        optimize_point(Scheme::kSPADS, kTable1, L, g).result.rate,
        optimize_point(Scheme::kSiSQuaRe, kTable1, L, g).result.rate,
        optimize_point(Scheme::kSPOTL, kTable1, L, g).result.rate};
  }();
  return o;
}

void criterion5() {
  Timer t;
  const auto o = ordering_at_12_5();
  const bool a = o.sp > o.spads && o.spads > o.sisquare &&
                 o.sisquare >= o.spotl && o.spotl > 0.0;

  // (b) SPADS against direct transmission along a distance sweep.
  const auto g = OptimizationGrid::defaults();
  std::vector<double> Ls;
  for (int i = 1; i <= 60; ++i) Ls.push_back(0.5 * i * kTable1.L0);
  std::vector<double> direct, spads;
  for (double L : Ls) {
    direct.push_back(optimize_direct_nv(kTable1, L, g.t_ws).rate);
  }
  std::size_t peak = 0;
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    if (direct[i] > direct[peak]) peak = i;
  }
  bool b = true;
  bool hit_zero = false;
  bool spads_after_zero = false;
  double last_behind = 0.0;  // largest L with SPADS <= direct-NV
  double direct_zero = 0.0;
  for (std::size_t i = peak; i < Ls.size(); ++i) {
    const double rs = optimize_point(Scheme::kSPADS, kTable1, Ls[i], g).result.rate;
    if (direct[i] > 0.0) {
      b = b && rs > direct[i];
      if (rs <= direct[i]) last_behind = Ls[i];
    } else {
      direct_zero = Ls[i];
      if (!hit_zero) spads_after_zero = rs > 0.0;
      hit_zero = true;
      break;
    }
  }
  b = b && hit_zero && spads_after_zero;

  // (c) telecom preset.
  const FrequencyConversion fc;
  const auto tp = fc.apply(kTable1);
  const bool spotl550 =
      optimize_point(Scheme::kSPOTL, tp, 550.0, g, fc.efficiency).result.rate > 0.0;
  bool above = false;
  for (double L = 50.0; L <= 600.0 && !above; L += 50.0) {
    const double r =
        optimize_point(Scheme::kSinglePhoton, tp, L, g, fc.efficiency).result.rate;
    above = r > pure_loss_capacity(fiber_transmissivity(L, tp.L0));
  }
  const bool c = spotl550 && above;
  report(5, a && b && c,
         "(a) " + mark(a) + fmt(" sp = %.3e", o.sp) +
             fmt(" spads = %.3e", o.spads) + fmt(" sisquare = %.3e", o.sisquare) +
             fmt(" spotl = %.3e", o.spotl) + "; (b) " + mark(b) +
             fmt(" direct-NV peak at %.1f L0", Ls[peak] / kTable1.L0) +
             fmt(", SPADS behind up to %.1f L0", last_behind / kTable1.L0) +
             fmt(", direct-NV zero at %.1f L0", direct_zero / kTable1.L0) +
             ", SPADS positive there " + mark(spads_after_zero) +
             "; (c) " + mark(c) + " spotl@550km " + mark(spotl550) +
             ", single-photon above telecom capacity " + mark(above),
         t.seconds());
}

void criterion6() {
  Timer t;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  bool cptp = true;
  for (int i = 0; i < 200; ++i) {
    const auto rho = testing::random_state(2, rng);
    for (const QuantumChannel& ch :
         std::vector<QuantumChannel>{Dephasing{0.5 + 0.5 * u(rng)},
                                     Depolarizing{u(rng), 2},
                                     AmplitudeDamping{u(rng)}}) {
      const auto out = apply_channel(rho, ch, {i % 2});
      cptp = cptp && std::abs(out.trace() - 1.0) < tolerance::kTrace &&
             hermiticity_error(out) < tolerance::kHermitian &&
             min_eigenvalue(out) > -tolerance::kEigenvalue;
    }
  }

  const auto povm = bell_povm();
  Matrix sum = Matrix::Zero(4, 4);
  for (const auto& m : povm) sum += m.adjoint() * m;
  const bool complete = (sum - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12;

  bool psum = true;
  for (double eta = 0.0; eta <= 1.0; eta += 0.05) {
    for (double th = 0.02; th <= std::numbers::pi / 2; th += 0.02) {
      SinglePhotonLink l;
      l.eta = eta;
      l.theta = th;
      const auto p = outcome_probabilities(l);
      psum = psum && std::abs(p.p0 + p.p1 + p.p2 - 1.0) < 1e-12;
    }
  }

  int outliers = 0;
  for (int point = 0; point < 20; ++point) {
    SinglePhotonLink l;
    l.theta = 0.3 + 1.2 * u(rng);
    l.eta = 0.05 + 0.95 * u(rng);
    l.p_d = 0.01 * u(rng);
    l.F_prep = 0.9 + 0.1 * u(rng);
    l.lambda_phase = 0.9 + 0.1 * u(rng);
    mc::SinglePhotonOptions opt;
    opt.F_m = 0.9 + 0.1 * u(rng);
    const auto e = mc::simulate_single_photon(l, 10'000'000, 500 + point, opt);
    const auto q = single_photon_qber(l, opt.F_m);
    if (std::abs(e.yield.z_score(single_photon_yield(l))) > 3 ||
        std::abs(e.e_z.z_score(q.e_z)) > 3 ||
        std::abs(e.e_xy().z_score(q.e_xy())) > 3) {
      ++outliers;
    }
  }
  const bool mc_ok = outliers <= 1;

  const auto restart = mc::simulate_restart_process(0.3, 0.05, Cutoff(12),
                                                    10'000'000, 77);
  const bool restart_ok =
      std::abs(restart.z_score(expected_channel_uses(0.3, 0.05, Cutoff(12)))) < 4;

  const bool bb84 = bb84_oneway({0.1099, 0.1099, 0.1099}) > 0.0 &&
                    bb84_oneway({0.1101, 0.1101, 0.1101}) == 0.0;
  const bool ad = sixstate_ad({0, 0, 0}, ExtractionBasis::kZ) == 1.0 &&
                  sixstate_ad({0, 0, 0}, ExtractionBasis::kXY) == 1.0;

  bool order = true;
  for (double s = 0.0; s <= 40.0; s += 0.5) {
    const auto b = repeaterless_benchmarks(kTable1, s * kTable1.L0);
    order = order && b.thermal <= b.extended && b.extended <= b.capacity;
  }

  const bool ok = cptp && complete && psum && mc_ok && restart_ok && bb84 &&
                  ad && order;
  report(6, ok,
         "cptp " + mark(cptp) + ", povm " + mark(complete) + ", p-sum " +
             mark(psum) + ", mc " + mark(mc_ok) + " (" +
             std::to_string(outliers) + "/20 beyond 3 sigma), restart " +
             mark(restart_ok) + fmt(" (z = %.2f)", restart.z_score(expected_channel_uses(0.3, 0.05, Cutoff(12)))) +
             ", bb84 threshold " + mark(bb84) + ", ad unity " + mark(ad) +
             ", benchmark order " + mark(order),
         t.seconds());
}

void criterion7() {
  Timer t;
  // Absolute SiSQuaRe values are not checked; only these properties.
  const auto o = ordering_at_12_5();
  const bool order = o.spads > o.sisquare && o.sisquare >= o.spotl;

  auto p = kTable1;
  p.a0 = p.b0 = p.a1 = p.b1 = 0.0;
  p.F_m = p.F_g = p.F_prep = 1.0;
  p.d = 0.0;
  auto c = SchemeConfig::defaults(Scheme::kSiSQuaRe);
  c.n_star = Cutoff(1);
  const auto r = sisquare_rates(p, c, 5 * p.L0);
  const bool zero = std::max({r.qber.e_x, r.qber.e_y, r.qber.e_z}) < 1e-12;

  bool mono = true;
  const auto m = build_memory_model(kTable1, c, 12.5 * kTable1.L0,
                                    Detection::kSixState);
  const auto cuts = OptimizationGrid::default_n_stars();
  auto prev = evaluate(m, cuts.front());
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const auto now = evaluate(m, cuts[i]);
    mono = mono && now.yield >= prev.yield && now.qber.e_z >= prev.qber.e_z &&
           now.qber.e_x >= prev.qber.e_x;
    prev = now;
  }
  mono = mono && evaluate(m, Cutoff(1)).yield < evaluate(m, Cutoff::infinite()).yield;

  report(7, order && zero && mono,
         "ordering spads > sisquare >= spotl " + mark(order) +
             ", noiseless zero QBER " + mark(zero) + ", cutoff monotone " +
             mark(mono),
         t.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  std::printf("%d of 7 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
