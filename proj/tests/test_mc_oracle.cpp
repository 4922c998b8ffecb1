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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nvrepeater/composite_schemes.hpp"
#include "nvrepeater/mc_oracle.hpp"

namespace nvrepeater {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Sampling, GeometricMean) {
  mc::CounterRng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += double(mc::sample_geometric(rng, 0.2));
  // Mean 1/p, variance (1 - p)/p^2.
  EXPECT_NEAR(sum / n, 5.0, 4.0 * std::sqrt(20.0 / n));
  EXPECT_EQ(mc::sample_geometric(rng, 1.0), 1);
}

TEST(Sampling, VonMisesMatchesDephasing) {
  // <cos phi> = I1/I0, so the induced dephasing is (1 + <cos phi>)/2.
  mc::CounterRng rng(2);
  const double dphi = 14.3 * kPi / 180;
  double sum = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    sum += std::cos(mc::sample_von_mises(rng, 1.0 / (dphi * dphi)));
  }
  EXPECT_NEAR(0.5 * (1 + sum / n), phase_dephasing_parameter(dphi), 2e-4);
}

TEST(Sampling, CounterRngIsReproducible) {
  mc::CounterRng a(99), b(99), c(100);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
}

TEST(SinglePhotonMc, OnlyDarkCountsAtHalfPi) {
  SinglePhotonLink l;
  l.theta = kPi / 2;
  l.eta = 0.5;
  l.p_d = 0.01;
  const auto e = mc::simulate_single_photon(l, 1000000, 3);
  EXPECT_LT(std::abs(e.yield.z_score(2 * l.p_d * (1 - l.p_d))), 4.0);
}

TEST(SinglePhotonMc, PerfectLinkYield) {
  SinglePhotonLink l;
  l.theta = kPi / 4;
  l.eta = 1.0;
  const auto e = mc::simulate_single_photon(l, 1000000, 4);
  EXPECT_LT(std::abs(e.yield.z_score(0.75)), 4.0);
  EXPECT_NEAR(e.yield.value, 0.75, 2e-3);
}

TEST(SinglePhotonMc, Deterministic) {
  SinglePhotonLink l;
  l.theta = 1.1;
  l.eta = 0.3;
  l.p_d = 1e-3;
  const auto a = mc::simulate_single_photon(l, 100000, 5);
  const auto b = mc::simulate_single_photon(l, 100000, 5);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.e_z.value, b.e_z.value);
  EXPECT_EQ(a.e_x.value, b.e_x.value);
}

TEST(SinglePhotonMc, VonMisesPhaseMatchesAnalyticDephasing) {
  SinglePhotonLink l;
  l.theta = 1.2;
  l.eta = 0.6;
  l.F_prep = 0.99;
  const double dphi = 25.0 * kPi / 180;
  l.lambda_phase = phase_dephasing_parameter(dphi);
  mc::SinglePhotonOptions opt;
  opt.delta_phi = dphi;
  const auto e = mc::simulate_single_photon(l, 2000000, 6, opt);
  const auto q = single_photon_qber(l, 1.0);
  EXPECT_LT(std::abs(e.e_x.z_score(q.e_x)), 4.0);
  EXPECT_LT(std::abs(e.e_y.z_score(q.e_y)), 4.0);
  EXPECT_LT(std::abs(e.e_z.z_score(q.e_z)), 4.0);
}

TEST(SinglePhotonMc, TwentyRandomPointsAgreeWithAnalytic) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int outliers = 0;
  for (int point = 0; point < 20; ++point) {
    SinglePhotonLink l;
    l.theta = 0.3 + 1.2 * u(rng);
    l.eta = 0.05 + 0.95 * u(rng);
    l.p_d = 0.01 * u(rng);
    l.F_prep = 0.9 + 0.1 * u(rng);
    l.lambda_phase = 0.9 + 0.1 * u(rng);
    const double F_m = 0.9 + 0.1 * u(rng);
    mc::SinglePhotonOptions opt;
    opt.F_m = F_m;
    const auto e = mc::simulate_single_photon(l, 10000000, 1000 + point, opt);
    const auto q = single_photon_qber(l, F_m);
    const double zy = e.yield.z_score(single_photon_yield(l));
    const double zz = e.e_z.z_score(q.e_z);
    const double zxy = e.e_xy().z_score(q.e_xy());
    const bool out = std::abs(zy) > 3 || std::abs(zz) > 3 || std::abs(zxy) > 3;
    if (out) ++outliers;
    RecordProperty("point_" + std::to_string(point),
                   std::to_string(zy) + " " + std::to_string(zz) + " " +
                       std::to_string(zxy));
  }
  EXPECT_LE(outliers, 1);
}

TEST(RestartMc, MatchesExpectedChannelUses) {
  struct Case {
    double p_A, p_B;
    Cutoff n;
  };
  const Case cases[] = {{0.5, 0.5, Cutoff(1)},
                        {0.3, 0.05, Cutoff(12)},
                        {0.2, 0.1, Cutoff::infinite()}};
  std::uint64_t seed = 11;
  for (const auto& c : cases) {
    const auto e = mc::simulate_restart_process(c.p_A, c.p_B, c.n, 10000000,
                                                seed++);
    EXPECT_LT(std::abs(e.z_score(expected_channel_uses(c.p_A, c.p_B, c.n))),
              4.0)
        << c.p_A << " " << c.p_B << " " << c.n.to_string();
  }
  EXPECT_NEAR(mc::simulate_restart_process(0.5, 0.5, Cutoff(1), 10000000, 20)
                  .value,
              6.0, 0.01);
  const auto one = mc::simulate_restart_process(1.0, 1.0, Cutoff(3), 10000, 21);
  EXPECT_EQ(one.value, 2.0);
  EXPECT_EQ(one.se, 0.0);
}

}  // namespace
}  // namespace nvrepeater
