// Copyright 2026 The sfc-nfp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "nfp/queueing.hpp"
#include "oracles.hpp"

namespace nfp {
namespace {

constexpr double kTight = 1e-12;

void expect_rel(double got, double want, double tol, const char* what = "") {
  EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << what << ": got " << got << " want " << want;
}

TEST(Utilization, Examples) {
  EXPECT_DOUBLE_EQ(utilization({1, 2, 1}), 0.5);
  EXPECT_DOUBLE_EQ(utilization({1.5, 1, 2}), 0.75);
  EXPECT_THROW(utilization({2, 1, 2}), UnstableError);
  EXPECT_THROW(utilization({0, 1, 1}), std::invalid_argument);
  EXPECT_THROW(utilization({1, 0, 1}), std::invalid_argument);
  EXPECT_THROW(utilization({1, 1, 0}), std::invalid_argument);
}

TEST(Mm1, Examples) {
  const MmcParams p{1, 2, 1};
  EXPECT_DOUBLE_EQ(p0(p), 0.5);
  EXPECT_DOUBLE_EQ(p_n(p, 0), p0(p));
  EXPECT_DOUBLE_EQ(p_n(p, 3), 0.0625);
  EXPECT_DOUBLE_EQ(delay_probability(p), 0.5);
  EXPECT_DOUBLE_EQ(mean_queue_length(p), 0.5);
  EXPECT_DOUBLE_EQ(mean_wait(p), 0.5);
}

// Hand evaluation for lambda=1.5, mu=1, c=2 (c*rho = 1.5, rho = 0.75):
//   sum_{n<2} 1.5^n/n! = 2.5, 1.5^2/2! = 1.125, tail = 1.125/0.25 = 4.5
//   p0 = 1/7, Pi_W = 1.125/(0.25*2.5 + 1.125) = 9/14, Lq = 3*Pi_W, W = 2*Pi_W.
TEST(Mm2, Examples) {
  const MmcParams p{1.5, 1, 2};
  expect_rel(p0(p), 1.0 / 7.0, kTight, "p0");
  expect_rel(delay_probability(p), 9.0 / 14.0, kTight, "pi_w");
  expect_rel(mean_queue_length(p), 27.0 / 14.0, kTight, "lq");
  expect_rel(mean_wait(p), 18.0 / 14.0, kTight, "w");
  EXPECT_NEAR(delay_probability(p), 0.642857, 1e-6);
  EXPECT_NEAR(mean_queue_length(p), 1.928571, 1e-6);
  EXPECT_NEAR(mean_wait(p), 1.285714, 1e-6);

  const auto bd = testing::solve_birth_death(1.5, 1, 2);
  expect_rel(p0(p), static_cast<double>(bd.p0), 1e-10, "p0 oracle");
  expect_rel(delay_probability(p), static_cast<double>(bd.delay_probability), 1e-10, "pi_w oracle");
}

TEST(Limits, LightLoad) {
  for (int c : {1, 2, 8}) {
    const MmcParams p{1e-12, 1, c};
    EXPECT_NEAR(p0(p), 1.0, 1e-11);
    EXPECT_NEAR(mean_queue_length(p), 0.0, 1e-11);
    EXPECT_NEAR(mean_wait(p), 0.0, 1e-11);
  }
}

TEST(Limits, ManyServersRarelyDelay) {
  EXPECT_LT(delay_probability({1, 1, 64}), 1e-6);
}

TEST(Limits, HugeServerCountsStayFinite) {
  for (int c : {200, 1000, 10000}) {
    const MmcParams p{0.9 * c, 1, c};
    const auto m = metrics(p);
    EXPECT_TRUE(std::isfinite(m.p0));
    EXPECT_GE(m.p0, 0.0);
    EXPECT_GT(m.delay_probability, 0.0);
    EXPECT_LT(m.delay_probability, 1.0);
    EXPECT_TRUE(std::isfinite(m.mean_wait));
  }
}

std::vector<MmcParams> grid(std::uint64_t seed, int count, int max_c) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rho(0.05, 0.95), mu(0.1, 10.0);
  std::uniform_int_distribution<int> servers(1, max_c);
  std::vector<MmcParams> out;
  for (int i = 0; i < count; ++i) {
    const int c = servers(rng);
    const double m = mu(rng);
    out.push_back({rho(rng) * c * m, m, c});
  }
  return out;
}

TEST(Mm1, ClosedFormsOnRandomDraws) {
  for (auto p : grid(1, 100, 1)) {
    const double rho = p.arrival_rate / p.service_rate;
    expect_rel(p0(p), 1 - rho, kTight, "p0");
    expect_rel(delay_probability(p), rho, kTight, "pi_w");
    expect_rel(mean_queue_length(p), rho * rho / (1 - rho), kTight, "lq");
    expect_rel(mean_wait(p), rho / (p.service_rate - p.arrival_rate), kTight, "w");
  }
}

TEST(Mmc, MatchesBirthDeathOracle) {
  for (auto p : grid(2, 20, 16)) {
    const auto bd = testing::solve_birth_death(p.arrival_rate, p.service_rate, p.servers);
    expect_rel(p0(p), static_cast<double>(bd.p0), 1e-8, "p0");
    expect_rel(delay_probability(p), static_cast<double>(bd.delay_probability), 1e-8, "pi_w");
    expect_rel(mean_queue_length(p), static_cast<double>(bd.mean_queue_length), 1e-8, "lq");
    expect_rel(mean_wait(p), static_cast<double>(bd.mean_wait), 1e-8, "w");
  }
}

TEST(Mmc, WaitFormsAgree) {
  for (auto p : grid(3, 200, 64)) {
    const double rate = p.servers * p.service_rate;
    const double rho = utilization(p);
    const double by_delay = delay_probability(p) / (1 - rho) / rate;
    const double by_queue = delay_probability(p) / rate + mean_queue_length(p) / rate;
    expect_rel(by_delay, by_queue, kTight, "wait forms");
    EXPECT_EQ(mean_wait(p), by_delay);
  }
}

TEST(Mmc, DetailedBalance) {
  for (auto p : grid(4, 10, 32)) {
    double prev = p_n(p, 0);
    for (std::int64_t n = 1; n <= 10000; ++n) {
      const double cur = p_n(p, n);
      const double lhs = p.arrival_rate * prev;
      const double rhs = std::min<double>(static_cast<double>(n), p.servers) * p.service_rate * cur;
      const double scale = std::max(std::abs(lhs), std::abs(rhs));
      if (scale > 1e-290) {
        ASSERT_LE(std::abs(lhs - rhs), 1e-10 * scale) << "n=" << n;
      } else {
        ASSERT_LE(std::abs(lhs - rhs), 1e-300) << "n=" << n;
      }
      prev = cur;
    }
  }
}

TEST(Mmc, Normalization) {
  for (auto p : grid(5, 10, 16)) {
    if (utilization(p) > 0.99) continue;
    long double sum = 0;
    for (std::int64_t n = 0; n <= 10000; ++n) sum += p_n(p, n);
    EXPECT_NEAR(static_cast<double>(sum), 1.0, 1e-12);
  }
}

TEST(Mmc, MonotoneInLoadAndServers) {
  for (int c = 1; c <= 8; ++c) {
    double last_pw = -1, last_w = -1;
    for (double rho = 0.05; rho < 0.96; rho += 0.05) {
      const MmcParams p{rho * c, 1.0, c};
      EXPECT_GT(delay_probability(p), last_pw);
      EXPECT_GT(mean_wait(p), last_w);
      last_pw = delay_probability(p);
      last_w = mean_wait(p);
    }
  }
  for (double lambda : {0.5, 1.0, 3.0}) {
    double last_pw = 2, last_w = std::numeric_limits<double>::infinity();
    for (int c = 4; c <= 20; ++c) {
      const MmcParams p{lambda, 1.0, c};
      EXPECT_LT(delay_probability(p), last_pw);
      EXPECT_LT(mean_wait(p), last_w);
      last_pw = delay_probability(p);
      last_w = mean_wait(p);
    }
  }
}

TEST(Mmc, MetricsCsvRow) {
  const MmcParams p{1, 2, 1};
  EXPECT_EQ(metrics_csv_row(p, metrics(p)), "1,2,1,0.5,0.5,0.5,0.5,0.5\n");
  EXPECT_DOUBLE_EQ(metrics(p).mean_sojourn, 1.0);
}

VnfInstance V(const char* id, double mu, int c) { return make_vnf(id, VnfKind::Ids, mu, c); }

TEST(ChainLatency, Examples) {
  EXPECT_DOUBLE_EQ(chain_latency({V("a", 2, 1)}, 1.0).total, 1.0);

  const std::vector<VnfInstance> twins = {V("a", 2, 1), V("b", 2, 1)};
  const StagePlan one{{{"a", "b"}}, 0.0};
  EXPECT_DOUBLE_EQ(chain_latency(one, twins, 1.0).total, 1.0);

  const StagePlan degenerate{{{"a"}, {"b"}}, 0.0};
  EXPECT_DOUBLE_EQ(chain_latency(degenerate, twins, 1.0).total, chain_latency(twins, 1.0).total);
}

TEST(ChainLatency, OverheadPerStage) {
  const std::vector<VnfInstance> chain = {V("a", 2, 1), V("b", 2, 1), V("c", 2, 1)};
  const StagePlan plan{{{"a"}, {"b", "c"}}, 0.0};
  const auto base = chain_latency(plan, chain, 1.0).total;
  EXPECT_DOUBLE_EQ(chain_latency(plan, chain, 1.0, {0.25, false}).total, base + 0.5);
}

TEST(ChainLatency, UnstableStationIsNamed) {
  try {
    chain_latency({V("a", 2, 1), V("slow", 0.5, 1)}, 1.0);
    FAIL();
  } catch (const UnstableError& e) {
    EXPECT_EQ(e.station(), "slow");
    EXPECT_NE(std::string(e.what()).find("slow"), std::string::npos);
  }
}

TEST(ChainLatency, ThinningLowersDownstreamLoad) {
  auto fw = make_vnf("fw", VnfKind::Firewall, 1.0, 1);
  fw.drop_probability = 0.5;
  const std::vector<VnfInstance> chain = {fw, V("ids", 1.0, 1)};
  const auto full = chain_latency(chain, 0.8);
  const auto thin = chain_latency(chain, 0.8, {0.0, true});
  EXPECT_DOUBLE_EQ(thin.per_stage[0].latency, full.per_stage[0].latency);
  EXPECT_DOUBLE_EQ(thin.per_stage[1].latency, chain_latency({V("x", 1.0, 1)}, 0.4).total);
}

TEST(ChainLatency, StagedNeverExceedsSerial) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mu(1.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<VnfInstance> chain;
    for (int i = 0; i < 5; ++i) {
      chain.push_back(make_vnf("v" + std::to_string(i), kAllVnfKinds[rng() % 8], mu(rng),
                               1 + static_cast<int>(rng() % 3)));
    }
    const auto plan = build_stage_plan(chain);
    EXPECT_LE(chain_latency(plan, chain, 0.9).total, chain_latency(chain, 0.9).total + 1e-12);
  }
}

TEST(EstimateCsv, RoundTrip) {
  const std::vector<VnfInstance> chain = {V("a", 2, 1), V("b", 3, 2), V("c", 2, 1)};
  const StagePlan plan{{{"a"}, {"b", "c"}}, 0.0};
  for (const auto& est : {chain_latency(chain, 1.0), chain_latency(plan, chain, 1.0, {0.1, false})}) {
    const auto text = estimate_to_csv(est);
    const auto back = estimate_from_csv(text);
    EXPECT_EQ(back, est);
    EXPECT_EQ(estimate_to_csv(back), text);
  }
  EXPECT_THROW(estimate_from_csv("mode,stage,members,latency\nserial,1,a,1\n"), ParseError);
}

}  // namespace
}  // namespace nfp
