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

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "nfp/dependency.hpp"
#include "nfp/policy.hpp"
#include "hazard_table.hpp"
#include "oracles.hpp"

namespace nfp {
namespace {

using testing::kHazards;
using testing::kParallel;
using testing::label;

VnfInstance V(const char* id, VnfKind k) { return make_vnf(id, k, 1.0, 2); }

TEST(Profiles, BuiltIns) {
  using A = Access;
  EXPECT_EQ(profile_for(VnfKind::Probe), (AccessProfile{A::Read, A::None, false, false}));
  EXPECT_EQ(profile_for(VnfKind::Nat), (AccessProfile{A::ReadWrite, A::None, false, false}));
  EXPECT_EQ(profile_for(VnfKind::Firewall), (AccessProfile{A::ReadWrite, A::None, true, false}));
  EXPECT_EQ(profile_for(VnfKind::Proxy), (AccessProfile{A::Read, A::Read, false, false}));
  EXPECT_EQ(profile_for(VnfKind::Ids), (AccessProfile{A::Read, A::Read, false, false}));
  EXPECT_EQ(profile_for(VnfKind::Ips), (AccessProfile{A::ReadWrite, A::Read, true, false}));
  EXPECT_EQ(profile_for(VnfKind::LoadBalancer), (AccessProfile{A::ReadWrite, A::Read, false, false}));
  EXPECT_EQ(profile_for(VnfKind::Vpn), (AccessProfile{A::ReadWrite, A::Write, false, true}));
  for (auto k : kAllVnfKinds) EXPECT_TRUE(profile_for(k).valid());
}

TEST(Profiles, InstanceValidation) {
  EXPECT_THROW(make_vnf("x", VnfKind::Nat, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(make_vnf("x", VnfKind::Nat, 1.0, 0), std::invalid_argument);
}

TEST(Hazards, Examples) {
  EXPECT_EQ(label(classify_pair(V("p", VnfKind::Probe), V("n", VnfKind::Nat))), "WAR/NONE");
  EXPECT_EQ(label(classify_pair(V("i", VnfKind::Ids), V("f", VnfKind::Firewall))), "WAR/NONE");
  EXPECT_EQ(label(classify_pair(V("l", VnfKind::LoadBalancer), V("i", VnfKind::Ips))), "WAW/RAR");
}

TEST(Hazards, TruthTable) {
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      const auto f = V("f", kAllVnfKinds[i]), g = V("g", kAllVnfKinds[j]);
      EXPECT_EQ(label(classify_pair(f, g)), kHazards[i][j])
          << to_string(kAllVnfKinds[i]) << "," << to_string(kAllVnfKinds[j]);
      EXPECT_EQ(parallelizable(f, g), kParallel[i][j] == '1')
          << to_string(kAllVnfKinds[i]) << "," << to_string(kAllVnfKinds[j]);
    }
  }
}

HazardKind swap(HazardKind k) {
  if (k == HazardKind::WAR) return HazardKind::RAW;
  if (k == HazardKind::RAW) return HazardKind::WAR;
  return k;
}

TEST(Hazards, SwappingArgumentsExchangesWarAndRaw) {
  for (auto a : kAllVnfKinds) {
    for (auto b : kAllVnfKinds) {
      const auto fg = classify_pair(V("f", a), V("g", b));
      const auto gf = classify_pair(V("g", b), V("f", a));
      for (int r = 0; r < 2; ++r) EXPECT_EQ(gf[r].kind, swap(fg[r].kind));
    }
  }
}

TEST(Hazards, NonDroppersNeverRunParallelAcrossRaw) {
  for (auto a : kAllVnfKinds) {
    for (auto b : kAllVnfKinds) {
      const auto f = V("f", a), g = V("g", b);
      if (f.profile.can_drop || !parallelizable(f, g)) continue;
      for (const auto& h : classify_pair(f, g)) {
        EXPECT_NE(h.kind, HazardKind::RAW);
        EXPECT_NE(h.kind, HazardKind::WAW);
      }
    }
  }
}

TEST(Parallelizable, Examples) {
  EXPECT_TRUE(parallelizable(V("i", VnfKind::Ids), V("f", VnfKind::Firewall)));
  EXPECT_FALSE(parallelizable(V("l", VnfKind::LoadBalancer), V("i", VnfKind::Ips)));
  EXPECT_TRUE(parallelizable(V("a", VnfKind::Probe), V("b", VnfKind::Probe)));
}

RuleBook tenant_rules() {
  return rule_book_from(compile_to_flow_table(parse_policy(
      "ids alert any EXT any -> 10.1.0.0/24 any\n"
      "firewall drop tcp EXT any -> 10.1.0.0/24 80\n")));
}

TEST(Parallelizable, OverlappingDropVetoes) {
  const auto rules = tenant_rules();
  const auto fw = V("fw", VnfKind::Firewall), ids = V("ids", VnfKind::Ids);
  EXPECT_TRUE(parallelizable(fw, ids));
  EXPECT_FALSE(parallelizable(fw, ids, rules));
  // The veto needs the dropper first.
  EXPECT_TRUE(parallelizable(ids, fw, rules));

  RuleBook disjoint = rule_book_from(compile_to_flow_table(parse_policy(
      "ids alert any EXT any -> 192.168.1.0/24 any\n"
      "firewall drop tcp EXT any -> 10.1.0.0/24 80\n")));
  EXPECT_TRUE(parallelizable(fw, ids, disjoint));
}

TEST(ActionRule, Pairs) {
  const RuleAction fwd = Forward{"next"}, mod = FlowMod{{{HeaderField::Dst, 1}}};
  EXPECT_EQ(nfp_action_rule(fwd, fwd), Schedule::Parallel);
  EXPECT_EQ(nfp_action_rule(fwd, mod), Schedule::Parallel);
  EXPECT_EQ(nfp_action_rule(mod, fwd), Schedule::Serial);
  EXPECT_EQ(nfp_action_rule(mod, mod), Schedule::Serial);
  EXPECT_EQ(nfp_action_rule(Mirror{"ids"}, Drop{}), Schedule::Parallel);
  EXPECT_EQ(nfp_action_rule(Encrypt{}, Mirror{"ids"}), Schedule::Serial);
}

TEST(ActionRule, FlowTables) {
  const auto rules = tenant_rules();
  const auto& ids = rules.at("ids");
  const auto& fw = rules.at("firewall");
  EXPECT_EQ(flow_tables_schedule(ids, fw), Schedule::Parallel);
  EXPECT_EQ(flow_tables_schedule(fw, ids), Schedule::Serial);
}

std::vector<std::vector<std::string>> stages_of(const StagePlan& p) { return p.stages; }

TEST(StagePlan, Examples) {
  const std::vector<VnfInstance> nfi = {V("nat", VnfKind::Nat), V("fw", VnfKind::Firewall),
                                        V("ids", VnfKind::Ids)};
  EXPECT_EQ(stages_of(build_stage_plan(nfi)),
            (std::vector<std::vector<std::string>>{{"nat"}, {"fw", "ids"}}));
  EXPECT_EQ(build_stage_plan({V("p", VnfKind::Probe)}).size(), 1u);
  EXPECT_EQ(build_stage_plan({V("lb", VnfKind::LoadBalancer), V("ips", VnfKind::Ips)}).size(), 2u);
}

TEST(StagePlan, Errors) {
  EXPECT_THROW(build_stage_plan({}), std::invalid_argument);
  EXPECT_THROW(build_stage_plan({V("a", VnfKind::Ids), V("a", VnfKind::Nat)}),
               std::invalid_argument);
  EXPECT_THROW(build_stage_plan({V("a", VnfKind::Ids)}, {}, -1.0), std::invalid_argument);
}

TEST(StagePlan, RulesRefinePlan) {
  const std::vector<VnfInstance> chain = {V("fw", VnfKind::Firewall), V("ids", VnfKind::Ids)};
  EXPECT_EQ(build_stage_plan(chain).size(), 1u);
  EXPECT_EQ(build_stage_plan(chain, tenant_rules()).size(), 2u);
}

TEST(StagePlanProperty, InvariantsHoldForAllShortChains) {
  for (std::size_t len = 1; len <= 5; ++len) {
    testing::for_each_chain(len, [&](const std::vector<VnfInstance>& chain) {
      const auto plan = build_stage_plan(chain);
      ASSERT_TRUE(plan_respects_chain(plan, chain));
      std::vector<std::string> flat;
      for (const auto& s : plan.stages) {
        ASSERT_FALSE(s.empty());
        flat.insert(flat.end(), s.begin(), s.end());
      }
      ASSERT_EQ(flat.size(), chain.size());
      for (std::size_t i = 0; i < chain.size(); ++i) ASSERT_EQ(flat[i], chain[i].id);
    });
  }
}

TEST(StagePlanProperty, GreedyIsMinimalForChainsUpToFive) {
  for (std::size_t len = 1; len <= 5; ++len) {
    testing::for_each_chain(len, [&](const std::vector<VnfInstance>& chain) {
      const auto got = build_stage_plan(chain).size();
      ASSERT_EQ(got, testing::min_stages_any_assignment(chain));
      ASSERT_EQ(got, testing::min_stages_contiguous(chain));
    });
  }
}

TEST(Reorder, FirewallMovesBeforeIds) {
  const auto rules = tenant_rules();
  const auto out = reorder_chain({V("ids", VnfKind::Ids), V("fw", VnfKind::Firewall)}, rules);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, "fw");
  EXPECT_EQ(out[1].id, "ids");
}

TEST(Reorder, IdsMovesBeforeVpn) {
  const auto out = reorder_chain({V("vpn", VnfKind::Vpn), V("ids", VnfKind::Ids)});
  EXPECT_EQ(out[0].id, "ids");
  EXPECT_EQ(out[1].id, "vpn");
}

TEST(Reorder, SingletonAndStability) {
  EXPECT_EQ(reorder_chain({V("p", VnfKind::Probe)})[0].id, "p");
  const std::vector<VnfInstance> chain = {V("a", VnfKind::Nat), V("b", VnfKind::Probe),
                                          V("c", VnfKind::Firewall)};
  const auto out = reorder_chain(chain);
  for (std::size_t i = 0; i < chain.size(); ++i) EXPECT_EQ(out[i].id, chain[i].id);
}

TEST(Reorder, WithoutRulesDropperStays) {
  const auto out = reorder_chain({V("ids", VnfKind::Ids), V("fw", VnfKind::Firewall)});
  EXPECT_EQ(out[0].id, "ids");
}

TEST(Reorder, ReadersPrecedeEncryptors) {
  const std::vector<VnfInstance> chain = {V("vpn", VnfKind::Vpn), V("nat", VnfKind::Nat),
                                          V("ids", VnfKind::Ids), V("lb", VnfKind::LoadBalancer)};
  const auto out = reorder_chain(chain);
  std::vector<std::string> ids;
  for (const auto& v : out) ids.push_back(v.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"nat", "ids", "lb", "vpn"}));
}

TEST(Reorder, SelfReadingEncryptorIsInfeasible) {
  auto odd = V("x", VnfKind::Vpn);
  odd.profile.payload = Access::ReadWrite;
  EXPECT_THROW(reorder_chain({V("ids", VnfKind::Ids), odd}), InfeasibleError);
}

TEST(Reorder, SoftEdgeYieldsToHardEdge) {
  // A dropping encryptor cannot move ahead of a payload-reading monitor.
  auto dropper = V("vpn", VnfKind::Vpn);
  dropper.profile.can_drop = true;
  RuleBook rules = rule_book_from(compile_to_flow_table(parse_policy(
      "ids alert any any any -> any any\n"
      "firewall drop any 10.1.0.0/24 any -> any any as vpn\n")));
  const auto out = reorder_chain({V("ids", VnfKind::Ids), dropper}, rules);
  EXPECT_EQ(out[0].id, "ids");
}

TEST(Reorder, OutputIsPermutationAndReadersPrecedeEncryptors) {
  for (std::size_t len = 1; len <= 4; ++len) {
    testing::for_each_chain(len, [&](const std::vector<VnfInstance>& chain) {
      const auto out = reorder_chain(chain);
      ASSERT_EQ(out.size(), chain.size());
      std::multiset<std::string> a, b;
      for (const auto& v : chain) a.insert(v.id);
      for (const auto& v : out) b.insert(v.id);
      ASSERT_EQ(a, b);
      for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
          ASSERT_FALSE(out[j].profile.encrypts_payload && reads(out[i].profile.payload));
    });
  }
}

TEST(PlanJson, RoundTrip) {
  StagePlan p{{{"nat"}, {"fw", "ids"}}, 0.0};
  const auto text = plan_to_json(p);
  EXPECT_EQ(text, R"([["nat"],["fw","ids"]])");
  EXPECT_EQ(plan_from_json(text), p);
  EXPECT_THROW(plan_from_json("{}"), ParseError);
  EXPECT_THROW(plan_from_json("[[]]"), ParseError);
  EXPECT_THROW(plan_from_json("[[1]]"), ParseError);
  EXPECT_THROW(plan_from_json("[["), ParseError);
}

TEST(PlanCsv, RoundTrip) {
  StagePlan p{{{"nat"}, {"fw", "ids"}}, 0.0};
  const auto text = plan_to_csv(p);
  EXPECT_EQ(text, "stage,members\n1,nat\n2,fw ids\n");
  EXPECT_EQ(plan_from_csv(text), p);
  EXPECT_EQ(plan_to_csv(plan_from_csv(text)), text);
  EXPECT_THROW(plan_from_csv("stage,members\n2,nat\n"), ParseError);
}

TEST(ChainSpec, Parses) {
  const auto chain = parse_chain_spec(
      "# comment\n"
      "nat nat mu=2.5 c=3\n"
      "\n"
      "fw firewall mu=1 c=1 drop=0.25  # trailing\n");
  ASSERT_EQ(chain.size(), 2u);
  EXPECT_EQ(chain[0].id, "nat");
  EXPECT_EQ(chain[0].kind, VnfKind::Nat);
  EXPECT_DOUBLE_EQ(chain[0].service_rate, 2.5);
  EXPECT_EQ(chain[0].servers, 3);
  EXPECT_DOUBLE_EQ(chain[1].drop_probability, 0.25);
  EXPECT_EQ(chain[1].profile, profile_for(VnfKind::Firewall));
}

TEST(ChainSpec, Errors) {
  auto line_col = [](const char* text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_chain_spec(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  EXPECT_EQ(line_col("a nat mu=1 c=1\nb router mu=1 c=1\n"), (std::pair<std::size_t, std::size_t>{2, 3}));
  EXPECT_EQ(line_col("a nat mu=0 c=1\n").first, 1u);
  EXPECT_EQ(line_col("a nat mu=1 c=0\n").first, 1u);
  EXPECT_EQ(line_col("a nat mu=1\n").first, 1u);
  EXPECT_EQ(line_col("a nat mu=1 c=1\na ids mu=1 c=1\n").first, 2u);
  EXPECT_EQ(line_col("a nat mu=1 c=1 drop=1.5\n").first, 1u);
  EXPECT_EQ(line_col("a nat mu=1 c=1 colour=red\n").first, 1u);
}

}  // namespace
}  // namespace nfp
