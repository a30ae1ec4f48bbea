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

// Read/write hazard analysis between network functions, stage planning and
// chain reordering.

#ifndef NFP_DEPENDENCY_HPP
#define NFP_DEPENDENCY_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nfp/csv.hpp"
#include "nfp/errors.hpp"
#include "nfp/flow_table.hpp"
#include "nfp/match.hpp"
#include "nfp/vnf_kind.hpp"

namespace nfp {

enum class Access { None, Read, Write, ReadWrite };

inline bool reads(Access a) { return a == Access::Read || a == Access::ReadWrite; }
inline bool writes(Access a) { return a == Access::Write || a == Access::ReadWrite; }

struct AccessProfile {
  Access header = Access::None;
  Access payload = Access::None;
  bool can_drop = false;
  bool encrypts_payload = false;

  bool valid() const { return !encrypts_payload || writes(payload); }

  friend bool operator==(const AccessProfile&, const AccessProfile&) = default;
};

// Built-in header/payload access per function kind.
inline AccessProfile profile_for(VnfKind kind) {
  using A = Access;
  switch (kind) {
    case VnfKind::Probe: return {A::Read, A::None, false, false};
    case VnfKind::Nat: return {A::ReadWrite, A::None, false, false};
    case VnfKind::Firewall: return {A::ReadWrite, A::None, true, false};
    case VnfKind::Proxy: return {A::Read, A::Read, false, false};
    case VnfKind::Ids: return {A::Read, A::Read, false, false};
    case VnfKind::Ips: return {A::ReadWrite, A::Read, true, false};
    case VnfKind::LoadBalancer: return {A::ReadWrite, A::Read, false, false};
    case VnfKind::Vpn: return {A::ReadWrite, A::Write, false, true};
  }
  return {};
}

struct VnfInstance {
  std::string id;
  VnfKind kind = VnfKind::Probe;
  AccessProfile profile;
  double service_rate = 1.0;  // packets/sec per server
  int servers = 1;
  // Chance a packet is dropped here; only consulted when thinning is enabled.
  double drop_probability = 0.0;
};

inline VnfInstance make_vnf(std::string id, VnfKind kind, double service_rate = 1.0,
                            int servers = 1) {
  if (!(service_rate > 0)) throw std::invalid_argument("service rate must be > 0 for " + id);
  if (servers < 1) throw std::invalid_argument("server count must be >= 1 for " + id);
  return {std::move(id), kind, profile_for(kind), service_rate, servers, 0.0};
}

enum class Region { Header, Payload };
enum class HazardKind { None, RAR, WAR, RAW, WAW };

inline std::string_view to_string(HazardKind k) {
  switch (k) {
    case HazardKind::None: return "NONE";
    case HazardKind::RAR: return "RAR";
    case HazardKind::WAR: return "WAR";
    case HazardKind::RAW: return "RAW";
    case HazardKind::WAW: return "WAW";
  }
  return "?";
}

struct Hazard {
  Region region;
  HazardKind kind;
  friend bool operator==(const Hazard&, const Hazard&) = default;
};

inline HazardKind classify_access(Access first, Access second) {
  if (first == Access::None || second == Access::None) return HazardKind::None;
  const bool w1 = writes(first), w2 = writes(second);
  if (!w1 && !w2) return HazardKind::RAR;
  if (!w1) return HazardKind::WAR;
  if (!w2) return HazardKind::RAW;
  return HazardKind::WAW;
}

// One hazard per region, header first.
inline std::array<Hazard, 2> classify_pair(const VnfInstance& first, const VnfInstance& second) {
  return {Hazard{Region::Header, classify_access(first.profile.header, second.profile.header)},
          Hazard{Region::Payload, classify_access(first.profile.payload, second.profile.payload)}};
}

// Compiled flow rules per function, keyed by instance id (or, as a fallback,
// by kind name).
using RuleBook = std::map<std::string, FlowTable, std::less<>>;

inline const FlowTable* rules_for(const RuleBook& book, const VnfInstance& vnf) {
  if (auto it = book.find(vnf.id); it != book.end()) return &it->second;
  if (auto it = book.find(to_string(vnf.kind)); it != book.end()) return &it->second;
  return nullptr;
}

// Splits a compiled table by rule origin.
inline RuleBook rule_book_from(const FlowTable& table) {
  RuleBook book;
  for (const auto& r : table) book[r.origin].push_back(r);
  return book;
}

// A drop in one parallel branch and a forward in another race on the
// packet's fate; serialize when the matches can see the same packet.
inline bool drop_forces_order(const VnfInstance& first, const VnfInstance& second,
                              const RuleBook& rules) {
  if (!first.profile.can_drop) return false;
  const auto* fr = rules_for(rules, first);
  const auto* sr = rules_for(rules, second);
  if (fr == nullptr || sr == nullptr) return false;
  for (const auto& d : *fr) {
    if (!d.has_drop()) continue;
    for (const auto& r : *sr) {
      if (r.forwards() && match_overlap(d.match, r.match) != OverlapRelation::Disjoint) {
        return true;
      }
    }
  }
  return false;
}

// Order-sensitive: `first` precedes `second` in the chain. RAR, WAR and NONE
// pass. A header RAW passes when `first` can drop: its header write is the
// pass/drop verdict, and packet fate is settled by drop_forces_order.
inline bool parallelizable(const VnfInstance& first, const VnfInstance& second,
                           const RuleBook& rules = {}) {
  for (const auto& h : classify_pair(first, second)) {
    if (h.kind == HazardKind::WAW) return false;
    if (h.kind == HazardKind::RAW &&
        !(h.region == Region::Header && first.profile.can_drop)) {
      return false;
    }
  }
  return !drop_forces_order(first, second, rules);
}

enum class Schedule { Parallel, Serial };

// Action-pair rule over two actions applied to the same traffic: a forward
// followed by anything may run in parallel; a flow_mod followed by anything
// may not.
inline Schedule nfp_action_rule(const RuleAction& a_j, const RuleAction& a_k) {
  const auto j = action_class(a_j);
  const auto k = action_class(a_k);
  if (j == ActionClass::Forward && (k == ActionClass::Forward || k == ActionClass::FlowMod)) {
    return Schedule::Parallel;
  }
  return Schedule::Serial;
}

// Applies nfp_action_rule to every action pair of every overlapping rule
// pair of two functions' tables.
inline Schedule flow_tables_schedule(const FlowTable& first, const FlowTable& second) {
  for (const auto& r1 : first) {
    for (const auto& r2 : second) {
      if (match_overlap(r1.match, r2.match) == OverlapRelation::Disjoint) continue;
      for (const auto& a : r1.actions) {
        for (const auto& b : r2.actions) {
          if (nfp_action_rule(a, b) == Schedule::Serial) return Schedule::Serial;
        }
      }
    }
  }
  return Schedule::Parallel;
}

struct StagePlan {
  std::vector<std::vector<std::string>> stages;
  double merge_overhead = 0.0;  // seconds per stage

  std::size_t size() const { return stages.size(); }
  friend bool operator==(const StagePlan&, const StagePlan&) = default;
};

namespace detail {

inline void require_distinct_ids(const std::vector<VnfInstance>& chain) {
  std::set<std::string_view> seen;
  for (const auto& v : chain) {
    if (!seen.insert(v.id).second) throw std::invalid_argument("duplicate VNF id '" + v.id + "'");
  }
}

}  // namespace detail

// Single left-to-right pass. A function joins the most recent stage when it
// is parallelizable after every member of that stage; otherwise it opens a
// new stage. Joining an earlier stage would also require compatibility with
// every later stage, so the most recent stage is the only candidate.
inline StagePlan build_stage_plan(const std::vector<VnfInstance>& chain,
                                  const RuleBook& rules = {}, double merge_overhead = 0.0) {
  if (chain.empty()) throw std::invalid_argument("cannot plan an empty chain");
  if (merge_overhead < 0) throw std::invalid_argument("merge overhead must be >= 0");
  detail::require_distinct_ids(chain);

  StagePlan plan;
  plan.merge_overhead = merge_overhead;
  std::vector<std::size_t> last_stage;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    bool joins = !last_stage.empty() &&
                 std::all_of(last_stage.begin(), last_stage.end(), [&](std::size_t m) {
                   return parallelizable(chain[m], chain[i], rules);
                 });
    if (joins) {
      last_stage.push_back(i);
      plan.stages.back().push_back(chain[i].id);
    } else {
      last_stage = {i};
      plan.stages.push_back({chain[i].id});
    }
  }
  return plan;
}

// Checks that every function appears in exactly one stage and that every
// non-parallelizable ordered pair keeps its stage order.
inline bool plan_respects_chain(const StagePlan& plan, const std::vector<VnfInstance>& chain,
                                const RuleBook& rules = {}) {
  std::map<std::string, std::size_t, std::less<>> stage_of;
  std::size_t members = 0;
  for (std::size_t s = 0; s < plan.stages.size(); ++s) {
    for (const auto& id : plan.stages[s]) {
      if (!stage_of.emplace(id, s).second) return false;
      ++members;
    }
  }
  if (members != chain.size()) return false;
  for (const auto& v : chain) {
    if (!stage_of.count(v.id)) return false;
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    for (std::size_t j = i + 1; j < chain.size(); ++j) {
      if (!parallelizable(chain[i], chain[j], rules) &&
          !(stage_of[chain[i].id] < stage_of[chain[j].id])) {
        return false;
      }
    }
  }
  return true;
}

namespace detail {

inline bool payload_reader(const VnfInstance& v) { return reads(v.profile.payload); }

// Drop rule of `dropper` lies inside a mirror rule of `monitor`.
inline bool drop_inside_monitor(const VnfInstance& dropper, const VnfInstance& monitor,
                                const RuleBook& rules) {
  if (!dropper.profile.can_drop) return false;
  const auto* dr = rules_for(rules, dropper);
  const auto* mr = rules_for(rules, monitor);
  if (dr == nullptr || mr == nullptr) return false;
  for (const auto& m : *mr) {
    if (!m.has_mirror()) continue;
    for (const auto& d : *dr) {
      if (!d.has_drop()) continue;
      auto rel = match_overlap(m.match, d.match);
      if (rel == OverlapRelation::Equal || rel == OverlapRelation::AContainsB) return true;
    }
  }
  return false;
}

class OrderGraph {
 public:
  explicit OrderGraph(std::size_t n) : succ_(n) {}

  void add(std::size_t from, std::size_t to) { succ_[from].insert(to); }

  bool reaches(std::size_t from, std::size_t to) const {
    std::vector<bool> seen(succ_.size());
    std::vector<std::size_t> stack = {from};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      if (u == to) return true;
      if (seen[u]) continue;
      seen[u] = true;
      for (auto v : succ_[u]) stack.push_back(v);
    }
    return false;
  }

  // Kahn's algorithm, always emitting the lowest original index available.
  std::vector<std::size_t> stable_order() const {
    std::vector<int> indegree(succ_.size());
    for (const auto& s : succ_) {
      for (auto v : s) ++indegree[v];
    }
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < succ_.size(); ++i) {
      if (indegree[i] == 0) ready.insert(i);
    }
    std::vector<std::size_t> out;
    while (!ready.empty()) {
      auto u = *ready.begin();
      ready.erase(ready.begin());
      out.push_back(u);
      for (auto v : succ_[u]) {
        if (--indegree[v] == 0) ready.insert(v);
      }
    }
    return out;
  }

 private:
  std::vector<std::set<std::size_t>> succ_;
};

}  // namespace detail

// Reorders a chain so that
//   1. every payload reader runs before every payload encryptor (hard), and
//   2. a drop-capable function whose drop match lies inside a monitor's
//      mirror match runs before that monitor, when (1) allows it;
// all other relative orders are kept. Throws InfeasibleError when (1) has
// a cycle.
inline std::vector<VnfInstance> reorder_chain(const std::vector<VnfInstance>& chain,
                                              const RuleBook& rules = {}) {
  if (chain.empty()) throw std::invalid_argument("cannot reorder an empty chain");
  const auto n = chain.size();
  for (const auto& v : chain) {
    if (v.profile.encrypts_payload && detail::payload_reader(v)) {
      throw InfeasibleError("'" + v.id +
                            "' reads the payload it encrypts; it would have to run both "
                            "before and after itself");
    }
  }

  detail::OrderGraph graph(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!detail::payload_reader(chain[r])) continue;
    for (std::size_t e = 0; e < n; ++e) {
      if (chain[e].profile.encrypts_payload) graph.add(r, e);
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t m = 0; m < n; ++m) {
      if (d == m || !detail::drop_inside_monitor(chain[d], chain[m], rules)) continue;
      if (!graph.reaches(m, d)) graph.add(d, m);
    }
  }

  std::vector<VnfInstance> out;
  out.reserve(n);
  for (auto i : graph.stable_order()) out.push_back(chain[i]);
  return out;
}

// [["a"],["b","c"]]
inline std::string plan_to_json(const StagePlan& plan) {
  return nlohmann::json(plan.stages).dump();
}

inline StagePlan plan_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid stage plan: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("stage plan must be an array of arrays of ids");
  StagePlan plan;
  for (const auto& stage : j) {
    if (!stage.is_array() || stage.empty()) {
      throw ParseError("each stage must be a non-empty array of ids");
    }
    auto& ids = plan.stages.emplace_back();
    for (const auto& id : stage) {
      if (!id.is_string()) throw ParseError("stage members must be strings");
      ids.push_back(id.get<std::string>());
    }
  }
  return plan;
}

inline constexpr std::string_view kPlanHeader = "stage,members";

// One row per stage, members space-separated in chain order.
inline std::string plan_to_csv(const StagePlan& plan) {
  std::string out = std::string(kPlanHeader) + "\n";
  for (std::size_t i = 0; i < plan.stages.size(); ++i) {
    std::string members;
    for (const auto& id : plan.stages[i]) {
      if (!members.empty()) members += ' ';
      members += id;
    }
    out += csv::format_row({std::to_string(i + 1), members});
  }
  return out;
}

inline StagePlan plan_from_csv(std::string_view text) {
  auto rows = csv::parse(text);
  if (rows.empty() || rows[0] != csv::Row{"stage", "members"}) {
    throw ParseError("missing plan header", 1, 1, std::string(kPlanHeader));
  }
  StagePlan plan;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 2) throw ParseError("expected 2 fields", i + 1);
    if (csv::to_int(row[0]) != static_cast<std::int64_t>(i)) {
      throw ParseError("stages must be numbered 1..n", i + 1, 1);
    }
    auto& ids = plan.stages.emplace_back();
    std::string_view members = row[1];
    while (!members.empty()) {
      auto sp = members.find(' ');
      ids.emplace_back(members.substr(0, sp));
      members = sp == std::string_view::npos ? std::string_view{} : members.substr(sp + 1);
    }
    if (ids.empty()) throw ParseError("empty stage", i + 1, 2);
  }
  return plan;
}

// Chain spec: one function per line, `id kind mu=<float> c=<int> [drop=<p>]`.
inline std::vector<VnfInstance> parse_chain_spec(std::string_view text) {
  std::vector<VnfInstance> chain;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string line(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);

    std::vector<std::pair<std::string, std::size_t>> words;
    for (std::size_t i = 0; i < line.size();) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) { ++i; continue; }
      auto start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      words.emplace_back(line.substr(start, i - start), start + 1);
    }
    if (words.empty()) continue;
    if (words.size() < 2) {
      throw ParseError("missing kind", line_no, line.size() + 1, "id kind mu=<float> c=<int>");
    }
    auto kind = parse_vnf_kind(words[1].first);
    if (!kind) {
      throw ParseError("unknown VNF kind '" + words[1].first + "'", line_no, words[1].second,
                       "firewall, ids, nat, vpn, probe, proxy, ips or lb");
    }
    VnfInstance vnf{words[0].first, *kind, profile_for(*kind), 0.0, 0, 0.0};
    bool have_mu = false, have_c = false;
    for (std::size_t w = 2; w < words.size(); ++w) {
      const auto& [word, col] = words[w];
      auto eq = word.find('=');
      auto key = word.substr(0, eq);
      auto value = eq == std::string::npos ? std::string{} : word.substr(eq + 1);
      try {
        if (key == "mu") {
          vnf.service_rate = csv::to_double(value);
          if (!(vnf.service_rate > 0)) throw ParseError("mu must be > 0");
          have_mu = true;
        } else if (key == "c") {
          auto c = csv::to_int(value);
          if (c < 1 || c > 1'000'000'000) throw ParseError("c must be >= 1");
          vnf.servers = static_cast<int>(c);
          have_c = true;
        } else if (key == "drop") {
          vnf.drop_probability = csv::to_double(value);
          if (vnf.drop_probability < 0 || vnf.drop_probability > 1) {
            throw ParseError("drop must lie in [0, 1]");
          }
        } else {
          throw ParseError("unknown attribute '" + key + "'");
        }
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no, col, "mu=<float>, c=<int> or drop=<p>");
      }
    }
    if (!have_mu || !have_c) {
      throw ParseError("missing " + std::string(!have_mu ? "mu" : "c"), line_no,
                       line.size() + 1, "mu=<float> c=<int>");
    }
    for (const auto& other : chain) {
      if (other.id == vnf.id) {
        throw ParseError("duplicate VNF id '" + vnf.id + "'", line_no, words[0].second);
      }
    }
    chain.push_back(std::move(vnf));
  }
  return chain;
}

}  // namespace nfp

#endif  // NFP_DEPENDENCY_HPP
