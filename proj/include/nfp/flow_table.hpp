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

// Abstract OpenFlow-style rules: prioritized match + ordered action list.

#ifndef NFP_FLOW_TABLE_HPP
#define NFP_FLOW_TABLE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nfp/csv.hpp"
#include "nfp/errors.hpp"
#include "nfp/match.hpp"

namespace nfp {

enum class HeaderField : std::uint8_t { Src, Dst, SrcPort, DstPort, Proto };

inline std::string_view to_string(HeaderField f) {
  switch (f) {
    case HeaderField::Src: return "src";
    case HeaderField::Dst: return "dst";
    case HeaderField::SrcPort: return "sport";
    case HeaderField::DstPort: return "dport";
    case HeaderField::Proto: return "proto";
  }
  return "?";
}

inline std::optional<HeaderField> parse_header_field(std::string_view text) {
  if (text == "src") return HeaderField::Src;
  if (text == "dst") return HeaderField::Dst;
  if (text == "sport") return HeaderField::SrcPort;
  if (text == "dport") return HeaderField::DstPort;
  if (text == "proto") return HeaderField::Proto;
  return std::nullopt;
}

// Rewrites one match dimension. Addresses are host-order IPv4, ports are
// 0..65535 and protocols use the Proto enumerators (never Any).
struct FieldRewrite {
  HeaderField field;
  std::uint32_t value;
  friend bool operator==(const FieldRewrite&, const FieldRewrite&) = default;
};

struct Forward {
  std::string port;
  friend bool operator==(const Forward&, const Forward&) = default;
};
struct Mirror {
  std::string port;
  friend bool operator==(const Mirror&, const Mirror&) = default;
};
struct FlowMod {
  std::vector<FieldRewrite> rewrites;
  friend bool operator==(const FlowMod&, const FlowMod&) = default;
};
struct Drop {
  friend bool operator==(const Drop&, const Drop&) = default;
};
struct Encrypt {
  friend bool operator==(const Encrypt&, const Encrypt&) = default;
};

using RuleAction = std::variant<Forward, FlowMod, Drop, Mirror, Encrypt>;

// Forward-class actions hand the packet on unchanged; FlowMod-class actions
// change the packet or its fate.
enum class ActionClass { Forward, FlowMod };

inline ActionClass action_class(const RuleAction& a) {
  return std::holds_alternative<Forward>(a) || std::holds_alternative<Mirror>(a)
             ? ActionClass::Forward
             : ActionClass::FlowMod;
}

inline std::string format_action(const RuleAction& a) {
  struct Visitor {
    std::string operator()(const Forward& f) const { return "fwd(" + f.port + ")"; }
    std::string operator()(const Mirror& m) const { return "mirror(" + m.port + ")"; }
    std::string operator()(const Drop&) const { return "drop"; }
    std::string operator()(const Encrypt&) const { return "encrypt"; }
    std::string operator()(const FlowMod& m) const {
      std::string out = "set(";
      for (std::size_t i = 0; i < m.rewrites.size(); ++i) {
        const auto& rw = m.rewrites[i];
        if (i != 0) out += ',';
        out += std::string(to_string(rw.field)) + "=";
        switch (rw.field) {
          case HeaderField::Src:
          case HeaderField::Dst: out += format_ipv4(rw.value); break;
          case HeaderField::Proto: out += to_string(static_cast<Proto>(rw.value)); break;
          default: out += std::to_string(rw.value);
        }
      }
      return out + ")";
    }
  };
  return std::visit(Visitor{}, a);
}

inline std::optional<FieldRewrite> parse_rewrite(std::string_view text) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  auto field = parse_header_field(text.substr(0, eq));
  if (!field) return std::nullopt;
  auto value = text.substr(eq + 1);
  switch (*field) {
    case HeaderField::Src:
    case HeaderField::Dst: {
      auto addr = parse_ipv4(value);
      if (!addr) return std::nullopt;
      return FieldRewrite{*field, *addr};
    }
    case HeaderField::Proto: {
      auto p = parse_proto(value);
      if (!p || *p == Proto::Any) return std::nullopt;
      return FieldRewrite{*field, static_cast<std::uint32_t>(*p)};
    }
    default: {
      auto r = parse_ports(value);
      if (!r || r->lo != r->hi || value == "any") return std::nullopt;
      return FieldRewrite{*field, r->lo};
    }
  }
}

inline std::optional<RuleAction> parse_action(std::string_view text) {
  if (text == "drop") return Drop{};
  if (text == "encrypt") return Encrypt{};
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') return std::nullopt;
  auto name = text.substr(0, open);
  auto arg = text.substr(open + 1, text.size() - open - 2);
  if (name == "fwd" && !arg.empty()) return Forward{std::string(arg)};
  if (name == "mirror" && !arg.empty()) return Mirror{std::string(arg)};
  if (name == "set") {
    FlowMod mod;
    while (!arg.empty()) {
      auto comma = arg.find(',');
      auto rw = parse_rewrite(arg.substr(0, comma));
      if (!rw) return std::nullopt;
      mod.rewrites.push_back(*rw);
      arg = comma == std::string_view::npos ? std::string_view{} : arg.substr(comma + 1);
    }
    if (mod.rewrites.empty()) return std::nullopt;
    return mod;
  }
  return std::nullopt;
}

struct FlowRule {
  std::uint32_t priority = 0;
  MatchPattern match;
  std::vector<RuleAction> actions;
  std::string origin;

  bool has_drop() const {
    return std::any_of(actions.begin(), actions.end(), [](const RuleAction& a) {
      return std::holds_alternative<Drop>(a);
    });
  }
  bool has_mirror() const {
    return std::any_of(actions.begin(), actions.end(), [](const RuleAction& a) {
      return std::holds_alternative<Mirror>(a);
    });
  }
  bool forwards() const {
    return std::any_of(actions.begin(), actions.end(), [](const RuleAction& a) {
      return std::holds_alternative<Forward>(a);
    });
  }

  friend bool operator==(const FlowRule&, const FlowRule&) = default;
};

using FlowTable = std::vector<FlowRule>;

// Throws ConflictError if two rules share a (priority, match) key.
inline void check_unique_keys(const FlowTable& table) {
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = i + 1; j < table.size(); ++j) {
      if (table[i].priority == table[j].priority &&
          same_match(table[i].match, table[j].match)) {
        throw ConflictError("duplicate (priority, match) key at priority " +
                            std::to_string(table[i].priority) + " (rules from '" +
                            table[i].origin + "' and '" + table[j].origin + "')");
      }
    }
  }
}

// Stable: rules of equal priority keep their relative order.
inline void sort_by_priority(FlowTable& table) {
  std::stable_sort(table.begin(), table.end(), [](const FlowRule& a, const FlowRule& b) {
    return a.priority > b.priority;
  });
}

// First matching rule in table order, or nullptr. The table is expected to
// be sorted by descending priority.
inline const FlowRule* classify(const FlowTable& table, const Packet& pkt) {
  for (const auto& rule : table) {
    if (matches(rule.match, pkt)) return &rule;
  }
  return nullptr;
}

namespace detail {

inline std::optional<AddressMatch> merge_address(const AddressMatch& a,
                                                 const AddressMatch& b) {
  if (!a.is_plain_prefix() || !b.is_plain_prefix()) return std::nullopt;
  if (a.base.contains(b.base)) return a;
  if (b.base.contains(a.base)) return b;
  if (a.base.length != b.base.length || a.base.length == 0) return std::nullopt;
  Ipv4Prefix parent{a.base.addr & Ipv4Prefix::mask_for(a.base.length - 1),
                    static_cast<std::uint8_t>(a.base.length - 1)};
  if (parent.contains(b.base)) return AddressMatch::prefix(parent);
  return std::nullopt;
}

inline std::optional<PortRange> merge_ports(const PortRange& a, const PortRange& b) {
  auto lo = std::min(a.lo, b.lo);
  auto hi = std::max(a.hi, b.hi);
  // Union is an interval iff the gap between them is empty.
  if (std::uint32_t{std::max(a.lo, b.lo)} > std::uint32_t{std::min(a.hi, b.hi)} + 1) {
    return std::nullopt;
  }
  return PortRange{lo, hi};
}

// Union of two patterns that agree on all but at most one dimension, when
// that union is itself expressible as a single pattern.
inline std::optional<MatchPattern> merge_matches(const MatchPattern& a,
                                                 const MatchPattern& b) {
  const bool src_eq = a.src.as_set() == b.src.as_set();
  const bool dst_eq = a.dst.as_set() == b.dst.as_set();
  const bool sport_eq = a.src_port == b.src_port;
  const bool dport_eq = a.dst_port == b.dst_port;
  const bool proto_eq = a.proto == b.proto;
  const int differing = !src_eq + !dst_eq + !sport_eq + !dport_eq + !proto_eq;
  if (differing == 0) return a;
  if (differing > 1) return std::nullopt;

  MatchPattern out = a;
  if (!src_eq) {
    auto m = merge_address(a.src, b.src);
    if (!m) return std::nullopt;
    out.src = *m;
  } else if (!dst_eq) {
    auto m = merge_address(a.dst, b.dst);
    if (!m) return std::nullopt;
    out.dst = *m;
  } else if (!sport_eq) {
    auto m = merge_ports(a.src_port, b.src_port);
    if (!m) return std::nullopt;
    out.src_port = *m;
  } else if (!dport_eq) {
    auto m = merge_ports(a.dst_port, b.dst_port);
    if (!m) return std::nullopt;
    out.dst_port = *m;
  } else {
    if (a.proto != Proto::Any && b.proto != Proto::Any) return std::nullopt;
    out.proto = Proto::Any;
  }
  return out;
}

}  // namespace detail

// Merges neighbouring rules (in priority order) whose action lists are
// identical and whose matches differ in a single combinable dimension. The
// merged rule keeps the higher priority and its origin. Repeats until no pair merges, so the
// result is a fixpoint.
inline FlowTable aggregate_rules(FlowTable table) {
  sort_by_priority(table);
  bool changed = true;
  while (changed) {
    changed = false;
    FlowTable out;
    out.reserve(table.size());
    for (auto& rule : table) {
      if (!out.empty() && out.back().actions == rule.actions) {
        if (auto merged = detail::merge_matches(out.back().match, rule.match)) {
          out.back().match = *merged;
          changed = true;
          continue;
        }
      }
      out.push_back(std::move(rule));
    }
    table = std::move(out);
  }
  return table;
}

inline constexpr std::string_view kFlowTableHeader =
    "priority,src,sport,dst,dport,proto,actions,origin";

inline std::string format_actions(const std::vector<RuleAction>& actions) {
  std::string out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i != 0) out += ';';
    out += format_action(actions[i]);
  }
  return out;
}

inline std::string flow_table_to_csv(const FlowTable& table) {
  std::string out = std::string(kFlowTableHeader) + "\n";
  for (const auto& r : table) {
    out += csv::format_row({std::to_string(r.priority), format_address(r.match.src),
                            format_ports(r.match.src_port), format_address(r.match.dst),
                            format_ports(r.match.dst_port), std::string(to_string(r.match.proto)),
                            format_actions(r.actions), r.origin});
  }
  return out;
}

inline FlowTable flow_table_from_csv(std::string_view text) {
  auto rows = csv::parse(text);
  if (rows.empty() || csv::format_row(rows[0]) != std::string(kFlowTableHeader) + "\n") {
    throw ParseError("missing flow table header", 1, 1, std::string(kFlowTableHeader));
  }
  FlowTable table;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::size_t line = i + 1;
    if (row.size() != 8) throw ParseError("expected 8 fields", line);
    FlowRule rule;
    auto prio = csv::to_int(row[0]);
    if (prio < 0 || prio > 0xffffffffLL) throw ParseError("priority out of range", line);
    rule.priority = static_cast<std::uint32_t>(prio);
    auto src = parse_address(row[1]);
    auto sport = parse_ports(row[2]);
    auto dst = parse_address(row[3]);
    auto dport = parse_ports(row[4]);
    auto proto = parse_proto(row[5]);
    if (!src || !sport || !dst || !dport || !proto) {
      throw ParseError("invalid match field", line);
    }
    rule.match = {*src, *dst, *sport, *dport, *proto};
    std::string_view acts = row[6];
    while (!acts.empty()) {
      // ';' never occurs inside an action.
      auto semi = acts.find(';');
      auto a = parse_action(acts.substr(0, semi));
      if (!a) throw ParseError("invalid action '" + std::string(acts.substr(0, semi)) + "'", line);
      rule.actions.push_back(*a);
      acts = semi == std::string_view::npos ? std::string_view{} : acts.substr(semi + 1);
    }
    if (rule.actions.empty()) throw ParseError("empty action list", line);
    rule.origin = row[7];
    table.push_back(std::move(rule));
  }
  return table;
}

}  // namespace nfp

#endif  // NFP_FLOW_TABLE_HPP
