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

// Policy DSL: one rule per line,
//
//   <kind> <verb> <proto> <src> <sport> -> <dst> <dport>
//       [to <addr>[:<port>]] [prio <n>] [as <origin>] [msg "<text>"]
//
// `#` starts a comment outside a quoted string. Addresses are `any`, `EXT`
// (everything outside the configured tenant prefixes) or an IPv4 CIDR. Ports
// are `any`, `N` or `LO-HI`.
//
// Verbs by kind:
//   firewall  drop | allow          ips    drop | allow | alert
//   ids       alert                 probe  monitor
//   nat       snat to A | dnat to A[:P]
//   lb        balance to A[:P]      proxy  relay
//   vpn       tunnel
// and every kind accepts `pass` (plain forward).

#ifndef NFP_POLICY_HPP
#define NFP_POLICY_HPP

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nfp/errors.hpp"
#include "nfp/flow_table.hpp"
#include "nfp/match.hpp"
#include "nfp/vnf_kind.hpp"

namespace nfp {

struct CompilerConfig {
  // Addresses owned by tenants; EXT is their complement.
  std::vector<Ipv4Prefix> tenant_prefixes = {
      {0x0A010000u, 24},  // 10.1.0.0/24
      {0xC0A80100u, 24},  // 192.168.1.0/24
  };
  std::uint32_t priority_step = 100;
};

// Address as written in the DSL, before EXT is resolved.
struct AddressToken {
  enum class Kind { Any, External, Prefix } kind = Kind::Any;
  Ipv4Prefix prefix;
  friend bool operator==(const AddressToken&, const AddressToken&) = default;
};

// `to A[:P]` on nat/lb rules.
struct RewriteTarget {
  std::uint32_t addr = 0;
  std::optional<std::uint16_t> port;
  friend bool operator==(const RewriteTarget&, const RewriteTarget&) = default;
};

// One parsed DSL line, in normalized form.
struct PolicyStatement {
  VnfKind kind = VnfKind::Firewall;
  std::string verb;
  Proto proto = Proto::Any;
  AddressToken src;
  PortRange src_port;
  AddressToken dst;
  PortRange dst_port;
  std::optional<RewriteTarget> target;
  std::optional<std::uint32_t> priority;
  std::optional<std::string> origin;
  std::optional<std::string> message;
  friend bool operator==(const PolicyStatement&, const PolicyStatement&) = default;
};

struct PolicyEntry {
  PolicyStatement statement;
  std::string raw;
  std::size_t line = 0;
  // Priority is 0 until compile_to_flow_table assigns one, unless explicit.
  FlowRule rule;
};

struct PolicySet {
  std::vector<PolicyEntry> entries;
};

namespace detail {

struct Token {
  std::string text;
  std::size_t column;
  bool quoted = false;
};

inline std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    unsigned char ch = static_cast<unsigned char>(line[i]);
    if (std::isspace(ch)) { ++i; continue; }
    if (ch == '#') break;
    Token tok{{}, i + 1};
    if (ch == '"') {
      tok.quoted = true;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char c = line[i++];
        if (c == '\\' && i < line.size()) { tok.text += line[i++]; continue; }
        if (c == '"') { closed = true; break; }
        tok.text += c;
      }
      if (!closed) throw ParseError("unterminated string", line_no, tok.column, "closing '\"'");
    } else {
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
             line[i] != '#') {
        tok.text += line[i++];
      }
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

inline std::string quote_message(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline bool verb_allowed(VnfKind kind, std::string_view verb) {
  if (verb == "pass") return true;
  switch (kind) {
    case VnfKind::Firewall: return verb == "drop" || verb == "allow";
    case VnfKind::Ips: return verb == "drop" || verb == "allow" || verb == "alert";
    case VnfKind::Ids: return verb == "alert";
    case VnfKind::Probe: return verb == "monitor";
    case VnfKind::Nat: return verb == "snat" || verb == "dnat";
    case VnfKind::LoadBalancer: return verb == "balance";
    case VnfKind::Proxy: return verb == "relay";
    case VnfKind::Vpn: return verb == "tunnel";
  }
  return false;
}

inline bool verb_needs_target(std::string_view verb) {
  return verb == "snat" || verb == "dnat" || verb == "balance";
}

inline std::string_view verbs_for(VnfKind kind) {
  switch (kind) {
    case VnfKind::Firewall: return "drop, allow or pass";
    case VnfKind::Ips: return "drop, allow, alert or pass";
    case VnfKind::Ids: return "alert or pass";
    case VnfKind::Probe: return "monitor or pass";
    case VnfKind::Nat: return "snat, dnat or pass";
    case VnfKind::LoadBalancer: return "balance or pass";
    case VnfKind::Proxy: return "relay or pass";
    case VnfKind::Vpn: return "tunnel or pass";
  }
  return "";
}

inline AddressMatch resolve(const AddressToken& tok, const CompilerConfig& cfg) {
  switch (tok.kind) {
    case AddressToken::Kind::Any: return AddressMatch::any();
    case AddressToken::Kind::Prefix: return AddressMatch::prefix(tok.prefix);
    case AddressToken::Kind::External: return AddressMatch{{}, cfg.tenant_prefixes};
  }
  return AddressMatch::any();
}

inline std::vector<RuleAction> actions_for(const PolicyStatement& s) {
  const std::string kind_port(to_string(s.kind));
  const Forward next{"next"};
  const auto& v = s.verb;
  if (v == "pass" || v == "allow") return {next};
  if (v == "drop") return {Drop{}};
  if (v == "alert" || v == "monitor") return {Mirror{kind_port}, next};
  if (v == "relay") return {Forward{kind_port}};
  if (v == "tunnel") return {Encrypt{}, next};
  FlowMod mod;
  const auto& t = *s.target;
  if (v == "snat") {
    mod.rewrites.push_back({HeaderField::Src, t.addr});
    if (t.port) mod.rewrites.push_back({HeaderField::SrcPort, *t.port});
  } else {
    mod.rewrites.push_back({HeaderField::Dst, t.addr});
    if (t.port) mod.rewrites.push_back({HeaderField::DstPort, *t.port});
  }
  return {mod, next};
}

}  // namespace detail

inline FlowRule compile_statement(const PolicyStatement& s, const CompilerConfig& cfg = {}) {
  FlowRule rule;
  rule.priority = s.priority.value_or(0);
  rule.match = {detail::resolve(s.src, cfg), detail::resolve(s.dst, cfg), s.src_port,
                s.dst_port, s.proto};
  rule.actions = detail::actions_for(s);
  rule.origin = s.origin.value_or(std::string(to_string(s.kind)));
  return rule;
}

inline PolicyStatement parse_statement(std::string_view line, std::size_t line_no = 1) {
  auto tokens = detail::tokenize(line, line_no);
  std::size_t pos = 0;
  auto end_column = line.size() + 1;

  auto next = [&](std::string_view expected) -> const detail::Token& {
    if (pos >= tokens.size()) {
      throw ParseError("unexpected end of line", line_no, end_column, std::string(expected));
    }
    const auto& tok = tokens[pos++];
    if (tok.quoted) throw ParseError("unexpected string", line_no, tok.column, std::string(expected));
    return tok;
  };
  auto address = [&]() {
    const auto& tok = next("address (any, EXT or CIDR)");
    AddressToken out;
    if (tok.text == "any") return out;
    if (tok.text == "EXT") {
      out.kind = AddressToken::Kind::External;
      return out;
    }
    auto p = parse_prefix(tok.text);
    if (!p) throw ParseError("invalid CIDR '" + tok.text + "'", line_no, tok.column, "IPv4 CIDR");
    out.kind = AddressToken::Kind::Prefix;
    out.prefix = *p;
    return out;
  };
  auto ports = [&]() {
    const auto& tok = next("port (any, N or LO-HI)");
    auto r = parse_ports(tok.text);
    if (!r) {
      throw ParseError("invalid port range '" + tok.text + "'", line_no, tok.column,
                       "port in 0..65535 or LO-HI with LO <= HI");
    }
    return *r;
  };

  PolicyStatement s;
  const auto& kind_tok = next("VNF kind");
  auto kind = parse_vnf_kind(kind_tok.text);
  if (!kind) {
    throw ParseError("unknown VNF kind '" + kind_tok.text + "'", line_no, kind_tok.column,
                     "firewall, ids, nat, vpn, probe, proxy, ips or lb");
  }
  s.kind = *kind;
  const auto& verb_tok = next("verb");
  if (!detail::verb_allowed(s.kind, verb_tok.text)) {
    throw ParseError("unknown verb '" + verb_tok.text + "' for " + kind_tok.text, line_no,
                     verb_tok.column, std::string(detail::verbs_for(s.kind)));
  }
  s.verb = verb_tok.text;
  const auto& proto_tok = next("protocol");
  auto proto = parse_proto(proto_tok.text);
  if (!proto) throw ParseError("unknown protocol '" + proto_tok.text + "'", line_no,
                               proto_tok.column, "tcp, udp, icmp or any");
  s.proto = *proto;
  s.src = address();
  s.src_port = ports();
  const auto& arrow = next("'->'");
  if (arrow.text != "->") throw ParseError("unexpected '" + arrow.text + "'", line_no, arrow.column, "'->'");
  s.dst = address();
  s.dst_port = ports();

  while (pos < tokens.size()) {
    const auto& key = next("option");
    if (key.text == "msg") {
      if (pos >= tokens.size() || !tokens[pos].quoted) {
        throw ParseError("msg needs a quoted string", line_no,
                         pos < tokens.size() ? tokens[pos].column : end_column, "\"text\"");
      }
      s.message = tokens[pos++].text;
    } else if (key.text == "to") {
      const auto& tok = next("address[:port]");
      auto colon = tok.text.find(':');
      auto addr = parse_ipv4(std::string_view(tok.text).substr(0, colon));
      if (!addr) throw ParseError("invalid address '" + tok.text + "'", line_no, tok.column, "IPv4 address");
      RewriteTarget t{*addr, std::nullopt};
      if (colon != std::string::npos) {
        auto p = parse_ports(std::string_view(tok.text).substr(colon + 1));
        if (!p || p->lo != p->hi || p->is_any()) {
          throw ParseError("invalid port in '" + tok.text + "'", line_no, tok.column, "single port");
        }
        t.port = p->lo;
      }
      s.target = t;
    } else if (key.text == "prio") {
      const auto& tok = next("priority");
      std::int64_t v = -1;
      try { v = csv::to_int(tok.text); } catch (const ParseError&) {}
      if (v < 0 || v > 0xffffffffLL) {
        throw ParseError("invalid priority '" + tok.text + "'", line_no, tok.column, "integer >= 0");
      }
      s.priority = static_cast<std::uint32_t>(v);
    } else if (key.text == "as") {
      s.origin = next("origin identifier").text;
    } else {
      throw ParseError("unknown option '" + key.text + "'", line_no, key.column, "msg, to, prio or as");
    }
  }

  if (detail::verb_needs_target(s.verb) && !s.target) {
    throw ParseError("'" + s.verb + "' needs a rewrite target", line_no, end_column, "to <addr>[:<port>]");
  }
  if (!detail::verb_needs_target(s.verb) && s.target) {
    throw ParseError("'" + s.verb + "' takes no rewrite target", line_no, 1);
  }
  return s;
}

inline std::string format_statement(const PolicyStatement& s) {
  auto addr = [](const AddressToken& t) -> std::string {
    switch (t.kind) {
      case AddressToken::Kind::Any: return "any";
      case AddressToken::Kind::External: return "EXT";
      case AddressToken::Kind::Prefix: return format_prefix(t.prefix);
    }
    return "any";
  };
  std::string out = std::string(to_string(s.kind)) + " " + s.verb + " " +
                    std::string(to_string(s.proto)) + " " + addr(s.src) + " " +
                    format_ports(s.src_port) + " -> " + addr(s.dst) + " " +
                    format_ports(s.dst_port);
  if (s.target) {
    out += " to " + format_ipv4(s.target->addr);
    if (s.target->port) out += ":" + std::to_string(*s.target->port);
  }
  if (s.priority) out += " prio " + std::to_string(*s.priority);
  if (s.origin) out += " as " + *s.origin;
  if (s.message) out += " msg " + detail::quote_message(*s.message);
  return out;
}

inline PolicySet parse_policy(std::string_view text, const CompilerConfig& cfg = {}) {
  PolicySet set;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::tokenize(line, line_no).empty()) continue;
    PolicyEntry entry;
    entry.statement = parse_statement(line, line_no);
    entry.raw = std::string(line);
    entry.line = line_no;
    entry.rule = compile_statement(entry.statement, cfg);
    set.entries.push_back(std::move(entry));
  }
  return set;
}

// Normalized DSL text, one statement per line.
inline std::string serialize_policy(const PolicySet& set) {
  std::string out;
  for (const auto& e : set.entries) out += format_statement(e.statement) + "\n";
  return out;
}

// Assigns priorities by file order (first of N lines gets N*step, the last
// gets step) unless a statement carries an explicit one, then sorts by
// descending priority. Throws ConflictError on a duplicate (priority, match).
inline FlowTable compile_to_flow_table(const PolicySet& set, const CompilerConfig& cfg = {}) {
  FlowTable table;
  table.reserve(set.entries.size());
  const auto n = set.entries.size();
  for (std::size_t i = 0; i < n; ++i) {
    FlowRule rule = set.entries[i].rule;
    const auto& explicit_priority = set.entries[i].statement.priority;
    rule.priority = explicit_priority
                        ? *explicit_priority
                        : static_cast<std::uint32_t>((n - i) * cfg.priority_step);
    table.push_back(std::move(rule));
  }
  check_unique_keys(table);
  sort_by_priority(table);
  return table;
}

}  // namespace nfp

#endif  // NFP_POLICY_HPP
