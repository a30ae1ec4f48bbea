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

// Five-tuple match patterns and the overlap relation between them.

#ifndef NFP_MATCH_HPP
#define NFP_MATCH_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nfp/errors.hpp"

namespace nfp {

enum class Proto : std::uint8_t { Any, Tcp, Udp, Icmp };

inline std::string_view to_string(Proto proto) {
  switch (proto) {
    case Proto::Any: return "any";
    case Proto::Tcp: return "tcp";
    case Proto::Udp: return "udp";
    case Proto::Icmp: return "icmp";
  }
  return "?";
}

inline std::optional<Proto> parse_proto(std::string_view text) {
  if (text == "any") return Proto::Any;
  if (text == "tcp") return Proto::Tcp;
  if (text == "udp") return Proto::Udp;
  if (text == "icmp") return Proto::Icmp;
  return std::nullopt;
}

inline std::string format_ipv4(std::uint32_t addr) {
  return std::to_string(addr >> 24) + "." + std::to_string((addr >> 16) & 0xff) +
         "." + std::to_string((addr >> 8) & 0xff) + "." +
         std::to_string(addr & 0xff);
}

inline std::optional<std::uint32_t> parse_ipv4(std::string_view text) {
  std::uint32_t addr = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    if (octet != 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || next == p || next - p > 3 || value > 255) {
      return std::nullopt;
    }
    addr = (addr << 8) | value;
    p = next;
  }
  if (p != end) return std::nullopt;
  return addr;
}

struct Ipv4Prefix {
  std::uint32_t addr = 0;
  std::uint8_t length = 0;

  static constexpr std::uint32_t mask_for(int length) {
    return length == 0 ? 0u : ~std::uint32_t{0} << (32 - length);
  }
  std::uint32_t mask() const { return mask_for(length); }
  std::uint32_t first() const { return addr; }
  std::uint32_t last() const { return addr | ~mask(); }
  bool contains(std::uint32_t a) const { return (a & mask()) == addr; }
  bool contains(const Ipv4Prefix& other) const {
    return other.length >= length && contains(other.addr);
  }

  friend bool operator==(const Ipv4Prefix&, const Ipv4Prefix&) = default;
  friend auto operator<=>(const Ipv4Prefix&, const Ipv4Prefix&) = default;
};

inline std::string format_prefix(const Ipv4Prefix& p) {
  return format_ipv4(p.addr) + "/" + std::to_string(p.length);
}

// Accepts "a.b.c.d/len" or a bare address (/32). Host bits must be zero.
inline std::optional<Ipv4Prefix> parse_prefix(std::string_view text) {
  auto slash = text.find('/');
  auto addr = parse_ipv4(text.substr(0, slash));
  if (!addr) return std::nullopt;
  int length = 32;
  if (slash != std::string_view::npos) {
    auto len_text = text.substr(slash + 1);
    auto [next, ec] =
        std::from_chars(len_text.data(), len_text.data() + len_text.size(), length);
    if (ec != std::errc() || next != len_text.data() + len_text.size() ||
        len_text.empty() || length < 0 || length > 32) {
      return std::nullopt;
    }
  }
  if ((*addr & ~Ipv4Prefix::mask_for(length)) != 0) return std::nullopt;
  return Ipv4Prefix{*addr, static_cast<std::uint8_t>(length)};
}

// Closed interval list over a 32-bit domain, sorted and coalesced.
class IntervalSet {
 public:
  using Interval = std::pair<std::uint64_t, std::uint64_t>;

  IntervalSet() = default;
  static IntervalSet of(std::uint64_t lo, std::uint64_t hi) {
    IntervalSet s;
    if (lo <= hi) s.spans_.emplace_back(lo, hi);
    return s;
  }

  bool empty() const { return spans_.empty(); }
  const std::vector<Interval>& spans() const { return spans_; }

  IntervalSet intersect(const IntervalSet& other) const {
    IntervalSet out;
    std::size_t i = 0, j = 0;
    while (i < spans_.size() && j < other.spans_.size()) {
      auto lo = std::max(spans_[i].first, other.spans_[j].first);
      auto hi = std::min(spans_[i].second, other.spans_[j].second);
      if (lo <= hi) out.spans_.emplace_back(lo, hi);
      if (spans_[i].second < other.spans_[j].second) ++i; else ++j;
    }
    return out;
  }

  IntervalSet subtract(const IntervalSet& other) const {
    IntervalSet out;
    for (auto [lo, hi] : spans_) {
      auto cur = lo;
      bool open = true;
      for (auto [olo, ohi] : other.spans_) {
        if (ohi < cur || olo > hi) continue;
        if (olo > cur) out.spans_.emplace_back(cur, olo - 1);
        if (ohi >= hi) { open = false; break; }
        cur = ohi + 1;
      }
      if (open && cur <= hi) out.spans_.emplace_back(cur, hi);
    }
    return out;
  }

  bool subset_of(const IntervalSet& other) const {
    return intersect(other) == *this;
  }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> spans_;
};

// An address dimension: every address inside `base` except those inside any
// of `excluded`. ANY is 0.0.0.0/0 with no exclusions.
struct AddressMatch {
  Ipv4Prefix base;
  std::vector<Ipv4Prefix> excluded;

  static AddressMatch any() { return {}; }
  static AddressMatch prefix(Ipv4Prefix p) { return {p, {}}; }

  bool is_any() const { return base.length == 0 && excluded.empty(); }
  bool is_plain_prefix() const { return excluded.empty(); }

  bool contains(std::uint32_t a) const {
    if (!base.contains(a)) return false;
    return std::none_of(excluded.begin(), excluded.end(),
                        [a](const Ipv4Prefix& p) { return p.contains(a); });
  }

  IntervalSet as_set() const {
    std::vector<Ipv4Prefix> sorted = excluded;
    std::sort(sorted.begin(), sorted.end());
    IntervalSet out = IntervalSet::of(base.first(), base.last());
    for (const auto& p : sorted) {
      out = out.subtract(IntervalSet::of(p.first(), p.last()));
    }
    return out;
  }

  friend bool operator==(const AddressMatch&, const AddressMatch&) = default;
};

// "any", "10.1.0.0/24", or "any!10.1.0.0/24!192.168.1.0/24".
inline std::string format_address(const AddressMatch& m) {
  std::string out = m.base.length == 0 && m.base.addr == 0 ? "any" : format_prefix(m.base);
  for (const auto& p : m.excluded) out += "!" + format_prefix(p);
  return out;
}

inline std::optional<AddressMatch> parse_address(std::string_view text) {
  AddressMatch m;
  auto bang = text.find('!');
  auto head = text.substr(0, bang);
  if (head != "any") {
    auto p = parse_prefix(head);
    if (!p) return std::nullopt;
    m.base = *p;
  }
  while (bang != std::string_view::npos) {
    text = text.substr(bang + 1);
    bang = text.find('!');
    auto p = parse_prefix(text.substr(0, bang));
    if (!p) return std::nullopt;
    m.excluded.push_back(*p);
  }
  return m;
}

struct PortRange {
  std::uint16_t lo = 0;
  std::uint16_t hi = 65535;

  static PortRange any() { return {}; }
  static PortRange single(std::uint16_t p) { return {p, p}; }
  bool is_any() const { return lo == 0 && hi == 65535; }
  bool contains(std::uint16_t p) const { return lo <= p && p <= hi; }

  friend bool operator==(const PortRange&, const PortRange&) = default;
};

inline std::string format_ports(const PortRange& r) {
  if (r.is_any()) return "any";
  if (r.lo == r.hi) return std::to_string(r.lo);
  return std::to_string(r.lo) + "-" + std::to_string(r.hi);
}

inline std::optional<PortRange> parse_ports(std::string_view text) {
  if (text == "any") return PortRange::any();
  auto read = [](std::string_view t) -> std::optional<std::uint16_t> {
    unsigned v = 0;
    auto [next, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || next != t.data() + t.size() || t.empty() || v > 65535) {
      return std::nullopt;
    }
    return static_cast<std::uint16_t>(v);
  };
  auto dash = text.find('-');
  auto lo = read(text.substr(0, dash));
  if (!lo) return std::nullopt;
  auto hi = dash == std::string_view::npos ? lo : read(text.substr(dash + 1));
  if (!hi || *lo > *hi) return std::nullopt;
  return PortRange{*lo, *hi};
}

struct MatchPattern {
  AddressMatch src;
  AddressMatch dst;
  PortRange src_port;
  PortRange dst_port;
  Proto proto = Proto::Any;

  friend bool operator==(const MatchPattern&, const MatchPattern&) = default;
};

struct Packet {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Proto proto = Proto::Tcp;
};

inline bool matches(const MatchPattern& m, const Packet& pkt) {
  return m.src.contains(pkt.src) && m.dst.contains(pkt.dst) &&
         m.src_port.contains(pkt.src_port) && m.dst_port.contains(pkt.dst_port) &&
         (m.proto == Proto::Any || m.proto == pkt.proto);
}

enum class OverlapRelation { Disjoint, Equal, AContainsB, BContainsA, PartialOverlap };

inline std::string_view to_string(OverlapRelation r) {
  switch (r) {
    case OverlapRelation::Disjoint: return "Disjoint";
    case OverlapRelation::Equal: return "Equal";
    case OverlapRelation::AContainsB: return "AContainsB";
    case OverlapRelation::BContainsA: return "BContainsA";
    case OverlapRelation::PartialOverlap: return "PartialOverlap";
  }
  return "?";
}

namespace detail {

inline OverlapRelation relate_sets(const IntervalSet& a, const IntervalSet& b) {
  if (a == b) return OverlapRelation::Equal;
  auto common = a.intersect(b);
  if (common.empty()) return OverlapRelation::Disjoint;
  if (common == b) return OverlapRelation::AContainsB;
  if (common == a) return OverlapRelation::BContainsA;
  return OverlapRelation::PartialOverlap;
}

inline IntervalSet proto_set(Proto p) {
  if (p == Proto::Any) return IntervalSet::of(1, 3);
  auto v = static_cast<std::uint64_t>(p);
  return IntervalSet::of(v, v);
}

}  // namespace detail

// Dimension-wise relation: Disjoint if any dimension is disjoint, Equal if
// all are equal, containment if one side contains the other in every
// dimension, PartialOverlap otherwise.
inline OverlapRelation match_overlap(const MatchPattern& a, const MatchPattern& b) {
  const std::array<OverlapRelation, 5> dims = {
      detail::relate_sets(a.src.as_set(), b.src.as_set()),
      detail::relate_sets(a.dst.as_set(), b.dst.as_set()),
      detail::relate_sets(IntervalSet::of(a.src_port.lo, a.src_port.hi),
                          IntervalSet::of(b.src_port.lo, b.src_port.hi)),
      detail::relate_sets(IntervalSet::of(a.dst_port.lo, a.dst_port.hi),
                          IntervalSet::of(b.dst_port.lo, b.dst_port.hi)),
      detail::relate_sets(detail::proto_set(a.proto), detail::proto_set(b.proto)),
  };
  bool a_contains = true, b_contains = true, all_equal = true;
  for (auto r : dims) {
    if (r == OverlapRelation::Disjoint) return OverlapRelation::Disjoint;
    all_equal &= r == OverlapRelation::Equal;
    a_contains &= r == OverlapRelation::Equal || r == OverlapRelation::AContainsB;
    b_contains &= r == OverlapRelation::Equal || r == OverlapRelation::BContainsA;
  }
  if (all_equal) return OverlapRelation::Equal;
  if (a_contains) return OverlapRelation::AContainsB;
  if (b_contains) return OverlapRelation::BContainsA;
  return OverlapRelation::PartialOverlap;
}

// Same packet set, regardless of how each dimension is spelled.
inline bool same_match(const MatchPattern& a, const MatchPattern& b) {
  return match_overlap(a, b) == OverlapRelation::Equal;
}

}  // namespace nfp

#endif  // NFP_MATCH_HPP
