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

#ifndef NFP_VNF_KIND_HPP
#define NFP_VNF_KIND_HPP

#include <array>
#include <optional>
#include <string_view>

namespace nfp {

enum class VnfKind { Probe, Nat, Firewall, Proxy, Ids, Ips, LoadBalancer, Vpn };

inline constexpr std::array<VnfKind, 8> kAllVnfKinds = {
    VnfKind::Probe, VnfKind::Nat, VnfKind::Firewall,     VnfKind::Proxy,
    VnfKind::Ids,   VnfKind::Ips, VnfKind::LoadBalancer, VnfKind::Vpn,
};

// Names used in policy files and chain specs.
inline std::string_view to_string(VnfKind kind) {
  switch (kind) {
    case VnfKind::Probe: return "probe";
    case VnfKind::Nat: return "nat";
    case VnfKind::Firewall: return "firewall";
    case VnfKind::Proxy: return "proxy";
    case VnfKind::Ids: return "ids";
    case VnfKind::Ips: return "ips";
    case VnfKind::LoadBalancer: return "lb";
    case VnfKind::Vpn: return "vpn";
  }
  return "?";
}

inline std::optional<VnfKind> parse_vnf_kind(std::string_view text) {
  for (auto kind : kAllVnfKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

}  // namespace nfp

#endif  // NFP_VNF_KIND_HPP
