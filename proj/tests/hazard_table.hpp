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

// Frozen hazard classes and parallel verdicts for every ordered pair of
// built-in kinds.

#ifndef NFP_TESTS_HAZARD_TABLE_HPP
#define NFP_TESTS_HAZARD_TABLE_HPP

#include <array>
#include <string>

#include "nfp/dependency.hpp"

namespace nfp::testing {

inline std::string label(const std::array<Hazard, 2>& h) {
  return std::string(to_string(h[0].kind)) + "/" + std::string(to_string(h[1].kind));
}

// Rows: first function, columns: second, both in kAllVnfKinds order
// (probe, nat, firewall, proxy, ids, ips, lb, vpn). Entry: header/payload.
inline constexpr const char* kHazards[8][8] = {
    {"RAR/NONE", "WAR/NONE", "WAR/NONE", "RAR/NONE", "RAR/NONE", "WAR/NONE", "WAR/NONE", "WAR/NONE"},
    {"RAW/NONE", "WAW/NONE", "WAW/NONE", "RAW/NONE", "RAW/NONE", "WAW/NONE", "WAW/NONE", "WAW/NONE"},
    {"RAW/NONE", "WAW/NONE", "WAW/NONE", "RAW/NONE", "RAW/NONE", "WAW/NONE", "WAW/NONE", "WAW/NONE"},
    {"RAR/NONE", "WAR/NONE", "WAR/NONE", "RAR/RAR", "RAR/RAR", "WAR/RAR", "WAR/RAR", "WAR/WAR"},
    {"RAR/NONE", "WAR/NONE", "WAR/NONE", "RAR/RAR", "RAR/RAR", "WAR/RAR", "WAR/RAR", "WAR/WAR"},
    {"RAW/NONE", "WAW/NONE", "WAW/NONE", "RAW/RAR", "RAW/RAR", "WAW/RAR", "WAW/RAR", "WAW/WAR"},
    {"RAW/NONE", "WAW/NONE", "WAW/NONE", "RAW/RAR", "RAW/RAR", "WAW/RAR", "WAW/RAR", "WAW/WAR"},
    {"RAW/NONE", "WAW/NONE", "WAW/NONE", "RAW/RAW", "RAW/RAW", "WAW/RAW", "WAW/RAW", "WAW/WAW"},
};

inline constexpr const char* kParallel[8] = {
    "11111111", "00000000", "10011000", "11111111",
    "11111111", "10011000", "00000000", "00000000",
};

}  // namespace nfp::testing

#endif  // NFP_TESTS_HAZARD_TABLE_HPP
