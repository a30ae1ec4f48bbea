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

// Scenario files: `key = value` lines, `#` comments.
//
//   chain          path to a chain spec, relative to the scenario file
//   seed           master RNG seed (default 1)
//   lambda         arrival rate, packets/sec
//   horizon        packets to generate (default 1000000)
//   horizon_seconds  stop arrivals at this simulated time instead
//   warmup         leading packets excluded from statistics (default 10000)
//   epsilon        merge overhead per stage, seconds (default 0)
//   thinning       true/false (default false)
//   reps           replications (default 1)
//   per_node_rate  arrival rate per network node, used by sweeps

#ifndef NFP_SCENARIO_HPP
#define NFP_SCENARIO_HPP

#include <cctype>
#include <set>
#include <string>
#include <string_view>

#include "nfp/csv.hpp"
#include "nfp/errors.hpp"
#include "nfp/simulator.hpp"

namespace nfp {

struct Scenario {
  std::string chain;
  SimConfig sim;
  int replications = 1;
  double per_node_rate = 0.0;
  bool has_lambda = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("missing '='", line_no, 1, "key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const auto value = detail::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line_no, 1);
    const auto column = static_cast<std::size_t>(eq + 2);
    try {
      if (key == "chain") {
        if (value.empty()) throw ParseError("empty chain path");
        sc.chain = std::string(value);
      } else if (key == "seed") {
        auto v = csv::to_int(value);
        if (v < 0) throw ParseError("seed must be >= 0");
        sc.sim.seed = static_cast<std::uint64_t>(v);
      } else if (key == "lambda") {
        sc.sim.arrival_rate = csv::to_double(value);
        if (!(sc.sim.arrival_rate > 0)) throw ParseError("lambda must be > 0");
        sc.has_lambda = true;
      } else if (key == "horizon") {
        auto v = csv::to_int(value);
        if (v < 0) throw ParseError("horizon must be >= 0");
        sc.sim.horizon_packets = static_cast<std::uint64_t>(v);
      } else if (key == "horizon_seconds") {
        sc.sim.horizon_seconds = csv::to_double(value);
        if (!(*sc.sim.horizon_seconds > 0)) throw ParseError("horizon_seconds must be > 0");
      } else if (key == "warmup") {
        auto v = csv::to_int(value);
        if (v < 0) throw ParseError("warmup must be >= 0");
        sc.sim.warmup = static_cast<std::uint64_t>(v);
      } else if (key == "epsilon") {
        sc.sim.merge_overhead = csv::to_double(value);
        if (sc.sim.merge_overhead < 0) throw ParseError("epsilon must be >= 0");
      } else if (key == "thinning") {
        if (value != "true" && value != "false") throw ParseError("thinning must be true or false");
        sc.sim.thinning = value == "true";
      } else if (key == "reps") {
        auto v = csv::to_int(value);
        if (v < 1 || v > 10000) throw ParseError("reps must lie in 1..10000");
        sc.replications = static_cast<int>(v);
      } else if (key == "per_node_rate") {
        sc.per_node_rate = csv::to_double(value);
        if (!(sc.per_node_rate > 0)) throw ParseError("per_node_rate must be > 0");
      } else {
        throw ParseError("unknown key '" + key + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no, column);
    }
  }
  if (sc.chain.empty()) throw ParseError("scenario has no chain", 0, 0, "chain = <path>");
  if (!sc.sim.horizon_seconds && sc.sim.horizon_packets < sc.sim.warmup) {
    throw ParseError("horizon must be >= warmup");
  }
  return sc;
}

}  // namespace nfp

#endif  // NFP_SCENARIO_HPP
