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

// Published SFC latency measurements (seconds) for 2/4/8-core OVS-DPDK
// deployments, shipped as a fixture, and the speedup ratios derived from
// them.

#ifndef NFP_FIXTURE_HPP
#define NFP_FIXTURE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nfp/csv.hpp"
#include "nfp/errors.hpp"

namespace nfp {

enum class FixtureMode { Serial, Theoretical, Nfp };

inline std::string_view to_string(FixtureMode m) {
  switch (m) {
    case FixtureMode::Serial: return "serial";
    case FixtureMode::Theoretical: return "theoretical";
    case FixtureMode::Nfp: return "nfp";
  }
  return "?";
}

struct FixtureRow {
  int cores;
  int network_size;
  FixtureMode mode;
  double latency;
};

struct LatencyFixture {
  std::vector<FixtureRow> rows;

  double latency(int cores, int size, FixtureMode mode) const {
    for (const auto& r : rows) {
      if (r.cores == cores && r.network_size == size && r.mode == mode) return r.latency;
    }
    throw std::out_of_range("no fixture row for cores=" + std::to_string(cores) +
                            " size=" + std::to_string(size));
  }
};

inline constexpr std::string_view kLatencyData = R"(cores,network_size,mode,latency
2,50,serial,0.45
2,50,theoretical,0.28
2,50,nfp,0.23
2,100,serial,0.98
2,100,theoretical,0.67
2,100,nfp,0.56
2,150,serial,1.58
2,150,theoretical,1.53
2,150,nfp,1.12
2,200,serial,4.87
2,200,theoretical,4.26
2,200,nfp,2.72
2,250,serial,10.1
2,250,theoretical,9
2,250,nfp,6.05
4,50,serial,0.45
4,50,theoretical,0.18
4,50,nfp,0.13
4,100,serial,0.98
4,100,theoretical,0.57
4,100,nfp,0.41
4,150,serial,1.58
4,150,theoretical,1.03
4,150,nfp,0.72
4,200,serial,4.87
4,200,theoretical,2.96
4,200,nfp,1.62
4,250,serial,10.1
4,250,theoretical,6.1
4,250,nfp,4.05
8,50,serial,0.45
8,50,theoretical,0.12
8,50,nfp,0.1
8,100,serial,0.98
8,100,theoretical,0.28
8,100,nfp,0.21
8,150,serial,1.58
8,150,theoretical,0.58
8,150,nfp,0.46
8,200,serial,4.87
8,200,theoretical,2.07
8,200,nfp,1.82
8,250,serial,10.1
8,250,theoretical,4.1
8,250,nfp,2.95
)";

// FNV-1a 64 of kLatencyData.
inline constexpr std::uint64_t kLatencyChecksum = 0x74c6ce474b9e9413ull;

inline std::uint64_t fixture_checksum(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Parses and validates fixture text: 5 sizes x 3 modes per core count, and a
// serial baseline shared by every core count.
inline LatencyFixture load_fixture(std::string_view text, std::uint64_t checksum) {
  if (fixture_checksum(text) != checksum) throw Error("fixture data is corrupted (checksum mismatch)");
  auto rows = csv::parse(text);
  if (rows.empty() || rows[0] != csv::Row{"cores", "network_size", "mode", "latency"}) {
    throw ParseError("missing fixture header", 1);
  }
  LatencyFixture f;
  std::map<int, std::set<std::pair<int, FixtureMode>>> cells;
  std::map<int, double> serial_by_size;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw ParseError("expected 4 fields", i + 1);
    FixtureRow row{static_cast<int>(csv::to_int(r[0])), static_cast<int>(csv::to_int(r[1])),
                   FixtureMode::Serial, csv::to_double(r[3])};
    if (r[2] == "theoretical") row.mode = FixtureMode::Theoretical;
    else if (r[2] == "nfp") row.mode = FixtureMode::Nfp;
    else if (r[2] != "serial") throw ParseError("unknown mode '" + r[2] + "'", i + 1, 3);
    if (!(row.latency > 0)) throw ParseError("latency must be > 0", i + 1, 4);
    if (!cells[row.cores].emplace(row.network_size, row.mode).second) {
      throw ParseError("duplicate fixture row", i + 1);
    }
    if (row.mode == FixtureMode::Serial) {
      auto [it, fresh] = serial_by_size.emplace(row.network_size, row.latency);
      if (!fresh && it->second != row.latency) {
        throw ParseError("serial baseline differs between core counts", i + 1, 4);
      }
    }
    f.rows.push_back(row);
  }
  for (const auto& [cores, set] : cells) {
    std::set<int> sizes;
    for (const auto& [size, mode] : set) sizes.insert(size);
    if (sizes.size() != 5 || set.size() != 15) {
      throw ParseError("core count " + std::to_string(cores) + " lacks 5 sizes x 3 modes");
    }
  }
  return f;
}

inline LatencyFixture load_fixture() { return load_fixture(kLatencyData, kLatencyChecksum); }

struct GainRow {
  int cores;
  int network_size;
  double theoretical_over_nfp;
  double serial_over_nfp;
};

struct GainTable {
  std::vector<GainRow> rows;

  double mean_theoretical() const { return mean(&GainRow::theoretical_over_nfp); }
  double mean_serial() const { return mean(&GainRow::serial_over_nfp); }
  double max_theoretical() const { return max(&GainRow::theoretical_over_nfp); }
  double max_serial() const { return max(&GainRow::serial_over_nfp); }

 private:
  double mean(double GainRow::*field) const {
    double sum = 0;
    for (const auto& r : rows) sum += r.*field;
    return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
  }
  double max(double GainRow::*field) const {
    double m = 0;
    for (const auto& r : rows) m = std::max(m, r.*field);
    return m;
  }
};

// Rows ordered by (cores, size).
inline GainTable compute_gains(const LatencyFixture& f) {
  std::set<std::pair<int, int>> points;
  for (const auto& r : f.rows) points.emplace(r.cores, r.network_size);
  GainTable g;
  for (const auto& [cores, size] : points) {
    const double nfp = f.latency(cores, size, FixtureMode::Nfp);
    g.rows.push_back({cores, size, f.latency(cores, size, FixtureMode::Theoretical) / nfp,
                      f.latency(cores, size, FixtureMode::Serial) / nfp});
  }
  return g;
}

inline constexpr std::string_view kGainHeader =
    "cores,network_size,gain_theoretical_over_nfp,gain_serial_over_nfp";

// 15 point rows, then `mean` and `max` summary rows with an empty size.
inline std::string gains_to_csv(const GainTable& g) {
  std::string out = std::string(kGainHeader) + "\n";
  for (const auto& r : g.rows) {
    out += csv::format_row({std::to_string(r.cores), std::to_string(r.network_size),
                            csv::number(r.theoretical_over_nfp), csv::number(r.serial_over_nfp)});
  }
  out += csv::format_row({"mean", "", csv::number(g.mean_theoretical()), csv::number(g.mean_serial())});
  out += csv::format_row({"max", "", csv::number(g.max_theoretical()), csv::number(g.max_serial())});
  return out;
}

}  // namespace nfp

#endif  // NFP_FIXTURE_HPP
