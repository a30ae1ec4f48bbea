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

// M/M/c equilibrium analysis and whole-chain latency estimates.
//
// Utilization is per server, rho = lambda / (c * mu). Every sum over
// (c*rho)^n / n! is evaluated with a running term, rescaled by exact powers
// of two whenever it grows large, so no factorial is ever formed and the
// results stay finite for very large c.

#ifndef NFP_QUEUEING_HPP
#define NFP_QUEUEING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nfp/csv.hpp"
#include "nfp/dependency.hpp"
#include "nfp/errors.hpp"

namespace nfp {

struct MmcParams {
  double arrival_rate;  // lambda, arrivals/sec
  double service_rate;  // mu, services/sec per server
  int servers;          // c

  void validate() const {
    if (!(arrival_rate > 0) || !std::isfinite(arrival_rate)) {
      throw std::invalid_argument("arrival rate must be finite and > 0");
    }
    if (!(service_rate > 0) || !std::isfinite(service_rate)) {
      throw std::invalid_argument("service rate must be finite and > 0");
    }
    if (servers < 1) throw std::invalid_argument("server count must be >= 1");
  }
};

struct MmcMetrics {
  double rho;
  double p0;
  double delay_probability;   // Erlang C, Pi_W
  double mean_queue_length;   // E(L^q)
  double mean_wait;           // E(W), time in queue
  double mean_sojourn;        // E(W) + 1/mu
};

// Per-server utilization. Throws UnstableError when rho >= 1.
inline double utilization(const MmcParams& p) {
  p.validate();
  const double rho = p.arrival_rate / (p.servers * p.service_rate);
  if (!(rho < 1.0)) {
    throw UnstableError("unstable station: rho = " + csv::number(rho) + " >= 1");
  }
  return rho;
}

namespace detail {

inline constexpr int kRescaleBits = 512;
inline const double kRescaleAt = std::ldexp(1.0, kRescaleBits);

// Running sums of t_n = (c*rho)^n / n!, stored as value * 2^exponent.
struct ErlangSums {
  double head;       // sum_{n=0}^{c-1} t_n
  double top;        // t_c
  long exponent;
  double rho;

  double normalizer() const { return head + top / (1.0 - rho); }
};

inline ErlangSums erlang_sums(const MmcParams& p) {
  const double rho = utilization(p);
  const double offered = p.arrival_rate / p.service_rate;  // c * rho
  double head = 0.0, term = 1.0;
  long exponent = 0;
  for (int n = 0; n < p.servers; ++n) {
    head += term;
    term *= offered / (n + 1);
    if (term > kRescaleAt) {
      term = std::ldexp(term, -kRescaleBits);
      head = std::ldexp(head, -kRescaleBits);
      exponent += kRescaleBits;
    }
  }
  return {head, term, exponent, rho};
}

}  // namespace detail

// Probability of an empty system:
//   p0 = ( sum_{n<c} (c rho)^n/n! + (c rho)^c/c! * 1/(1-rho) )^-1
inline double p0(const MmcParams& p) {
  const auto s = detail::erlang_sums(p);
  return std::ldexp(1.0 / s.normalizer(), static_cast<int>(-s.exponent));
}

// Equilibrium probability of n jobs in the system:
//   p_n = (c rho)^n / n! * p0        for n <= c
//   p_n = rho^(n-c) * p_c            for n >  c
inline double p_n(const MmcParams& p, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  const auto s = detail::erlang_sums(p);
  if (n >= p.servers) {
    const double pc = s.top / s.normalizer();
    return n == p.servers ? pc : pc * std::pow(s.rho, static_cast<double>(n - p.servers));
  }
  const double offered = p.arrival_rate / p.service_rate;
  double term = 1.0;
  long exponent = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    term *= offered / static_cast<double>(k + 1);
    if (term > detail::kRescaleAt) {
      term = std::ldexp(term, -detail::kRescaleBits);
      exponent += detail::kRescaleBits;
    }
  }
  return std::ldexp(term / s.normalizer(), static_cast<int>(exponent - s.exponent));
}

// Erlang C, the probability that an arrival has to queue:
//   Pi_W = (c rho)^c/c! * ( (1-rho) sum_{n<c} (c rho)^n/n! + (c rho)^c/c! )^-1
inline double delay_probability(const MmcParams& p) {
  const auto s = detail::erlang_sums(p);
  return s.top / ((1.0 - s.rho) * s.head + s.top);
}

// E(L^q) = Pi_W * rho / (1 - rho)
inline double mean_queue_length(const MmcParams& p) {
  const double rho = utilization(p);
  return delay_probability(p) * rho / (1.0 - rho);
}

// E(W) = Pi_W / (1 - rho) / (c mu). Also evaluated as
// Pi_W/(c mu) + E(L^q)/(c mu); a disagreement beyond 1e-12 relative is a bug
// and raises std::logic_error.
inline double mean_wait(const MmcParams& p) {
  const double rho = utilization(p);
  const double pi_w = delay_probability(p);
  const double rate = p.servers * p.service_rate;
  const double direct = pi_w / (1.0 - rho) / rate;
  const double lq = pi_w * rho / (1.0 - rho);
  const double by_departures = pi_w / rate + lq / rate;
  if (std::abs(direct - by_departures) > 1e-12 * std::max(std::abs(direct), std::abs(by_departures))) {
    throw std::logic_error("mean wait forms disagree: " + csv::number(direct) + " vs " +
                           csv::number(by_departures));
  }
  return direct;
}

inline MmcMetrics metrics(const MmcParams& p) {
  const double w = mean_wait(p);
  return {utilization(p), p0(p), delay_probability(p), mean_queue_length(p), w,
          w + 1.0 / p.service_rate};
}

inline constexpr std::string_view kMetricsHeader = "lambda,mu,c,rho,p0,pi_w,e_lq,e_w";

inline std::string metrics_csv_row(const MmcParams& p, const MmcMetrics& m) {
  return csv::format_row({csv::number(p.arrival_rate), csv::number(p.service_rate),
                          std::to_string(p.servers), csv::number(m.rho), csv::number(m.p0),
                          csv::number(m.delay_probability), csv::number(m.mean_queue_length),
                          csv::number(m.mean_wait)});
}

enum class EstimateMode { Serial, Staged };

struct StageEstimate {
  std::vector<std::string> members;
  double latency;  // seconds
  friend bool operator==(const StageEstimate&, const StageEstimate&) = default;
};

struct ChainEstimate {
  std::vector<StageEstimate> per_stage;
  double total = 0.0;
  EstimateMode mode = EstimateMode::Serial;
  friend bool operator==(const ChainEstimate&, const ChainEstimate&) = default;
};

struct EstimateOptions {
  double merge_overhead = 0.0;  // added to every stage in Staged mode
  // Reduce the arrival rate seen downstream by each function's drop
  // probability. Off: every station sees the full rate.
  bool thinning = false;
};

namespace detail {

inline double station_latency(const VnfInstance& v, double arrival_rate) {
  MmcParams p{arrival_rate, v.service_rate, v.servers};
  try {
    return mean_wait(p) + 1.0 / v.service_rate;
  } catch (const UnstableError& e) {
    throw UnstableError("station '" + v.id + "' is unstable at lambda = " +
                            csv::number(arrival_rate) + ": " + e.what(),
                        v.id);
  }
}

inline const VnfInstance& find_vnf(const std::vector<VnfInstance>& chain, std::string_view id) {
  for (const auto& v : chain) {
    if (v.id == id) return v;
  }
  throw std::invalid_argument("plan names unknown VNF '" + std::string(id) + "'");
}

}  // namespace detail

// Each station contributes E(W) + 1/mu; the total is their sum.
inline ChainEstimate chain_latency(const std::vector<VnfInstance>& chain, double arrival_rate,
                                   const EstimateOptions& opts = {}) {
  ChainEstimate est;
  est.mode = EstimateMode::Serial;
  double rate = arrival_rate;
  for (const auto& v : chain) {
    const double latency = detail::station_latency(v, rate);
    est.per_stage.push_back({{v.id}, latency});
    est.total += latency;
    if (opts.thinning) rate *= 1.0 - v.drop_probability;
  }
  return est;
}

// A stage costs the slowest member's E(W) + 1/mu plus the merge overhead.
inline ChainEstimate chain_latency(const StagePlan& plan, const std::vector<VnfInstance>& chain,
                                   double arrival_rate, const EstimateOptions& opts = {}) {
  ChainEstimate est;
  est.mode = EstimateMode::Staged;
  double rate = arrival_rate;
  for (const auto& stage : plan.stages) {
    if (stage.empty()) throw std::invalid_argument("empty stage in plan");
    double slowest = 0.0;
    double survive = 1.0;
    for (const auto& id : stage) {
      const auto& v = detail::find_vnf(chain, id);
      slowest = std::max(slowest, detail::station_latency(v, rate));
      survive *= 1.0 - v.drop_probability;
    }
    const double latency = slowest + opts.merge_overhead;
    est.per_stage.push_back({stage, latency});
    est.total += latency;
    if (opts.thinning) rate *= survive;
  }
  return est;
}

inline constexpr std::string_view kEstimateHeader = "mode,stage,members,latency";

inline std::string estimate_to_csv(const ChainEstimate& est) {
  const std::string mode = est.mode == EstimateMode::Serial ? "serial" : "staged";
  std::string out = std::string(kEstimateHeader) + "\n";
  for (std::size_t i = 0; i < est.per_stage.size(); ++i) {
    std::string members;
    for (const auto& id : est.per_stage[i].members) {
      if (!members.empty()) members += ' ';
      members += id;
    }
    out += csv::format_row({mode, std::to_string(i + 1), members,
                            csv::number(est.per_stage[i].latency)});
  }
  out += csv::format_row({mode, "TOTAL", "", csv::number(est.total)});
  return out;
}

inline ChainEstimate estimate_from_csv(std::string_view text) {
  auto rows = csv::parse(text);
  if (rows.empty() || csv::format_row(rows[0]) != std::string(kEstimateHeader) + "\n") {
    throw ParseError("missing estimate header", 1, 1, std::string(kEstimateHeader));
  }
  ChainEstimate est;
  bool have_total = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 4) throw ParseError("expected 4 fields", i + 1);
    if (row[0] != "serial" && row[0] != "staged") throw ParseError("unknown mode", i + 1, 1);
    est.mode = row[0] == "serial" ? EstimateMode::Serial : EstimateMode::Staged;
    if (row[1] == "TOTAL") {
      est.total = csv::to_double(row[3]);
      have_total = true;
      continue;
    }
    StageEstimate stage;
    std::string_view members = row[2];
    while (!members.empty()) {
      auto sp = members.find(' ');
      stage.members.emplace_back(members.substr(0, sp));
      members = sp == std::string_view::npos ? std::string_view{} : members.substr(sp + 1);
    }
    stage.latency = csv::to_double(row[3]);
    est.per_stage.push_back(std::move(stage));
  }
  if (!have_total) throw ParseError("missing TOTAL row");
  return est;
}

}  // namespace nfp

#endif  // NFP_QUEUEING_HPP
