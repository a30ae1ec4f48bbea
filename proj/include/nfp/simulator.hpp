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

// Seeded discrete-event simulation of packets crossing a chain of M/M/c
// stations, either one station after another or stage by stage with
// broadcast-and-join inside each stage.

#ifndef NFP_SIMULATOR_HPP
#define NFP_SIMULATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nfp/csv.hpp"
#include "nfp/dependency.hpp"
#include "nfp/queueing.hpp"

namespace nfp {

struct SimConfig {
  std::uint64_t seed = 1;
  double arrival_rate = 1.0;
  std::uint64_t horizon_packets = 1'000'000;
  // When set, arrivals stop at this simulated time instead of after
  // horizon_packets.
  std::optional<double> horizon_seconds;
  std::uint64_t warmup = 10'000;
  double merge_overhead = 0.0;
  bool thinning = false;

  void validate() const {
    if (!(arrival_rate > 0) || !std::isfinite(arrival_rate)) {
      throw std::invalid_argument("arrival rate must be finite and > 0");
    }
    if (!horizon_seconds && horizon_packets < warmup) {
      throw std::invalid_argument("horizon must be >= warmup");
    }
    if (horizon_seconds && !(*horizon_seconds > 0)) {
      throw std::invalid_argument("horizon_seconds must be > 0");
    }
    if (merge_overhead < 0) throw std::invalid_argument("merge overhead must be >= 0");
  }
};

struct StationStats {
  std::string id;
  double utilization = 0.0;  // observed busy fraction per server
  double mean_wait = 0.0;    // queueing delay of measured packets
  std::uint64_t waits = 0;
  bool saturated = false;
  friend bool operator==(const StationStats&, const StationStats&) = default;
};

struct LatencyStats {
  std::uint64_t count = 0;  // measured packets that left the chain
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double mean_in_system = 0.0;  // time-average packets in the chain
  std::uint64_t arrivals = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::vector<StationStats> stations;
  bool saturated = false;
  friend bool operator==(const LatencyStats&, const LatencyStats&) = default;
};

// Per-packet end-to-end latencies of measured packets, by arrival index.
// Dropped packets are NaN.
struct SimTrace {
  LatencyStats stats;
  std::vector<double> latencies;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Independent stream per name, so adding a station leaves the draws of the
// others untouched.
inline std::mt19937_64 named_stream(std::uint64_t seed, std::string_view name) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ fnv1a(name)));
}

class Engine {
 public:
  Engine(const std::vector<VnfInstance>& chain, const StagePlan& plan, const SimConfig& cfg)
      : cfg_(cfg), arrivals_rng_(named_stream(cfg.seed, "arrivals")) {
    cfg.validate();
    std::map<std::string, std::size_t, std::less<>> index;
    for (const auto& v : chain) {
      if (!index.emplace(v.id, stations_.size()).second) {
        throw std::invalid_argument("duplicate VNF id '" + v.id + "'");
      }
      Station s;
      s.vnf = &v;
      s.service_rng = named_stream(cfg.seed, "station:" + v.id + ":service");
      s.drop_rng = named_stream(cfg.seed, "station:" + v.id + ":drop");
      s.service = std::exponential_distribution<double>(v.service_rate);
      stations_.push_back(std::move(s));
    }
    std::vector<int> seen(stations_.size());
    for (const auto& stage : plan.stages) {
      if (stage.empty()) throw std::invalid_argument("empty stage in plan");
      auto& ids = stages_.emplace_back();
      for (const auto& id : stage) {
        auto it = index.find(id);
        if (it == index.end()) throw std::invalid_argument("plan names unknown VNF '" + id + "'");
        if (seen[it->second]++) throw std::invalid_argument("VNF '" + id + "' appears twice in plan");
        ids.push_back(it->second);
      }
    }
    if (stages_.empty()) throw std::invalid_argument("plan has no stages");
  }

  SimTrace run() {
    const bool by_time = cfg_.horizon_seconds.has_value();
    if (!by_time) {
      packets_.reserve(cfg_.horizon_packets);
      measured_latency_.assign(cfg_.horizon_packets - cfg_.warmup,
                               std::numeric_limits<double>::quiet_NaN());
    }
    std::exponential_distribution<double> gap(cfg_.arrival_rate);
    if (by_time || cfg_.horizon_packets > 0) {
      const double t = gap(arrivals_rng_);
      if (!by_time || t <= *cfg_.horizon_seconds) schedule(t, EventType::Arrival, 0, 0);
    }

    while (!events_.empty()) {
      const Event ev = events_.top();
      events_.pop();
      advance_clock(ev.time);
      switch (ev.type) {
        case EventType::Arrival: {
          const auto id = packets_.size();
          if (id == cfg_.warmup) window_start_ = ev.time;
          packets_.push_back({ev.time, 0, 0, false});
          ++in_system_;
          const double next = ev.time + gap(arrivals_rng_);
          const bool more = by_time ? next <= *cfg_.horizon_seconds
                                    : packets_.size() < cfg_.horizon_packets;
          if (more) {
            schedule(next, EventType::Arrival, 0, 0);
          } else {
            window_end_ = ev.time;
          }
          enter_stage(id, 0, ev.time);
          break;
        }
        case EventType::Completion:
          complete(ev.station, ev.packet, ev.time);
          break;
        case EventType::Join:
          leave_stage(ev.packet, ev.time);
          break;
      }
    }
    return summarize();
  }

 private:
  enum class EventType : std::uint8_t { Arrival, Completion, Join };

  struct Event {
    double time;
    std::uint64_t seq;
    EventType type;
    std::uint32_t station;
    std::uint64_t packet;
    // std::priority_queue is a max-heap.
    bool operator<(const Event& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  struct PacketState {
    double arrival;
    std::uint32_t stage;
    std::uint32_t pending;
    bool dropped;
  };

  struct Waiting {
    std::uint64_t packet;
    double since;
  };

  struct Station {
    const VnfInstance* vnf = nullptr;
    std::mt19937_64 service_rng;
    std::mt19937_64 drop_rng;
    std::exponential_distribution<double> service;
    std::int64_t busy = 0;
    std::deque<Waiting> queue;
    double busy_time = 0.0;  // service time started inside the window
    double wait_sum = 0.0;
    std::uint64_t waits = 0;
  };

  bool measured(std::uint64_t packet) const { return packet >= cfg_.warmup; }

  void schedule(double time, EventType type, std::uint32_t station, std::uint64_t packet) {
    events_.push({time, next_seq_++, type, station, packet});
  }

  void advance_clock(double t) {
    if (window_start_ && !window_closed_) {
      const double from = std::max(last_time_, *window_start_);
      const double to = window_end_ ? std::min(t, *window_end_) : t;
      if (to > from) area_ += static_cast<double>(in_system_) * (to - from);
      if (window_end_ && t >= *window_end_) window_closed_ = true;
    }
    last_time_ = t;
  }

  bool in_window(double t) const {
    return window_start_ && t >= *window_start_ && (!window_end_ || t <= *window_end_);
  }

  void start_service(std::uint32_t s, std::uint64_t packet, double now, double since) {
    auto& st = stations_[s];
    ++st.busy;
    const double service = st.service(st.service_rng);
    if (in_window(now)) st.busy_time += service;
    if (measured(packet)) {
      st.wait_sum += now - since;
      ++st.waits;
    }
    schedule(now + service, EventType::Completion, s, packet);
  }

  void enter_stage(std::uint64_t packet, std::uint32_t stage, double now) {
    auto& p = packets_[packet];
    p.stage = stage;
    p.pending = static_cast<std::uint32_t>(stages_[stage].size());
    for (auto s : stages_[stage]) {
      auto& st = stations_[s];
      if (st.busy < st.vnf->servers) {
        start_service(static_cast<std::uint32_t>(s), packet, now, now);
      } else {
        st.queue.push_back({packet, now});
      }
    }
  }

  void complete(std::uint32_t s, std::uint64_t packet, double now) {
    auto& st = stations_[s];
    --st.busy;
    if (!st.queue.empty()) {
      const auto next = st.queue.front();
      st.queue.pop_front();
      start_service(s, next.packet, now, next.since);
    }
    auto& p = packets_[packet];
    if (cfg_.thinning && st.vnf->drop_probability > 0) {
      std::bernoulli_distribution drop(st.vnf->drop_probability);
      if (drop(st.drop_rng)) p.dropped = true;
    }
    if (--p.pending > 0) return;
    if (cfg_.merge_overhead > 0) {
      schedule(now + cfg_.merge_overhead, EventType::Join, 0, packet);
    } else {
      leave_stage(packet, now);
    }
  }

  void leave_stage(std::uint64_t packet, double now) {
    auto& p = packets_[packet];
    if (p.dropped) {
      --in_system_;
      ++dropped_;
      return;
    }
    if (p.stage + 1 < stages_.size()) {
      enter_stage(packet, p.stage + 1, now);
      return;
    }
    --in_system_;
    ++delivered_;
    if (measured(packet)) {
      const auto slot = packet - cfg_.warmup;
      if (slot >= measured_latency_.size()) {
        measured_latency_.resize(slot + 1, std::numeric_limits<double>::quiet_NaN());
      }
      measured_latency_[slot] = now - p.arrival;
    }
  }

  SimTrace summarize() {
    SimTrace trace;
    auto& stats = trace.stats;
    stats.arrivals = packets_.size();
    stats.delivered = delivered_;
    stats.dropped = dropped_;
    if (packets_.size() > cfg_.warmup) {
      measured_latency_.resize(packets_.size() - cfg_.warmup,
                               std::numeric_limits<double>::quiet_NaN());
    } else {
      measured_latency_.clear();
    }

    std::vector<double> sorted;
    sorted.reserve(measured_latency_.size());
    for (double x : measured_latency_) {
      if (!std::isnan(x)) sorted.push_back(x);
    }
    stats.count = sorted.size();
    if (!sorted.empty()) {
      double sum = 0.0;
      for (double x : sorted) sum += x;
      stats.mean = sum / static_cast<double>(sorted.size());
      std::sort(sorted.begin(), sorted.end());
      auto rank = [&](double q) {
        auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
        return sorted[std::clamp<std::size_t>(k, 1, sorted.size()) - 1];
      };
      stats.p50 = rank(0.50);
      stats.p95 = rank(0.95);
      stats.p99 = rank(0.99);
    }

    double window = 0.0;
    if (window_start_) {
      const double end = window_end_ ? *window_end_ : last_time_;
      window = end - *window_start_;
    }
    if (window > 0) stats.mean_in_system = area_ / window;

    for (const auto& st : stations_) {
      StationStats s;
      s.id = st.vnf->id;
      if (window > 0) s.utilization = st.busy_time / (window * st.vnf->servers);
      s.waits = st.waits;
      if (st.waits > 0) s.mean_wait = st.wait_sum / static_cast<double>(st.waits);
      s.saturated = s.utilization > 0.99;
      stats.saturated |= s.saturated;
      stats.stations.push_back(std::move(s));
    }
    trace.latencies = std::move(measured_latency_);
    return trace;
  }

  SimConfig cfg_;
  std::mt19937_64 arrivals_rng_;
  std::vector<Station> stations_;
  std::vector<std::vector<std::size_t>> stages_;
  std::vector<PacketState> packets_;
  std::vector<double> measured_latency_;
  std::priority_queue<Event> events_;
  std::uint64_t next_seq_ = 0;
  std::int64_t in_system_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
  double last_time_ = 0.0;
  double area_ = 0.0;
  std::optional<double> window_start_;
  std::optional<double> window_end_;
  bool window_closed_ = false;
};

inline StagePlan serial_plan(const std::vector<VnfInstance>& chain) {
  StagePlan plan;
  for (const auto& v : chain) plan.stages.push_back({v.id});
  return plan;
}

}  // namespace detail

inline SimTrace trace_nfp(const StagePlan& plan, const std::vector<VnfInstance>& chain,
                          const SimConfig& cfg) {
  return detail::Engine(chain, plan, cfg).run();
}

inline SimTrace trace_serial(const std::vector<VnfInstance>& chain, const SimConfig& cfg) {
  if (chain.empty()) throw std::invalid_argument("cannot simulate an empty chain");
  return trace_nfp(detail::serial_plan(chain), chain, cfg);
}

// Packets visit the stations one after another in chain order.
inline LatencyStats run_serial(const std::vector<VnfInstance>& chain, const SimConfig& cfg) {
  return trace_serial(chain, cfg).stats;
}

// Packets visit the plan's stages in order; inside a stage every member
// processes its own copy and the stage finishes when the slowest copy does,
// plus the configured merge overhead.
inline LatencyStats run_nfp(const StagePlan& plan, const std::vector<VnfInstance>& chain,
                            const SimConfig& cfg) {
  return trace_nfp(plan, chain, cfg).stats;
}

// |L - lambda W| / (lambda W), with L the time-average number in the chain.
inline double validate_littles_law(const LatencyStats& stats, double arrival_rate) {
  if (stats.count == 0) throw std::invalid_argument("no measured packets");
  const double lw = arrival_rate * stats.mean;
  return std::abs(stats.mean_in_system - lw) / lw;
}

struct ComparisonReport {
  StagePlan plan;
  std::vector<std::uint64_t> seeds;
  std::vector<LatencyStats> serial_runs;
  std::vector<LatencyStats> nfp_runs;
  double serial_mean = 0.0;  // average of per-run means
  double nfp_mean = 0.0;
  ChainEstimate theoretical;  // analytic, staged over the same plan
  double gain_serial_over_nfp = 0.0;
  double gain_theoretical_over_nfp = 0.0;
};

// Runs `replications` serial and staged simulations with seeds
// cfg.seed + i. Replications run concurrently; results keep seed order.
inline ComparisonReport compare_modes(const std::vector<VnfInstance>& chain, const SimConfig& cfg,
                                      int replications, const RuleBook& rules = {}) {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  ComparisonReport report;
  report.plan = build_stage_plan(chain, rules, cfg.merge_overhead);
  report.theoretical = chain_latency(report.plan, chain, cfg.arrival_rate,
                                     {cfg.merge_overhead, cfg.thinning});

  struct Pair {
    LatencyStats serial, nfp;
  };
  std::vector<std::future<Pair>> jobs;
  for (int i = 0; i < replications; ++i) {
    SimConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
    report.seeds.push_back(run_cfg.seed);
    jobs.push_back(std::async(std::launch::async, [&chain, &report, run_cfg] {
      return Pair{run_serial(chain, run_cfg), run_nfp(report.plan, chain, run_cfg)};
    }));
  }
  for (auto& job : jobs) {
    auto pair = job.get();
    report.serial_mean += pair.serial.mean;
    report.nfp_mean += pair.nfp.mean;
    report.serial_runs.push_back(std::move(pair.serial));
    report.nfp_runs.push_back(std::move(pair.nfp));
  }
  report.serial_mean /= replications;
  report.nfp_mean /= replications;
  if (report.nfp_mean > 0) {
    report.gain_serial_over_nfp = report.serial_mean / report.nfp_mean;
    report.gain_theoretical_over_nfp = report.theoretical.total / report.nfp_mean;
  }
  return report;
}

inline constexpr std::string_view kResultsHeader =
    "mode,seed,count,mean,p50,p95,p99,littles_residual";

inline csv::Row results_row(std::string_view mode, std::uint64_t seed, const LatencyStats& s,
                            double arrival_rate) {
  const std::string residual =
      s.count > 0 ? csv::number(validate_littles_law(s, arrival_rate)) : std::string{};
  return {std::string(mode), std::to_string(seed), std::to_string(s.count), csv::number(s.mean),
          csv::number(s.p50), csv::number(s.p95), csv::number(s.p99), residual};
}

// One row per replication and mode, then the analytic estimate and the two
// gain ratios (value in the `mean` column).
inline std::string report_to_csv(const ComparisonReport& r, double arrival_rate) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    out += csv::format_row(results_row("serial", r.seeds[i], r.serial_runs[i], arrival_rate));
  }
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    out += csv::format_row(results_row("nfp", r.seeds[i], r.nfp_runs[i], arrival_rate));
  }
  out += csv::format_row({"theoretical", "", "", csv::number(r.theoretical.total), "", "", "", ""});
  out += csv::format_row({"gain_serial_over_nfp", "", "", csv::number(r.gain_serial_over_nfp), "", "", "", ""});
  out += csv::format_row({"gain_theoretical_over_nfp", "", "", csv::number(r.gain_theoretical_over_nfp), "", "", "", ""});
  return out;
}

}  // namespace nfp

#endif  // NFP_SIMULATOR_HPP
