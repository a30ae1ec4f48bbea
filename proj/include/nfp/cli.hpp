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

// The sfc-nfp command line. Exit codes: 0 success, 1 usage, 2 bad input,
// 3 unstable or infeasible model.

#ifndef NFP_CLI_HPP
#define NFP_CLI_HPP

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nfp/dependency.hpp"
#include "nfp/errors.hpp"
#include "nfp/fixture.hpp"
#include "nfp/flow_table.hpp"
#include "nfp/policy.hpp"
#include "nfp/queueing.hpp"
#include "nfp/scenario.hpp"
#include "nfp/simulator.hpp"

namespace nfp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitModel = 3;

inline constexpr std::string_view kSweepHeader =
    "size,lambda,serial_mean,theoretical,nfp_mean,gain_serial_over_nfp,gain_theoretical_over_nfp";

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<VnfInstance> load_chain(const std::string& path) {
  try {
    return parse_chain_spec(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline CompilerConfig compiler_config(const std::vector<std::string>& tenants) {
  CompilerConfig cfg;
  if (tenants.empty()) return cfg;
  cfg.tenant_prefixes.clear();
  for (const auto& t : tenants) {
    auto p = parse_prefix(t);
    if (!p) throw ParseError("bad tenant prefix '" + t + "'", 0, 0, "a.b.c.d/len");
    cfg.tenant_prefixes.push_back(*p);
  }
  return cfg;
}

inline FlowTable load_policy(const std::string& path, const CompilerConfig& cfg) {
  try {
    return compile_to_flow_table(parse_policy(read_file(path), cfg), cfg);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Scenario with its chain path resolved and SFC_SEED applied.
inline Scenario load_scenario(const std::string& path) {
  Scenario sc;
  try {
    sc = parse_scenario(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  const std::filesystem::path chain(sc.chain);
  if (chain.is_relative()) {
    sc.chain = (std::filesystem::path(path).parent_path() / chain).string();
  }
  if (const char* env = std::getenv("SFC_SEED"); env != nullptr && *env != '\0') {
    const auto seed = csv::to_int(env);
    if (seed < 0) throw ParseError("SFC_SEED must be >= 0");
    sc.sim.seed = static_cast<std::uint64_t>(seed);
  }
  return sc;
}

inline std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::string_view rest = text;
  while (!rest.empty()) {
    auto comma = rest.find(',');
    const auto v = csv::to_int(rest.substr(0, comma));
    if (v < 1) throw ParseError("sizes must be >= 1");
    sizes.push_back(static_cast<int>(v));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (sizes.empty()) throw ParseError("no sizes given");
  return sizes;
}

}  // namespace detail

// `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Service chain parallelism planner and latency model", "sfc-nfp"};
  app.require_subcommand(1);

  std::string input;
  std::vector<std::string> tenants;
  bool aggregate = false;
  auto* compile = app.add_subcommand("compile", "Compile a policy file to a flow table CSV");
  compile->add_option("policy", input, "Policy DSL file")->required();
  compile->add_flag("--aggregate", aggregate, "Merge adjacent rules with identical actions");
  compile->add_option("--tenant", tenants, "Tenant prefix; EXT is their complement");

  bool reorder = false;
  bool json = false;
  std::string policy;
  double epsilon = 0.0;
  auto* plan = app.add_subcommand("plan", "Group a chain into parallel stages");
  plan->add_option("chain", input, "Chain spec file")->required();
  plan->add_flag("--reorder", reorder, "Reorder the chain before planning");
  plan->add_option("--policy", policy, "Policy file whose rules refine the analysis");
  plan->add_flag("--json", json, "Emit the plan as JSON instead of CSV");

  double lambda = 0, mu = 0;
  int servers = 0;
  auto* queue = app.add_subcommand("queue", "M/M/c metrics for one station");
  queue->add_option("--lambda", lambda, "Arrival rate")->required();
  queue->add_option("--mu", mu, "Service rate per server")->required();
  queue->add_option("--c", servers, "Server count")->required();

  bool staged = false;
  bool thinning = false;
  auto* estimate = app.add_subcommand("estimate", "Analytic chain latency");
  estimate->add_option("chain", input, "Chain spec file")->required();
  estimate->add_option("--lambda", lambda, "Arrival rate")->required();
  estimate->add_flag("--plan", staged, "Estimate the staged plan instead of the serial chain");
  estimate->add_option("--policy", policy, "Policy file whose rules refine the plan");
  estimate->add_option("--epsilon", epsilon, "Merge overhead per stage, seconds");
  estimate->add_flag("--thinning", thinning, "Reduce downstream load by drop probabilities");

  std::optional<int> reps;
  auto* simulate = app.add_subcommand("simulate", "Simulate serial and staged execution");
  simulate->add_option("scenario", input, "Scenario file")->required();
  simulate->add_option("--reps", reps, "Replications")->check(CLI::Range(1, 10000));

  bool fixture = false;
  auto* report = app.add_subcommand("report", "Speedup ratios of the shipped latency fixture");
  report->add_flag("--fixture", fixture, "Use the embedded fixture")->required();

  std::string sizes;
  std::optional<double> per_node_rate;
  auto* sweep = app.add_subcommand("sweep", "Compare modes across network sizes");
  sweep->add_option("scenario", input, "Scenario file")->required();
  sweep->add_option("--sizes", sizes, "Comma-separated network sizes")->required();
  sweep->add_option("--per-node-rate", per_node_rate, "Arrival rate per network node")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--reps", reps, "Replications")->check(CLI::Range(1, 10000));

  if (args.empty()) {
    err << app.help();
    return kExitUsage;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  }

  std::ostringstream buf;
  try {
    if (compile->parsed()) {
      const auto cfg = detail::compiler_config(tenants);
      auto table = detail::load_policy(input, cfg);
      if (aggregate) table = aggregate_rules(std::move(table));
      buf << flow_table_to_csv(table);
    } else if (plan->parsed()) {
      auto chain = detail::load_chain(input);
      RuleBook rules;
      if (!policy.empty()) rules = rule_book_from(detail::load_policy(policy, {}));
      if (reorder) chain = reorder_chain(chain, rules);
      const auto p = build_stage_plan(chain, rules);
      buf << (json ? plan_to_json(p) + "\n" : plan_to_csv(p));
    } else if (queue->parsed()) {
      const MmcParams p{lambda, mu, servers};
      const auto m = metrics(p);
      buf << kMetricsHeader << "\n" << metrics_csv_row(p, m);
    } else if (estimate->parsed()) {
      const auto chain = detail::load_chain(input);
      RuleBook rules;
      if (!policy.empty()) rules = rule_book_from(detail::load_policy(policy, {}));
      if (!(epsilon >= 0)) throw std::invalid_argument("epsilon must be >= 0");
      const EstimateOptions opts{epsilon, thinning};
      const auto est = staged ? chain_latency(build_stage_plan(chain, rules, epsilon), chain, lambda, opts)
                              : chain_latency(chain, lambda, opts);
      buf << estimate_to_csv(est);
    } else if (simulate->parsed()) {
      const auto sc = detail::load_scenario(input);
      if (!sc.has_lambda) throw ParseError(input + ": scenario has no lambda");
      const auto chain = detail::load_chain(sc.chain);
      const auto r = compare_modes(chain, sc.sim, reps.value_or(sc.replications));
      buf << report_to_csv(r, sc.sim.arrival_rate);
    } else if (report->parsed()) {
      (void)fixture;
      buf << gains_to_csv(compute_gains(load_fixture()));
    } else if (sweep->parsed()) {
      const auto sc = detail::load_scenario(input);
      const double rate = per_node_rate.value_or(sc.per_node_rate);
      if (!(rate > 0)) throw ParseError(input + ": sweep needs per_node_rate or --per-node-rate");
      const auto chain = detail::load_chain(sc.chain);
      const auto list = detail::parse_sizes(sizes);
      buf << kSweepHeader << "\n";
      for (int size : list) {
        SimConfig cfg = sc.sim;
        cfg.arrival_rate = size * rate;
        const auto r = compare_modes(chain, cfg, reps.value_or(sc.replications));
        buf << csv::format_row({std::to_string(size), csv::number(cfg.arrival_rate),
                                csv::number(r.serial_mean), csv::number(r.theoretical.total),
                                csv::number(r.nfp_mean), csv::number(r.gain_serial_over_nfp),
                                csv::number(r.gain_theoretical_over_nfp)});
      }
    }
    out << buf.str();
  } catch (const UnstableError& e) {
    err << "error: " << e.what() << "\n";
    return kExitModel;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitModel;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace nfp

#endif  // NFP_CLI_HPP
