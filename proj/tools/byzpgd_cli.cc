// Copyright 2026 The byzpgd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// byzpgd command-line entry point.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "byzpgd/acceptance.h"
#include "byzpgd/config.h"
#include "byzpgd/harness.h"
#include "byzpgd/io.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::string out;
  std::string seeds;
  int threads = 1;
  int verbosity = 0;
  std::string suite;
  std::string mode = "theorem1";
  double delta = 0.01;
  double eps = 0.01;
  long long dim = 1;
  double smoothness = 1.0;
  double rho = 1.0;
  double gap = 1.0;
  double delta_fail = 0.1;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (item.empty()) throw byzpgd::UsageError("--seeds: empty entry");
    const std::size_t dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const std::uint64_t lo = std::stoull(item.substr(0, dash));
        const std::uint64_t hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw byzpgd::UsageError("--seeds: descending range " + item);
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const byzpgd::UsageError*>(&e)) throw;
      throw byzpgd::UsageError("--seeds: cannot parse '" + item + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

fs::path output_dir(const Options& opt) {
  if (!opt.out.empty()) return opt.out;
  if (const char* env = std::getenv("BYZPGD_OUT_DIR"); env && *env) return env;
  return "byzpgd_out";
}

byzpgd::ExperimentSpec load(const Options& opt) {
  if (opt.config.empty()) throw byzpgd::UsageError("--config is required");
  if (!fs::exists(opt.config)) {
    throw byzpgd::ConfigError("config '" + opt.config + "' does not exist");
  }
  byzpgd::ExperimentSpec spec = byzpgd::load_spec(opt.config);
  if (!opt.seeds.empty()) {
    spec.seeds = parse_seed_list(opt.seeds);
    spec.validate();
  }
  return spec;
}

int cmd_run(const Options& opt) {
  const byzpgd::ExperimentSpec spec = load(opt);
  const fs::path out = output_dir(opt);
  const byzpgd::ExperimentReport report = byzpgd::run_experiment(spec, opt.threads);

  json doc = byzpgd::to_json(report);
  doc["trace_schema"] = {
      {"schema_version", byzpgd::kSchemaVersion},
      {"columns", {"iteration", "phase", "grad_norm_hat", "grad_norm_true",
                   "dist_from_round_start", "escaped"}}};
  if (spec.record_traces) {
    for (std::size_t i = 0; i < report.seeds.size(); ++i) {
      const auto& s = report.seeds[i];
      const std::string name = "seed_" + std::to_string(s.seed) + ".csv";
      byzpgd::write_file_atomic(out / "traces" / name, byzpgd::trace_csv(s.trace));
      doc["seeds"][i]["trace_file"] = "traces/" + name;
    }
  }
  byzpgd::write_file_atomic(out / "report.json", byzpgd::dump_json(doc));
  if (opt.verbosity > 0) {
    std::cerr << "wrote " << (out / "report.json").string() << " ("
              << report.seeds.size() << " seeds, " << report.failed_seeds
              << " failed)\n";
  }
  if (report.failed_seeds > 0) {
    const json err = {{"error", "runtime"},
                      {"message", std::to_string(report.failed_seeds) +
                                      " seed(s) exceeded the iteration budget or failed"},
                      {"report", (out / "report.json").string()}};
    std::cerr << err.dump() << '\n';
    return kExitRuntime;
  }
  return 0;
}

int cmd_derive(const Options& opt) {
  byzpgd::ProblemMeta meta;
  meta.dim = opt.dim;
  meta.smoothness = opt.smoothness;
  meta.hessian_lipschitz = opt.rho;
  meta.initial_gap = opt.gap;
  byzpgd::OptimizerConfig cfg;
  if (opt.mode == "theorem1") {
    cfg = byzpgd::derive_config(meta, opt.delta, opt.delta_fail);
  } else if (opt.mode == "theorem2") {
    cfg = byzpgd::derive_exact_config(meta, opt.eps, opt.delta_fail);
  } else {
    throw byzpgd::UsageError("--mode must be theorem1 or theorem2");
  }
  json doc = byzpgd::to_json(cfg);
  doc["schema_version"] = byzpgd::kSchemaVersion;
  doc["meta"] = byzpgd::to_json(meta);
  std::cout << byzpgd::dump_json(doc);
  return 0;
}

int cmd_measure(const Options& opt) {
  const byzpgd::ExperimentSpec spec = load(opt);
  const auto problem = byzpgd::make_problem(spec.problem);
  json per_seed = json::array();
  double worst = 0.0;
  for (std::uint64_t seed : spec.seeds) {
    std::optional<byzpgd::WorkerPool> pool;
    byzpgd::AggregatorSpec agg = spec.aggregator;
    if (spec.oracle_mode == byzpgd::OracleMode::kWorkers) {
      pool = byzpgd::shard_data(*problem, spec.m, spec.n, spec.alpha, seed);
      if (spec.filter_sigma_auto) {
        std::vector<byzpgd::ParamVector> honest;
        for (std::size_t i = 0; i < pool->size(); ++i) {
          if (!pool->byzantine_mask[i]) {
            honest.push_back(
                byzpgd::worker_gradient(*problem, pool->shards[i], spec.w0.center));
          }
        }
        agg.sigma = std::max(byzpgd::estimate_sigma(honest), 1e-12);
      }
    }
    const byzpgd::SimulatedOracle sim(*problem, spec.oracle_mode,
                                      pool ? &*pool : nullptr, spec.adversary, agg,
                                      spec.override_delta, seed);
    const double radius = byzpgd::probe_radius(spec, *problem, spec.w0.center);
    const auto probes =
        byzpgd::probe_grid(spec.w0.center, radius, byzpgd::kProbeCount, seed);
    const double d = byzpgd::measure_inexactness(sim, *problem, probes);
    worst = std::max(worst, d);
    per_seed.push_back({{"seed", seed}, {"delta_hat", d}, {"probe_radius", radius}});
  }
  const json doc = {{"schema_version", byzpgd::kSchemaVersion},
                    {"name", spec.name},
                    {"probe_count", byzpgd::kProbeCount},
                    {"delta_hat", worst},
                    {"seeds", per_seed}};
  const std::string text = byzpgd::dump_json(doc);
  if (!opt.out.empty() || std::getenv("BYZPGD_OUT_DIR")) {
    byzpgd::write_file_atomic(output_dir(opt) / "delta.json", text);
  }
  std::cout << text;
  return 0;
}

int cmd_accept(const Options& opt) {
  const std::vector<std::string> names = byzpgd::acceptance::suite_names();
  if (std::find(names.begin(), names.end(), opt.suite) == names.end()) {
    throw byzpgd::UsageError("unknown suite '" + opt.suite + "'");
  }
  const auto result = byzpgd::acceptance::run_suite(opt.suite);
  std::cout << byzpgd::acceptance::format_line(result) << '\n';
  if (opt.verbosity > 0) std::cout << byzpgd::dump_json(result.measurements);
  return result.passed ? 0 : kExitRuntime;
}

int cmd_trace_dump(const Options& opt) {
  byzpgd::ExperimentSpec spec = load(opt);
  spec.seeds.resize(1);
  spec.record_traces = true;
  const byzpgd::ExperimentReport report = byzpgd::run_experiment(spec);
  const auto& seed = report.seeds.front();
  if (!seed.error.empty()) throw std::runtime_error(seed.error);
  std::cout << byzpgd::trace_csv(seed.trace);
  return 0;
}

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-robust perturbed gradient descent simulator"};
  app.require_subcommand(1, 1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Output directory (default $BYZPGD_OUT_DIR)");
    sub->add_flag("-v,--verbose", opt.verbosity, "Verbose output");
  };

  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("--config", opt.config, "Experiment config (JSON)")->required();
  run->add_option("--seeds", opt.seeds, "Seed override, e.g. 0-9 or 1,5,7");
  run->add_option("--threads", opt.threads, "Worker threads over seeds")
      ->check(CLI::PositiveNumber);
  add_common(run);

  CLI::App* derive = app.add_subcommand("derive-params", "Print derived optimizer knobs");
  derive->add_option("--mode", opt.mode, "theorem1 (inexact) or theorem2 (exact)");
  derive->add_option("--delta", opt.delta, "Oracle inexactness Delta");
  derive->add_option("--eps", opt.eps, "Exact-oracle gradient threshold");
  derive->add_option("--dim,-d", opt.dim, "Dimension d");
  derive->add_option("--smoothness,-L", opt.smoothness, "Smoothness L_F");
  derive->add_option("--rho", opt.rho, "Hessian-Lipschitz rho_F");
  derive->add_option("--gap", opt.gap, "Initial gap F(w0) - F*");
  derive->add_option("--delta-fail", opt.delta_fail, "Failure probability");
  add_common(derive);

  CLI::App* measure = app.add_subcommand("measure-delta", "Measure empirical inexactness");
  measure->add_option("--config", opt.config, "Experiment config (JSON)")->required();
  measure->add_option("--seeds", opt.seeds, "Seed override");
  add_common(measure);

  CLI::App* accept = app.add_subcommand("accept", "Run an acceptance suite");
  accept->add_option("--suite,suite", opt.suite, "Suite name")->required();
  add_common(accept);

  CLI::App* trace = app.add_subcommand("trace-dump", "Print one seed's trace as CSV");
  trace->add_option("--config", opt.config, "Experiment config (JSON)")->required();
  trace->add_option("--seeds", opt.seeds, "Seed override (first is used)");
  add_common(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(opt);
    if (*derive) return cmd_derive(opt);
    if (*measure) return cmd_measure(opt);
    if (*accept) return cmd_accept(opt);
    if (*trace) return cmd_trace_dump(opt);
  } catch (const std::invalid_argument& e) {
    return report_error("usage", e.what(), kExitUsage);
  } catch (const std::exception& e) {
    return report_error("runtime", e.what(), kExitRuntime);
  }
  return kExitUsage;
}
