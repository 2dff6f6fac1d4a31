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

#ifndef BYZPGD_HARNESS_H_
#define BYZPGD_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "byzpgd/adversaries.h"
#include "byzpgd/aggregators.h"
#include "byzpgd/optimizer.h"
#include "byzpgd/problems.h"

namespace byzpgd {

/// Data held by the m workers.
struct WorkerPool {
  std::vector<SampleSet> shards;
  std::vector<bool> byzantine_mask;

  std::size_t size() const { return shards.size(); }
  std::size_t byzantine_count() const;
};

/// Draws m shards of n points. Worker i uses its own substream, so the first
/// n points of a shard do not depend on n. The Byzantine set is a uniformly
/// random subset of size alpha m.
WorkerPool shard_data(const Problem& problem, std::size_t m, std::size_t n,
                      double alpha, std::uint64_t seed);

/// grad F_i(w) = (1/n) sum_j grad f(w; z_ij).
ParamVector worker_gradient(const Problem& problem, const SampleSet& shard,
                            const ParamVector& w);

enum class OracleMode { kWorkers, kOracleOverride, kExact };

std::string_view to_string(OracleMode mode);
OracleMode oracle_mode_from_string(std::string_view name);

struct RoundAudit {
  double error_to_true_grad = 0.0;  // ||g_hat - grad F(w)||
  bool aggregator_fell_back = false;
  // Steering attacks: whether the aggregate landed within delta_budget of the
  // attack target. Unset when no target was active.
  std::optional<bool> attack_target_hit;
};

struct RoundResult {
  ParamVector g_hat;
  RoundAudit audit;
};

struct RoundInfo {
  Phase phase = Phase::kDescent;
  std::int64_t round_index = 0;
  std::optional<int> escape_round;
  std::uint64_t seed = 0;
};

/// One parallel iteration in workers mode.
RoundResult round(const Problem& problem, const WorkerPool& pool,
                  const ParamVector& w, const AdversaryStrategy& adversary,
                  const AggregatorSpec& aggregator, const RoundInfo& info);

/// Gradient source for one seed of an experiment, in any oracle mode.
class SimulatedOracle {
 public:
  SimulatedOracle(const Problem& problem, OracleMode mode,
                  const WorkerPool* pool, AdversaryStrategy adversary,
                  AggregatorSpec aggregator, double override_delta,
                  std::uint64_t seed);

  RoundResult evaluate(const ParamVector& w, const RoundInfo& info) const;
  OracleReply operator()(const ParamVector& w, const OracleQuery& query) const;

 private:
  const Problem& problem_;
  OracleMode mode_;
  const WorkerPool* pool_;
  AdversaryStrategy adversary_;
  AggregatorSpec aggregator_;
  double override_delta_;
  std::uint64_t seed_;
};

/// `count` seeded points uniform in B_center(radius).
std::vector<ParamVector> probe_grid(const ParamVector& center, double radius,
                                    std::size_t count, std::uint64_t seed);

inline constexpr std::size_t kProbeCount = 200;

/// Empirical inexactness: max over probes of ||g_hat(w) - grad F(w)||.
double measure_inexactness(const SimulatedOracle& oracle,
                           const Problem& problem,
                           std::span<const ParamVector> probes);

// ---------------------------------------------------------------------------
// Experiments

enum class OptimizerSource { kTheorem1, kTheorem2, kManual };

struct OptimizerSpec {
  OptimizerSource source = OptimizerSource::kTheorem1;
  double delta = 0.01;       // theorem1
  double eps = 0.01;         // theorem2
  double delta_fail = 0.1;
  OptimizerConfig manual;    // manual
  std::optional<int> rounds_override;  // Q = 0 reproduces plain robust GD
  std::optional<std::int64_t> max_parallel_iters;
};

struct InitialPoint {
  ParamVector center;
  double radius = 0.0;  // > 0 samples uniformly from B_center(radius) per seed
};

struct ExperimentSpec {
  std::string name = "experiment";
  ProblemParams problem;
  std::size_t m = 1;
  std::size_t n = 1;
  double alpha = 0.0;
  AggregatorSpec aggregator;
  bool filter_sigma_auto = false;  // estimate sigma from honest gradients at w0
  AdversaryStrategy adversary;
  OracleMode oracle_mode = OracleMode::kExact;
  double override_delta = 0.0;  // oracle_override ball radius
  OptimizerSpec optimizer;
  std::vector<std::uint64_t> seeds;
  InitialPoint w0;
  double boundedness_constant = 0.0;  // 0 takes the problem's constant
  bool record_traces = true;

  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

struct SeedReport {
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::kConverged;
  std::string error;  // non-empty when the seed failed outright
  ParamVector w0;
  ParamVector w_tilde;
  double grad_norm_true = 0.0;
  double grad_norm_hat = 0.0;
  double lambda_min = 0.0;
  std::int64_t parallel_iters = 0;
  int escapes_attempted = 0;
  int escapes_succeeded = 0;
  double max_dist_from_w0 = 0.0;
  bool bound_violated = false;
  bool within_iter_bound = true;
  double audit_max_error = 0.0;
  std::size_t fallbacks = 0;
  RunTrace trace;
};

struct Quantiles {
  double mean = 0.0;
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
};

struct ExperimentReport {
  std::string name;
  std::string problem;
  OptimizerConfig config;
  ProblemMeta meta;
  std::vector<SeedReport> seeds;
  Quantiles grad_norm_true;
  Quantiles lambda_min;
  Quantiles parallel_iters;
  double escape_success_rate = 0.0;  // seeds with at least one successful escape
  std::size_t failed_seeds = 0;      // budget exceeded or errored
};

/// Runs every seed (optionally on `threads` workers) and summarizes.
/// Per-seed failures are recorded in the report, not thrown.
ExperimentReport run_experiment(const ExperimentSpec& spec, int threads = 1);

/// Optimizer configuration the spec resolves to for a given w0.
OptimizerConfig resolve_config(const ExperimentSpec& spec, const Problem& problem,
                               const ParamVector& w0);

/// Probe radius D/2 with D = C (F0 - F*) / Delta, or 1 when Delta is 0.
double probe_radius(const ExperimentSpec& spec, const Problem& problem,
                    const ParamVector& w0);

Quantiles summarize(std::vector<double> values);

}  // namespace byzpgd

#endif  // BYZPGD_HARNESS_H_
