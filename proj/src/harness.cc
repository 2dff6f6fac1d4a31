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

#include "byzpgd/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "byzpgd/rng.h"

namespace byzpgd {

std::size_t WorkerPool::byzantine_count() const {
  return static_cast<std::size_t>(
      std::count(byzantine_mask.begin(), byzantine_mask.end(), true));
}

WorkerPool shard_data(const Problem& problem, std::size_t m, std::size_t n,
                      double alpha, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ConfigError("shard_data: m and n must be >= 1");
  const std::size_t byz = byzantine_count(alpha, m);

  WorkerPool pool;
  pool.shards.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng rng = make_rng(seed, Stream::kData, i);
    SampleSet shard;
    shard.mean = problem.sample_mean();
    shard.sigma = problem.sample_sigma();
    shard.samples.resize(static_cast<Eigen::Index>(n), problem.sample_dim());
    for (std::size_t j = 0; j < n; ++j) {
      shard.samples.row(static_cast<Eigen::Index>(j)) =
          problem.draw_sample(rng).transpose();
    }
    pool.shards.push_back(std::move(shard));
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, Stream::kAssignment);
  for (std::size_t i = m - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  pool.byzantine_mask.assign(m, false);
  for (std::size_t i = 0; i < byz; ++i) pool.byzantine_mask[order[i]] = true;
  return pool;
}

ParamVector worker_gradient(const Problem& problem, const SampleSet& shard,
                            const ParamVector& w) {
  if (shard.size() < 1) throw UsageError("worker_gradient: empty shard");
  ParamVector sum = ParamVector::Zero(w.size());
  for (Eigen::Index j = 0; j < shard.size(); ++j) {
    sum += problem.sample_grad(w, shard.samples.row(j).transpose());
  }
  return sum / static_cast<double>(shard.size());
}

std::string_view to_string(OracleMode mode) {
  switch (mode) {
    case OracleMode::kWorkers: return "workers";
    case OracleMode::kOracleOverride: return "oracle_override";
    case OracleMode::kExact: return "exact";
  }
  return "unknown";
}

OracleMode oracle_mode_from_string(std::string_view name) {
  if (name == "workers") return OracleMode::kWorkers;
  if (name == "oracle_override") return OracleMode::kOracleOverride;
  if (name == "exact") return OracleMode::kExact;
  throw ConfigError("unknown oracle_mode '" + std::string(name) +
                    "' (expected workers, oracle_override or exact)");
}

namespace {

std::optional<bool> target_hit(const AdversaryStrategy& adversary,
                               const RoundContext& ctx, const ParamVector& g,
                               double budget) {
  const std::optional<ParamVector> target = attack_target(adversary, ctx);
  if (!target) return std::nullopt;
  return (g - *target).norm() <= budget;
}

}  // namespace

RoundResult round(const Problem& problem, const WorkerPool& pool,
                  const ParamVector& w, const AdversaryStrategy& adversary,
                  const AggregatorSpec& aggregator, const RoundInfo& info) {
  require_dim(w, problem.dim(), "round: iterate");
  const std::size_t m = pool.size();
  if (pool.byzantine_mask.size() != m) {
    throw ConfigError("round: byzantine mask size differs from worker count");
  }

  std::vector<ParamVector> honest;
  std::vector<ParamVector> byz_own;
  for (std::size_t i = 0; i < m; ++i) {
    ParamVector g = worker_gradient(problem, pool.shards[i], w);
    (pool.byzantine_mask[i] ? byz_own : honest).push_back(std::move(g));
  }

  RoundContext ctx;
  ctx.w = w;
  ctx.honest_grads = honest;
  ctx.byzantine_own_grads = byz_own;
  ctx.true_grad = problem.grad(w);
  ctx.phase = info.phase;
  ctx.round_index = info.round_index;
  ctx.escape_round = info.escape_round;
  ctx.seed = info.seed;

  const double alpha =
      static_cast<double>(byz_own.size()) / static_cast<double>(m);
  std::vector<ParamVector> crafted = craft(adversary, ctx, alpha, m);

  GradientBatch batch;
  batch.round_index = info.round_index;
  batch.vectors.reserve(m);
  std::size_t h = 0;
  std::size_t b = 0;
  for (std::size_t i = 0; i < m; ++i) {
    batch.vectors.push_back(pool.byzantine_mask[i] ? crafted[b++] : honest[h++]);
  }

  AggregateResult agg = aggregate(aggregator, batch);
  RoundResult out;
  out.audit.error_to_true_grad = (agg.value - ctx.true_grad).norm();
  out.audit.aggregator_fell_back = agg.fell_back;
  out.audit.attack_target_hit =
      target_hit(adversary, ctx, agg.value, adversary.delta_budget);
  out.g_hat = std::move(agg.value);
  return out;
}

SimulatedOracle::SimulatedOracle(const Problem& problem, OracleMode mode,
                                 const WorkerPool* pool,
                                 AdversaryStrategy adversary,
                                 AggregatorSpec aggregator,
                                 double override_delta, std::uint64_t seed)
    : problem_(problem),
      mode_(mode),
      pool_(pool),
      adversary_(adversary),
      aggregator_(aggregator),
      override_delta_(override_delta),
      seed_(seed) {
  if (mode_ == OracleMode::kWorkers && pool_ == nullptr) {
    throw UsageError("SimulatedOracle: workers mode needs a worker pool");
  }
}

RoundResult SimulatedOracle::evaluate(const ParamVector& w,
                                      const RoundInfo& info) const {
  switch (mode_) {
    case OracleMode::kWorkers:
      return round(problem_, *pool_, w, adversary_, aggregator_, info);
    case OracleMode::kExact: {
      RoundResult out;
      out.g_hat = problem_.grad(w);
      return out;
    }
    case OracleMode::kOracleOverride: {
      RoundContext ctx;
      ctx.w = w;
      ctx.true_grad = problem_.grad(w);
      ctx.phase = info.phase;
      ctx.round_index = info.round_index;
      ctx.escape_round = info.escape_round;
      ctx.seed = info.seed;
      RoundResult out;
      out.g_hat = override_gradient(adversary_, ctx, override_delta_);
      out.audit.error_to_true_grad = (out.g_hat - ctx.true_grad).norm();
      AdversaryStrategy windowed = adversary_;
      windowed.delta_budget = override_delta_;
      out.audit.attack_target_hit =
          target_hit(windowed, ctx, out.g_hat, override_delta_);
      return out;
    }
  }
  throw UsageError("SimulatedOracle: unknown mode");
}

OracleReply SimulatedOracle::operator()(const ParamVector& w,
                                        const OracleQuery& query) const {
  RoundInfo info;
  info.phase = query.phase;
  info.round_index = query.iteration;
  info.escape_round = query.escape_round;
  info.seed = seed_;
  RoundResult r = evaluate(w, info);
  OracleReply reply;
  reply.true_grad_norm = problem_.grad(w).norm();
  reply.fell_back = r.audit.aggregator_fell_back;
  reply.g_hat = std::move(r.g_hat);
  return reply;
}

std::vector<ParamVector> probe_grid(const ParamVector& center, double radius,
                                    std::size_t count, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kProbes);
  std::vector<ParamVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(center + sample_uniform_ball(rng, center.size(), radius));
  }
  return out;
}

double measure_inexactness(const SimulatedOracle& oracle, const Problem& problem,
                           std::span<const ParamVector> probes) {
  double worst = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    RoundInfo info;
    info.round_index = static_cast<std::int64_t>(i);
    const RoundResult r = oracle.evaluate(probes[i], info);
    worst = std::max(worst, (r.g_hat - problem.grad(probes[i])).norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------

void ExperimentSpec::validate() const {
  if (seeds.empty()) throw UsageError("experiment: seed list is empty");
  if (m < 1) throw ConfigError("experiment: m must be >= 1");
  if (n < 1) throw ConfigError("experiment: n must be >= 1");
  byzantine_count(alpha, m);
  if (aggregator.kind == AggregatorKind::kIterativeFilter && alpha > 0.25) {
    throw ConfigError("experiment: iterative_filter requires alpha <= 1/4");
  }
  aggregator.validate(oracle_mode == OracleMode::kWorkers ? m : 0);
  adversary.validate();
  const std::unique_ptr<Problem> problem = make_problem(this->problem);
  require_dim(w0.center, problem->dim(), "experiment: w0");
  require_finite(w0.center, "experiment: w0");
  if (!(w0.radius >= 0.0)) throw ConfigError("experiment: w0 radius must be >= 0");
  if (!(override_delta >= 0.0)) {
    throw ConfigError("experiment: override_delta must be >= 0");
  }
  if (!(boundedness_constant >= 0.0)) {
    throw ConfigError("experiment: boundedness_constant must be >= 0");
  }
  switch (optimizer.source) {
    case OptimizerSource::kTheorem1:
      if (!(optimizer.delta > 0.0 && optimizer.delta <= 1.0)) {
        throw ConfigError("optimizer: theorem1 requires 0 < delta <= 1");
      }
      break;
    case OptimizerSource::kTheorem2:
      if (!(optimizer.eps > 0.0)) {
        throw ConfigError("optimizer: theorem2 requires eps > 0");
      }
      break;
    case OptimizerSource::kManual:
      optimizer.manual.validate();
      break;
  }
  if (!(optimizer.delta_fail > 0.0 && optimizer.delta_fail < 1.0)) {
    throw ConfigError("optimizer: delta_fail must lie in (0, 1)");
  }
  if (optimizer.rounds_override && *optimizer.rounds_override < 0) {
    throw ConfigError("optimizer: rounds_override must be >= 0");
  }
  if (optimizer.max_parallel_iters && *optimizer.max_parallel_iters < 1) {
    throw ConfigError("optimizer: max_parallel_iters must be >= 1");
  }
}

OptimizerConfig resolve_config(const ExperimentSpec& spec, const Problem& problem,
                               const ParamVector& w0) {
  const OptimizerSpec& o = spec.optimizer;
  OptimizerConfig cfg;
  switch (o.source) {
    case OptimizerSource::kTheorem1:
      cfg = derive_config(problem.meta_at(w0), o.delta, o.delta_fail);
      break;
    case OptimizerSource::kTheorem2:
      cfg = derive_exact_config(problem.meta_at(w0), o.eps, o.delta_fail);
      break;
    case OptimizerSource::kManual:
      cfg = o.manual;
      cfg.source = ConfigSource::kManual;
      break;
  }
  if (o.rounds_override) cfg.rounds = *o.rounds_override;
  if (o.max_parallel_iters) cfg.max_parallel_iters = *o.max_parallel_iters;
  return cfg;
}

double probe_radius(const ExperimentSpec& spec, const Problem& problem,
                    const ParamVector& w0) {
  const OptimizerConfig cfg = resolve_config(spec, problem, w0);
  if (cfg.delta_inexact <= 0.0) return 1.0;
  const double c = spec.boundedness_constant > 0.0 ? spec.boundedness_constant
                                                   : problem.boundedness_constant();
  const double gap = problem.meta_at(w0).initial_gap;
  return 0.5 * c * gap / cfg.delta_inexact;
}

Quantiles summarize(std::vector<double> values) {
  Quantiles q;
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, nan};
  }
  std::sort(values.begin(), values.end());
  q.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.q10 = at(0.1);
  q.q50 = at(0.5);
  q.q90 = at(0.9);
  return q;
}

namespace {

SeedReport run_seed(const ExperimentSpec& spec, const Problem& problem,
                    std::uint64_t seed) {
  SeedReport rep;
  rep.seed = seed;
  try {
    ParamVector w0 = spec.w0.center;
    if (spec.w0.radius > 0.0) {
      Rng rng = make_rng(seed, Stream::kInitialPoint);
      w0 += sample_uniform_ball(rng, w0.size(), spec.w0.radius);
    }
    rep.w0 = w0;

    std::optional<WorkerPool> pool;
    AggregatorSpec aggregator = spec.aggregator;
    if (spec.oracle_mode == OracleMode::kWorkers) {
      pool = shard_data(problem, spec.m, spec.n, spec.alpha, seed);
      if (spec.filter_sigma_auto) {
        std::vector<ParamVector> honest;
        for (std::size_t i = 0; i < pool->size(); ++i) {
          if (!pool->byzantine_mask[i]) {
            honest.push_back(worker_gradient(problem, pool->shards[i], w0));
          }
        }
        aggregator.sigma = std::max(estimate_sigma(honest), 1e-12);
      }
    }

    const OptimizerConfig cfg = resolve_config(spec, problem, w0);
    const SimulatedOracle sim(problem, spec.oracle_mode,
                              pool ? &*pool : nullptr, spec.adversary,
                              aggregator, spec.override_delta, seed);
    const GradientOracle oracle = [&](const ParamVector& w,
                                      const OracleQuery& q) {
      RoundInfo info{q.phase, q.iteration, q.escape_round, seed};
      RoundResult r = sim.evaluate(w, info);
      rep.audit_max_error = std::max(rep.audit_max_error, r.audit.error_to_true_grad);
      if (r.audit.aggregator_fell_back) ++rep.fallbacks;
      OracleReply reply;
      reply.true_grad_norm = problem.grad(w).norm();
      reply.fell_back = r.audit.aggregator_fell_back;
      reply.g_hat = std::move(r.g_hat);
      return reply;
    };

    PgdOptions options;
    options.record_trace = spec.record_traces;
    if (cfg.delta_inexact > 0.0) {
      options.iterate_radius_bound = 2.0 * probe_radius(spec, problem, w0);
    }
    Rng rng = make_rng(seed, Stream::kPerturbation);
    PgdResult res = byzantine_pgd(oracle, cfg, w0, rng, options);

    rep.status = res.status;
    rep.w_tilde = res.w_tilde;
    rep.grad_norm_true = problem.grad(res.w_tilde).norm();
    rep.grad_norm_hat = res.g_hat.norm();
    rep.lambda_min = problem.hessian_min_eig(res.w_tilde);
    rep.parallel_iters = res.parallel_iters;
    rep.escapes_attempted = res.escapes_attempted;
    rep.escapes_succeeded = res.escapes_succeeded;
    rep.max_dist_from_w0 = res.max_dist_from_w0;
    rep.bound_violated = res.bound_violated;
    rep.within_iter_bound =
        res.guarantee_check ? res.guarantee_check->within_iter_bound : true;
    rep.trace = std::move(res.trace);
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  return rep;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec, int threads) {
  spec.validate();
  const std::unique_ptr<Problem> problem = make_problem(spec.problem);

  ExperimentReport report;
  report.name = spec.name;
  report.problem = problem->name();
  report.config = resolve_config(spec, *problem, spec.w0.center);
  report.meta = problem->meta_at(spec.w0.center);
  report.seeds.resize(spec.seeds.size());

  const std::size_t workers = static_cast<std::size_t>(
      std::clamp<int>(threads, 1, static_cast<int>(spec.seeds.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
      report.seeds[i] = run_seed(spec, *problem, spec.seeds[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < spec.seeds.size(); i = next++) {
          report.seeds[i] = run_seed(spec, *problem, spec.seeds[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  std::vector<double> grad, eig, iters;
  std::size_t escaped = 0;
  for (const SeedReport& s : report.seeds) {
    if (!s.error.empty() || s.status != RunStatus::kConverged) ++report.failed_seeds;
    if (!s.error.empty()) continue;
    grad.push_back(s.grad_norm_true);
    eig.push_back(s.lambda_min);
    iters.push_back(static_cast<double>(s.parallel_iters));
    if (s.escapes_succeeded > 0) ++escaped;
  }
  report.grad_norm_true = summarize(grad);
  report.lambda_min = summarize(eig);
  report.parallel_iters = summarize(iters);
  report.escape_success_rate =
      static_cast<double>(escaped) / static_cast<double>(report.seeds.size());
  return report;
}

}  // namespace byzpgd
