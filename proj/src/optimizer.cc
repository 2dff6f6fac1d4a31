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

#include "byzpgd/optimizer.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace byzpgd {
namespace {

std::int64_t ceil_to_int(double x) {
  return static_cast<std::int64_t>(std::ceil(x));
}

// Worst-case queries of one descent step plus one full Escape.
std::int64_t escape_footprint(const OptimizerConfig& cfg) {
  return 1 + static_cast<std::int64_t>(cfg.rounds) * (cfg.step_cap + 1);
}

}  // namespace

std::string_view to_string(ConfigSource source) {
  switch (source) {
    case ConfigSource::kTheorem1: return "theorem1";
    case ConfigSource::kTheorem2: return "theorem2";
    case ConfigSource::kManual: return "manual";
  }
  return "unknown";
}

std::string_view to_string(RunStatus status) {
  return status == RunStatus::kConverged ? "converged" : "budget_exceeded";
}

void OptimizerConfig::validate() const {
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(eta)) throw ConfigError("optimizer: eta must be > 0");
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw ConfigError("optimizer: eps must be >= 0");
  }
  if (!(perturbation_radius >= 0.0) || !std::isfinite(perturbation_radius)) {
    throw ConfigError("optimizer: perturbation radius r must be >= 0");
  }
  if (!positive(escape_radius)) {
    throw ConfigError("optimizer: escape radius R must be > 0");
  }
  if (rounds < 0) throw ConfigError("optimizer: rounds Q must be >= 0");
  if (step_cap < 1) throw ConfigError("optimizer: step cap T_th must be >= 1");
  if (!(delta_inexact >= 0.0)) {
    throw ConfigError("optimizer: delta_inexact must be >= 0");
  }
  if (!(delta_fail > 0.0 && delta_fail < 1.0)) {
    throw ConfigError("optimizer: delta_fail must lie in (0, 1)");
  }
  if (max_parallel_iters < 1) {
    throw ConfigError("optimizer: max_parallel_iters must be >= 1");
  }
}

OptimizerConfig derive_config(const ProblemMeta& meta, double delta,
                              double delta_fail) {
  meta.validate();
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw UsageError("derive_config: requires 0 < Delta <= 1");
  }
  if (!(delta_fail > 0.0 && delta_fail < 1.0)) {
    throw UsageError("derive_config: requires 0 < delta < 1");
  }
  const double d = static_cast<double>(meta.dim);
  const double L = meta.smoothness;
  const double rho = meta.hessian_lipschitz;

  OptimizerConfig cfg;
  cfg.source = ConfigSource::kTheorem1;
  cfg.delta_inexact = delta;
  cfg.delta_fail = delta_fail;
  cfg.eta = 1.0 / L;
  cfg.eps = 3.0 * delta;
  cfg.perturbation_radius =
      4.0 * std::pow(delta, 0.6) * std::pow(d, 0.3) / std::sqrt(rho);
  cfg.escape_radius = std::pow(delta, 0.4) * std::pow(d, 0.2) / std::sqrt(rho);

  const double q_arg =
      rho * meta.initial_gap /
      (48.0 * L * delta_fail *
       (std::pow(delta, 1.2) * std::pow(d, 0.6) +
        std::pow(delta, 1.4) * std::pow(d, 0.7)));
  cfg.rounds = q_arg > 0.0
                   ? static_cast<int>(std::max<std::int64_t>(
                         1, ceil_to_int(2.0 * std::log(q_arg))))
                   : 1;
  cfg.step_cap = std::max<std::int64_t>(
      1, ceil_to_int(L / (384.0 * (std::sqrt(rho) + L) *
                          (std::pow(delta, 0.4) * std::pow(d, 0.2) +
                           std::pow(delta, 0.6) * std::pow(d, 0.3)))));

  ConvergenceGuarantee g;
  g.grad_norm_bound = 4.0 * delta;
  g.min_eig_bound = -1900.0 * (std::sqrt(rho) + L) * std::pow(delta, 0.4) *
                    std::pow(d, 0.2) * std::log(10.0 / delta);
  g.iter_bound = ceil_to_int(2.0 * meta.initial_gap * L / (3.0 * delta * delta) *
                             cfg.rounds);
  cfg.guarantee = g;
  cfg.max_parallel_iters = std::max(g.iter_bound, escape_footprint(cfg));
  return cfg;
}

OptimizerConfig derive_exact_config(const ProblemMeta& meta, double eps,
                                    double delta_fail) {
  meta.validate();
  const double d = static_cast<double>(meta.dim);
  const double L = meta.smoothness;
  const double rho = meta.hessian_lipschitz;
  const double upper = std::min(1.0 / rho, 4.0 / (L * L * rho));
  if (!(eps > 0.0 && eps < upper)) {
    throw UsageError("derive_exact_config: requires 0 < eps < min(1/rho, "
                     "4/(L^2 rho)) = " + std::to_string(upper));
  }
  if (!(delta_fail > 0.0 && delta_fail < 1.0)) {
    throw UsageError("derive_exact_config: requires 0 < delta < 1");
  }

  OptimizerConfig cfg;
  cfg.source = ConfigSource::kTheorem2;
  cfg.delta_inexact = 0.0;
  cfg.delta_fail = delta_fail;
  cfg.eta = 1.0 / L;
  cfg.eps = eps;
  cfg.rounds = 1;
  cfg.perturbation_radius = eps;
  cfg.escape_radius = std::sqrt(eps / rho);
  cfg.step_cap = std::max<std::int64_t>(
      1, ceil_to_int(L / (12.0 * rho * (cfg.escape_radius + eps))));

  ConvergenceGuarantee g;
  g.grad_norm_bound = eps;
  const double log_arg =
      8.0 * rho * std::sqrt(d) * meta.initial_gap / (delta_fail * eps * eps);
  g.min_eig_bound =
      -60.0 * std::sqrt(rho * eps) * std::max(0.0, std::log(std::max(log_arg, 1.0)));
  g.iter_bound = ceil_to_int(2.0 * L * meta.initial_gap / (eps * eps));
  cfg.guarantee = g;
  cfg.max_parallel_iters = std::max(g.iter_bound, escape_footprint(cfg));
  return cfg;
}

ParamVector descend_step(const ParamVector& w, const ParamVector& g_hat,
                         double eta) {
  if (w.size() != g_hat.size()) {
    throw ConfigError("descend_step: dimension mismatch");
  }
  return w - eta * g_hat;
}

IterationLog::IterationLog(std::int64_t budget, bool record_trace)
    : budget_(budget), record_(record_trace) {}

OracleReply IterationLog::query(const GradientOracle& oracle, const ParamVector& w,
                                OracleQuery q) {
  if (iterations_ >= budget_) {
    throw BudgetExceeded("parallel iteration budget of " +
                         std::to_string(budget_) + " exhausted");
  }
  q.iteration = iterations_;
  OracleReply reply = oracle(w, q);
  if (reply.g_hat.size() != w.size()) {
    throw OracleError("oracle returned a gradient of the wrong dimension");
  }
  require_finite(reply.g_hat, "aggregated gradient");
  if (record_) {
    TraceRecord rec;
    rec.iteration = iterations_;
    rec.phase = q.phase;
    rec.w = w;
    rec.g_hat = reply.g_hat;
    rec.grad_norm_hat = reply.g_hat.norm();
    rec.grad_norm_true = reply.true_grad_norm;
    rec.escape_round = q.escape_round;
    rec.escape_step = q.escape_step;
    rec.fell_back = reply.fell_back;
    trace_.records.push_back(std::move(rec));
  }
  ++iterations_;
  return reply;
}

void IterationLog::annotate_escape(double dist, bool escaped) {
  if (!record_ || trace_.records.empty()) return;
  trace_.records.back().dist_from_round_start = dist;
  trace_.records.back().escaped = escaped;
}

EscapeOutcome escape(const ParamVector& w_tilde, const ParamVector& g_tilde,
                     const OptimizerConfig& cfg, const GradientOracle& oracle,
                     Rng& rng, IterationLog& log) {
  EscapeOutcome out;
  out.iterate = w_tilde;
  out.aggregated_grad = g_tilde;
  for (int k = 1; k <= cfg.rounds; ++k) {
    out.rounds_used = k;
    const ParamVector start =
        w_tilde + sample_uniform_ball(rng, w_tilde.size(), cfg.perturbation_radius);
    ParamVector w = start;
    for (std::int64_t t = 0; t <= cfg.step_cap; ++t) {
      OracleQuery q;
      q.phase = Phase::kEscape;
      q.escape_round = k;
      q.escape_step = t;
      OracleReply reply = log.query(oracle, w, q);
      const double dist = (w - start).norm();
      const bool escaped = dist >= cfg.escape_radius;
      log.annotate_escape(dist, escaped);
      out.iterate = w;
      out.aggregated_grad = std::move(reply.g_hat);
      if (escaped) {
        out.escaped = true;
        return out;
      }
      if (t < cfg.step_cap) {
        w = descend_step(w, out.aggregated_grad, cfg.eta);
        ++out.steps_used;
      }
    }
  }
  return out;
}

PgdResult byzantine_pgd(const GradientOracle& oracle, const OptimizerConfig& cfg,
                        const ParamVector& w0, Rng& rng,
                        const PgdOptions& options) {
  cfg.validate();
  require_finite(w0, "initial point");

  PgdResult result;
  const GradientOracle monitored = [&](const ParamVector& w,
                                       const OracleQuery& q) {
    const double dist = (w - w0).norm();
    result.max_dist_from_w0 = std::max(result.max_dist_from_w0, dist);
    if (options.iterate_radius_bound && dist > *options.iterate_radius_bound) {
      result.bound_violated = true;
      if (options.throw_on_bound_violation) {
        throw BoundViolation("iterate left the ball of radius " +
                             std::to_string(*options.iterate_radius_bound) +
                             " around w0 (distance " + std::to_string(dist) + ")");
      }
    }
    return oracle(w, q);
  };

  IterationLog log(cfg.max_parallel_iters, options.record_trace);
  ParamVector w = w0;
  ParamVector g;
  try {
    g = log.query(monitored, w, OracleQuery{}).g_hat;
    while (true) {
      if (g.norm() <= cfg.eps) {
        if (cfg.rounds == 0) break;
        ++result.escapes_attempted;
        EscapeOutcome esc = escape(w, g, cfg, monitored, rng, log);
        if (!esc.escaped) break;
        ++result.escapes_succeeded;
        w = std::move(esc.iterate);
        g = std::move(esc.aggregated_grad);
        continue;
      }
      w = descend_step(w, g, cfg.eta);
      g = log.query(monitored, w, OracleQuery{}).g_hat;
    }
    result.status = RunStatus::kConverged;
  } catch (const BudgetExceeded&) {
    result.status = RunStatus::kBudgetExceeded;
    if (g.size() == 0) g = ParamVector::Zero(w.size());
  }

  result.w_tilde = std::move(w);
  result.g_hat = std::move(g);
  result.parallel_iters = log.iterations();
  result.trace = log.take_trace();
  if (cfg.guarantee) {
    GuaranteeCheck check;
    check.guarantee = *cfg.guarantee;
    check.within_iter_bound = result.parallel_iters <= cfg.guarantee->iter_bound;
    check.grad_hat_within_eps = result.status == RunStatus::kConverged &&
                                result.g_hat.norm() <= cfg.eps;
    result.guarantee_check = check;
  }
  return result;
}

}  // namespace byzpgd
