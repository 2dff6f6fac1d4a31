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

#ifndef BYZPGD_OPTIMIZER_H_
#define BYZPGD_OPTIMIZER_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "byzpgd/problems.h"
#include "byzpgd/rng.h"
#include "byzpgd/types.h"

namespace byzpgd {

/// Guarantee attached to a derived configuration.
struct ConvergenceGuarantee {
  double grad_norm_bound = 0.0;  // first-order bound on ||grad F(w~)||
  double min_eig_bound = 0.0;    // curvature floor on lambda_min(hess F(w~))
  std::int64_t iter_bound = 0;   // parallel iterations
};

enum class ConfigSource { kTheorem1, kTheorem2, kManual };

std::string_view to_string(ConfigSource source);

struct OptimizerConfig {
  double eta = 0.0;
  double eps = 0.0;                 // gradient threshold that triggers Escape
  double perturbation_radius = 0.0; // r
  double escape_radius = 0.0;       // R
  int rounds = 1;                   // Q; 0 disables Escape
  std::int64_t step_cap = 1;        // T_th
  double delta_inexact = 0.0;
  double delta_fail = 0.1;
  std::int64_t max_parallel_iters = std::numeric_limits<std::int64_t>::max();
  ConfigSource source = ConfigSource::kManual;
  std::optional<ConvergenceGuarantee> guarantee;

  void validate() const;
};

/// Inexact-oracle parameters: eta = 1/L, eps = 3 Delta,
/// r = 4 Delta^{3/5} d^{3/10} rho^{-1/2}, R = Delta^{2/5} d^{1/5} rho^{-1/2},
/// with Q and T_th rounded up and floored at 1. The iteration budget defaults
/// to the guarantee's bound, raised if needed to fit one full Escape.
OptimizerConfig derive_config(const ProblemMeta& meta, double delta_inexact,
                              double delta_fail);

/// Exact-oracle parameters: eta = 1/L, Q = 1, r = eps, R = sqrt(eps / rho),
/// T_th = ceil(L / (12 rho (R + r))).
OptimizerConfig derive_exact_config(const ProblemMeta& meta, double eps,
                                    double delta_fail);

ParamVector descend_step(const ParamVector& w, const ParamVector& g_hat,
                         double eta);

struct OracleQuery {
  Phase phase = Phase::kDescent;
  std::int64_t iteration = 0;
  std::optional<int> escape_round;
  std::optional<std::int64_t> escape_step;
};

struct OracleReply {
  ParamVector g_hat;
  std::optional<double> true_grad_norm;  // audit only; never read by the algorithm
  bool fell_back = false;
};

/// One master-to-workers round trip.
using GradientOracle =
    std::function<OracleReply(const ParamVector& w, const OracleQuery& query)>;

struct TraceRecord {
  std::int64_t iteration = 0;
  Phase phase = Phase::kDescent;
  ParamVector w;
  ParamVector g_hat;
  double grad_norm_hat = 0.0;
  std::optional<double> grad_norm_true;
  std::optional<int> escape_round;
  std::optional<std::int64_t> escape_step;
  std::optional<double> dist_from_round_start;
  bool escaped = false;
  bool fell_back = false;
};

struct RunTrace {
  std::vector<TraceRecord> records;
};

/// Counts parallel iterations, enforces the budget and records the trace.
class IterationLog {
 public:
  IterationLog(std::int64_t budget, bool record_trace);

  // Issues one oracle query. Throws BudgetExceeded when the budget is spent.
  OracleReply query(const GradientOracle& oracle, const ParamVector& w,
                    OracleQuery q);
  // Marks the most recent record with escape bookkeeping.
  void annotate_escape(double dist, bool escaped);

  std::int64_t iterations() const { return iterations_; }
  RunTrace& trace() { return trace_; }
  RunTrace take_trace() { return std::move(trace_); }

 private:
  std::int64_t budget_;
  bool record_;
  std::int64_t iterations_ = 0;
  RunTrace trace_;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EscapeOutcome {
  bool escaped = false;
  ParamVector iterate;
  ParamVector aggregated_grad;
  int rounds_used = 0;
  std::int64_t steps_used = 0;
};

/// Up to Q rounds of perturb-then-descend from w_tilde. A round draws p
/// uniformly from B_0(r), runs at most T_th inexact steps from w_tilde + p,
/// and succeeds at the first iterate at distance >= R from its start.
/// `g_tilde` is the gradient already computed at w_tilde, returned as-is when
/// Q = 0.
EscapeOutcome escape(const ParamVector& w_tilde, const ParamVector& g_tilde,
                     const OptimizerConfig& cfg, const GradientOracle& oracle,
                     Rng& rng, IterationLog& log);

enum class RunStatus { kConverged, kBudgetExceeded };

std::string_view to_string(RunStatus status);

struct PgdOptions {
  // Radius of the iterate monitor around w0; unset disables it.
  std::optional<double> iterate_radius_bound;
  bool throw_on_bound_violation = false;
  bool record_trace = true;
};

struct GuaranteeCheck {
  ConvergenceGuarantee guarantee;
  bool within_iter_bound = false;
  bool grad_hat_within_eps = false;
};

struct PgdResult {
  ParamVector w_tilde;
  ParamVector g_hat;  // aggregated gradient at w_tilde
  RunStatus status = RunStatus::kConverged;
  std::int64_t parallel_iters = 0;
  int escapes_attempted = 0;
  int escapes_succeeded = 0;
  double max_dist_from_w0 = 0.0;
  bool bound_violated = false;
  RunTrace trace;
  std::optional<GuaranteeCheck> guarantee_check;
};

/// Iterate-radius monitor tripped in test mode.
class BoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Robust perturbed gradient descent. Descends with the oracle's gradient
/// until ||g_hat|| <= eps, then runs Escape; returns the first such point at
/// which every Escape round fails. A successful Escape resumes from the
/// escaped iterate with its already-computed gradient.
PgdResult byzantine_pgd(const GradientOracle& oracle, const OptimizerConfig& cfg,
                        const ParamVector& w0, Rng& rng,
                        const PgdOptions& options = {});

}  // namespace byzpgd

#endif  // BYZPGD_OPTIMIZER_H_
