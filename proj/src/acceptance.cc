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

#include "byzpgd/acceptance.h"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "byzpgd/config.h"
#include "byzpgd/harness.h"
#include "byzpgd/io.h"

namespace byzpgd::acceptance {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSeed = 20260101;

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

CriterionResult timed(int id, const char* name, double limit,
                      const std::function<void(CriterionResult&)>& body) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.time_limit_seconds = limit;
  const auto start = std::chrono::steady_clock::now();
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                  .count();
  const bool in_time = r.seconds < limit;
  r.summary += fmt("; runtime %.2fs < %.0fs", r.seconds, limit);
  r.passed = r.passed && in_time;
  return r;
}

double stuck_closed_form(double x) {
  if (x >= 1.0) return 1.0;
  return 2.0 / std::numbers::pi * (std::asin(x) + x * std::sqrt(1.0 - x * x));
}

std::vector<std::uint64_t> seed_range(std::uint64_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::uint64_t i = 0; i < count; ++i) s[i] = i;
  return s;
}

// Fraction of trials left inside B_0(r) by plain robust GD against the
// curvature attack.
double stuck_frequency(double r, double delta, double lambda, int trials) {
  ClampedSaddle2d problem(lambda, 1.0, 1.0);
  AdversaryStrategy adv;
  adv.kind = AdversaryKind::kCurvatureKill;
  adv.lambda = lambda;
  adv.delta_budget = delta;
  SimulatedOracle sim(problem, OracleMode::kOracleOverride, nullptr, adv,
                      AggregatorSpec{}, delta, kSeed);

  OptimizerConfig cfg;
  cfg.eta = 1.0 / problem.smoothness();
  // No early stop: plain GD for the full horizon.
  cfg.eps = 0.0;
  cfg.perturbation_radius = r;
  cfg.escape_radius = r;
  cfg.rounds = 0;
  cfg.delta_inexact = delta;
  cfg.max_parallel_iters = 10000;

  PgdOptions opt;
  opt.record_trace = false;
  int stuck = 0;
  for (int t = 0; t < trials; ++t) {
    Rng init = make_rng(kSeed, Stream::kInitialPoint, static_cast<std::uint64_t>(t));
    const ParamVector w0 = sample_uniform_ball(init, 2, r);
    Rng rng = make_rng(kSeed, Stream::kPerturbation, static_cast<std::uint64_t>(t));
    const PgdResult res = byzantine_pgd(std::cref(sim), cfg, w0, rng, opt);
    if (res.w_tilde.norm() <= r && problem.hessian_min_eig(res.w_tilde) < 0.0) {
      ++stuck;
    }
  }
  return static_cast<double>(stuck) / trials;
}

ExperimentSpec saddle_spec(const char* name, double b) {
  ExperimentSpec spec;
  spec.name = name;
  spec.problem.name = "saddle_2d";
  spec.problem.lambda = 0.5;
  spec.problem.b = b;
  spec.problem.kappa = 1.0;
  spec.seeds = seed_range(50);
  spec.w0.center = ParamVector::Zero(2);
  spec.record_traces = false;
  return spec;
}

ExperimentSpec escape_exact_spec() {
  // A wide clamp keeps rho small enough for the exact-oracle step cap to
  // exceed one step.
  ExperimentSpec spec = saddle_spec("escape-exact", 2000.0);
  spec.oracle_mode = OracleMode::kExact;
  spec.optimizer.source = OptimizerSource::kTheorem2;
  spec.optimizer.eps = 0.01;
  spec.optimizer.delta_fail = 0.1;
  return spec;
}

ExperimentSpec escape_byzantine_spec(std::optional<int> rounds) {
  constexpr double kDelta = 0.01;
  constexpr double kLambda = 0.5;
  ExperimentSpec spec = saddle_spec("escape-byzantine", 1.0);
  spec.oracle_mode = OracleMode::kOracleOverride;
  spec.override_delta = kDelta;
  spec.adversary.kind = AdversaryKind::kCurvatureKill;
  spec.adversary.lambda = kLambda;
  spec.adversary.delta_budget = kDelta;
  spec.optimizer.source = OptimizerSource::kTheorem1;
  spec.optimizer.delta = kDelta;
  spec.optimizer.delta_fail = 0.1;
  spec.optimizer.rounds_override = rounds;
  // Every start lies in the attack window.
  spec.w0.radius = kDelta / kLambda;
  return spec;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Empirical inexactness for mean estimation under the shift attack.
double mean_estimation_delta_hat(std::size_t d, std::size_t m, std::size_t n,
                                 double alpha, AggregatorKind kind,
                                 std::uint64_t rep) {
  MeanEstimation problem(ParamVector::Zero(static_cast<Eigen::Index>(d)), 1.0);
  const std::uint64_t seed = kSeed + rep;
  const WorkerPool pool = shard_data(problem, m, n, alpha, seed);
  AdversaryStrategy adv;
  adv.kind = AdversaryKind::kShift;
  adv.scale = 100.0;
  AggregatorSpec agg;
  agg.kind = kind;
  agg.alpha = alpha;
  agg.sigma = 1.0 / std::sqrt(static_cast<double>(n));
  const SimulatedOracle sim(problem, OracleMode::kWorkers, &pool, adv, agg, 0.0,
                            seed);
  const std::vector<ParamVector> probes =
      probe_grid(ParamVector::Zero(static_cast<Eigen::Index>(d)), 1.0,
                 kProbeCount, seed);
  return measure_inexactness(sim, problem, probes);
}

// One-sided binomial tail P(X >= k) for X ~ Bin(n, 1/2).
double sign_test_p(int k, int n) {
  double p = 0.0;
  for (int i = k; i <= n; ++i) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                  std::lgamma(n - i + 1.0) - n * std::log(2.0));
  }
  return p;
}

}  // namespace

CriterionResult descent_lemma() {
  return timed(1, "descent-lemma", 5.0, [](CriterionResult& r) {
    std::vector<std::unique_ptr<Problem>> problems;
    problems.push_back(std::make_unique<Convex1d>());
    problems.push_back(std::make_unique<Quartic1d>());
    problems.push_back(std::make_unique<ClampedSaddle2d>());
    problems.push_back(std::make_unique<MeanEstimation>(ParamVector::Zero(8), 1.0));
    constexpr int kTrials = 1000;
    r.passed = true;
    json per = json::object();
    for (std::size_t p = 0; p < problems.size(); ++p) {
      const Problem& f = *problems[p];
      const double L = f.smoothness();
      Rng rng = make_rng(kSeed, Stream::kTrials, p);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      int holds = 0;
      double worst_slack = std::numeric_limits<double>::infinity();
      for (int t = 0; t < kTrials; ++t) {
        const ParamVector w = sample_uniform_ball(rng, f.dim(), 4.0);
        const double delta = unit(rng);
        const ParamVector e = sample_uniform_ball(rng, f.dim(), delta);
        const ParamVector g = f.grad(w);
        const double lhs = f.value(descend_step(w, g + e, 1.0 / L));
        const double rhs =
            f.value(w) - g.squaredNorm() / (2.0 * L) + delta * delta / (2.0 * L);
        worst_slack = std::min(worst_slack, rhs + 1e-9 - lhs);
        if (lhs <= rhs + 1e-9) ++holds;
      }
      per[f.name()] = {{"trials", kTrials}, {"holds", holds},
                       {"min_slack", worst_slack}};
      r.passed = r.passed && holds == kTrials;
      r.summary += fmt("%s%s %d/%d", p ? ", " : "", f.name().c_str(), holds, kTrials);
    }
    r.summary += " (target 100%)";
    r.measurements = per;
  });
}

CriterionResult stuck_probability() {
  return timed(2, "stuck-probability", 30.0, [](CriterionResult& r) {
    constexpr double kLambda = 0.5;
    constexpr double kDelta = 0.01;
    constexpr double kX = 0.5;
    constexpr int kTrials = 2000;
    const double radius = kDelta / (kX * kLambda);
    const double target = stuck_closed_form(kX);
    const double freq = stuck_frequency(radius, kDelta, kLambda, kTrials);
    // Delta >= lambda r: the window covers the whole ball.
    const double wide_delta = 0.025;
    const double wide = stuck_frequency(radius, wide_delta, kLambda, kTrials);
    r.passed = std::abs(freq - target) <= 0.05 && wide == 1.0;
    r.summary = fmt("stuck freq %.4f vs %.4f +- 0.05; Delta>=lambda r freq %.4f "
                    "(target 1 exactly)",
                    freq, target, wide);
    r.measurements = {{"r", radius},
                      {"x", kX},
                      {"trials", kTrials},
                      {"frequency", freq},
                      {"closed_form", target},
                      {"wide_window_delta", wide_delta},
                      {"wide_window_frequency", wide}};
  });
}

CriterionResult escape_exact() {
  return timed(3, "escape-exact", 60.0, [](CriterionResult& r) {
    const ExperimentSpec spec = escape_exact_spec();
    const ExperimentReport report = run_experiment(spec);
    int successes = 0;
    int good_outputs = 0;
    double worst_grad = 0.0;
    double worst_eig = std::numeric_limits<double>::infinity();
    for (const SeedReport& s : report.seeds) {
      if (!s.error.empty() || s.escapes_succeeded == 0) continue;
      ++successes;
      worst_grad = std::max(worst_grad, s.grad_norm_true);
      worst_eig = std::min(worst_eig, s.lambda_min);
      if (s.status == RunStatus::kConverged && s.grad_norm_true <= 0.01 &&
          s.lambda_min >= 0.0) {
        ++good_outputs;
      }
    }
    const double rate = report.escape_success_rate;
    r.passed = rate >= 0.9 && good_outputs == successes;
    r.summary = fmt("escape rate %.2f (>= 0.9); successful outputs in basin "
                    "%d/%d; max |grad F| %.3g (<= 0.01); min lambda_min %.3g (>= 0)",
                    rate, good_outputs, successes, worst_grad, worst_eig);
    r.measurements = to_json(report);
  });
}

CriterionResult escape_byzantine() {
  return timed(4, "escape-byzantine", 600.0, [](CriterionResult& r) {
    constexpr double kDelta = 0.01;
    const ExperimentReport pgd = run_experiment(escape_byzantine_spec(std::nullopt));
    const ExperimentReport gd = run_experiment(escape_byzantine_spec(0));
    const std::size_t seeds = pgd.seeds.size();

    std::size_t within_bound = 0, small_grad = 0, escaped = 0, ablation_stuck = 0;
    for (std::size_t i = 0; i < seeds; ++i) {
      const SeedReport& s = pgd.seeds[i];
      if (s.error.empty() && s.status == RunStatus::kConverged && s.within_iter_bound) {
        ++within_bound;
      }
      if (s.error.empty() && s.grad_norm_true <= 4.0 * kDelta) ++small_grad;
      if (s.error.empty() && s.lambda_min >= 0.0) ++escaped;
      const SeedReport& a = gd.seeds[i];
      if (a.error.empty() && a.lambda_min < 0.0) ++ablation_stuck;
    }
    const double n = static_cast<double>(seeds);
    const double grad_rate = small_grad / n;
    const double stuck_rate = ablation_stuck / n;
    const double escape_rate = escaped / n;
    r.passed = within_bound == seeds && grad_rate >= 0.9 && stuck_rate >= 0.5 &&
               escape_rate >= 0.8;
    r.summary = fmt("within iter_bound %zu/%zu; |grad F| <= 4 Delta in %.2f (>= 0.9); "
                    "Q=0 stuck in %.2f (>= 0.5); PGD reached lambda_min >= 0 in "
                    "%.2f (>= 0.8)",
                    within_bound, seeds, grad_rate, stuck_rate, escape_rate);
    r.measurements = {{"pgd", to_json(pgd)},
                      {"ablation", to_json(gd)},
                      {"within_iter_bound", within_bound},
                      {"grad_rate", grad_rate},
                      {"ablation_stuck_rate", stuck_rate},
                      {"pgd_second_order_rate", escape_rate}};
  });
}

CriterionResult scaling_laws() {
  return timed(5, "scaling-laws", 600.0, [](CriterionResult& r) {
    constexpr int kReps = 20;
    const std::vector<std::size_t> ns = {50, 100, 200};

    // (a) monotone in n
    std::vector<std::vector<double>> by_n(ns.size());
    for (std::size_t k = 0; k < ns.size(); ++k) {
      for (int rep = 0; rep < kReps; ++rep) {
        by_n[k].push_back(mean_estimation_delta_hat(4, 50, ns[k], 0.1,
                                                    AggregatorKind::kMedian, rep));
      }
    }
    int wins = 0;
    std::vector<int> step_wins;
    for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
      int w = 0;
      for (int rep = 0; rep < kReps; ++rep) w += by_n[k][rep] > by_n[k + 1][rep];
      step_wins.push_back(w);
      wins += w;
    }
    const int comparisons = kReps * static_cast<int>(ns.size() - 1);
    const double p_value = sign_test_p(wins, comparisons);
    std::vector<double> means;
    for (const auto& v : by_n) means.push_back(mean_of(v));
    const bool means_decrease = means[0] > means[1] && means[1] > means[2];
    const bool a_ok = p_value < 0.05 && means_decrease;

    // (b) linear in alpha
    std::vector<double> a1, a2;
    for (int rep = 0; rep < kReps; ++rep) {
      a1.push_back(mean_estimation_delta_hat(4, 50, 100, 0.1, AggregatorKind::kMedian, rep));
      a2.push_back(mean_estimation_delta_hat(4, 50, 100, 0.2, AggregatorKind::kMedian, rep));
    }
    const double ratio = mean_of(a2) / mean_of(a1);
    const bool b_ok = ratio >= 1.3 && ratio <= 2.7;

    // (c) filter beats median in high dimension
    std::vector<double> filt, med;
    for (int rep = 0; rep < kReps; ++rep) {
      filt.push_back(mean_estimation_delta_hat(64, 200, 50, 0.2,
                                               AggregatorKind::kIterativeFilter, rep));
      med.push_back(mean_estimation_delta_hat(64, 200, 50, 0.2,
                                              AggregatorKind::kMedian, rep));
    }
    const bool c_ok = mean_of(filt) <= mean_of(med);

    r.passed = a_ok && b_ok && c_ok;
    r.summary = fmt("(a) median Delta_hat n=50/100/200: %.4f/%.4f/%.4f, sign test "
                    "%d/%d (steps %d/%d, %d/%d) p=%.4f (< 0.05); (b) ratio %.3f in "
                    "[1.3, 2.7]; (c) filter %.4f <= median %.4f",
                    means[0], means[1], means[2], wins, comparisons, step_wins[0],
                    kReps, step_wins[1], kReps, p_value, ratio, mean_of(filt),
                    mean_of(med));
    r.measurements = {{"a", {{"n", ns}, {"delta_hat", by_n}, {"means", means},
                             {"wins", wins}, {"step_wins", step_wins},
                             {"p_value", p_value}}},
                      {"b", {{"alpha_0.1", a1}, {"alpha_0.2", a2}, {"ratio", ratio}}},
                      {"c", {{"filter", filt}, {"median", med}}}};
  });
}

CriterionResult filter_recovery() {
  return timed(6, "filter-recovery", 60.0, [](CriterionResult& r) {
    constexpr Eigen::Index kDim = 16;
    constexpr std::size_t kM = 100;
    constexpr double kAlpha = 0.2;
    constexpr double kSigma = 1.0;
    constexpr int kTrials = 100;
    const double tolerance = 5.0 * kSigma * std::sqrt(kAlpha);
    const std::size_t byz = byzantine_count(kAlpha, kM);

    AdversaryStrategy adv;
    adv.kind = AdversaryKind::kShift;
    adv.scale = 100.0;
    int ok = 0;
    double worst = 0.0;
    std::vector<double> errors;
    for (int t = 0; t < kTrials; ++t) {
      Rng rng = make_rng(kSeed, Stream::kTrials, static_cast<std::uint64_t>(t));
      const ParamVector mu = sample_gaussian(rng, kDim, 3.0);
      std::vector<ParamVector> honest;
      for (std::size_t i = 0; i < kM - byz; ++i) {
        honest.push_back(mu + sample_gaussian(rng, kDim, kSigma));
      }
      RoundContext ctx;
      ctx.w = ParamVector::Zero(kDim);
      ctx.honest_grads = honest;
      ctx.true_grad = mu;
      ctx.round_index = t;
      ctx.seed = kSeed;
      GradientBatch batch;
      batch.vectors = honest;
      for (ParamVector& v : craft(adv, ctx, kAlpha, kM)) batch.vectors.push_back(std::move(v));
      const FilterOutcome out = iterative_filter(batch, kAlpha, kSigma);
      const double err = (out.estimate - mu).norm();
      errors.push_back(err);
      worst = std::max(worst, err);
      if (!out.diverged && err <= tolerance) ++ok;
    }
    r.passed = ok >= 95;
    r.summary = fmt("within %.3f of the mean in %d/%d trials (>= 95); worst error %.3f",
                    tolerance, ok, kTrials, worst);
    r.measurements = {{"tolerance", tolerance}, {"successes", ok}, {"errors", errors}};
  });
}

CriterionResult determinism() {
  return timed(7, "determinism", 600.0, [](CriterionResult& r) {
    const std::vector<std::pair<std::string, std::function<std::string()>>> runs = {
        {"escape-exact report",
         [] { return dump_json(to_json(run_experiment(escape_exact_spec()))); }},
        {"escape-exact report, 4 threads",
         [] { return dump_json(to_json(run_experiment(escape_exact_spec(), 4))); }},
        {"escape-byzantine report",
         [] { return dump_json(to_json(run_experiment(escape_byzantine_spec(std::nullopt)))); }},
        {"descent-lemma", [] { return dump_json(descent_lemma().measurements); }},
        {"stuck-probability", [] { return dump_json(stuck_probability().measurements); }},
        {"filter-recovery", [] { return dump_json(filter_recovery().measurements); }},
        {"scaling-laws", [] { return dump_json(scaling_laws().measurements); }},
    };
    const std::string baseline = runs[0].second();
    r.passed = true;
    json checked = json::array();
    std::size_t identical = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string a = i == 0 ? baseline : runs[i].second();
      const std::string b = i == 1 ? baseline : runs[i].second();
      const bool same = a == b;
      identical += same;
      r.passed = r.passed && same;
      checked.push_back({{"run", runs[i].first}, {"identical", same},
                         {"bytes", a.size()}});
    }
    r.summary = fmt("%zu/%zu re-runs byte-identical", identical, runs.size());
    r.measurements = {{"runs", checked}};
  });
}

std::vector<std::string> suite_names() {
  return {"descent-lemma", "stuck-probability", "escape-exact", "escape-byzantine",
          "scaling-laws",  "filter-recovery",   "determinism"};
}

CriterionResult run_suite(std::string_view name) {
  if (name == "descent-lemma") return descent_lemma();
  if (name == "stuck-probability") return stuck_probability();
  if (name == "escape-exact") return escape_exact();
  if (name == "escape-byzantine") return escape_byzantine();
  if (name == "scaling-laws") return scaling_laws();
  if (name == "filter-recovery") return filter_recovery();
  if (name == "determinism") return determinism();
  throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
}

std::string format_line(const CriterionResult& result) {
  return fmt("[%s] %d %s: ", result.passed ? "PASS" : "FAIL", result.id,
             result.name.c_str()) +
         result.summary;
}

}  // namespace byzpgd::acceptance
