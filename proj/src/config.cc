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

#include "byzpgd/config.h"

#include <fstream>
#include <initializer_list>
#include <set>
#include <string>

namespace byzpgd {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::string_view where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ConfigError(std::string(where) + ": expected an object");
  }
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) {
      throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
T get(const json& obj, const char* key, std::string_view where, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + "." + key + ": wrong type");
  }
}

double get_number(const json& obj, const char* key, std::string_view where,
                  double fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  if (!obj.at(key).is_number()) {
    throw ConfigError(std::string(where) + "." + key + ": expected a number");
  }
  return obj.at(key).get<double>();
}

std::int64_t get_int(const json& obj, const char* key, std::string_view where,
                     std::int64_t fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(std::string(where) + "." + key + ": expected an integer");
  }
  return v.get<std::int64_t>();
}

std::size_t get_count(const json& obj, const char* key, std::string_view where,
                      std::size_t fallback) {
  const std::int64_t v = get_int(obj, key, where, static_cast<std::int64_t>(fallback));
  if (v < 1) throw ConfigError(std::string(where) + "." + key + " must be >= 1");
  return static_cast<std::size_t>(v);
}

ParamVector to_vector(const json& arr, std::string_view where) {
  if (!arr.is_array()) throw ConfigError(std::string(where) + ": expected an array");
  ParamVector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw ConfigError(std::string(where) + ": expected numbers");
    }
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

ProblemParams parse_problem(const json& p) {
  if (p.is_string()) {
    ProblemParams out;
    out.name = p.get<std::string>();
    return out;
  }
  check_keys(p, "problem", {"name", "dim", "mu", "sigma", "lambda", "b",
                            "kappa", "clamp", "delta", "phase"});
  ProblemParams out;
  if (!p.contains("name")) throw ConfigError("problem: missing 'name'");
  out.name = get<std::string>(p, "name", "problem", "");
  out.dim = get_int(p, "dim", "problem", 0);
  if (p.contains("mu")) {
    const ParamVector mu = to_vector(p.at("mu"), "problem.mu");
    out.mu.assign(mu.data(), mu.data() + mu.size());
  }
  out.sigma = get_number(p, "sigma", "problem", out.sigma);
  out.lambda = get_number(p, "lambda", "problem", out.lambda);
  out.b = get_number(p, "b", "problem", out.b);
  out.kappa = get_number(p, "kappa", "problem", out.kappa);
  out.clamp = get_number(p, "clamp", "problem", out.clamp);
  out.delta = get_number(p, "delta", "problem", out.delta);
  out.phase = get_number(p, "phase", "problem", out.phase);
  return out;
}

void parse_aggregator(const json& a, ExperimentSpec& spec) {
  check_keys(a, "aggregator", {"kind", "beta", "alpha", "sigma"});
  spec.aggregator.kind = aggregator_kind_from_string(
      get<std::string>(a, "kind", "aggregator", "median"));
  spec.aggregator.beta = get_number(a, "beta", "aggregator", 0.0);
  spec.aggregator.alpha = get_number(a, "alpha", "aggregator", spec.alpha);
  if (a.contains("sigma") && a.at("sigma").is_string()) {
    if (a.at("sigma").get<std::string>() != "auto") {
      throw ConfigError("aggregator.sigma: expected a number or \"auto\"");
    }
    spec.filter_sigma_auto = true;
  } else {
    spec.aggregator.sigma = get_number(a, "sigma", "aggregator", 1.0);
  }
}

void parse_adversary(const json& a, ExperimentSpec& spec) {
  check_keys(a, "adversary", {"kind", "scale", "coordinate", "lambda",
                              "delta_budget", "trap_radius"});
  AdversaryStrategy& s = spec.adversary;
  s.kind = adversary_kind_from_string(get<std::string>(a, "kind", "adversary", "none"));
  s.scale = get_number(a, "scale", "adversary", s.scale);
  s.coordinate = static_cast<int>(get_int(a, "coordinate", "adversary", s.coordinate));
  s.lambda = get_number(a, "lambda", "adversary", s.lambda);
  s.delta_budget = get_number(a, "delta_budget", "adversary", s.delta_budget);
  s.trap_radius = get_number(a, "trap_radius", "adversary", s.trap_radius);
}

void parse_optimizer(const json& o, ExperimentSpec& spec) {
  check_keys(o, "optimizer",
             {"source", "delta", "eps", "delta_fail", "rounds_override",
              "max_parallel_iters", "eta", "perturbation_radius",
              "escape_radius", "rounds", "step_cap", "delta_inexact"});
  OptimizerSpec& out = spec.optimizer;
  const std::string source = get<std::string>(o, "source", "optimizer", "theorem1");
  if (source == "theorem1") {
    out.source = OptimizerSource::kTheorem1;
  } else if (source == "theorem2") {
    out.source = OptimizerSource::kTheorem2;
  } else if (source == "manual") {
    out.source = OptimizerSource::kManual;
  } else {
    throw ConfigError("optimizer.source: expected theorem1, theorem2 or manual");
  }
  out.delta = get_number(o, "delta", "optimizer", out.delta);
  out.eps = get_number(o, "eps", "optimizer", out.eps);
  out.delta_fail = get_number(o, "delta_fail", "optimizer", out.delta_fail);
  if (o.contains("rounds_override") && !o.at("rounds_override").is_null()) {
    out.rounds_override =
        static_cast<int>(get_int(o, "rounds_override", "optimizer", 0));
  }
  if (o.contains("max_parallel_iters") && !o.at("max_parallel_iters").is_null()) {
    out.max_parallel_iters = get_int(o, "max_parallel_iters", "optimizer", 0);
  }
  OptimizerConfig& m = out.manual;
  m.source = ConfigSource::kManual;
  m.eta = get_number(o, "eta", "optimizer", m.eta);
  m.eps = out.eps;
  m.perturbation_radius =
      get_number(o, "perturbation_radius", "optimizer", m.perturbation_radius);
  m.escape_radius = get_number(o, "escape_radius", "optimizer", m.escape_radius);
  m.rounds = static_cast<int>(get_int(o, "rounds", "optimizer", m.rounds));
  m.step_cap = get_int(o, "step_cap", "optimizer", m.step_cap);
  m.delta_inexact = get_number(o, "delta_inexact", "optimizer", m.delta_inexact);
  m.delta_fail = out.delta_fail;
  if (out.max_parallel_iters) m.max_parallel_iters = *out.max_parallel_iters;
}

std::vector<std::uint64_t> parse_seeds(const json& s) {
  std::vector<std::uint64_t> out;
  if (s.is_array()) {
    for (const json& v : s) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError("seeds: expected non-negative integers");
      }
      out.push_back(v.get<std::uint64_t>());
    }
    return out;
  }
  check_keys(s, "seeds", {"start", "count"});
  const std::int64_t start = get_int(s, "start", "seeds", 0);
  const std::int64_t count = get_int(s, "count", "seeds", 0);
  if (start < 0 || count < 0) throw ConfigError("seeds: start and count must be >= 0");
  for (std::int64_t i = 0; i < count; ++i) {
    out.push_back(static_cast<std::uint64_t>(start + i));
  }
  return out;
}

}  // namespace

ExperimentSpec spec_from_json(const json& doc) {
  check_keys(doc, "config",
             {"schema_version", "name", "problem", "m", "n", "d", "alpha",
              "aggregator", "adversary", "oracle_mode", "override_delta",
              "optimizer", "seeds", "w0", "boundedness_constant",
              "record_traces"});
  const std::int64_t version = get_int(doc, "schema_version", "config", kSchemaVersion);
  if (version != kSchemaVersion) {
    throw ConfigError("config: unsupported schema_version " + std::to_string(version));
  }
  if (!doc.contains("problem")) throw ConfigError("config: missing 'problem'");

  ExperimentSpec spec;
  spec.name = get<std::string>(doc, "name", "config", spec.name);
  spec.problem = parse_problem(doc.at("problem"));
  spec.m = get_count(doc, "m", "config", 1);
  spec.n = get_count(doc, "n", "config", 1);
  spec.alpha = get_number(doc, "alpha", "config", 0.0);
  if (doc.contains("aggregator")) parse_aggregator(doc.at("aggregator"), spec);
  if (doc.contains("adversary")) parse_adversary(doc.at("adversary"), spec);
  spec.oracle_mode = oracle_mode_from_string(
      get<std::string>(doc, "oracle_mode", "config",
                       doc.contains("aggregator") ? "workers" : "exact"));
  spec.override_delta = get_number(doc, "override_delta", "config", 0.0);
  if (doc.contains("optimizer")) parse_optimizer(doc.at("optimizer"), spec);
  if (!doc.contains("seeds")) throw UsageError("config: missing 'seeds'");
  spec.seeds = parse_seeds(doc.at("seeds"));
  spec.boundedness_constant = get_number(doc, "boundedness_constant", "config", 0.0);
  spec.record_traces = get<bool>(doc, "record_traces", "config", true);

  const std::unique_ptr<Problem> problem = make_problem(spec.problem);
  if (doc.contains("d")) {
    const std::int64_t d = get_int(doc, "d", "config", 0);
    if (d != problem->dim()) {
      throw ConfigError("config: d = " + std::to_string(d) +
                        " does not match problem dimension " +
                        std::to_string(problem->dim()));
    }
  }
  spec.w0.center = ParamVector::Zero(problem->dim());
  if (doc.contains("w0")) {
    const json& w = doc.at("w0");
    if (w.is_array()) {
      spec.w0.center = to_vector(w, "w0");
    } else {
      check_keys(w, "w0", {"center", "radius"});
      if (w.contains("center")) spec.w0.center = to_vector(w.at("center"), "w0.center");
      spec.w0.radius = get_number(w, "radius", "w0", 0.0);
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return spec_from_json(doc);
}

json to_json(const OptimizerConfig& cfg) {
  json j;
  j["source"] = std::string(to_string(cfg.source));
  j["eta"] = cfg.eta;
  j["eps"] = cfg.eps;
  j["r"] = cfg.perturbation_radius;
  j["R"] = cfg.escape_radius;
  j["Q"] = cfg.rounds;
  j["T_th"] = cfg.step_cap;
  j["delta_inexact"] = cfg.delta_inexact;
  j["delta_fail"] = cfg.delta_fail;
  j["max_parallel_iters"] = cfg.max_parallel_iters;
  if (cfg.guarantee) {
    j["guarantee"] = {{"grad_norm_bound", cfg.guarantee->grad_norm_bound},
                      {"min_eig_bound", cfg.guarantee->min_eig_bound},
                      {"iter_bound", cfg.guarantee->iter_bound}};
  } else {
    j["guarantee"] = nullptr;
  }
  return j;
}

json to_json(const ProblemMeta& meta) {
  return {{"dim", meta.dim},
          {"smoothness", meta.smoothness},
          {"hessian_lipschitz", meta.hessian_lipschitz},
          {"initial_gap", meta.initial_gap}};
}

namespace {

json vec(const ParamVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json quantiles(const Quantiles& q) {
  return {{"mean", q.mean}, {"q10", q.q10}, {"q50", q.q50}, {"q90", q.q90}};
}

}  // namespace

json to_json(const ExperimentReport& report) {
  json seeds = json::array();
  for (const SeedReport& s : report.seeds) {
    json j;
    j["seed"] = s.seed;
    j["error"] = s.error.empty() ? json(nullptr) : json(s.error);
    j["status"] = s.error.empty() ? std::string(to_string(s.status)) : "error";
    j["w0"] = vec(s.w0);
    j["w_tilde"] = vec(s.w_tilde);
    j["grad_norm_true"] = s.grad_norm_true;
    j["grad_norm_hat"] = s.grad_norm_hat;
    j["lambda_min"] = s.lambda_min;
    j["parallel_iters"] = s.parallel_iters;
    j["escapes_attempted"] = s.escapes_attempted;
    j["escapes_succeeded"] = s.escapes_succeeded;
    j["max_dist_from_w0"] = s.max_dist_from_w0;
    j["bound_violated"] = s.bound_violated;
    j["within_iter_bound"] = s.within_iter_bound;
    j["audit_max_error"] = s.audit_max_error;
    j["fallbacks"] = s.fallbacks;
    seeds.push_back(std::move(j));
  }
  json out;
  out["schema_version"] = kSchemaVersion;
  out["name"] = report.name;
  out["problem"] = report.problem;
  out["config"] = to_json(report.config);
  out["meta"] = to_json(report.meta);
  out["summary"] = {{"grad_norm_true", quantiles(report.grad_norm_true)},
                    {"lambda_min", quantiles(report.lambda_min)},
                    {"parallel_iters", quantiles(report.parallel_iters)},
                    {"escape_success_rate", report.escape_success_rate},
                    {"failed_seeds", report.failed_seeds},
                    {"seed_count", report.seeds.size()}};
  out["seeds"] = std::move(seeds);
  return out;
}

}  // namespace byzpgd
