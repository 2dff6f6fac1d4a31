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

#include "byzpgd/adversaries.h"

#include <cmath>
#include <string>

#include "byzpgd/rng.h"

namespace byzpgd {
namespace {

Eigen::Index resolve_coordinate(int coordinate, Eigen::Index dim) {
  if (coordinate < 0) return dim - 1;
  if (coordinate >= dim) {
    throw ConfigError("adversary: coordinate " + std::to_string(coordinate) +
                      " out of range for dimension " + std::to_string(dim));
  }
  return coordinate;
}

ParamVector shift_direction(int coordinate, Eigen::Index dim) {
  if (coordinate < 0) {
    return ParamVector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  }
  return ParamVector::Unit(dim, resolve_coordinate(coordinate, dim));
}

std::vector<ParamVector> echo_own(const RoundContext& ctx, std::size_t count) {
  if (ctx.byzantine_own_grads.size() != count) {
    throw UsageError("adversary: expected " + std::to_string(count) +
                     " Byzantine honest-computed gradients, got " +
                     std::to_string(ctx.byzantine_own_grads.size()));
  }
  return {ctx.byzantine_own_grads.begin(), ctx.byzantine_own_grads.end()};
}

// Message-independent perturbation of the honest mean, or the mean itself
// for non-random kinds.
ParamVector untargeted(const AdversaryStrategy& s, const ParamVector& base,
                       Rng& rng) {
  const Eigen::Index d = base.size();
  switch (s.kind) {
    case AdversaryKind::kShift:
      return base + s.scale * shift_direction(s.coordinate, d);
    case AdversaryKind::kSignFlip:
      return -s.scale * base;
    case AdversaryKind::kGaussianNoise:
      return base + sample_gaussian(rng, d, s.scale);
    default:
      return base;
  }
}

}  // namespace

ParamVector RoundContext::honest_mean() const {
  if (honest_grads.empty()) return true_grad;
  ParamVector mean = ParamVector::Zero(honest_grads.front().size());
  for (const ParamVector& g : honest_grads) mean += g;
  return mean / static_cast<double>(honest_grads.size());
}

std::string_view to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kNone: return "none";
    case AdversaryKind::kZeroTrap: return "zero_trap";
    case AdversaryKind::kCurvatureKill: return "curvature_kill";
    case AdversaryKind::kShift: return "shift";
    case AdversaryKind::kSignFlip: return "sign_flip";
    case AdversaryKind::kGaussianNoise: return "gaussian_noise";
  }
  return "unknown";
}

AdversaryKind adversary_kind_from_string(std::string_view name) {
  if (name == "none") return AdversaryKind::kNone;
  if (name == "zero_trap") return AdversaryKind::kZeroTrap;
  if (name == "curvature_kill") return AdversaryKind::kCurvatureKill;
  if (name == "shift") return AdversaryKind::kShift;
  if (name == "sign_flip") return AdversaryKind::kSignFlip;
  if (name == "gaussian_noise") return AdversaryKind::kGaussianNoise;
  throw ConfigError("unknown adversary '" + std::string(name) +
                    "' (expected none, zero_trap, curvature_kill, shift, "
                    "sign_flip or gaussian_noise)");
}

void AdversaryStrategy::validate() const {
  if (!std::isfinite(scale)) throw ConfigError("adversary: scale must be finite");
  if (kind == AdversaryKind::kGaussianNoise && scale < 0.0) {
    throw ConfigError("adversary: gaussian_noise scale must be >= 0");
  }
  if (!(lambda > 0.0)) throw ConfigError("adversary: lambda must be > 0");
  if (!(delta_budget >= 0.0)) {
    throw ConfigError("adversary: delta_budget must be >= 0");
  }
  if (!(trap_radius >= 0.0)) {
    throw ConfigError("adversary: trap_radius must be >= 0");
  }
  if (coordinate < -1) throw ConfigError("adversary: coordinate must be >= -1");
}

std::size_t byzantine_count(double alpha, std::size_t m) {
  if (!(alpha >= 0.0 && alpha < 0.5)) {
    throw ConfigError("alpha = " + std::to_string(alpha) +
                      " violates α ∈ (0, 1/2)");
  }
  const double a = alpha * static_cast<double>(m);
  const double k = std::round(a);
  if (std::abs(a - k) > 1e-9) {
    throw ConfigError("alpha * m = " + std::to_string(a) +
                      " must be an integer number of Byzantine workers");
  }
  return static_cast<std::size_t>(k);
}

bool curvature_kill_feasible(const ParamVector& w, double lambda,
                             double delta_budget, int coordinate) {
  const Eigen::Index k = resolve_coordinate(coordinate, w.size());
  return std::abs(w[k]) <= delta_budget / lambda;
}

std::optional<ParamVector> attack_target(const AdversaryStrategy& s,
                                         const RoundContext& ctx) {
  switch (s.kind) {
    case AdversaryKind::kZeroTrap:
      if (ctx.true_grad.norm() <= s.delta_budget && ctx.w.norm() <= s.trap_radius) {
        return ParamVector(ParamVector::Zero(ctx.w.size()));
      }
      return std::nullopt;
    case AdversaryKind::kCurvatureKill: {
      if (!curvature_kill_feasible(ctx.w, s.lambda, s.delta_budget, s.coordinate)) {
        return std::nullopt;
      }
      ParamVector target = ctx.true_grad;
      target[resolve_coordinate(s.coordinate, target.size())] = 0.0;
      return target;
    }
    default:
      return std::nullopt;
  }
}

std::vector<ParamVector> curvature_kill_messages(const RoundContext& ctx,
                                                 double lambda,
                                                 double delta_budget,
                                                 std::size_t count,
                                                 int coordinate) {
  AdversaryStrategy s;
  s.kind = AdversaryKind::kCurvatureKill;
  s.lambda = lambda;
  s.delta_budget = delta_budget;
  s.coordinate = coordinate;
  const std::optional<ParamVector> target = attack_target(s, ctx);
  if (!target) return echo_own(ctx, count);
  return std::vector<ParamVector>(count, *target);
}

std::vector<ParamVector> craft(const AdversaryStrategy& s, const RoundContext& ctx,
                               double alpha, std::size_t m) {
  const std::size_t count = byzantine_count(alpha, m);
  if (count == 0) return {};
  switch (s.kind) {
    case AdversaryKind::kNone:
      return echo_own(ctx, count);
    case AdversaryKind::kZeroTrap:
    case AdversaryKind::kCurvatureKill: {
      const std::optional<ParamVector> target = attack_target(s, ctx);
      if (!target) return echo_own(ctx, count);
      return std::vector<ParamVector>(count, *target);
    }
    case AdversaryKind::kShift:
    case AdversaryKind::kSignFlip: {
      Rng unused(0);
      return std::vector<ParamVector>(count, untargeted(s, ctx.honest_mean(), unused));
    }
    case AdversaryKind::kGaussianNoise: {
      Rng rng = make_rng(ctx.seed, Stream::kAdversary,
                         static_cast<std::uint64_t>(ctx.round_index));
      const ParamVector base = ctx.honest_mean();
      std::vector<ParamVector> out;
      out.reserve(count);
      for (std::size_t i = 0; i < count; ++i) {
        out.push_back(untargeted(s, base, rng));
      }
      return out;
    }
  }
  throw UsageError("craft: unknown adversary kind");
}

ParamVector project_to_ball(const ParamVector& target, const ParamVector& center,
                            double radius) {
  const ParamVector diff = target - center;
  const double dist = diff.norm();
  if (dist <= radius) return target;
  return center + diff * (radius / dist);
}

ParamVector override_gradient(const AdversaryStrategy& s, const RoundContext& ctx,
                              double delta) {
  const ParamVector& g = ctx.true_grad;
  switch (s.kind) {
    case AdversaryKind::kNone:
      return g;
    case AdversaryKind::kZeroTrap:
    case AdversaryKind::kCurvatureKill: {
      AdversaryStrategy windowed = s;
      windowed.delta_budget = delta;
      const std::optional<ParamVector> target = attack_target(windowed, ctx);
      return target ? project_to_ball(*target, g, delta) : g;
    }
    default: {
      Rng rng = make_rng(ctx.seed, Stream::kAdversary,
                         static_cast<std::uint64_t>(ctx.round_index));
      return project_to_ball(untargeted(s, g, rng), g, delta);
    }
  }
}

}  // namespace byzpgd
