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

#ifndef BYZPGD_ADVERSARIES_H_
#define BYZPGD_ADVERSARIES_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "byzpgd/types.h"

namespace byzpgd {

/// Everything the adversary may look at in one round. It sees the iterate,
/// every honest message and the true gradient, but not the master's future
/// random draws.
struct RoundContext {
  ParamVector w;
  std::span<const ParamVector> honest_grads;
  // Gradients the Byzantine workers would have sent had they been honest.
  std::span<const ParamVector> byzantine_own_grads;
  ParamVector true_grad;
  Phase phase = Phase::kDescent;
  std::int64_t round_index = 0;
  std::optional<int> escape_round;
  std::uint64_t seed = 0;

  ParamVector honest_mean() const;
};

enum class AdversaryKind {
  kNone,
  kZeroTrap,
  kCurvatureKill,
  kShift,
  kSignFlip,
  kGaussianNoise,
};

std::string_view to_string(AdversaryKind kind);
AdversaryKind adversary_kind_from_string(std::string_view name);

struct AdversaryStrategy {
  AdversaryKind kind = AdversaryKind::kNone;
  // shift: distance of the shifted messages; sign_flip: multiplier c;
  // gaussian_noise: per-coordinate standard deviation.
  double scale = 1.0;
  // Target coordinate. -1 means the last coordinate for curvature_kill and
  // the normalized all-ones direction for shift.
  int coordinate = -1;
  double lambda = 0.5;          // curvature_kill feasibility window |w_k| <= budget / lambda
  double delta_budget = 0.01;   // Delta ball the attack must respect
  double trap_radius = std::numeric_limits<double>::infinity();  // zero_trap

  void validate() const;
};

/// Byzantine worker count alpha m. Throws ConfigError unless it is integral.
std::size_t byzantine_count(double alpha, std::size_t m);

/// Messages of the alpha m Byzantine workers for this round.
std::vector<ParamVector> craft(const AdversaryStrategy& strategy,
                               const RoundContext& ctx, double alpha,
                               std::size_t m);

/// Target aggregate the steering attacks (zero_trap, curvature_kill) aim
/// for, or nullopt when the attack is outside its feasibility window.
std::optional<ParamVector> attack_target(const AdversaryStrategy& strategy,
                                         const RoundContext& ctx);

/// True when zeroing coordinate k of the gradient stays within the budget:
/// |w_k| <= delta_budget / lambda.
bool curvature_kill_feasible(const ParamVector& w, double lambda,
                             double delta_budget, int coordinate = -1);

/// Saddle-point attack messages: every message is the true gradient with the
/// escape coordinate zeroed, when feasible; otherwise the workers echo their
/// own honest gradients.
std::vector<ParamVector> curvature_kill_messages(const RoundContext& ctx,
                                                 double lambda,
                                                 double delta_budget,
                                                 std::size_t count,
                                                 int coordinate = -1);

/// Oracle-level adversary: picks a vector in the ball of radius delta around
/// the true gradient directly, bypassing workers and aggregation.
ParamVector override_gradient(const AdversaryStrategy& strategy,
                              const RoundContext& ctx, double delta);

/// Closest point to `target` in the ball B_center(radius).
ParamVector project_to_ball(const ParamVector& target, const ParamVector& center,
                            double radius);

}  // namespace byzpgd

#endif  // BYZPGD_ADVERSARIES_H_
