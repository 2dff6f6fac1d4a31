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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "byzpgd/adversaries.h"
#include "byzpgd/aggregators.h"
#include "byzpgd/harness.h"
#include "byzpgd/problems.h"
#include "byzpgd/rng.h"

namespace byzpgd {
namespace {

ParamVector vec2(double a, double b) {
  ParamVector v(2);
  v << a, b;
  return v;
}

struct Fixture {
  std::vector<ParamVector> honest;
  std::vector<ParamVector> own;
  RoundContext ctx;

  Fixture(const ParamVector& w, const ParamVector& grad, std::size_t honest_count,
          std::size_t byz_count, std::uint64_t seed = 1) {
    Rng rng = make_rng(seed, Stream::kData);
    for (std::size_t i = 0; i < honest_count; ++i) {
      honest.push_back(grad + sample_gaussian(rng, grad.size(), 0.1));
    }
    for (std::size_t i = 0; i < byz_count; ++i) {
      own.push_back(grad + sample_gaussian(rng, grad.size(), 0.1));
    }
    ctx.w = w;
    ctx.true_grad = grad;
    ctx.honest_grads = honest;
    ctx.byzantine_own_grads = own;
    ctx.seed = seed;
  }
};

TEST(ByzantineCount, IntegralProducts) {
  EXPECT_EQ(byzantine_count(0.2, 10), 2u);
  EXPECT_EQ(byzantine_count(0.0, 7), 0u);
  EXPECT_EQ(byzantine_count(0.1, 50), 5u);
}

TEST(ByzantineCount, RejectsFractionalAndOutOfRange) {
  EXPECT_THROW(byzantine_count(0.15, 10), ConfigError);
  try {
    byzantine_count(0.6, 10);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("α ∈ (0, 1/2)"), std::string::npos);
  }
  EXPECT_THROW(byzantine_count(0.5, 10), ConfigError);
}

TEST(Craft, NoneEchoesOwnGradients) {
  Fixture f(vec2(0, 0), vec2(1, 1), 8, 2);
  AdversaryStrategy s;
  const auto msgs = craft(s, f.ctx, 0.2, 10);
  ASSERT_EQ(msgs.size(), 2u);
  EXPECT_EQ(msgs[0], f.own[0]);
  EXPECT_EQ(msgs[1], f.own[1]);
}

TEST(Craft, SignFlipNegatesHonestMean) {
  Fixture f(vec2(0, 0), vec2(1, -3), 8, 2);
  AdversaryStrategy s;
  s.kind = AdversaryKind::kSignFlip;
  s.scale = 1.0;
  const auto msgs = craft(s, f.ctx, 0.2, 10);
  ASSERT_EQ(msgs.size(), 2u);
  for (const ParamVector& m : msgs) EXPECT_EQ(m, -f.ctx.honest_mean());
}

TEST(Craft, ShiftMovesAlongNormalizedOnes) {
  Fixture f(vec2(0, 0), vec2(0, 0), 8, 2);
  AdversaryStrategy s;
  s.kind = AdversaryKind::kShift;
  s.scale = 100.0;
  const auto msgs = craft(s, f.ctx, 0.2, 10);
  const ParamVector delta = msgs[0] - f.ctx.honest_mean();
  EXPECT_NEAR(delta.norm(), 100.0, 1e-9);
  EXPECT_NEAR(delta[0], delta[1], 1e-9);
  s.coordinate = 1;
  EXPECT_NEAR((craft(s, f.ctx, 0.2, 10)[0] - f.ctx.honest_mean())[1], 100.0, 1e-9);
}

TEST(Craft, ZeroTrapOnQuarticInsideWindow) {
  const Quartic1d problem;
  ParamVector w(1);
  w << 0.005;
  const ParamVector grad = problem.grad(w);
  ASSERT_LE(grad.norm(), 0.01);
  Fixture f(w, grad, 8, 2);
  AdversaryStrategy s;
  s.kind = AdversaryKind::kZeroTrap;
  s.delta_budget = 0.01;
  for (const ParamVector& m : craft(s, f.ctx, 0.2, 10)) EXPECT_EQ(m, ParamVector::Zero(1));

  SimulatedOracle oracle(problem, OracleMode::kOracleOverride, nullptr, s,
                         AggregatorSpec{}, 0.01, 1);
  const RoundResult r = oracle.evaluate(w, RoundInfo{});
  EXPECT_EQ(r.g_hat, ParamVector::Zero(1));
  EXPECT_EQ(r.audit.attack_target_hit, std::optional<bool>(true));
}

TEST(Craft, ZeroTrapOutsideWindowIsHonest) {
  const Quartic1d problem;
  ParamVector w(1);
  w << 0.5;
  Fixture f(w, problem.grad(w), 8, 2);
  AdversaryStrategy s;
  s.kind = AdversaryKind::kZeroTrap;
  s.delta_budget = 0.01;
  const auto msgs = craft(s, f.ctx, 0.2, 10);
  EXPECT_EQ(msgs[0], f.own[0]);
}

TEST(CurvatureKill, FeasibleTarget) {
  const ClampedSaddle2d problem(0.5);
  const ParamVector w = vec2(0.3, 0.001);
  Fixture f(w, problem.grad(w), 8, 2);
  ASSERT_TRUE(curvature_kill_feasible(w, 0.5, 0.01));
  const auto msgs = curvature_kill_messages(f.ctx, 0.5, 0.01, 2);
  ASSERT_EQ(msgs.size(), 2u);
  EXPECT_EQ(msgs[0], vec2(0.3, 0.0));
  EXPECT_NEAR((msgs[0] - problem.grad(w)).norm(), 0.0005, 1e-15);
}

TEST(CurvatureKill, InfeasibleEchoesHonest) {
  const ClampedSaddle2d problem(0.5);
  const ParamVector w = vec2(0.3, 0.5);
  Fixture f(w, problem.grad(w), 8, 2);
  EXPECT_FALSE(curvature_kill_feasible(w, 0.5, 0.01));
  const auto msgs = curvature_kill_messages(f.ctx, 0.5, 0.01, 2);
  EXPECT_EQ(msgs[0], f.own[0]);
  EXPECT_EQ(msgs[1], f.own[1]);
}

TEST(Craft, ExactCountAndFiniteForEveryKind) {
  const ClampedSaddle2d problem;
  for (AdversaryKind kind :
       {AdversaryKind::kNone, AdversaryKind::kZeroTrap, AdversaryKind::kCurvatureKill,
        AdversaryKind::kShift, AdversaryKind::kSignFlip, AdversaryKind::kGaussianNoise}) {
    for (std::size_t m : {5u, 10u, 20u}) {
      const std::size_t byz = m / 5;
      const ParamVector w = vec2(0.01, 0.001);
      Fixture f(w, problem.grad(w), m - byz, byz);
      AdversaryStrategy s;
      s.kind = kind;
      const auto msgs = craft(s, f.ctx, 0.2, m);
      EXPECT_EQ(msgs.size(), byz) << to_string(kind);
      for (const ParamVector& v : msgs) EXPECT_TRUE(all_finite(v));
    }
  }
}

TEST(Craft, GaussianNoiseDeterministicPerRound) {
  Fixture f(vec2(0, 0), vec2(1, 1), 8, 2, 7);
  AdversaryStrategy s;
  s.kind = AdversaryKind::kGaussianNoise;
  s.scale = 2.0;
  f.ctx.round_index = 3;
  const auto a = craft(s, f.ctx, 0.2, 10);
  const auto b = craft(s, f.ctx, 0.2, 10);
  EXPECT_EQ(a[0], b[0]);
  EXPECT_NE(a[0], a[1]);
  f.ctx.round_index = 4;
  EXPECT_NE(craft(s, f.ctx, 0.2, 10)[0], a[0]);
}

TEST(Craft, HonestMessagesUntouched) {
  Fixture f(vec2(0, 0), vec2(1, 1), 8, 2);
  const std::vector<ParamVector> before = f.honest;
  for (AdversaryKind kind : {AdversaryKind::kShift, AdversaryKind::kSignFlip,
                             AdversaryKind::kGaussianNoise}) {
    AdversaryStrategy s;
    s.kind = kind;
    craft(s, f.ctx, 0.2, 10);
    EXPECT_EQ(f.honest, before);
  }
}

TEST(ProjectToBall, ClipsToRadius) {
  const ParamVector c = vec2(1, 1);
  EXPECT_EQ(project_to_ball(vec2(1.1, 1), c, 0.5), vec2(1.1, 1));
  const ParamVector p = project_to_ball(vec2(4, 5), c, 1.0);
  EXPECT_NEAR((p - c).norm(), 1.0, 1e-15);
  EXPECT_NEAR(p[0], 1.6, 1e-15);
  EXPECT_NEAR(p[1], 1.8, 1e-15);
}

TEST(OverrideGradient, EveryKindStaysInDeltaBall) {
  const ClampedSaddle2d problem;
  Rng rng = make_rng(41, Stream::kTrials);
  for (AdversaryKind kind :
       {AdversaryKind::kNone, AdversaryKind::kZeroTrap, AdversaryKind::kCurvatureKill,
        AdversaryKind::kShift, AdversaryKind::kSignFlip, AdversaryKind::kGaussianNoise}) {
    AdversaryStrategy s;
    s.kind = kind;
    s.scale = 5.0;
    for (int k = 0; k < 500; ++k) {
      RoundContext ctx;
      ctx.w = sample_uniform_ball(rng, 2, 0.1);
      ctx.true_grad = problem.grad(ctx.w);
      ctx.round_index = k;
      const ParamVector g = override_gradient(s, ctx, 0.01);
      EXPECT_LE((g - ctx.true_grad).norm(), 0.01 * (1 + 1e-12)) << to_string(kind);
    }
  }
}

TEST(OverrideGradient, SteeringAttacksHitTargetInsideWindow) {
  const ClampedSaddle2d problem;
  AdversaryStrategy s;
  s.kind = AdversaryKind::kCurvatureKill;
  s.lambda = 0.5;
  Rng rng = make_rng(42, Stream::kTrials);
  for (int k = 0; k < 500; ++k) {
    RoundContext ctx;
    ctx.w = sample_uniform_ball(rng, 2, 0.05);
    ctx.true_grad = problem.grad(ctx.w);
    const ParamVector g = override_gradient(s, ctx, 0.01);
    if (std::abs(ctx.w[1]) <= 0.02) {
      EXPECT_EQ(g, vec2(ctx.w[0], 0.0));
    } else {
      EXPECT_EQ(g, ctx.true_grad);
    }
  }
}

TEST(AdversaryStrategy, ValidationAndNames) {
  AdversaryStrategy s;
  s.lambda = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.kind = AdversaryKind::kGaussianNoise;
  s.scale = -1.0;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_THROW(adversary_kind_from_string("krum"), ConfigError);
  for (AdversaryKind kind :
       {AdversaryKind::kNone, AdversaryKind::kZeroTrap, AdversaryKind::kCurvatureKill,
        AdversaryKind::kShift, AdversaryKind::kSignFlip, AdversaryKind::kGaussianNoise}) {
    EXPECT_EQ(adversary_kind_from_string(to_string(kind)), kind);
  }
}

}  // namespace
}  // namespace byzpgd
