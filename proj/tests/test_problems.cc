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
#include <memory>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "byzpgd/linalg.h"
#include "byzpgd/problems.h"
#include "byzpgd/rng.h"

namespace byzpgd {
namespace {

ParamVector vec(std::initializer_list<double> xs) {
  ParamVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<std::unique_ptr<Problem>> all_problems() {
  std::vector<std::unique_ptr<Problem>> out;
  out.push_back(std::make_unique<Convex1d>());
  out.push_back(std::make_unique<Quartic1d>());
  out.push_back(std::make_unique<ClampedSaddle2d>());
  out.push_back(std::make_unique<ClampedSaddle2d>(0.5, 1.0, 2.0));
  out.push_back(std::make_unique<ClampedSaddle2d>(0.3, 0.5, 0.2));
  out.push_back(std::make_unique<MeanEstimation>(vec({1.0, -2.0, 0.5}), 1.0));
  out.push_back(std::make_unique<SineFamily1d>(1.0, 0.0));
  out.push_back(std::make_unique<SineFamily1d>(0.25, 0.7));
  return out;
}

TEST(PopulationValue, Convex1dMinimizer) {
  EXPECT_DOUBLE_EQ(Convex1d().value(vec({1.0})), 0.0);
}

TEST(PopulationValue, Quartic1dAtOrigin) {
  EXPECT_DOUBLE_EQ(Quartic1d().value(vec({0.0})), 0.25);
}

TEST(PopulationValue, SaddleQuadraticForm) {
  EXPECT_DOUBLE_EQ(ClampedSaddle2d(0.5).value(vec({1.0, 1.0})), 0.25);
}

TEST(PopulationValue, QuarticTaylorContinuation) {
  const Quartic1d f(2.0);
  EXPECT_DOUBLE_EQ(f.value(vec({3.0})), 13.75);
  EXPECT_DOUBLE_EQ(f.value(vec({-3.0})), 13.75);
  EXPECT_DOUBLE_EQ(f.smoothness(), 11.0);
  EXPECT_DOUBLE_EQ(f.hessian_lipschitz(), 12.0);
}

TEST(PopulationValue, SaddleClampProfile) {
  const ClampedSaddle2d f(0.5, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(f.phi(1.5), -0.53125);
  EXPECT_DOUBLE_EQ(f.phi(3.0), -0.5);
  EXPECT_DOUBLE_EQ(f.minimizer_offset(), 2.25);
  EXPECT_DOUBLE_EQ(f.min_value(), -0.78125);
  EXPECT_NEAR(f.phi_prime(2.25), 0.0, 1e-15);
  EXPECT_NEAR(f.phi_prime(-2.25), 0.0, 1e-15);
}

TEST(PopulationValue, SaddleMinimumInsideRampWhenKappaLarge) {
  const ClampedSaddle2d f(0.5, 1.0, 2.0);
  const double t = f.minimizer_offset();
  EXPECT_GT(t, 1.0);
  EXPECT_LT(t, 2.0);
  EXPECT_NEAR(f.phi_prime(t), 0.0, 1e-14);
  EXPECT_GT(f.phi_second(t), 0.0);
}

TEST(PopulationValue, ScaledSaddleScalesQuadratically) {
  const ClampedSaddle2d f(0.5, 2000.0, 1.0);
  EXPECT_DOUBLE_EQ(f.minimizer_offset(), 4500.0);
  EXPECT_NEAR(f.min_value(), -0.78125 * 4e6, 1e-6);
  EXPECT_DOUBLE_EQ(f.hessian_lipschitz(), 7.5e-4);
}

TEST(PopulationGrad, MeanEstimationIsWMinusMu) {
  const MeanEstimation f(vec({0.0, 0.0}), 1.0);
  EXPECT_EQ(f.grad(vec({1.0, 2.0})), vec({1.0, 2.0}));
}

TEST(PopulationGrad, SaddleQuadraticForm) {
  EXPECT_EQ(ClampedSaddle2d(0.5).grad(vec({1.0, 1.0})), vec({1.0, -0.5}));
}

TEST(PopulationGrad, QuarticStationaryPoint) {
  EXPECT_DOUBLE_EQ(Quartic1d().grad(vec({1.0}))[0], 0.0);
}

TEST(PopulationGrad, SineGradientBoundedByDelta) {
  const SineFamily1d f(0.04, 0.3);
  for (double w = -3.0; w < 3.0; w += 0.01) {
    EXPECT_LE(std::abs(f.grad(vec({w}))[0]), 0.04 + 1e-15);
  }
}

TEST(HessianMinEig, SaddleIsMinusLambdaInsideClamp) {
  const ClampedSaddle2d f(0.5);
  for (const ParamVector& w : {vec({0.0, 0.0}), vec({3.0, 0.9}), vec({-7.0, -1.0})}) {
    EXPECT_DOUBLE_EQ(f.hessian_min_eig(w), -0.5);
  }
}

TEST(HessianMinEig, MeanEstimationIsOne) {
  const MeanEstimation f(vec({1.0, 2.0, 3.0}), 1.0);
  EXPECT_NEAR(f.hessian_min_eig(vec({5.0, -1.0, 0.0})), 1.0, 1e-12);
}

TEST(HessianMinEig, SineAtQuarterPeriod) {
  const SineFamily1d f(1.0, 0.0);
  EXPECT_NEAR(f.hessian_min_eig(vec({std::numbers::pi / 2.0})), -1.0, 1e-12);
}

TEST(SampleGrad, MeanEstimationExamples) {
  const MeanEstimation f(vec({0.0, 0.0}), 1.0);
  EXPECT_EQ(f.sample_grad(vec({0.0, 0.0}), vec({1.0, 1.0})), vec({-1.0, -1.0}));
  const ParamVector z = vec({0.3, -4.0});
  EXPECT_EQ(f.sample_grad(z, z), ParamVector::Zero(2));
}

TEST(SampleGrad, ShardAverageIsWMinusShardMean) {
  const MeanEstimation f(vec({1.0, -1.0, 2.0}), 2.0);
  Rng rng = make_rng(3, Stream::kData);
  std::vector<ParamVector> zs;
  ParamVector zbar = ParamVector::Zero(3);
  for (int j = 0; j < 17; ++j) {
    zs.push_back(f.draw_sample(rng));
    zbar += zs.back();
  }
  zbar /= 17.0;
  const ParamVector w = vec({0.5, 0.25, -3.0});
  ParamVector avg = ParamVector::Zero(3);
  for (const ParamVector& z : zs) avg += f.sample_grad(w, z);
  avg /= 17.0;
  EXPECT_LT((avg - (w - zbar)).norm(), 1e-13);
}

TEST(SampleGrad, NoiseModelIsUnbiased) {
  const ClampedSaddle2d f;
  const ParamVector w = vec({0.3, -0.7});
  Rng rng = make_rng(9, Stream::kData);
  ParamVector avg = ParamVector::Zero(2);
  constexpr int kDraws = 20000;
  for (int j = 0; j < kDraws; ++j) avg += f.sample_grad(w, f.draw_sample(rng));
  avg /= kDraws;
  EXPECT_LT((avg - f.grad(w)).norm(), 0.05);
}

TEST(Problem, DimensionMismatchIsConfigError) {
  const ClampedSaddle2d f;
  EXPECT_THROW(f.value(vec({1.0})), ConfigError);
  EXPECT_THROW(f.grad(vec({1.0, 2.0, 3.0})), ConfigError);
  EXPECT_THROW(f.sample_grad(vec({1.0, 2.0}), vec({1.0})), ConfigError);
}

TEST(Problem, NonFiniteIterateIsOracleError) {
  EXPECT_THROW(Convex1d().grad(vec({std::nan("")})), OracleError);
}

TEST(Problem, MetaAt) {
  const ClampedSaddle2d f;
  const ProblemMeta meta = f.meta_at(vec({0.0, 0.0}));
  EXPECT_EQ(meta.dim, 2);
  EXPECT_DOUBLE_EQ(meta.smoothness, 1.0);
  EXPECT_DOUBLE_EQ(meta.hessian_lipschitz, 1.5);
  EXPECT_DOUBLE_EQ(meta.initial_gap, 0.78125);
  EXPECT_NO_THROW(meta.validate());
  ProblemMeta bad = meta;
  bad.smoothness = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(MakeProblem, ByName) {
  ProblemParams p;
  for (const char* name :
       {"convex_1d", "quartic_1d", "saddle_2d", "mean_estimation", "sine_1d"}) {
    p.name = name;
    p.dim = 3;
    EXPECT_EQ(make_problem(p)->name(), name);
  }
  p.name = "rosenbrock";
  EXPECT_THROW(make_problem(p), ConfigError);
}

TEST(MakeProblem, MeanEstimationDimensionChecks) {
  ProblemParams p;
  p.name = "mean_estimation";
  EXPECT_THROW(make_problem(p), ConfigError);
  p.mu = {1.0, 2.0};
  EXPECT_EQ(make_problem(p)->dim(), 2);
  p.dim = 3;
  EXPECT_THROW(make_problem(p), ConfigError);
}

TEST(MakeProblem, RejectsBadParameters) {
  ProblemParams p;
  p.name = "saddle_2d";
  p.b = 0.0;
  EXPECT_THROW(make_problem(p), ConfigError);
  p = {};
  p.name = "sine_1d";
  p.delta = -1.0;
  EXPECT_THROW(make_problem(p), ConfigError);
}

// Property checks over every benchmark.

class ProblemProperty : public ::testing::TestWithParam<int> {
 protected:
  std::unique_ptr<Problem> problem() {
    return std::move(all_problems()[static_cast<std::size_t>(GetParam())]);
  }
};

TEST_P(ProblemProperty, GradientMatchesFiniteDifferences) {
  const auto f = problem();
  Rng rng = make_rng(11, Stream::kTrials, static_cast<std::uint64_t>(GetParam()));
  constexpr double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    const ParamVector w = sample_uniform_ball(rng, f->dim(), 4.0);
    const ParamVector g = f->grad(w);
    ParamVector fd(f->dim());
    for (Eigen::Index i = 0; i < f->dim(); ++i) {
      ParamVector up = w, down = w;
      up[i] += h;
      down[i] -= h;
      fd[i] = (f->value(up) - f->value(down)) / (2.0 * h);
    }
    EXPECT_LE((g - fd).lpNorm<Eigen::Infinity>(),
              1e-5 * (1.0 + g.lpNorm<Eigen::Infinity>()))
        << f->name() << " at w=" << w.transpose();
  }
}

TEST_P(ProblemProperty, HessianMatchesFiniteDifferences) {
  const auto f = problem();
  Rng rng = make_rng(12, Stream::kTrials, static_cast<std::uint64_t>(GetParam()));
  constexpr double h = 1e-6;
  for (int k = 0; k < 100; ++k) {
    const ParamVector w = sample_uniform_ball(rng, f->dim(), 4.0);
    const Matrix hess = f->hessian(w);
    for (Eigen::Index i = 0; i < f->dim(); ++i) {
      ParamVector up = w, down = w;
      up[i] += h;
      down[i] -= h;
      const ParamVector col = (f->grad(up) - f->grad(down)) / (2.0 * h);
      EXPECT_LE((hess.col(i) - col).lpNorm<Eigen::Infinity>(),
                1e-5 * (1.0 + hess.lpNorm<Eigen::Infinity>()))
          << f->name() << " at w=" << w.transpose();
    }
  }
}

TEST_P(ProblemProperty, DeclaredLipschitzConstantsHold) {
  const auto f = problem();
  Rng rng = make_rng(13, Stream::kTrials, static_cast<std::uint64_t>(GetParam()));
  for (int k = 0; k < 1000; ++k) {
    const ParamVector w = sample_uniform_ball(rng, f->dim(), 6.0);
    const ParamVector v = sample_uniform_ball(rng, f->dim(), 6.0);
    const double dist = (w - v).norm();
    const double grad_gap = (f->grad(w) - f->grad(v)).norm();
    EXPECT_LE(grad_gap, f->smoothness() * dist * (1.0 + 1e-12) + 1e-12) << f->name();
    const Matrix diff = f->hessian(w) - f->hessian(v);
    const double spectral =
        std::max(std::abs(min_eigenvalue(diff)), std::abs(min_eigenvalue(-diff)));
    EXPECT_LE(spectral, f->hessian_lipschitz() * dist * (1.0 + 1e-12) + 1e-12)
        << f->name();
  }
}

TEST_P(ProblemProperty, MinValueIsALowerBound) {
  const auto f = problem();
  Rng rng = make_rng(14, Stream::kTrials, static_cast<std::uint64_t>(GetParam()));
  for (int k = 0; k < 1000; ++k) {
    const ParamVector w = sample_uniform_ball(rng, f->dim(), 8.0);
    EXPECT_GE(f->value(w), f->min_value() - 1e-12) << f->name();
  }
}

INSTANTIATE_TEST_SUITE_P(Benchmarks, ProblemProperty, ::testing::Range(0, 8));

TEST(MeanEstimation, GradientIsExactlyWMinusMu) {
  const ParamVector mu = vec({0.1, -0.7, 3.3, 1e-9});
  const MeanEstimation f(mu, 0.5);
  Rng rng = make_rng(15, Stream::kTrials);
  for (int k = 0; k < 100; ++k) {
    const ParamVector w = sample_gaussian(rng, 4, 10.0);
    const ParamVector expected = w - mu;
    EXPECT_EQ(f.grad(w), expected);
  }
  EXPECT_DOUBLE_EQ(f.min_value(), 0.5 * 4 * 0.25);
}

}  // namespace
}  // namespace byzpgd
