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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "byzpgd/aggregators.h"
#include "byzpgd/rng.h"

namespace byzpgd {
namespace {

GradientBatch batch_of(std::initializer_list<std::initializer_list<double>> rows) {
  GradientBatch b;
  for (const auto& r : rows) {
    ParamVector v(static_cast<Eigen::Index>(r.size()));
    Eigen::Index i = 0;
    for (double x : r) v[i++] = x;
    b.vectors.push_back(v);
  }
  return b;
}

GradientBatch random_batch(Rng& rng, std::size_t m, Eigen::Index d, double scale = 1.0) {
  GradientBatch b;
  for (std::size_t i = 0; i < m; ++i) b.vectors.push_back(sample_gaussian(rng, d, scale));
  return b;
}

ParamVector arithmetic_mean(const GradientBatch& b) {
  ParamVector s = ParamVector::Zero(b.dim());
  for (const ParamVector& v : b.vectors) s += v;
  return s / static_cast<double>(b.size());
}

TEST(CoordinateMedian, OddCount) {
  EXPECT_EQ(coordinate_median(batch_of({{1}, {2}, {100}}))[0], 2.0);
}

TEST(CoordinateMedian, PerCoordinate) {
  const ParamVector m = coordinate_median(batch_of({{0, 10}, {2, 0}, {4, 20}}));
  EXPECT_EQ(m[0], 2.0);
  EXPECT_EQ(m[1], 10.0);
}

TEST(CoordinateMedian, EvenCountTakesMidpoint) {
  EXPECT_EQ(coordinate_median(batch_of({{4}, {1}, {3}, {100}}))[0], 3.5);
}

TEST(CoordinateMedian, IdenticalVectors) {
  ParamVector v(3);
  v << 1.5, -2.0, 7.0;
  GradientBatch b;
  b.vectors.assign(5, v);
  EXPECT_EQ(coordinate_median(b), v);
}

TEST(CoordinateMedian, EmptyBatchIsUsageError) {
  EXPECT_THROW(coordinate_median(GradientBatch{}), UsageError);
}

TEST(CoordinateMedian, MixedDimensionsIsConfigError) {
  EXPECT_THROW(coordinate_median(batch_of({{1, 2}, {3}})), ConfigError);
}

TEST(TrimmedMean, DropsExtremes) {
  EXPECT_DOUBLE_EQ(trimmed_mean(batch_of({{0}, {1}, {2}}), 1.0 / 3.0)[0], 1.0);
}

TEST(TrimmedMean, OneFromEachTail) {
  EXPECT_DOUBLE_EQ(trimmed_mean(batch_of({{0}, {1}, {2}, {100}}), 0.25)[0], 1.5);
}

TEST(TrimmedMean, ZeroBetaIsArithmeticMean) {
  Rng rng = make_rng(31, Stream::kTrials);
  const GradientBatch b = random_batch(rng, 9, 4);
  EXPECT_LT((trimmed_mean(b, 0.0) - arithmetic_mean(b)).norm(), 1e-14);
}

TEST(TrimmedMean, FractionalTrimRoundsUp) {
  EXPECT_EQ(trim_count(0.1, 5), 1u);
  EXPECT_EQ(trim_count(0.2, 10), 2u);
  EXPECT_EQ(trim_count(0.0, 10), 0u);
  // 0.1 * 5 = 0.5 -> one value removed from each tail, three survivors.
  EXPECT_DOUBLE_EQ(trimmed_mean(batch_of({{0}, {1}, {2}, {3}, {100}}), 0.1)[0], 2.0);
}

TEST(TrimmedMean, NoSurvivorsIsUsageError) {
  EXPECT_THROW(trimmed_mean(batch_of({{0}, {1}}), 0.4), UsageError);
  EXPECT_THROW(trimmed_mean(batch_of({{0}, {1}}), 0.5), UsageError);
}

TEST(AggregatorSpec, Validation) {
  AggregatorSpec s;
  s.kind = AggregatorKind::kTrimmedMean;
  s.beta = 0.4;
  EXPECT_NO_THROW(s.validate(10));
  EXPECT_THROW(s.validate(2), ConfigError);
  s.beta = 0.5;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.kind = AggregatorKind::kIterativeFilter;
  s.alpha = 0.3;
  EXPECT_THROW(s.validate(), ConfigError);
  s.alpha = 0.25;
  s.sigma = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s.sigma = 1.0;
  EXPECT_THROW(s.validate(3), ConfigError);
  EXPECT_NO_THROW(s.validate(4));
  EXPECT_THROW(aggregator_kind_from_string("krum"), ConfigError);
  EXPECT_EQ(aggregator_kind_from_string("trimmed_mean"), AggregatorKind::kTrimmedMean);
}

TEST(TopPrincipalDirection, SingleVector) {
  ParamVector y(2);
  y << 3.0, 4.0;
  const std::vector<ParamVector> ys = {y};
  const std::vector<double> w = {1.0};
  const PrincipalDirection p = top_principal_direction(ys, w);
  EXPECT_NEAR(p.eigenvalue, 25.0, 25e-6);
  EXPECT_NEAR(p.direction[0], 0.6, 1e-6);
  EXPECT_NEAR(p.direction[1], 0.8, 1e-6);
}

TEST(TopPrincipalDirection, SymmetricSpread) {
  const GradientBatch b = batch_of({{2, 0}, {-2, 0}, {0, 1}, {0, -1}});
  const std::vector<double> w(4, 1.0);
  const PrincipalDirection p = top_principal_direction(b.vectors, w);
  EXPECT_NEAR(std::abs(p.direction[0]), 1.0, 1e-9);
  EXPECT_NEAR(p.direction[1], 0.0, 1e-9);
}

TEST(TopPrincipalDirection, OrthonormalTie) {
  const GradientBatch b = batch_of({{1, 0}, {0, 1}});
  const std::vector<double> w(2, 1.0);
  const PrincipalDirection p = top_principal_direction(b.vectors, w);
  EXPECT_DOUBLE_EQ(p.eigenvalue, 1.0);
  EXPECT_EQ(p.direction, ParamVector::Unit(2, 0));
}

TEST(TopPrincipalDirection, AllZero) {
  const GradientBatch b = batch_of({{0, 0, 0}, {0, 0, 0}});
  const std::vector<double> w(2, 1.0);
  const PrincipalDirection p = top_principal_direction(b.vectors, w);
  EXPECT_EQ(p.eigenvalue, 0.0);
  EXPECT_DOUBLE_EQ(p.direction.norm(), 1.0);
}

TEST(IterativeFilter, CleanBatchReturnsMeanInOneRound) {
  Rng rng = make_rng(32, Stream::kTrials);
  const GradientBatch b = random_batch(rng, 40, 3, 0.5);
  const FilterOutcome out = iterative_filter(b, 0.1, 1.0);
  EXPECT_FALSE(out.diverged);
  EXPECT_EQ(out.rounds, 1);
  EXPECT_EQ(out.active_count, 40u);
  EXPECT_LT((out.estimate - arithmetic_mean(b)).norm(), 1e-14);
}

TEST(IterativeFilter, RemovesFarOutlier) {
  Rng rng = make_rng(33, Stream::kTrials);
  std::uniform_real_distribution<double> spread(-0.07, 0.07);
  GradientBatch b;
  for (int i = 0; i < 19; ++i) {
    ParamVector v(2);
    v << spread(rng), spread(rng);
    b.vectors.push_back(v);
  }
  ParamVector outlier(2);
  outlier << 1e6, 0.0;
  b.vectors.push_back(outlier);
  const FilterOutcome out = iterative_filter(b, 0.05, 1.0);
  EXPECT_FALSE(out.diverged);
  EXPECT_EQ(out.active_count, 19u);
  EXPECT_LT(out.estimate.norm(), 0.2);
}

TEST(IterativeFilter, IdenticalVectors) {
  ParamVector v(3);
  v << 1.0, 2.0, 3.0;
  GradientBatch b;
  b.vectors.assign(8, v);
  EXPECT_EQ(iterative_filter(b, 0.25, 1.0).estimate, v);
}

TEST(IterativeFilter, PreconditionsAreUsageErrors) {
  EXPECT_THROW(iterative_filter(batch_of({{1}, {2}, {3}}), 0.1, 1.0), UsageError);
  EXPECT_THROW(iterative_filter(batch_of({{1}, {2}, {3}, {4}}), 0.3, 1.0), UsageError);
  EXPECT_THROW(iterative_filter(batch_of({{1}, {2}, {3}, {4}}), 0.1, 0.0), UsageError);
}

TEST(IterativeFilter, CollapseSignalsDivergenceAndAggregateFallsBack) {
  // With alpha = 0 no point may be removed, so dropping the outlier diverges.
  GradientBatch b;
  for (int i = 0; i < 9; ++i) b.vectors.push_back(ParamVector::Constant(2, 0.01 * i));
  b.vectors.push_back(ParamVector::Constant(2, 1e4));
  const FilterOutcome out = iterative_filter(b, 0.0, 1.0);
  EXPECT_TRUE(out.diverged);
  AggregatorSpec spec;
  spec.kind = AggregatorKind::kIterativeFilter;
  spec.alpha = 0.0;
  const AggregateResult agg = aggregate(spec, b);
  EXPECT_TRUE(agg.fell_back);
  EXPECT_EQ(agg.value, coordinate_median(b));
}

TEST(Aggregate, DispatchesByKind) {
  const GradientBatch b = batch_of({{0}, {1}, {2}, {100}});
  AggregatorSpec s;
  EXPECT_EQ(aggregate(s, b).value[0], 1.5);
  s.kind = AggregatorKind::kTrimmedMean;
  s.beta = 0.0;
  EXPECT_EQ(aggregate(s, b).value[0], 103.0 / 4.0);
  EXPECT_FALSE(aggregate(s, b).fell_back);
}

TEST(EstimateSigma, RecoversIsotropicScale) {
  Rng rng = make_rng(34, Stream::kTrials);
  std::vector<ParamVector> pts;
  for (int i = 0; i < 20000; ++i) pts.push_back(sample_gaussian(rng, 2, 0.3));
  EXPECT_NEAR(estimate_sigma(pts), 0.3, 0.01);
}

// Properties.

class AggregatorProperty : public ::testing::TestWithParam<AggregatorKind> {
 protected:
  AggregatorSpec spec() const {
    AggregatorSpec s;
    s.kind = GetParam();
    s.beta = 0.2;
    s.alpha = 0.2;
    s.sigma = 1.0;
    return s;
  }
};

TEST_P(AggregatorProperty, PermutationInvariant) {
  Rng rng = make_rng(35, Stream::kTrials);
  for (int trial = 0; trial < 50; ++trial) {
    GradientBatch b = random_batch(rng, 10, 3, 2.0);
    b.vectors[0] *= 50.0;
    const ParamVector base = aggregate(spec(), b).value;
    std::shuffle(b.vectors.begin(), b.vectors.end(), rng);
    const ParamVector shuffled = aggregate(spec(), b).value;
    if (GetParam() == AggregatorKind::kIterativeFilter) {
      EXPECT_LT((base - shuffled).norm(), 1e-10);
    } else {
      EXPECT_EQ(base, shuffled);
    }
  }
}

class OrderStatisticProperty : public AggregatorProperty {};

TEST_P(OrderStatisticProperty, TranslationEquivariant) {
  Rng rng = make_rng(36, Stream::kTrials);
  for (int trial = 0; trial < 50; ++trial) {
    GradientBatch b = random_batch(rng, 11, 4);
    const ParamVector c = sample_gaussian(rng, 4, 5.0);
    const ParamVector base = aggregate(spec(), b).value;
    for (ParamVector& v : b.vectors) v += c;
    EXPECT_LT((aggregate(spec(), b).value - (base + c)).norm(), 1e-12);
  }
}

TEST_P(OrderStatisticProperty, Containment) {
  Rng rng = make_rng(37, Stream::kTrials);
  for (int trial = 0; trial < 100; ++trial) {
    const GradientBatch b = random_batch(rng, 3 + trial % 10, 3);
    const ParamVector out = aggregate(spec(), b).value;
    for (Eigen::Index k = 0; k < 3; ++k) {
      double lo = b.vectors[0][k], hi = lo;
      for (const ParamVector& v : b.vectors) {
        lo = std::min(lo, v[k]);
        hi = std::max(hi, v[k]);
      }
      EXPECT_GE(out[k], lo);
      EXPECT_LE(out[k], hi);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, AggregatorProperty,
                         ::testing::Values(AggregatorKind::kMedian,
                                           AggregatorKind::kTrimmedMean,
                                           AggregatorKind::kIterativeFilter));
INSTANTIATE_TEST_SUITE_P(CoordinateWise, OrderStatisticProperty,
                         ::testing::Values(AggregatorKind::kMedian,
                                           AggregatorKind::kTrimmedMean));

TEST(CoordinateMedian, RobustnessSandwich) {
  Rng rng = make_rng(38, Stream::kTrials);
  std::uniform_real_distribution<double> wild(-1e3, 1e3);
  for (std::size_t m = 3; m <= 9; ++m) {
    for (std::size_t bad = 0; 2 * bad < m; ++bad) {
      const double alpha = static_cast<double>(bad) / static_cast<double>(m);
      for (int trial = 0; trial < 30; ++trial) {
        GradientBatch honest = random_batch(rng, m, 1);
        std::vector<double> sorted;
        for (const ParamVector& v : honest.vectors) sorted.push_back(v[0]);
        std::sort(sorted.begin(), sorted.end());
        GradientBatch corrupted = honest;
        for (std::size_t i = 0; i < bad; ++i) corrupted.vectors[i][0] = wild(rng);
        const double med = coordinate_median(corrupted)[0];
        const double md = static_cast<double>(m);
        const auto lo_rank = static_cast<std::size_t>(
            std::max(1.0, std::floor((0.5 - alpha) * md)));
        // Even m averages the two central values, which reaches one rank higher.
        const double even_step = (m % 2 == 0) ? 1.0 : 0.0;
        const auto hi_rank = static_cast<std::size_t>(
            std::min(md, std::ceil((0.5 + alpha) * md) + even_step));
        EXPECT_GE(med, sorted[lo_rank - 1]) << "m=" << m << " bad=" << bad;
        EXPECT_LE(med, sorted[hi_rank - 1]) << "m=" << m << " bad=" << bad;
      }
    }
  }
}

TEST(IterativeFilter, ExactOnUncorruptedBatchesBelowThreshold) {
  Rng rng = make_rng(39, Stream::kTrials);
  for (int trial = 0; trial < 50; ++trial) {
    const GradientBatch b = random_batch(rng, 20, 5, 0.5);
    const FilterOutcome out = iterative_filter(b, 0.2, 1.0);
    ASSERT_EQ(out.rounds, 1);
    EXPECT_LT((out.estimate - arithmetic_mean(b)).norm(), 1e-14);
  }
}

}  // namespace
}  // namespace byzpgd
