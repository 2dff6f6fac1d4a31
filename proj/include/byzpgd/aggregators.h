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

#ifndef BYZPGD_AGGREGATORS_H_
#define BYZPGD_AGGREGATORS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "byzpgd/types.h"

namespace byzpgd {

/// The m messages of one parallel iteration.
struct GradientBatch {
  std::vector<ParamVector> vectors;
  std::int64_t round_index = 0;

  std::size_t size() const { return vectors.size(); }
  Eigen::Index dim() const;
  // Throws UsageError on an empty batch, ConfigError on mixed dimensions.
  void validate() const;
};

enum class AggregatorKind { kMedian, kTrimmedMean, kIterativeFilter };

std::string_view to_string(AggregatorKind kind);
AggregatorKind aggregator_kind_from_string(std::string_view name);

struct AggregatorSpec {
  AggregatorKind kind = AggregatorKind::kMedian;
  double beta = 0.0;   // trimmed mean
  double alpha = 0.0;  // iterative filter
  double sigma = 1.0;  // iterative filter

  // Checks ranges, and for m > 0 that the trimmed mean keeps a survivor and
  // the filter has at least four points.
  void validate(std::size_t m = 0) const;
};

ParamVector coordinate_median(const GradientBatch& batch);

/// Coordinate-wise trimmed mean removing ceil(beta m) values from each tail
/// and averaging the m - 2 ceil(beta m) survivors.
ParamVector trimmed_mean(const GradientBatch& batch, double beta);

/// Number of values trimmed from each tail.
std::size_t trim_count(double beta, std::size_t m);

struct FilterOutcome {
  ParamVector estimate;
  bool diverged = false;  // active set fell below (1 - 2 alpha) m
  int rounds = 0;
  std::size_t active_count = 0;
};

/// Iterative filtering with uniform centering weights over the active set.
///
/// Each round centers the active points on their mean, takes the top
/// eigenpair of sum_i c_i y_i y_i^T, and scores tau_i = <v, y_i>^2. While
/// sum_i c_i tau_i > 8 m sigma^2 the weights shrink by (1 - tau_i / tau_max)
/// and points with c_i <= 1/2 leave the active set. The threshold keeps the
/// original m throughout.
FilterOutcome iterative_filter(const GradientBatch& batch, double alpha,
                               double sigma);

struct PrincipalDirection {
  double eigenvalue = 0.0;
  ParamVector direction;
};

PrincipalDirection top_principal_direction(
    std::span<const ParamVector> centered, std::span<const double> weights);

struct AggregateResult {
  ParamVector value;
  // Iterative filter diverged and the coordinate median of the batch was
  // returned instead.
  bool fell_back = false;
};

AggregateResult aggregate(const AggregatorSpec& spec, const GradientBatch& batch);

/// sqrt of the top eigenvalue of the sample covariance of `points`.
double estimate_sigma(std::span<const ParamVector> points);

}  // namespace byzpgd

#endif  // BYZPGD_AGGREGATORS_H_
