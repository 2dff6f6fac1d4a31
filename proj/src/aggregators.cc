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

#include "byzpgd/aggregators.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "byzpgd/linalg.h"

namespace byzpgd {

Eigen::Index GradientBatch::dim() const {
  return vectors.empty() ? 0 : vectors.front().size();
}

void GradientBatch::validate() const {
  if (vectors.empty()) throw UsageError("aggregator: empty gradient batch");
  const Eigen::Index d = vectors.front().size();
  for (const ParamVector& v : vectors) {
    if (v.size() != d) throw ConfigError("aggregator: mixed vector dimensions");
  }
}

std::string_view to_string(AggregatorKind kind) {
  switch (kind) {
    case AggregatorKind::kMedian: return "median";
    case AggregatorKind::kTrimmedMean: return "trimmed_mean";
    case AggregatorKind::kIterativeFilter: return "iterative_filter";
  }
  return "unknown";
}

AggregatorKind aggregator_kind_from_string(std::string_view name) {
  if (name == "median") return AggregatorKind::kMedian;
  if (name == "trimmed_mean") return AggregatorKind::kTrimmedMean;
  if (name == "iterative_filter") return AggregatorKind::kIterativeFilter;
  throw ConfigError("unknown aggregator '" + std::string(name) +
                    "' (expected median, trimmed_mean or iterative_filter)");
}

std::size_t trim_count(double beta, std::size_t m) {
  const double k = std::ceil(beta * static_cast<double>(m) - 1e-9);
  return k <= 0.0 ? 0 : static_cast<std::size_t>(k);
}

void AggregatorSpec::validate(std::size_t m) const {
  if (!(beta >= 0.0 && beta < 0.5)) {
    throw ConfigError("aggregator: beta must lie in [0, 1/2)");
  }
  if (kind == AggregatorKind::kIterativeFilter) {
    if (!(alpha >= 0.0 && alpha <= 0.25)) {
      throw ConfigError("iterative_filter: alpha must lie in [0, 1/4]");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw ConfigError("iterative_filter: sigma must be > 0");
    }
    if (m > 0 && m < 4) throw ConfigError("iterative_filter: requires m >= 4");
  }
  if (kind == AggregatorKind::kTrimmedMean && m > 0 &&
      2 * trim_count(beta, m) >= m) {
    throw ConfigError("trimmed_mean: 2 ceil(beta m) must be < m");
  }
}

ParamVector coordinate_median(const GradientBatch& batch) {
  batch.validate();
  const std::size_t m = batch.size();
  const Eigen::Index d = batch.dim();
  ParamVector out(d);
  std::vector<double> col(m);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < m; ++i) col[i] = batch.vectors[i][k];
    const std::size_t mid = m / 2;
    std::nth_element(col.begin(), col.begin() + mid, col.end());
    const double upper = col[mid];
    if (m % 2 == 1) {
      out[k] = upper;
    } else {
      const double lower = *std::max_element(col.begin(), col.begin() + mid);
      out[k] = 0.5 * (lower + upper);
    }
  }
  return out;
}

ParamVector trimmed_mean(const GradientBatch& batch, double beta) {
  batch.validate();
  if (!(beta >= 0.0 && beta < 0.5)) {
    throw UsageError("trimmed_mean: beta must lie in [0, 1/2)");
  }
  const std::size_t m = batch.size();
  const std::size_t k = trim_count(beta, m);
  if (2 * k >= m) {
    throw UsageError("trimmed_mean: beta too large, no survivors");
  }
  const Eigen::Index d = batch.dim();
  ParamVector out(d);
  std::vector<double> col(m);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < m; ++i) col[i] = batch.vectors[i][j];
    std::sort(col.begin(), col.end());
    double sum = 0.0;
    for (std::size_t i = k; i < m - k; ++i) sum += col[i];
    out[j] = sum / static_cast<double>(m - 2 * k);
  }
  return out;
}

PrincipalDirection top_principal_direction(std::span<const ParamVector> centered,
                                           std::span<const double> weights) {
  if (centered.empty()) throw UsageError("top_principal_direction: no vectors");
  if (weights.size() != centered.size()) {
    throw UsageError("top_principal_direction: weight count mismatch");
  }
  const Eigen::Index d = centered.front().size();
  Matrix y(static_cast<Eigen::Index>(centered.size()), d);
  ParamVector c(y.rows());
  for (std::size_t i = 0; i < centered.size(); ++i) {
    if (centered[i].size() != d) {
      throw ConfigError("top_principal_direction: mixed dimensions");
    }
    if (!(weights[i] >= 0.0)) {
      throw UsageError("top_principal_direction: negative weight");
    }
    y.row(static_cast<Eigen::Index>(i)) = centered[i].transpose();
    c[static_cast<Eigen::Index>(i)] = weights[i];
  }
  const Matrix second = y.transpose() * c.asDiagonal() * y;
  EigenPair pair = top_eigenpair(second);
  return {pair.value, std::move(pair.vector)};
}

FilterOutcome iterative_filter(const GradientBatch& batch, double alpha,
                               double sigma) {
  batch.validate();
  const std::size_t m = batch.size();
  if (m < 4) throw UsageError("iterative_filter: requires m >= 4");
  if (!(alpha >= 0.0 && alpha <= 0.25)) {
    throw UsageError("iterative_filter: alpha must lie in [0, 1/4]");
  }
  if (!(sigma > 0.0)) throw UsageError("iterative_filter: sigma must be > 0");

  const double threshold = 8.0 * static_cast<double>(m) * sigma * sigma;
  const double min_active = (1.0 - 2.0 * alpha) * static_cast<double>(m);
  std::vector<std::size_t> active(m);
  for (std::size_t i = 0; i < m; ++i) active[i] = i;
  std::vector<double> c(m, 1.0);

  auto active_mean = [&] {
    ParamVector mean = ParamVector::Zero(batch.dim());
    for (std::size_t i : active) mean += batch.vectors[i];
    return ParamVector(mean / static_cast<double>(active.size()));
  };

  FilterOutcome out;
  while (true) {
    ++out.rounds;
    const ParamVector mean = active_mean();
    std::vector<ParamVector> y;
    std::vector<double> w;
    y.reserve(active.size());
    w.reserve(active.size());
    for (std::size_t i : active) {
      y.push_back(batch.vectors[i] - mean);
      w.push_back(c[i]);
    }
    const PrincipalDirection top = top_principal_direction(y, w);

    std::vector<double> tau(active.size());
    double score = 0.0;
    double tau_max = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const double proj = top.direction.dot(y[a]);
      tau[a] = proj * proj;
      score += w[a] * tau[a];
      tau_max = std::max(tau_max, tau[a]);
    }
    if (score <= threshold || tau_max == 0.0) {
      out.estimate = mean;
      out.active_count = active.size();
      return out;
    }

    std::vector<std::size_t> kept;
    kept.reserve(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t i = active[a];
      c[i] *= 1.0 - tau[a] / tau_max;
      if (c[i] > 0.5) kept.push_back(i);
    }
    active = std::move(kept);
    if (static_cast<double>(active.size()) < min_active || active.empty()) {
      out.diverged = true;
      out.active_count = active.size();
      out.estimate = active.empty() ? ParamVector(coordinate_median(batch))
                                    : active_mean();
      return out;
    }
  }
}

AggregateResult aggregate(const AggregatorSpec& spec, const GradientBatch& batch) {
  switch (spec.kind) {
    case AggregatorKind::kMedian:
      return {coordinate_median(batch), false};
    case AggregatorKind::kTrimmedMean:
      return {trimmed_mean(batch, spec.beta), false};
    case AggregatorKind::kIterativeFilter: {
      FilterOutcome f = iterative_filter(batch, spec.alpha, spec.sigma);
      if (f.diverged) return {coordinate_median(batch), true};
      return {std::move(f.estimate), false};
    }
  }
  throw UsageError("aggregate: unknown aggregator kind");
}

double estimate_sigma(std::span<const ParamVector> points) {
  if (points.size() < 2) return 0.0;
  const Eigen::Index d = points.front().size();
  ParamVector mean = ParamVector::Zero(d);
  for (const ParamVector& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Matrix cov = Matrix::Zero(d, d);
  for (const ParamVector& p : points) {
    const ParamVector y = p - mean;
    cov.noalias() += y * y.transpose();
  }
  cov /= static_cast<double>(points.size() - 1);
  return std::sqrt(std::max(0.0, top_eigenpair(cov).value));
}

}  // namespace byzpgd
