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

#include "byzpgd/linalg.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "byzpgd/rng.h"

namespace byzpgd {
namespace {

struct Run {
  double value;
  ParamVector vector;
  int iterations;
};

Run power_iterate(const Matrix& a, ParamVector v, const PowerIterationOptions& opt) {
  v.normalize();
  double value = v.dot(a * v);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    ParamVector next = a * v;
    const double norm = next.norm();
    if (norm == 0.0) {
      return {0.0, v, it + 1};
    }
    next /= norm;
    const double next_value = next.dot(a * next);
    const double change = (next - v).norm();
    const double flipped = (next + v).norm();
    v = std::move(next);
    const bool settled = std::abs(next_value - value) <=
                         opt.tolerance * std::max(1.0, std::abs(next_value));
    value = next_value;
    if (settled && std::min(change, flipped) <= opt.tolerance) {
      ++it;
      break;
    }
  }
  return {value, v, it};
}

}  // namespace

void canonicalize_sign(ParamVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

EigenPair top_eigenpair(const Matrix& psd, const PowerIterationOptions& options) {
  const Eigen::Index n = psd.rows();
  if (n == 0 || psd.cols() != n) {
    throw UsageError("top_eigenpair: matrix must be square and non-empty");
  }
  EigenPair out;
  if (psd.isZero(0.0)) {
    out.vector = ParamVector::Unit(n, 0);
    return out;
  }

  Eigen::Index best = 0;
  psd.diagonal().maxCoeff(&best);
  Run basis = power_iterate(psd, ParamVector::Unit(n, best), options);

  Rng rng(options.seed);
  Run random = power_iterate(psd, sample_gaussian(rng, n), options);

  const double tol = options.tolerance * std::max(1.0, std::abs(basis.value));
  Run& winner = random.value > basis.value + tol ? random : basis;
  out.value = winner.value;
  out.vector = std::move(winner.vector);
  out.iterations = basis.iterations + random.iterations;
  canonicalize_sign(out.vector);
  return out;
}

double min_eigenvalue(const Matrix& symmetric) {
  const Eigen::Index n = symmetric.rows();
  if (n == 0 || symmetric.cols() != n) {
    throw UsageError("min_eigenvalue: matrix must be square and non-empty");
  }
  if (n <= kDenseEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric,
                                                 Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
  }
  // Gershgorin shift makes s I - A positive semidefinite.
  double shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    shift = std::max(shift, symmetric.row(i).cwiseAbs().sum());
  }
  Matrix shifted = -symmetric;
  shifted.diagonal().array() += shift;
  PowerIterationOptions opt;
  opt.max_iterations = 10000;
  opt.tolerance = 1e-10;
  return shift - top_eigenpair(shifted, opt).value;
}

}  // namespace byzpgd
