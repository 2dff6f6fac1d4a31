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

#ifndef BYZPGD_LINALG_H_
#define BYZPGD_LINALG_H_

#include <cstdint>

#include "byzpgd/types.h"

namespace byzpgd {

struct PowerIterationOptions {
  int max_iterations = 1000;
  double tolerance = 1e-6;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct EigenPair {
  double value = 0.0;
  ParamVector vector;
  int iterations = 0;
};

/// Top eigenpair of a symmetric positive semidefinite matrix by power
/// iteration.
///
/// Two deterministic starts are run: the basis vector of the largest diagonal
/// entry and a seeded Gaussian vector. The larger Rayleigh quotient wins; on a
/// tie (relative difference below the tolerance) the basis start is kept, so
/// an isotropic matrix reports a coordinate axis. The returned vector has
/// unit norm and its first nonzero entry is positive. A zero matrix yields
/// value 0 and the first basis vector.
EigenPair top_eigenpair(const Matrix& psd,
                        const PowerIterationOptions& options = {});

/// Smallest eigenvalue of a symmetric matrix. Dense self-adjoint solver for
/// n <= kDenseEigenLimit, power iteration on (s I - A) above that.
double min_eigenvalue(const Matrix& symmetric);

inline constexpr Eigen::Index kDenseEigenLimit = 1000;

// Sign convention shared by every eigenvector we return.
void canonicalize_sign(ParamVector& v);

}  // namespace byzpgd

#endif  // BYZPGD_LINALG_H_
