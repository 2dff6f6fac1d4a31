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

#ifndef BYZPGD_RNG_H_
#define BYZPGD_RNG_H_

#include <cstdint>
#include <random>

#include "byzpgd/types.h"

namespace byzpgd {

using Rng = std::mt19937_64;

/// Independent random substreams of one experiment seed. Each consumer draws
/// from its own stream so that changing, say, the adversary does not shift
/// the data or the perturbations.
enum class Stream : std::uint64_t {
  kData = 1,
  kAssignment = 2,
  kPerturbation = 3,
  kAdversary = 4,
  kInitialPoint = 5,
  kProbes = 6,
  kPowerIteration = 7,
  kTrials = 8,
};

// splitmix64 finalizer applied to (seed, stream, index).
std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                          std::uint64_t index = 0);

Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

ParamVector sample_gaussian(Rng& rng, Eigen::Index dim, double sigma = 1.0);

// Uniform on the solid ball: Gaussian direction scaled by radius * U^(1/d).
ParamVector sample_uniform_ball(Rng& rng, Eigen::Index dim, double radius);

}  // namespace byzpgd

#endif  // BYZPGD_RNG_H_
