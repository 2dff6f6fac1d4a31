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

#include "byzpgd/rng.h"

#include <cmath>

namespace byzpgd {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                          std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return splitmix64(h ^ index);
}

Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return Rng(derive_seed(seed, stream, index));
}

ParamVector sample_gaussian(Rng& rng, Eigen::Index dim, double sigma) {
  std::normal_distribution<double> normal(0.0, sigma);
  ParamVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

ParamVector sample_uniform_ball(Rng& rng, Eigen::Index dim, double radius) {
  ParamVector dir = sample_gaussian(rng, dim);
  double norm = dir.norm();
  while (norm == 0.0) {
    dir = sample_gaussian(rng, dim);
    norm = dir.norm();
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const double scale = radius * std::pow(u, 1.0 / static_cast<double>(dim));
  return dir * (scale / norm);
}

}  // namespace byzpgd
