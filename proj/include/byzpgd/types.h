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

#ifndef BYZPGD_TYPES_H_
#define BYZPGD_TYPES_H_

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace byzpgd {

/// Dense parameter vector. Every iterate and every gradient message is one.
using ParamVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Invalid experiment or problem configuration (dimension mismatch, bad
/// ranges, non-integral Byzantine count).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was called outside its precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The gradient source produced something unusable (non-finite entries).
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Phase { kDescent, kEscape };

std::string_view to_string(Phase phase);

bool all_finite(const ParamVector& v);

// Throws OracleError naming `what` if any entry is NaN or infinite.
void require_finite(const ParamVector& v, std::string_view what);

// Throws ConfigError if v.size() != dim.
void require_dim(const ParamVector& v, Eigen::Index dim, std::string_view what);

}  // namespace byzpgd

#endif  // BYZPGD_TYPES_H_
