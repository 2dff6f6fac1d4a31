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

#include "byzpgd/types.h"

#include <string>

namespace byzpgd {

std::string_view to_string(Phase phase) {
  return phase == Phase::kDescent ? "descent" : "escape";
}

bool all_finite(const ParamVector& v) { return v.allFinite(); }

void require_finite(const ParamVector& v, std::string_view what) {
  if (!v.allFinite()) {
    throw OracleError(std::string(what) + " has non-finite entries");
  }
}

void require_dim(const ParamVector& v, Eigen::Index dim, std::string_view what) {
  if (v.size() != dim) {
    throw ConfigError(std::string(what) + ": dimension " +
                      std::to_string(v.size()) + " != expected " +
                      std::to_string(dim));
  }
}

}  // namespace byzpgd
