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

#ifndef BYZPGD_CONFIG_H_
#define BYZPGD_CONFIG_H_

#include <filesystem>

#include <json.hpp>

#include "byzpgd/harness.h"

namespace byzpgd {

inline constexpr int kSchemaVersion = 1;

/// Parses an experiment config. Unknown keys are rejected. Throws ConfigError
/// on malformed or out-of-range input.
ExperimentSpec spec_from_json(const nlohmann::json& doc);
ExperimentSpec load_spec(const std::filesystem::path& path);

nlohmann::json to_json(const OptimizerConfig& cfg);
nlohmann::json to_json(const ProblemMeta& meta);
nlohmann::json to_json(const ExperimentReport& report);

}  // namespace byzpgd

#endif  // BYZPGD_CONFIG_H_
