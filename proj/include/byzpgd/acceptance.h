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

#ifndef BYZPGD_ACCEPTANCE_H_
#define BYZPGD_ACCEPTANCE_H_

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace byzpgd::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;        // one line: measured values vs thresholds
  nlohmann::json measurements;
  double seconds = 0.0;
  double time_limit_seconds = 0.0;
};

CriterionResult descent_lemma();
CriterionResult stuck_probability();
CriterionResult escape_exact();
CriterionResult escape_byzantine();
CriterionResult scaling_laws();
CriterionResult filter_recovery();
/// Re-runs suites with identical seeds and compares report bytes.
CriterionResult determinism();

/// Names accepted by `byzpgd accept --suite`.
std::vector<std::string> suite_names();

/// Runs a suite by name; throws std::invalid_argument for unknown names.
CriterionResult run_suite(std::string_view name);

/// "[PASS] 2 stuck-probability: ..." line.
std::string format_line(const CriterionResult& result);

}  // namespace byzpgd::acceptance

#endif  // BYZPGD_ACCEPTANCE_H_
