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

#ifndef BYZPGD_IO_H_
#define BYZPGD_IO_H_

#include <filesystem>
#include <string>

#include <json.hpp>

#include "byzpgd/optimizer.h"

namespace byzpgd {

/// "%.17g" formatting; non-finite values become null in JSON and an empty
/// field in CSV.
std::string format_double(double x);

/// JSON text with every floating-point number printed to 17 significant
/// digits. Object keys keep nlohmann's sorted order, so equal documents give
/// equal bytes.
std::string dump_json(const nlohmann::json& doc, int indent = 2);

/// Trace CSV with the stable columns
/// iteration,phase,grad_norm_hat,grad_norm_true,dist_from_round_start,escaped
std::string trace_csv(const RunTrace& trace);

inline constexpr const char* kTraceCsvHeader =
    "iteration,phase,grad_norm_hat,grad_norm_true,dist_from_round_start,escaped";

/// Writes via a temporary file in the same directory and a rename.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

}  // namespace byzpgd

#endif  // BYZPGD_IO_H_
