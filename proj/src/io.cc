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

#include "byzpgd/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace byzpgd {
namespace {

void write_value(std::ostringstream& out, const nlohmann::json& j, int indent,
                 int depth) {
  const auto newline = [&](int level) {
    if (indent < 0) return;
    out << '\n' << std::string(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',';
        first = false;
        newline(depth + 1);
        out << nlohmann::json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        write_value(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out << ',';
        first = false;
        newline(depth + 1);
        write_value(out, v, indent, depth + 1);
      }
      newline(depth);
      out << ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double x = j.get<double>();
      out << (std::isfinite(x) ? format_double(x) : "null");
      return;
    }
    default:
      out << j.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const nlohmann::json& doc, int indent) {
  std::ostringstream out;
  write_value(out, doc, indent, 0);
  if (indent >= 0) out << '\n';
  return out.str();
}

std::string trace_csv(const RunTrace& trace) {
  std::ostringstream out;
  out << kTraceCsvHeader << '\n';
  for (const TraceRecord& r : trace.records) {
    out << r.iteration << ',' << to_string(r.phase) << ','
        << format_double(r.grad_norm_hat) << ','
        << (r.grad_norm_true ? format_double(*r.grad_norm_true) : "") << ','
        << (r.dist_from_round_start ? format_double(*r.dist_from_round_start) : "")
        << ',' << (r.escaped ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << contents;
    f.flush();
    if (!f) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " +
                             path.string() + ": " + ec.message());
  }
}

}  // namespace byzpgd
