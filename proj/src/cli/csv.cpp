// Copyright 2026 The dcbo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dcbo/cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dcbo/errors.hpp"

namespace dcbo::cli {

std::string formatReal(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string summaryCsv(const ExperimentResult& result) {
  if (result.series.empty()) throw InvalidArgument("no results to emit");
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  for (const auto& [policy, s] : result.series) {
    for (std::size_t t = 0; t < s.median.size(); ++t) {
      out << policy << ',' << t + 1 << ',' << formatReal(s.median[t]) << ',' << formatReal(s.mean[t]) << ','
          << formatReal(s.sd[t]) << ',' << s.runs << '\n';
    }
  }
  return out.str();
}

std::string tracesCsv(const ExperimentResult& result) {
  if (result.runs.empty()) throw InvalidArgument("no results to emit");
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const auto& [policy, runs] : result.runs) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const RunRecord& run = runs[r];
      for (std::size_t t = 0; t < run.trace.size(); ++t) {
        const TraceRecord& rec = run.trace[t];
        out << policy << ',' << r << ',' << rec.iteration << ','
            << (rec.incumbentValue ? formatReal(*rec.incumbentValue) : std::string()) << ','
            << (rec.incumbentValue ? 1 : 0) << ',' << formatReal(run.gaps[t]) << '\n';
      }
    }
  }
  return out.str();
}

void writeFile(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

void emitCsv(const ExperimentResult& result, bool traces, const std::filesystem::path& dir) {
  const std::string summary = summaryCsv(result);
  const std::string traceText = traces ? tracesCsv(result) : std::string();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
  writeFile(dir / kSummaryFile, summary);
  if (traces) writeFile(dir / kTraceFile, traceText);
}

}  // namespace dcbo::cli
