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

#ifndef DCBO_CLI_CSV_HPP
#define DCBO_CLI_CSV_HPP

#include <filesystem>
#include <string>

#include "dcbo/bench.hpp"

namespace dcbo::cli {

inline constexpr const char* kTraceHeader = "policy,run,iter,best_value,feasible,utility_gap";
inline constexpr const char* kSummaryHeader = "policy,iter,median_gap,mean_gap,sd_gap,runs";
inline constexpr const char* kTraceFile = "traces.csv";
inline constexpr const char* kSummaryFile = "summary.csv";

/// "%.9g"; non-finite values print as nan / inf / -inf.
std::string formatReal(double v);

/// Rows ordered by policy, then iteration.
std::string summaryCsv(const ExperimentResult& result);
/// Rows ordered by policy, run, iteration. best_value is empty before the
/// first feasible point.
std::string tracesCsv(const ExperimentResult& result);

/// Writes summary.csv (and traces.csv when `traces`) into `dir`, creating it
/// if needed. Throws IoError.
void emitCsv(const ExperimentResult& result, bool traces, const std::filesystem::path& dir);

void writeFile(const std::filesystem::path& path, const std::string& contents);

}  // namespace dcbo::cli

#endif  // DCBO_CLI_CSV_HPP
