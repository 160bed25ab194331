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

#ifndef DCBO_CLI_COMMANDS_HPP
#define DCBO_CLI_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "dcbo/bench.hpp"

namespace dcbo::cli {

struct CommandOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  int jobs = 1;
};

enum ExitCode : int { kOk = 0, kOtherError = 1, kConfigError = 2, kEvaluationError = 3, kIoError = 4 };

/// Parses the config file and applies the --seed / --output overrides.
ExperimentConfig loadConfig(const CommandOptions& opts);

/// runExperiment + summary.csv and traces.csv in the output directory.
int runCommand(const CommandOptions& opts, std::ostream& out);
/// Prints the total-variation distance; writes vmf_histogram.csv when an
/// output directory is given. Returns kOtherError when the check fails.
int verifyVmfCommand(const CommandOptions& opts, std::ostream& out);
/// Paired analytic/oracle DCBO runs, emitted like `run`.
int oracleCompareCommand(const CommandOptions& opts, std::ostream& out);
int gridMinCommand(const CommandOptions& opts, std::ostream& out);

/// Runs `body`, printing errors to `err` and mapping them to exit codes.
template <class F>
int guarded(F&& body, std::ostream& err);

}  // namespace dcbo::cli

#include "dcbo/errors.hpp"

namespace dcbo::cli {

template <class F>
int guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const EvaluationError& e) {
    err << "evaluation error: " << e.what() << '\n';
    return kEvaluationError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kOtherError;
  }
}

}  // namespace dcbo::cli

#endif  // DCBO_CLI_COMMANDS_HPP
