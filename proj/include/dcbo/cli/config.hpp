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

#ifndef DCBO_CLI_CONFIG_HPP
#define DCBO_CLI_CONFIG_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "dcbo/bench.hpp"

namespace dcbo::cli {

/// Reads and validates a JSON experiment config. Missing keys take their
/// defaults; unknown keys are errors.
ExperimentConfig parseConfig(const std::filesystem::path& path);
ExperimentConfig parseConfigText(std::string_view text);

/// Serializes every field, so parseConfigText(emitConfig(c)) == c.
std::string emitConfig(const ExperimentConfig& config);

/// Checks the config invariants; throws ConfigError naming the field.
void validateConfig(const ExperimentConfig& config);

/// Policy list used when the config names none.
std::vector<Policy> defaultPolicies(ProblemKind problem, bool constrained);

ProblemKind problemKindFromString(std::string_view s);

}  // namespace dcbo::cli

#endif  // DCBO_CLI_CONFIG_HPP
