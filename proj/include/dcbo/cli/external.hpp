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

#ifndef DCBO_CLI_EXTERNAL_HPP
#define DCBO_CLI_EXTERNAL_HPP

#include <sys/types.h>

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "dcbo/bench.hpp"
#include "dcbo/errors.hpp"

namespace dcbo::cli {

enum class ExternalErrorKind { Spawn, Timeout, MalformedReply, ChildError, ChildExited };

std::string_view toString(ExternalErrorKind k);

class ExternalError : public EvaluationError {
 public:
  ExternalError(ExternalErrorKind kind, const std::string& what)
      : EvaluationError(std::string(toString(kind)) + ": " + what), kind_(kind) {}
  ExternalErrorKind kind() const noexcept { return kind_; }

 private:
  ExternalErrorKind kind_;
};

/// Persistent child process speaking the line protocol
///   request  {"x":[...]}
///   reply    {"f":<real>, "c":[<reals>], "error":<string>}
/// The command runs under /bin/sh -c. A timeout kills the child; later
/// calls then fail with ChildExited.
class ExternalObjective {
 public:
  ExternalObjective(const std::string& command, std::chrono::milliseconds timeout);
  ~ExternalObjective();
  ExternalObjective(const ExternalObjective&) = delete;
  ExternalObjective& operator=(const ExternalObjective&) = delete;

  /// Multiple constraint values are reduced to their maximum.
  Observation operator()(const Vector& x);

  pid_t pid() const noexcept { return pid_; }
  bool alive() const noexcept { return pid_ > 0; }

 private:
  void terminate();
  std::string readLine();

  pid_t pid_ = -1;
  int toChild_ = -1;
  int fromChild_ = -1;
  std::chrono::milliseconds timeout_;
  std::string buffer_;
};

/// Parses one reply line. Throws ExternalError (MalformedReply or ChildError).
Observation parseReply(std::string_view line);

BlackBox makeExternalEvaluator(const std::string& command, std::chrono::milliseconds timeout);

/// Synthetic factory, or one child per run for external problems.
ProblemFactory makeProblemFactory(const ExperimentConfig& config);

}  // namespace dcbo::cli

#endif  // DCBO_CLI_EXTERNAL_HPP
