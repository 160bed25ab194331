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

#ifndef DCBO_ERRORS_HPP
#define DCBO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dcbo {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Cholesky factorization failed even after the jitter ladder.
class IllConditionedKernel : public Error {
 public:
  using Error::Error;
};

/// Two points too close to define a direction between them.
class DegenerateDirection : public Error {
 public:
  using Error::Error;
};

/// Mean resultant length reached 1; concentration is unbounded.
class SaturatedConcentration : public Error {
 public:
  using Error::Error;
};

/// Every candidate scored -inf under the combined acquisition.
class ExhaustedCandidates : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Failure while evaluating the black-box objective.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dcbo

#endif  // DCBO_ERRORS_HPP
