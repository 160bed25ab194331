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

#ifndef DCBO_BENCH_HPP
#define DCBO_BENCH_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dcbo/optimizer.hpp"

namespace dcbo {

// ---------------------------------------------------------------------------
// Synthetic problem

/// cos(2x) cos(y) + sin(x); range [-2, 2], minimum -2 at (-pi/2, 0).
double syntheticObjective(double x, double y);
/// cos(x) cos(y) - sin(x) sin(y); feasible where <= kSyntheticThreshold.
double syntheticConstraint(double x, double y);
inline constexpr double kSyntheticThreshold = 0.5;

/// [-5, 0] x [-5, 5]
Box syntheticBox();
Problem makeSyntheticProblem(bool constrained, const Box& box = syntheticBox());

// ---------------------------------------------------------------------------
// Metric

struct GridResult {
  Vector point;
  double value = 0.0;
  /// Largest objective value over the whole grid, feasible or not.
  double maxValue = 0.0;
};

/// Exhaustive search over a uniform grid with `resolution` nodes per axis,
/// box corners included. Throws InvalidArgument if no node is feasible.
GridResult gridMinimum(const BlackBox& evaluate, std::optional<double> constraintThreshold, const Box& box,
                       int resolution);

struct MetricConfig {
  /// Known optimum; when absent the gap falls back to |f(x~)|.
  std::optional<double> trueMinimum;
  double penalty = 3.0;
};

/// Rejects a penalty that does not exceed the objective's maximum.
void validateMetric(const MetricConfig& metric, double maxObjective);

double utilityGap(double recommendationValue, bool feasible, const MetricConfig& metric);

// ---------------------------------------------------------------------------
// Experiments

enum class ProblemKind { SyntheticUnconstrained, SyntheticConstrained, External };

std::string_view toString(ProblemKind k);

struct ExternalSettings {
  std::string command;
  int timeoutMs = 10000;
  std::optional<double> constraintThreshold;

  bool operator==(const ExternalSettings&) const = default;
};

struct MetricSettings {
  double penalty = 3.0;
  std::optional<double> trueMinimum;
  int gridResolution = 1000;

  bool operator==(const MetricSettings&) const = default;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::SyntheticUnconstrained;
  Box box = syntheticBox();
  int budget = 50;
  int repeats = 50;
  std::uint64_t seed = 0;
  std::vector<Policy> policies;
  LoopOptions loop;
  MetricSettings metric;
  std::optional<ExternalSettings> external;
  std::string output;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Builds a fresh problem per run; external problems spawn one child each.
using ProblemFactory = std::function<Problem()>;

struct GapSeries {
  std::string policy;
  std::vector<double> median;  ///< lower median for even run counts
  std::vector<double> mean;
  std::vector<double> sd;      ///< sample standard deviation, 0 for one run
  int runs = 0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  Trace trace;
  std::vector<double> gaps;
};

struct ExperimentResult {
  MetricConfig metric;
  std::map<std::string, GapSeries> series;
  std::map<std::string, std::vector<RunRecord>> runs;
};

/// Seed of run `index` under `masterSeed`; shared by every policy so runs
/// are paired.
std::uint64_t runSeed(std::uint64_t masterSeed, int index);

/// Per-iteration gap of the running recommendation.
std::vector<double> gapSeriesOf(const Trace& trace, const MetricConfig& metric);

GapSeries aggregate(const std::string& policy, const std::vector<std::vector<double>>& gaps);

/// Resolves min f and validates the penalty (grid oracle for synthetic
/// problems).
MetricConfig resolveMetric(const ExperimentConfig& config);

ExperimentResult runExperiment(const ExperimentConfig& config, const ProblemFactory& factory, int jobs = 1);
/// Synthetic problems only.
ExperimentResult runExperiment(const ExperimentConfig& config, int jobs = 1);

ProblemFactory syntheticFactory(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Reproduction studies

/// Directional-posterior check: prior VMF at angle 1 rad with kappa 1,
/// suggestion points from N((1,1), diag(1.5,1.5)) seen from the origin.
struct VmfPosteriorCheck {
  VmfState prior;
  SuggestionSummary suggestion;
  VmfState posterior;
  std::vector<double> oracleHistogram;
  std::vector<double> analyticHistogram;
  double acceptanceRate = 0.0;
  double totalVariation = 0.0;
  bool pass = false;
};

inline constexpr double kVmfCheckThreshold = 0.15;

VmfPosteriorCheck checkVmfPosterior(std::uint64_t seed, std::size_t suggestionCount = 10000,
                                    std::size_t pairCount = 100000);

/// Runs the config's DCBO policy (or the default one) twice per seed: with
/// the analytic update and with the rejection oracle as direction model.
ExperimentResult compareWithOracle(const ExperimentConfig& config, const ProblemFactory& factory, int jobs = 1);

/// The analytic/oracle policy pair used by compareWithOracle.
std::pair<Policy, Policy> oraclePolicyPair(const ExperimentConfig& config);

}  // namespace dcbo

#endif  // DCBO_BENCH_HPP
