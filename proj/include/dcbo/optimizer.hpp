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

#ifndef DCBO_OPTIMIZER_HPP
#define DCBO_OPTIMIZER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcbo/acquisition.hpp"
#include "dcbo/dirstat.hpp"
#include "dcbo/surrogate.hpp"

namespace dcbo {

/// One black-box response. `constraint` is read only when the problem is
/// constrained; the point is feasible iff constraint <= threshold.
struct Observation {
  double value = 0.0;
  std::optional<double> constraint;
};

using BlackBox = std::function<Observation(const Vector&)>;

struct Problem {
  Box box;
  BlackBox evaluate;
  std::optional<double> constraintThreshold;

  bool constrained() const noexcept { return constraintThreshold.has_value(); }
};

/// Linear budget schedule rho(t) = t / T.
double rho(int t, int totalBudget);

struct Schedule {
  int totalBudget = 50;

  explicit Schedule(int T);
  double rho(int t) const { return dcbo::rho(t, totalBudget); }
};

enum class PolicyKind { EI, PoI, UCB, CEI, DCBO };
enum class VmfUpdater { General, Dim2 };
enum class DirectionModel { Analytic, RejectionOracle };

struct DcboParams {
  VmfUpdater updater = VmfUpdater::General;
  int minimizerSamples = 256;
  double kappaInit = 1.0;
  DirectionModel directionModel = DirectionModel::Analytic;
  int oraclePairs = 1000;

  bool operator==(const DcboParams&) const = default;
};

struct Policy {
  PolicyKind kind = PolicyKind::EI;
  UcbParams ucb;
  DcboParams dcbo;

  static Policy ei() { return {PolicyKind::EI, {}, {}}; }
  static Policy poi() { return {PolicyKind::PoI, {}, {}}; }
  static Policy ucbWith(double kappa) { return {PolicyKind::UCB, {kappa}, {}}; }
  static Policy cei() { return {PolicyKind::CEI, {}, {}}; }
  static Policy dcboWith(DcboParams p = {}) { return {PolicyKind::DCBO, {}, p}; }

  /// Stable label used as the result key, e.g. "EI", "UCB-0.5", "DCBO-oracle".
  std::string id() const;
  void validate() const;
  bool operator==(const Policy& o) const {
    return kind == o.kind && ucb.kappa == o.ucb.kappa && dcbo == o.dcbo;
  }
};

std::string_view toString(PolicyKind k);
std::string_view toString(VmfUpdater u);
std::string_view toString(DirectionModel m);

struct LoopOptions {
  int candidateCount = 2048;
  /// Candidates on which posterior minimizers are sampled (a fresh uniform
  /// draw, independent of the proposal candidates).
  int thompsonCandidates = 512;
  KernelParams kernel{1.0, 1e-8, KernelVariant::Squared};
  std::vector<double> lengthscales = logSpaced(1e-2, 1e2, 16);
  /// Forces rho for every DCBO step; tests only.
  std::optional<double> rhoOverride;

  void validate() const;
  bool operator==(const LoopOptions&) const = default;
};

/// GP fitted on standardized targets; predictions are in original units.
struct Surrogate {
  GpModel model;
  double shift = 0.0;
  double scale = 1.0;

  static Surrogate fit(const std::vector<Vector>& points, std::span<const double> targets, const LoopOptions& options);
  void predict(std::span<const Vector> xs, Vector& mean, Vector& sd) const;
};

struct OptimizerState {
  Box box;
  Schedule schedule;
  LoopOptions options;
  std::optional<double> constraintThreshold;
  std::uint64_t seed = 0;

  Dataset data;
  std::optional<Surrogate> gp;
  std::optional<Surrogate> constraintGp;
  std::optional<VmfState> vmf;
  std::optional<HistogramDensity> oracleDensity;
  Vector lastPoint;
  /// Objective evaluations made so far.
  int iteration = 0;

  bool feasible(std::size_t i) const;
  /// Index of the best feasible observation, lowest index on ties.
  std::optional<std::size_t> incumbentIndex() const;
};

struct TraceRecord {
  int iteration = 0;  ///< 1-based evaluation count
  Vector query;
  double value = 0.0;
  std::optional<double> constraint;
  bool feasible = true;
  std::optional<Vector> incumbentPoint;
  std::optional<double> incumbentValue;
};

using Trace = std::vector<TraceRecord>;

/// `count` uniform points in the box.
std::vector<Vector> uniformCandidates(const Box& box, int count, std::uint64_t seed);

/// Draws S joint posterior samples over `candidates` and returns the argmin
/// location of each.
std::vector<Vector> thompsonMinimizerSamples(const GpModel& gp, std::span<const Vector> candidates, int S,
                                             std::uint64_t seed);

/// rho log H + (1 - rho) log EI with the exponent-identity edge cases:
/// rho = 1 ignores logEI, rho = 0 ignores logDirectional.
double combineLogScores(double logDirectional, double logEI, double rhoValue);

/// Log of H(x)^rho EI(x)^(1 - rho) for direction unit(x - basePoint).
/// Points within 1e-12 of basePoint score -inf.
double combinedLogAcquisition(const Vector& x, double logEI, const VmfState& vmf, const Vector& basePoint,
                              double rhoValue);

/// Index of the candidate maximizing the policy's score.
std::size_t proposeIndex(const OptimizerState& state, const Policy& policy, std::span<const Vector> candidates);
Vector proposeNext(const OptimizerState& state, const Policy& policy, std::span<const Vector> candidates);

/// Evaluates two uniform random points and returns the fitted state; their
/// records are appended to `trace` when non-null.
OptimizerState initialize(const Problem& problem, const Policy& policy, const Schedule& schedule,
                          std::uint64_t seed, const LoopOptions& options, Trace* trace = nullptr);

struct StepResult {
  OptimizerState state;
  TraceRecord record;
};

/// One proposal-evaluation-refit cycle. `state` is never modified.
StepResult step(const OptimizerState& state, const Policy& policy, const BlackBox& blackBox);

/// Runs exactly schedule.totalBudget evaluations.
Trace runLoop(const Problem& problem, const Policy& policy, const Schedule& schedule, std::uint64_t seed,
              const LoopOptions& options = {});

struct Recommendation {
  std::optional<Vector> point;
  double value = 0.0;
  bool feasible = false;
};

Recommendation recommend(const Trace& trace);

}  // namespace dcbo

#endif  // DCBO_OPTIMIZER_HPP
