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

#include "dcbo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "dcbo/errors.hpp"
#include "dcbo/rng.hpp"

namespace dcbo {

double syntheticObjective(double x, double y) { return std::cos(2.0 * x) * std::cos(y) + std::sin(x); }

double syntheticConstraint(double x, double y) { return std::cos(x) * std::cos(y) - std::sin(x) * std::sin(y); }

Box syntheticBox() {
  Vector lo(2), hi(2);
  lo << -5.0, -5.0;
  hi << 0.0, 5.0;
  return {lo, hi};
}

Problem makeSyntheticProblem(bool constrained, const Box& box) {
  if (box.dim() != 2) throw InvalidArgument("the synthetic problem is two-dimensional");
  Problem p{box, nullptr, std::nullopt};
  if (constrained) {
    p.constraintThreshold = kSyntheticThreshold;
    p.evaluate = [](const Vector& x) {
      return Observation{syntheticObjective(x[0], x[1]), syntheticConstraint(x[0], x[1])};
    };
  } else {
    p.evaluate = [](const Vector& x) { return Observation{syntheticObjective(x[0], x[1]), std::nullopt}; };
  }
  return p;
}

GridResult gridMinimum(const BlackBox& evaluate, std::optional<double> constraintThreshold, const Box& box,
                       int resolution) {
  if (resolution < 2) throw InvalidArgument("grid resolution must be >= 2");
  const auto d = box.dim();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vector x(d);
  GridResult out;
  bool found = false;
  bool any = false;
  out.maxValue = -std::numeric_limits<double>::infinity();
  while (true) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const int k = idx[static_cast<std::size_t>(i)];
      x[i] = k == resolution - 1 ? box.hi[i] : box.lo[i] + (box.hi[i] - box.lo[i]) * k / (resolution - 1);
    }
    const Observation obs = evaluate(x);
    any = true;
    out.maxValue = std::max(out.maxValue, obs.value);
    const bool feasible = !constraintThreshold || (obs.constraint && *obs.constraint <= *constraintThreshold);
    if (feasible && (!found || obs.value < out.value)) {
      out.point = x;
      out.value = obs.value;
      found = true;
    }
    // Odometer increment, last axis fastest.
    Eigen::Index i = d - 1;
    while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == resolution) {
      idx[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  if (!any || !found) throw InvalidArgument("no feasible grid point");
  return out;
}

void validateMetric(const MetricConfig& metric, double maxObjective) {
  if (!(metric.penalty > maxObjective)) {
    throw ConfigError("metric.penalty", "penalty " + std::to_string(metric.penalty) +
                                            " must exceed the objective maximum " + std::to_string(maxObjective));
  }
}

double utilityGap(double recommendationValue, bool feasible, const MetricConfig& metric) {
  const double base = metric.trueMinimum.value_or(0.0);
  return feasible ? std::abs(recommendationValue - base) : std::abs(metric.penalty - base);
}

std::string_view toString(ProblemKind k) {
  switch (k) {
    case ProblemKind::SyntheticUnconstrained:
      return "synthetic-unconstrained";
    case ProblemKind::SyntheticConstrained:
      return "synthetic-constrained";
    case ProblemKind::External:
      return "external";
  }
  return "unknown";
}

std::uint64_t runSeed(std::uint64_t masterSeed, int index) {
  return deriveSeed(masterSeed, {static_cast<std::uint64_t>(index)});
}

std::vector<double> gapSeriesOf(const Trace& trace, const MetricConfig& metric) {
  std::vector<double> gaps;
  gaps.reserve(trace.size());
  for (const auto& r : trace) {
    gaps.push_back(r.incumbentValue ? utilityGap(*r.incumbentValue, true, metric)
                                    : utilityGap(0.0, false, metric));
  }
  return gaps;
}

GapSeries aggregate(const std::string& policy, const std::vector<std::vector<double>>& gaps) {
  if (gaps.empty()) throw InvalidArgument("cannot aggregate zero runs");
  const std::size_t len = gaps.front().size();
  for (const auto& g : gaps) {
    if (g.size() != len) throw InvalidArgument("gap series differ in length");
  }
  GapSeries s;
  s.policy = policy;
  s.runs = static_cast<int>(gaps.size());
  const double n = static_cast<double>(gaps.size());
  std::vector<double> column(gaps.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t r = 0; r < gaps.size(); ++r) column[r] = gaps[r][t];
    const double mean = std::accumulate(column.begin(), column.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : column) ss += (v - mean) * (v - mean);
    std::sort(column.begin(), column.end());
    s.median.push_back(column[(column.size() - 1) / 2]);
    s.mean.push_back(mean);
    s.sd.push_back(gaps.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0);
  }
  return s;
}

MetricConfig resolveMetric(const ExperimentConfig& config) {
  MetricConfig metric{config.metric.trueMinimum, config.metric.penalty};
  if (config.problem == ProblemKind::External) return metric;
  const Problem p = makeSyntheticProblem(config.problem == ProblemKind::SyntheticConstrained, config.box);
  const GridResult grid = gridMinimum(p.evaluate, p.constraintThreshold, p.box, config.metric.gridResolution);
  if (!metric.trueMinimum) metric.trueMinimum = grid.value;
  validateMetric(metric, grid.maxValue);
  return metric;
}

ProblemFactory syntheticFactory(const ExperimentConfig& config) {
  if (config.problem == ProblemKind::External) throw InvalidArgument("external problems need an external factory");
  const bool constrained = config.problem == ProblemKind::SyntheticConstrained;
  const Box box = config.box;
  return [constrained, box] { return makeSyntheticProblem(constrained, box); };
}

namespace {

struct WorkItem {
  std::size_t policy;
  int run;
};

}  // namespace

ExperimentResult runExperiment(const ExperimentConfig& config, const ProblemFactory& factory, int jobs) {
  if (config.repeats < 1) throw InvalidArgument("repeats must be >= 1");
  if (config.policies.empty()) throw InvalidArgument("policy list is empty");
  const Schedule schedule(config.budget);

  ExperimentResult result;
  result.metric = resolveMetric(config);

  std::vector<WorkItem> items;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    for (int r = 0; r < config.repeats; ++r) items.push_back({p, r});
  }
  std::vector<RunRecord> records(items.size());
  std::vector<std::exception_ptr> errors(items.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const WorkItem& item = items[i];
      RunRecord& rec = records[i];
      rec.seed = runSeed(config.seed, item.run);
      try {
        const Problem problem = factory();
        rec.trace = runLoop(problem, config.policies[item.policy], schedule, rec.seed, config.loop);
        rec.gaps = gapSeriesOf(rec.trace, result.metric);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(items.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!errors[i]) continue;
    const std::string where = "policy " + config.policies[items[i].policy].id() + ", run " +
                              std::to_string(items[i].run) + ", seed " + std::to_string(records[i].seed);
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw EvaluationError(where + ": " + e.what());
    }
  }

  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    const std::string id = config.policies[p].id();
    std::vector<std::vector<double>> gaps;
    auto& runs = result.runs[id];
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i].policy != p) continue;
      gaps.push_back(records[i].gaps);
      runs.push_back(std::move(records[i]));
    }
    result.series[id] = aggregate(id, gaps);
  }
  return result;
}

ExperimentResult runExperiment(const ExperimentConfig& config, int jobs) {
  return runExperiment(config, syntheticFactory(config), jobs);
}

VmfPosteriorCheck checkVmfPosterior(std::uint64_t seed, std::size_t suggestionCount, std::size_t pairCount) {
  VmfPosteriorCheck out;
  Vector theta(2);
  theta << std::cos(1.0), std::sin(1.0);
  out.prior = VmfState(theta, 1.0);

  Rng rng(deriveSeed(seed, {1}));
  std::normal_distribution<double> normal(1.0, std::sqrt(1.5));
  std::vector<Vector> samples;
  samples.reserve(suggestionCount);
  for (std::size_t i = 0; i < suggestionCount; ++i) {
    Vector x(2);
    x[0] = normal(rng);
    x[1] = normal(rng);
    samples.push_back(std::move(x));
  }
  const Vector origin = Vector::Zero(2);
  out.suggestion = estimateSuggestion(samples, origin, 2);
  out.posterior = updateState(out.prior, out.suggestion).state;

  const OracleResult oracle = rejectionPosteriorOracle(out.prior, samples, origin, pairCount, deriveSeed(seed, {2}));
  out.oracleHistogram = oracle.histogram;
  out.acceptanceRate = oracle.acceptanceRate;
  out.analyticHistogram = vmfBinProbabilities(out.posterior);
  out.totalVariation = totalVariation(out.oracleHistogram, out.analyticHistogram);
  out.pass = out.totalVariation <= kVmfCheckThreshold;
  return out;
}

std::pair<Policy, Policy> oraclePolicyPair(const ExperimentConfig& config) {
  Policy analytic = Policy::dcboWith();
  for (const auto& p : config.policies) {
    if (p.kind == PolicyKind::DCBO && p.dcbo.directionModel == DirectionModel::Analytic) {
      analytic = p;
      break;
    }
  }
  Policy oracle = analytic;
  oracle.dcbo.directionModel = DirectionModel::RejectionOracle;
  return {analytic, oracle};
}

ExperimentResult compareWithOracle(const ExperimentConfig& config, const ProblemFactory& factory, int jobs) {
  ExperimentConfig paired = config;
  const auto [analytic, oracle] = oraclePolicyPair(config);
  paired.policies = {analytic, oracle};
  return runExperiment(paired, factory, jobs);
}

}  // namespace dcbo
