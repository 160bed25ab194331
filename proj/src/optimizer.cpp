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

#include "dcbo/optimizer.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "dcbo/errors.hpp"
#include "dcbo/rng.hpp"

namespace dcbo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Stream tags for deriveSeed.
enum : std::uint64_t {
  kInitStream = 1,
  kCandidateStream = 2,
  kThompsonCandidateStream = 3,
  kThompsonStream = 4,
  kOracleStream = 5,
};

std::size_t argmaxFirst(const Vector& scores) {
  std::size_t best = 0;
  double bestScore = kNegInf;
  bool found = false;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    if (std::isnan(s)) continue;
    if (!found || s > bestScore) {
      best = static_cast<std::size_t>(i);
      bestScore = s;
      found = true;
    }
  }
  return best;
}

std::string formatShort(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double rho(int t, int totalBudget) {
  if (totalBudget < 1) throw InvalidArgument("budget must be positive");
  if (t < 0 || t > totalBudget) {
    throw InvalidArgument("rho: t = " + std::to_string(t) + " outside [0, " + std::to_string(totalBudget) + "]");
  }
  return static_cast<double>(t) / static_cast<double>(totalBudget);
}

Schedule::Schedule(int T) : totalBudget(T) {
  if (T < 2) throw InvalidArgument("total budget must be >= 2");
}

std::string_view toString(PolicyKind k) {
  switch (k) {
    case PolicyKind::EI:
      return "EI";
    case PolicyKind::PoI:
      return "PoI";
    case PolicyKind::UCB:
      return "UCB";
    case PolicyKind::CEI:
      return "cEI";
    case PolicyKind::DCBO:
      return "DCBO";
  }
  return "unknown";
}

std::string_view toString(VmfUpdater u) { return u == VmfUpdater::General ? "general" : "dim2"; }

std::string_view toString(DirectionModel m) { return m == DirectionModel::Analytic ? "analytic" : "oracle"; }

std::string Policy::id() const {
  std::string out(toString(kind));
  if (kind == PolicyKind::UCB) out += "-" + formatShort(ucb.kappa);
  if (kind == PolicyKind::DCBO) {
    const DcboParams defaults;
    if (dcbo.updater != defaults.updater) out += "-" + std::string(toString(dcbo.updater));
    if (dcbo.directionModel != defaults.directionModel) out += "-" + std::string(toString(dcbo.directionModel));
    if (dcbo.minimizerSamples != defaults.minimizerSamples) out += "-s" + std::to_string(dcbo.minimizerSamples);
    if (dcbo.kappaInit != defaults.kappaInit) out += "-k" + formatShort(dcbo.kappaInit);
    if (dcbo.oraclePairs != defaults.oraclePairs) out += "-p" + std::to_string(dcbo.oraclePairs);
  }
  return out;
}

void Policy::validate() const {
  if (kind == PolicyKind::UCB && !(ucb.kappa > 0.0)) throw InvalidArgument("UCB kappa must be positive");
  if (kind == PolicyKind::DCBO) {
    if (dcbo.minimizerSamples < 1) throw InvalidArgument("DCBO minimizer samples must be >= 1");
    if (!(dcbo.kappaInit >= 0.0)) throw InvalidArgument("DCBO initial kappa must be >= 0");
    if (dcbo.oraclePairs < 1000) throw InvalidArgument("DCBO oracle pairs must be >= 1000");
  }
}

void LoopOptions::validate() const {
  if (candidateCount < 1) throw InvalidArgument("candidate count must be >= 1");
  if (thompsonCandidates < 1) throw InvalidArgument("Thompson candidate count must be >= 1");
  if (lengthscales.empty()) throw InvalidArgument("lengthscale grid is empty");
  for (double l : lengthscales) {
    if (!(l > 0.0)) throw InvalidArgument("lengthscales must be positive");
  }
  kernel.validate();
  if (rhoOverride && !(*rhoOverride >= 0.0 && *rhoOverride <= 1.0)) throw InvalidArgument("rho override outside [0, 1]");
}

Surrogate Surrogate::fit(const std::vector<Vector>& points, std::span<const double> targets, const LoopOptions& options) {
  Vector y = Eigen::Map<const Vector>(targets.data(), static_cast<Eigen::Index>(targets.size()));
  const double shift = y.mean();
  const double var = (y.array() - shift).square().mean();
  const double scale = var > 1e-24 ? std::sqrt(var) : 1.0;
  y = ((y.array() - shift) / scale).matrix();
  const auto grid = lengthscaleGrid(options.kernel, options.lengthscales);
  return {GpModel::fit(points, y, selectHyperparams(points, y, grid)), shift, scale};
}

void Surrogate::predict(std::span<const Vector> xs, Vector& mean, Vector& sd) const {
  Vector var;
  model.predict(xs, mean, var);
  mean = (mean.array() * scale + shift).matrix();
  sd = (var.array().sqrt() * scale).matrix();
}

bool OptimizerState::feasible(std::size_t i) const {
  if (!constraintThreshold) return true;
  return (*data.constraintValues)[i] <= *constraintThreshold;
}

std::optional<std::size_t> OptimizerState::incumbentIndex() const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!feasible(i)) continue;
    if (!best || data.values[i] < data.values[*best]) best = i;
  }
  return best;
}

std::vector<Vector> uniformCandidates(const Box& box, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const Vector width = box.hi - box.lo;
  for (int c = 0; c < count; ++c) {
    Vector x(box.dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = box.lo[i] + width[i] * unif(rng);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Vector> thompsonMinimizerSamples(const GpModel& gp, std::span<const Vector> candidates, int S,
                                             std::uint64_t seed) {
  if (candidates.empty()) throw InvalidArgument("Thompson sampling needs at least one candidate");
  if (S < 1) throw InvalidArgument("Thompson sample count must be >= 1");
  const JointPosterior post = gp.jointPosterior(candidates);
  const auto chol = choleskyWithJitter(post.covariance, kJitterLadder[0]);
  if (!chol) throw IllConditionedKernel("posterior covariance over candidates is not positive definite");

  const auto m = static_cast<Eigen::Index>(candidates.size());
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(m, S);
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index i = 0; i < m; ++i) z(i, s) = normal(rng);
  }
  Matrix f = chol->triangularView<Eigen::Lower>() * z;
  f.colwise() += post.mean;

  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(S));
  for (Eigen::Index s = 0; s < S; ++s) {
    Eigen::Index idx = 0;
    f.col(s).minCoeff(&idx);
    out.push_back(candidates[static_cast<std::size_t>(idx)]);
  }
  return out;
}

double combineLogScores(double logDirectional, double logEI, double rhoValue) {
  if (!(rhoValue >= 0.0 && rhoValue <= 1.0)) throw InvalidArgument("rho outside [0, 1]");
  if (rhoValue == 1.0) return logDirectional;
  if (rhoValue == 0.0) return logEI;
  if (logEI == kNegInf || logDirectional == kNegInf) return kNegInf;
  return rhoValue * logDirectional + (1.0 - rhoValue) * logEI;
}

double combinedLogAcquisition(const Vector& x, double logEI, const VmfState& vmf, const Vector& basePoint,
                              double rhoValue) {
  if ((x - basePoint).norm() < 1e-12) return kNegInf;
  return combineLogScores(vmfLogPdf(unitDirection(basePoint, x), vmf), logEI, rhoValue);
}

namespace {

struct CandidateModel {
  Vector mean, sd;
  std::optional<Vector> meanC, sdC;
};

CandidateModel predictCandidates(const OptimizerState& state, std::span<const Vector> candidates) {
  if (!state.gp) throw InvalidArgument("optimizer state has no fitted surrogate");
  CandidateModel cm;
  state.gp->predict(candidates, cm.mean, cm.sd);
  if (state.constraintThreshold) {
    if (!state.constraintGp) throw InvalidArgument("constrained state has no constraint surrogate");
    cm.meanC.emplace();
    cm.sdC.emplace();
    state.constraintGp->predict(candidates, *cm.meanC, *cm.sdC);
  }
  return cm;
}

// Reference value for improvement-based scores: best feasible value, or the
// best value overall when nothing is feasible yet.
double improvementReference(const OptimizerState& state) {
  if (auto i = state.incumbentIndex()) return state.data.values[*i];
  return *std::min_element(state.data.values.begin(), state.data.values.end());
}

std::size_t proposeLinear(const OptimizerState& state, PolicyKind kind, const UcbParams& ucb,
                          const CandidateModel& cm) {
  const auto m = cm.mean.size();
  Vector scores(m);
  const double ref = improvementReference(state);
  const bool haveFeasible = state.incumbentIndex().has_value();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double mu = cm.mean[i];
    const double sd = cm.sd[i];
    switch (kind) {
      case PolicyKind::EI:
        scores[i] = expectedImprovement(mu, sd, ref);
        break;
      case PolicyKind::PoI:
        scores[i] = probabilityOfImprovement(mu, sd, ref);
        break;
      case PolicyKind::UCB:
        scores[i] = ucbScore(mu, sd, ucb);
        break;
      case PolicyKind::CEI:
      case PolicyKind::DCBO: {
        if (!state.constraintThreshold) {
          scores[i] = expectedImprovement(mu, sd, ref);
          break;
        }
        const double feas = feasibilityProbability((*cm.meanC)[i], (*cm.sdC)[i], *state.constraintThreshold);
        scores[i] = haveFeasible ? constrainedEI(expectedImprovement(mu, sd, ref), feas) : feas;
        break;
      }
    }
  }
  return argmaxFirst(scores);
}

std::size_t proposeDirectional(const OptimizerState& state, const Policy& policy, std::span<const Vector> candidates,
                               const CandidateModel& cm) {
  const double rhoValue = state.options.rhoOverride ? *state.options.rhoOverride : state.schedule.rho(state.iteration);
  const double ref = improvementReference(state);
  const bool haveFeasible = state.incumbentIndex().has_value();
  const bool useOracle =
      policy.dcbo.directionModel == DirectionModel::RejectionOracle && state.oracleDensity.has_value();

  const auto m = cm.mean.size();
  Vector scores(m);
  bool anyFinite = false;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vector& x = candidates[static_cast<std::size_t>(i)];
    double logEI = 0.0;
    if (!state.constraintThreshold || haveFeasible) logEI = logExpectedImprovement(cm.mean[i], cm.sd[i], ref);
    if (state.constraintThreshold) {
      logEI += logFeasibilityProbability((*cm.meanC)[i], (*cm.sdC)[i], *state.constraintThreshold);
    }
    double score;
    if ((x - state.lastPoint).norm() < 1e-12) {
      score = kNegInf;
    } else {
      const Vector g = unitDirection(state.lastPoint, x);
      const double logH = useOracle ? state.oracleDensity->logPdf(g) : vmfLogPdf(g, *state.vmf);
      score = combineLogScores(logH, logEI, rhoValue);
    }
    scores[i] = score;
    anyFinite = anyFinite || score > kNegInf;
  }
  if (!anyFinite) throw ExhaustedCandidates("every candidate scored -inf under the combined acquisition");
  return argmaxFirst(scores);
}

Observation checkedObservation(const Observation& obs, const std::optional<double>& threshold) {
  if (!std::isfinite(obs.value)) throw EvaluationError("objective returned a non-finite value");
  Observation out{obs.value, std::nullopt};
  if (threshold) {
    if (!obs.constraint) throw EvaluationError("constrained problem but the evaluation carried no constraint value");
    if (!std::isfinite(*obs.constraint)) throw EvaluationError("constraint returned a non-finite value");
    out.constraint = obs.constraint;
  }
  return out;
}

void refit(OptimizerState& s) {
  s.gp = Surrogate::fit(s.data.points, s.data.values, s.options);
  if (s.constraintThreshold) s.constraintGp = Surrogate::fit(s.data.points, *s.data.constraintValues, s.options);
}

void updateDirectional(OptimizerState& s, const Policy& policy) {
  if (policy.kind != PolicyKind::DCBO || s.data.size() < 2) return;
  const Vector& newPoint = s.data.points.back();
  const int d = static_cast<int>(newPoint.size());
  if (!s.vmf) {
    const Vector& prev = s.data.points[s.data.size() - 2];
    if ((newPoint - prev).norm() < 1e-12) return;
    s.vmf = VmfState(unitDirection(prev, newPoint), policy.dcbo.kappaInit);
  }

  const auto t = static_cast<std::uint64_t>(s.iteration);
  const auto cands = uniformCandidates(s.box, s.options.thompsonCandidates, deriveSeed(s.seed, {t, kThompsonCandidateStream}));
  const auto samples =
      thompsonMinimizerSamples(s.gp->model, cands, policy.dcbo.minimizerSamples, deriveSeed(s.seed, {t, kThompsonStream}));

  if (policy.dcbo.directionModel == DirectionModel::RejectionOracle) {
    OracleResult r;
    try {
      r = rejectionPosteriorOracle(*s.vmf, samples, newPoint, static_cast<std::size_t>(policy.dcbo.oraclePairs),
                                   deriveSeed(s.seed, {t, kOracleStream}));
    } catch (const DegenerateDirection&) {
      return;
    }
    if (r.starved) return;
    s.oracleDensity = HistogramDensity(r.histogram, r.accepted);
    const double rbar = std::min(r.acceptedResultant.norm() / static_cast<double>(r.accepted), 1.0 - 1e-12);
    if (rbar < 1e-12) {
      s.vmf->concentration = 0.0;
    } else {
      s.vmf = VmfState(r.acceptedResultant, kappaFromR(rbar, d));
    }
    return;
  }

  SuggestionSummary sug;
  try {
    sug = estimateSuggestion(samples, newPoint, d, Saturation::Clamp);
  } catch (const DegenerateDirection&) {
    return;
  }
  if (policy.dcbo.updater == VmfUpdater::Dim2) {
    s.vmf = updateState2d(*s.vmf, sug.direction, banerjeeKappa(sug.meanResultantLength, d));
  } else {
    s.vmf = updateState(*s.vmf, sug).state;
  }
}

void appendObservation(OptimizerState& s, const Policy& policy, const Vector& x, const Observation& obs) {
  s.data.append(x, obs.value, obs.constraint);
  s.lastPoint = x;
  ++s.iteration;
  refit(s);
  updateDirectional(s, policy);
}

TraceRecord makeRecord(const OptimizerState& s) {
  const std::size_t last = s.data.size() - 1;
  TraceRecord rec;
  rec.iteration = s.iteration;
  rec.query = s.data.points[last];
  rec.value = s.data.values[last];
  if (s.data.constraintValues) rec.constraint = (*s.data.constraintValues)[last];
  rec.feasible = s.feasible(last);
  if (auto i = s.incumbentIndex()) {
    rec.incumbentPoint = s.data.points[*i];
    rec.incumbentValue = s.data.values[*i];
  }
  return rec;
}

void checkPolicyFits(const Policy& policy, Eigen::Index d) {
  policy.validate();
  if (policy.kind != PolicyKind::DCBO || d == 2) return;
  if (policy.dcbo.updater == VmfUpdater::Dim2) throw InvalidArgument("the dim2 VMF updater requires a 2-D box");
  if (policy.dcbo.directionModel == DirectionModel::RejectionOracle) {
    throw InvalidArgument("the rejection-oracle direction model requires a 2-D box");
  }
}

}  // namespace

std::size_t proposeIndex(const OptimizerState& state, const Policy& policy, std::span<const Vector> candidates) {
  if (candidates.empty()) throw InvalidArgument("no candidates to propose from");
  const CandidateModel cm = predictCandidates(state, candidates);
  if (policy.kind == PolicyKind::DCBO && state.vmf) return proposeDirectional(state, policy, candidates, cm);
  return proposeLinear(state, policy.kind, policy.ucb, cm);
}

Vector proposeNext(const OptimizerState& state, const Policy& policy, std::span<const Vector> candidates) {
  return candidates[proposeIndex(state, policy, candidates)];
}

OptimizerState initialize(const Problem& problem, const Policy& policy, const Schedule& schedule, std::uint64_t seed,
                          const LoopOptions& options, Trace* trace) {
  options.validate();
  checkPolicyFits(policy, problem.box.dim());
  OptimizerState s{problem.box, schedule, options, problem.constraintThreshold, seed, {}, {}, {}, {}, {}, {}, 0};
  const auto init = uniformCandidates(problem.box, 2, deriveSeed(seed, {0, kInitStream}));
  for (const Vector& x : init) {
    const Observation obs = checkedObservation(problem.evaluate(x), problem.constraintThreshold);
    appendObservation(s, policy, x, obs);
    if (trace != nullptr) trace->push_back(makeRecord(s));
  }
  return s;
}

StepResult step(const OptimizerState& state, const Policy& policy, const BlackBox& blackBox) {
  if (state.iteration >= state.schedule.totalBudget) {
    throw BudgetExceeded("evaluation budget of " + std::to_string(state.schedule.totalBudget) + " is spent");
  }
  const auto t = static_cast<std::uint64_t>(state.iteration);
  const auto candidates =
      uniformCandidates(state.box, state.options.candidateCount, deriveSeed(state.seed, {t, kCandidateStream}));
  const Vector x = proposeNext(state, policy, candidates);
  const Observation obs = checkedObservation(blackBox(x), state.constraintThreshold);

  StepResult out{state, {}};
  appendObservation(out.state, policy, x, obs);
  out.record = makeRecord(out.state);
  return out;
}

Trace runLoop(const Problem& problem, const Policy& policy, const Schedule& schedule, std::uint64_t seed,
              const LoopOptions& options) {
  Trace trace;
  trace.reserve(static_cast<std::size_t>(schedule.totalBudget));
  OptimizerState state = initialize(problem, policy, schedule, seed, options, &trace);
  while (state.iteration < schedule.totalBudget) {
    StepResult r = step(state, policy, problem.evaluate);
    trace.push_back(std::move(r.record));
    state = std::move(r.state);
  }
  return trace;
}

Recommendation recommend(const Trace& trace) {
  if (trace.empty()) throw InvalidArgument("cannot recommend from an empty trace");
  Recommendation rec;
  rec.value = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : trace) {
    if (!r.feasible) continue;
    if (!rec.feasible || r.value < rec.value) {
      rec.point = r.query;
      rec.value = r.value;
      rec.feasible = true;
    }
  }
  return rec;
}

}  // namespace dcbo
