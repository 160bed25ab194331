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

// Acceptance suite: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been reported; --strict makes any FAIL a nonzero exit.
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <signal.h>
#include <sstream>
#include <string>
#include <thread>

#include "dcbo/bench.hpp"
#include "dcbo/cli/commands.hpp"
#include "dcbo/cli/csv.hpp"
#include "dcbo/cli/external.hpp"
#include "dcbo/errors.hpp"
#include "oracles.hpp"

namespace {

using namespace dcbo;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %d: %s | %s | %.1fs\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Outcome eiVersusMonteCarlo() {
  double worst = 0.0;
  std::uint64_t cell = 0;
  for (double mean : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    for (double sd : {0.1, 0.5, 1.0, 2.0}) {
      for (double inc : {-1.0, 0.0, 1.0}) {
        const double mc = oracle::expectedImprovementMc(mean, sd, inc, 1000000, 1000 + cell++);
        worst = std::max(worst, std::abs(expectedImprovement(mean, sd, inc) - mc));
      }
    }
  }
  return {worst <= 3e-3, std::to_string(cell) + " cells, max |EI - MC| = " + fmt("%.2e", worst) + " (tol 3e-3)"};
}

Outcome vmfNormalization() {
  double worst2 = 0.0;
  for (double kappa : {0.0, 0.5, 1.0, 5.0, 20.0}) {
    const VmfState s(vec({std::cos(0.3), std::sin(0.3)}), kappa);
    const int n = 4096;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = 2 * kPi * i / n;
      sum += std::exp(vmfLogPdf(vec({std::cos(a), std::sin(a)}), s));
    }
    worst2 = std::max(worst2, std::abs(sum * 2 * kPi / n - 1.0));
  }
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  std::vector<Vector> pts;
  pts.reserve(1000000);
  for (int i = 0; i < 1000000; ++i) pts.push_back(vec({z(rng), z(rng), z(rng)}).normalized());
  double worst3 = 0.0;
  for (double kappa : {0.0, 1.0, 5.0}) {
    const VmfState s(vec({1, 2, 2}), kappa);
    double sum = 0.0;
    for (const auto& g : pts) sum += std::exp(vmfLogPdf(g, s));
    worst3 = std::max(worst3, std::abs(sum / 1e6 * 4 * kPi - 1.0));
  }
  return {worst2 <= 1e-6 && worst3 <= 1e-2,
          "d=2 quadrature err " + fmt("%.1e", worst2) + " (tol 1e-6), d=3 MC err " + fmt("%.1e", worst3) + " (tol 1e-2)"};
}

Outcome banerjee() {
  double worst = 0.0;
  for (int d : {2, 3, 5}) {
    for (int i = 1; i <= 18; ++i) {
      const double R = 0.05 * i;
      const double exact = oracle::invertMeanResultant(R, d);
      worst = std::max(worst, std::abs(banerjeeKappa(R, d) - exact) / exact);
    }
  }
  return {worst <= 0.10, "max relative error " + fmt("%.4f", worst) + " over R in [0.05, 0.9], d in {2,3,5} (tol 0.10)"};
}

Outcome simulationOne() {
  const auto check = checkVmfPosterior(0);
  std::ostringstream s;
  s << "TV = " << fmt("%.4f", check.totalVariation) << " (tol 0.15), posterior kappa "
    << fmt("%.3f", check.posterior.concentration) << ", acceptance " << fmt("%.3f", check.acceptanceRate);
  return {check.totalVariation <= kVmfCheckThreshold, s.str()};
}

Outcome gpInterpolation() {
  std::vector<Vector> pts;
  Dataset d;
  for (int i = 0; i < 10; ++i) {
    const double x = 2 * kPi * i / 9.0;
    d.append(vec({x}), std::sin(x));
  }
  double worstMean = 0.0;
  double worstVar = 0.0;
  for (auto variant : {KernelVariant::AsWritten, KernelVariant::Squared}) {
    const KernelParams base{1.0, 1e-10, variant};
    const auto grid = lengthscaleGrid(base, logSpaced(1e-2, 1e2, 16));
    const auto gp = GpModel::fit(d, selectHyperparams(d, grid));
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto p = gp.predict(d.points[i]);
      worstMean = std::max(worstMean, std::abs(p.mean - d.values[i]));
      worstVar = std::max(worstVar, p.variance);
    }
  }
  return {worstMean <= 1e-6 && worstVar < 1e-3,
          "max |mean - y| = " + fmt("%.1e", worstMean) + " (tol 1e-6), max variance " + fmt("%.1e", worstVar) +
              " (tol 1e-3), both kernel variants"};
}

Outcome gridOracle() {
  const Problem u = makeSyntheticProblem(false);
  const Problem c = makeSyntheticProblem(true);
  const auto gu = gridMinimum(u.evaluate, std::nullopt, u.box, 1000);
  const auto gc = gridMinimum(c.evaluate, c.constraintThreshold, c.box, 1000);
  const bool feasible = syntheticConstraint(-kPi / 2, 0.0) <= kSyntheticThreshold;
  return {std::abs(gu.value + 2.0) <= 1e-3 && std::abs(gc.value + 2.0) <= 1e-3 && feasible,
          "unconstrained " + fmt("%.6f", gu.value) + ", constrained " + fmt("%.6f", gc.value) + " (target -2 +/- 1e-3)"};
}

double finalMedian(const ExperimentResult& r, const std::string& id) { return r.series.at(id).median.back(); }
double medianAt(const ExperimentResult& r, const std::string& id, int t) {
  return r.series.at(id).median[static_cast<std::size_t>(t - 1)];
}

Outcome simulationTwo() {
  ExperimentConfig u;
  u.problem = ProblemKind::SyntheticUnconstrained;
  u.policies = {Policy::ei(), Policy::poi(), Policy::dcboWith()};
  const auto ru = runExperiment(u, jobs());
  ExperimentConfig c;
  c.problem = ProblemKind::SyntheticConstrained;
  c.policies = {Policy::cei(), Policy::dcboWith()};
  const auto rc = runExperiment(c, jobs());

  const double dU = finalMedian(ru, "DCBO");
  const double ei = finalMedian(ru, "EI");
  const double poi = finalMedian(ru, "PoI");
  const double dC = finalMedian(rc, "DCBO");
  const double cei = finalMedian(rc, "cEI");
  std::ostringstream s;
  s << "final medians: DCBO " << fmt("%.3g", dU) << " vs EI " << fmt("%.3g", ei) << ", PoI " << fmt("%.3g", poi)
    << "; constrained DCBO " << fmt("%.3g", dC) << " vs cEI " << fmt("%.3g", cei);
  s << " | medians at t=15: DCBO " << fmt("%.3g", medianAt(ru, "DCBO", 15)) << ", EI "
    << fmt("%.3g", medianAt(ru, "EI", 15)) << ", PoI " << fmt("%.3g", medianAt(ru, "PoI", 15)) << "; constrained DCBO "
    << fmt("%.3g", medianAt(rc, "DCBO", 15)) << ", cEI " << fmt("%.3g", medianAt(rc, "cEI", 15));
  return {dU <= ei && dU <= poi && dC <= cei, s.str()};
}

Outcome simulationThree() {
  ExperimentConfig c;
  c.problem = ProblemKind::SyntheticUnconstrained;
  c.repeats = 20;
  c.policies = {Policy::dcboWith()};
  const auto r = compareWithOracle(c, syntheticFactory(c), jobs());
  const auto [analytic, oracle] = oraclePolicyPair(c);
  const double a = finalMedian(r, analytic.id());
  const double o = finalMedian(r, oracle.id());
  return {std::abs(a - o) <= 0.2,
          "final medians analytic " + fmt("%.3g", a) + ", oracle " + fmt("%.3g", o) + ", |diff| " +
              fmt("%.3g", std::abs(a - o)) + " (tol 0.2)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome budgetAndDeterminism() {
  ExperimentConfig c;
  c.problem = ProblemKind::SyntheticConstrained;
  c.budget = 12;
  c.repeats = 3;
  c.seed = 5;
  DcboParams dim2;
  dim2.updater = VmfUpdater::Dim2;
  DcboParams orc;
  orc.directionModel = DirectionModel::RejectionOracle;
  c.policies = {Policy::ei(),  Policy::poi(), Policy::ucbWith(1.0), Policy::cei(), Policy::dcboWith(),
                Policy::dcboWith(dim2), Policy::dcboWith(orc)};
  bool exact = true;
  for (const auto& p : c.policies) {
    for (int run = 0; run < c.repeats; ++run) {
      int calls = 0;
      Problem prob = makeSyntheticProblem(true);
      auto inner = prob.evaluate;
      prob.evaluate = [&calls, inner](const Vector& x) {
        ++calls;
        return inner(x);
      };
      runLoop(prob, p, Schedule(c.budget), runSeed(c.seed, run), c.loop);
      exact = exact && calls == c.budget;
    }
  }

  const fs::path root = fs::temp_directory_path() / ("dcbo_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "c.json") << R"({"problem":"synthetic-constrained","budget":12,"repeats":3,"seed":5,
    "policies":["cEI","DCBO",{"name":"DCBO","updater":"dim2"}]})";
  bool identical = true;
  std::string first[2];
  for (int rep = 0; rep < 2; ++rep) {
    cli::CommandOptions o;
    o.config = (root / "c.json").string();
    o.output = (root / ("out" + std::to_string(rep))).string();
    o.jobs = rep == 0 ? 1 : jobs() + 1;
    std::ostringstream sink;
    if (cli::runCommand(o, sink) != cli::kOk) identical = false;
    const std::string now = slurp(*o.output + "/" + cli::kSummaryFile) + slurp(*o.output + "/" + cli::kTraceFile);
    first[rep] = now;
  }
  identical = identical && !first[0].empty() && first[0] == first[1];
  fs::remove_all(root);
  return {exact && identical, std::string("exactly T evaluations for 7 policies x 3 runs: ") + (exact ? "yes" : "no") +
                                  ", CSV byte-identical across two runs: " + (identical ? "yes" : "no")};
}

Outcome externalProtocol() {
  bool echo = false, malformed = false, timeout = false;
  {
    cli::ExternalObjective child("while read l; do echo '{\"f\":0}'; done", 2000ms);
    echo = child(vec({0.3, -1.0})).value == 0.0 && child(vec({4.0, 2.0})).value == 0.0;
  }
  try {
    cli::ExternalObjective child("while read l; do echo not-json; done", 2000ms);
    child(vec({0.0}));
  } catch (const cli::ExternalError& e) {
    malformed = e.kind() == cli::ExternalErrorKind::MalformedReply;
  }
  try {
    cli::ExternalObjective child("read l; sleep 30", 300ms);
    const pid_t pid = child.pid();
    try {
      child(vec({0.0}));
    } catch (const cli::ExternalError& e) {
      timeout = e.kind() == cli::ExternalErrorKind::Timeout && !child.alive() && ::kill(pid, 0) != 0;
    }
  } catch (...) {
  }
  return {echo && malformed && timeout,
          std::string("protocol checks: echo ") + (echo ? "ok" : "FAILED") +
              ", malformed reply " + (malformed ? "ok" : "FAILED") + ", timeout+kill " + (timeout ? "ok" : "FAILED")};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict = strict || std::strcmp(argv[i], "--strict") == 0;

  report(1, "EI closed form vs Monte Carlo", eiVersusMonteCarlo);
  report(2, "VMF normalization", vmfNormalization);
  report(3, "Banerjee kappa vs exact inversion", banerjee);
  report(4, "Simulation 1 (verify-vmf)", simulationOne);
  report(5, "GP interpolation", gpInterpolation);
  report(6, "grid oracle", gridOracle);
  report(7, "Simulation 2 trend, final median gap", simulationTwo);
  report(8, "Simulation 3 (oracle-compare)", simulationThree);
  report(9, "budget and determinism", budgetAndDeterminism);
  report(10, "external objective protocol", externalProtocol);

  std::printf("%d of 10 criteria failed\n", failures);
  return strict && failures > 0 ? 1 : 0;
}
