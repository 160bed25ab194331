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

#include "dcbo/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "dcbo/cli/config.hpp"
#include "dcbo/cli/csv.hpp"
#include "dcbo/cli/external.hpp"

namespace dcbo::cli {
namespace {

std::filesystem::path outputDir(const ExperimentConfig& config) {
  if (config.output.empty()) throw ConfigError("output", "no output path (set it in the config or pass --output)");
  return config.output;
}

void printFinal(const ExperimentResult& result, std::ostream& out) {
  for (const auto& [policy, s] : result.series) {
    out << policy << ": final median gap " << formatReal(s.median.back()) << ", mean "
        << formatReal(s.mean.back()) << " over " << s.runs << " runs\n";
  }
}

}  // namespace

ExperimentConfig loadConfig(const CommandOptions& opts) {
  if (opts.config.empty()) throw ConfigError("config", "no config file given");
  ExperimentConfig c = parseConfig(opts.config);
  if (opts.seed) c.seed = *opts.seed;
  if (opts.output) c.output = *opts.output;
  if (opts.jobs < 1) throw ConfigError("jobs", "must be >= 1");
  return c;
}

int runCommand(const CommandOptions& opts, std::ostream& out) {
  const ExperimentConfig config = loadConfig(opts);
  const auto dir = outputDir(config);
  const ExperimentResult result = runExperiment(config, makeProblemFactory(config), opts.jobs);
  emitCsv(result, true, dir);
  printFinal(result, out);
  return kOk;
}

int oracleCompareCommand(const CommandOptions& opts, std::ostream& out) {
  const ExperimentConfig config = loadConfig(opts);
  if (config.box.dim() != 2) throw ConfigError("box", "the oracle comparison needs a 2-D box");
  const auto dir = outputDir(config);
  const ExperimentResult result = compareWithOracle(config, makeProblemFactory(config), opts.jobs);
  emitCsv(result, true, dir);
  printFinal(result, out);
  const auto [analytic, oracle] = oraclePolicyPair(config);
  const double diff =
      result.series.at(analytic.id()).median.back() - result.series.at(oracle.id()).median.back();
  out << "final median gap difference (analytic - oracle): " << formatReal(diff) << '\n';
  return kOk;
}

int gridMinCommand(const CommandOptions& opts, std::ostream& out) {
  const ExperimentConfig config = loadConfig(opts);
  const Problem problem = makeProblemFactory(config)();
  const GridResult g =
      gridMinimum(problem.evaluate, problem.constraintThreshold, problem.box, config.metric.gridResolution);
  out << "minimum " << formatReal(g.value) << " at (";
  for (Eigen::Index i = 0; i < g.point.size(); ++i) out << (i ? ", " : "") << formatReal(g.point[i]);
  out << ")\nmaximum " << formatReal(g.maxValue) << '\n';
  return kOk;
}

int verifyVmfCommand(const CommandOptions& opts, std::ostream& out) {
  if (opts.jobs < 1) throw ConfigError("jobs", "must be >= 1");
  const VmfPosteriorCheck check = checkVmfPosterior(opts.seed.value_or(0));
  out << "prior: angle " << formatReal(std::atan2(check.prior.meanDirection[1], check.prior.meanDirection[0]))
      << " rad, kappa " << formatReal(check.prior.concentration) << '\n';
  out << "suggestion: R " << formatReal(check.suggestion.meanResultantLength) << ", kappa "
      << formatReal(check.suggestion.concentration) << '\n';
  out << "posterior: angle "
      << formatReal(std::atan2(check.posterior.meanDirection[1], check.posterior.meanDirection[0])) << " rad, kappa "
      << formatReal(check.posterior.concentration) << '\n';
  out << "oracle acceptance rate " << formatReal(check.acceptanceRate) << '\n';
  out << "total variation " << formatReal(check.totalVariation) << " (threshold " << formatReal(kVmfCheckThreshold)
      << "): " << (check.pass ? "PASS" : "FAIL") << '\n';
  if (opts.output) {
    std::ostringstream csv;
    csv << "bin,oracle,analytic\n";
    for (std::size_t b = 0; b < check.oracleHistogram.size(); ++b) {
      csv << b << ',' << formatReal(check.oracleHistogram[b]) << ',' << formatReal(check.analyticHistogram[b])
          << '\n';
    }
    std::error_code ec;
    std::filesystem::create_directories(*opts.output, ec);
    if (ec) throw IoError("cannot create output directory " + *opts.output + ": " + ec.message());
    writeFile(std::filesystem::path(*opts.output) / "vmf_histogram.csv", csv.str());
  }
  return check.pass ? kOk : kOtherError;
}

}  // namespace dcbo::cli
