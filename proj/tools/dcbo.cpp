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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dcbo/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace dcbo::cli;

  CLI::App app{"Directionally constrained Bayesian optimization experiments"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::uint64_t seed = 0;
  std::string output;

  auto addCommon = [&](CLI::App* sub, bool needsConfig) {
    auto* cfg = sub->add_option("--config,config", opts.config, "experiment config (JSON)");
    if (needsConfig) cfg->required();
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--output", output, "output directory override");
    sub->add_option("--jobs", opts.jobs, "parallel runs")->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "run an experiment and write summary.csv and traces.csv");
  addCommon(run, true);
  auto* verify = app.add_subcommand("verify-vmf", "check the analytic directional update against the oracle");
  addCommon(verify, false);
  auto* compare = app.add_subcommand("oracle-compare", "paired analytic vs oracle-direction DCBO runs");
  addCommon(compare, true);
  auto* grid = app.add_subcommand("grid-min", "grid minimum of the configured problem");
  addCommon(grid, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  for (auto* sub : {run, verify, compare, grid}) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed") > 0) opts.seed = seed;
    if (sub->count("--output") > 0) opts.output = output;
  }

  return guarded(
      [&] {
        if (run->parsed()) return runCommand(opts, std::cout);
        if (verify->parsed()) return verifyVmfCommand(opts, std::cout);
        if (compare->parsed()) return oracleCompareCommand(opts, std::cout);
        return gridMinCommand(opts, std::cout);
      },
      std::cerr);
}
