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

#ifndef DCBO_ACQUISITION_HPP
#define DCBO_ACQUISITION_HPP

#include "dcbo/surrogate.hpp"

// Pointwise acquisition scores for minimization. Every score is "higher is
// better". Degenerate sd = 0 cases take their continuous limits.

namespace dcbo {

struct Incumbent {
  Vector point;
  double value;
};

struct UcbParams {
  double kappa = 1.0;
};

double normalPdf(double z);
double normalCdf(double z);
/// log Phi(z), accurate far into the lower tail.
double logNormalCdf(double z);

/// max{0, incumbentValue - value}
double improvement(double value, double incumbentValue);

double expectedImprovement(double mean, double sd, double incumbentValue);
/// log EI without underflow for candidates deep below the incumbent's reach.
/// Returns -inf only when sd = 0 and mean >= incumbentValue.
double logExpectedImprovement(double mean, double sd, double incumbentValue);

double probabilityOfImprovement(double mean, double sd, double incumbentValue);

/// Negated lower confidence bound: -(mean - kappa sd).
double ucbScore(double mean, double sd, const UcbParams& params);

/// P(c(x) <= threshold) under N(meanC, sdC^2).
double feasibilityProbability(double meanC, double sdC, double threshold);
double logFeasibilityProbability(double meanC, double sdC, double threshold);

double constrainedEI(double ei, double feasProb);

}  // namespace dcbo

#endif  // DCBO_ACQUISITION_HPP
