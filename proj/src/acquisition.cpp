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

#include "dcbo/acquisition.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dcbo/errors.hpp"

namespace dcbo {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void requireSd(double sd) {
  if (!(sd >= 0.0)) throw InvalidArgument("standard deviation must be >= 0");
}

double logNormalPdf(double z) { return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi); }

}  // namespace

double normalPdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normalCdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double logNormalCdf(double z) {
  if (z > -30.0) return std::log(normalCdf(z));
  // Phi(z) = phi(z)/|z| (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...)
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return logNormalPdf(z) - std::log(-z) + std::log(series);
}

double improvement(double value, double incumbentValue) { return std::max(0.0, incumbentValue - value); }

double expectedImprovement(double mean, double sd, double incumbentValue) {
  requireSd(sd);
  if (sd == 0.0) return improvement(mean, incumbentValue);
  const double z = (incumbentValue - mean) / sd;
  return std::max(0.0, sd * (z * normalCdf(z) + normalPdf(z)));
}

double logExpectedImprovement(double mean, double sd, double incumbentValue) {
  requireSd(sd);
  if (sd == 0.0) {
    const double imp = improvement(mean, incumbentValue);
    return imp > 0.0 ? std::log(imp) : kNegInf;
  }
  const double z = (incumbentValue - mean) / sd;
  if (z > -20.0) {
    const double h = z * normalCdf(z) + normalPdf(z);
    if (h > 0.0) return std::log(sd) + std::log(h);
  }
  // z Phi(z) + phi(z) = phi(z) (1/z^2 - 3/z^4 + 15/z^6 - 105/z^8 + 945/z^10)
  const double w = 1.0 / (z * z);
  const double tail = w * (1.0 - w * (3.0 - w * (15.0 - w * (105.0 - w * 945.0))));
  return std::log(sd) + logNormalPdf(z) + std::log(tail);
}

double probabilityOfImprovement(double mean, double sd, double incumbentValue) {
  requireSd(sd);
  if (sd == 0.0) return mean < incumbentValue ? 1.0 : 0.0;
  return normalCdf((incumbentValue - mean) / sd);
}

double ucbScore(double mean, double sd, const UcbParams& params) {
  requireSd(sd);
  if (!(params.kappa > 0.0)) throw InvalidArgument("UCB kappa must be positive");
  return -(mean - params.kappa * sd);
}

double feasibilityProbability(double meanC, double sdC, double threshold) {
  requireSd(sdC);
  if (sdC == 0.0) return meanC <= threshold ? 1.0 : 0.0;
  return normalCdf((threshold - meanC) / sdC);
}

double logFeasibilityProbability(double meanC, double sdC, double threshold) {
  requireSd(sdC);
  if (sdC == 0.0) return meanC <= threshold ? 0.0 : kNegInf;
  return logNormalCdf((threshold - meanC) / sdC);
}

double constrainedEI(double ei, double feasProb) { return ei * feasProb; }

}  // namespace dcbo
