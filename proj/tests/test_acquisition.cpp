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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dcbo/acquisition.hpp"
#include "oracles.hpp"

namespace dcbo {
namespace {

TEST(Improvement, Examples) {
  EXPECT_EQ(improvement(0.5, 1.0), 0.5);
  EXPECT_EQ(improvement(2.0, 1.0), 0.0);
  EXPECT_EQ(improvement(1.0, 1.0), 0.0);
}

TEST(NormalCdf, MatchesQuadrature) {
  for (double z : {-4.0, -2.0, -0.3, 0.0, 0.7, 1.0, 2.0, 3.5}) {
    EXPECT_NEAR(normalCdf(z), oracle::normalCdf(z), 1e-10) << z;
  }
}

TEST(LogNormalCdf, ContinuousAndAccurateInTail) {
  for (double z : {-5.0, -10.0, -20.0, -29.0}) EXPECT_NEAR(logNormalCdf(z), std::log(normalCdf(z)), 1e-9) << z;
  // Mills-ratio asymptote deep in the tail.
  const double z = -40.0;
  const double asym = -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi);
  EXPECT_NEAR(logNormalCdf(z), asym, 1e-3);
  EXPECT_NEAR(logNormalCdf(-30.0 + 1e-9), logNormalCdf(-30.0 - 1e-9), 1e-6);
  EXPECT_TRUE(std::isfinite(logNormalCdf(-1e3)));
}

TEST(ExpectedImprovement, DegenerateSd) {
  EXPECT_EQ(expectedImprovement(2.0, 0.0, 1.0), 0.0);
  EXPECT_EQ(expectedImprovement(0.25, 0.0, 1.0), 0.75);
}

TEST(ExpectedImprovement, ClosedFormExamples) {
  EXPECT_NEAR(expectedImprovement(0.0, 1.0, 1.0), 1.08332, 1e-5);
  EXPECT_NEAR(expectedImprovement(1.0, 1.0, 1.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-12);
}

TEST(ExpectedImprovement, MonteCarloExamples) {
  EXPECT_NEAR(expectedImprovement(0.0, 1.0, 1.0), oracle::expectedImprovementMc(0.0, 1.0, 1.0, 1000000, 1), 3e-3);
  EXPECT_NEAR(expectedImprovement(1.0, 1.0, 1.0), oracle::expectedImprovementMc(1.0, 1.0, 1.0, 1000000, 2), 3e-3);
}

TEST(ExpectedImprovement, MonotoneAndNonNegative) {
  for (double inc : {-1.0, 0.0, 1.0}) {
    for (double mean = -3.0; mean <= 3.0; mean += 0.25) {
      double prev = -1.0;
      for (double sd = 0.0; sd <= 3.0; sd += 0.1) {
        const double ei = expectedImprovement(mean, sd, inc);
        EXPECT_GE(ei, 0.0);
        EXPECT_GE(ei, prev - 1e-14);
        prev = ei;
      }
    }
    for (double sd : {0.1, 1.0, 2.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double mean = -3.0; mean <= 3.0; mean += 0.1) {
        const double ei = expectedImprovement(mean, sd, inc);
        EXPECT_LE(ei, prev + 1e-14);
        prev = ei;
      }
    }
  }
}

TEST(LogExpectedImprovement, AgreesWhereRepresentable) {
  for (double mean : {-1.0, 0.0, 1.0, 3.0, 6.0}) {
    for (double sd : {0.1, 0.5, 1.0}) {
      const double ei = expectedImprovement(mean, sd, 0.0);
      if (ei > 1e-280) EXPECT_NEAR(logExpectedImprovement(mean, sd, 0.0), std::log(ei), 1e-6 * std::max(1.0, std::abs(std::log(ei))));
    }
  }
}

TEST(LogExpectedImprovement, FiniteDeepInTail) {
  const double v = logExpectedImprovement(100.0, 1.0, 0.0);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_LT(v, -4000.0);
  EXPECT_LT(logExpectedImprovement(101.0, 1.0, 0.0), v);
  EXPECT_EQ(logExpectedImprovement(1.0, 0.0, 0.0), -std::numeric_limits<double>::infinity());
}

TEST(ProbabilityOfImprovement, Examples) {
  EXPECT_EQ(probabilityOfImprovement(1.0, 1.0, 1.0), 0.5);
  EXPECT_NEAR(probabilityOfImprovement(0.0, 1.0, 1.0), oracle::normalCdf(1.0), 1e-10);
  EXPECT_NEAR(probabilityOfImprovement(0.0, 1.0, 1.0), 0.84134, 1e-5);
  EXPECT_EQ(probabilityOfImprovement(2.0, 0.0, 1.0), 0.0);
  EXPECT_EQ(probabilityOfImprovement(0.0, 0.0, 1.0), 1.0);
}

TEST(ProbabilityOfImprovement, InUnitInterval) {
  for (double mean = -5; mean <= 5; mean += 0.5) {
    for (double sd : {0.0, 0.01, 1.0, 10.0}) {
      const double p = probabilityOfImprovement(mean, sd, 0.3);
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Ucb, Examples) {
  EXPECT_EQ(ucbScore(1.0, 0.0, {0.5}), -1.0);
  EXPECT_EQ(ucbScore(1.0, 0.0, {9.0}), -1.0);
  EXPECT_EQ(ucbScore(1.0, 2.0, {0.5}), 0.0);
  double prev = -1e300;
  for (double k : {0.5, 1.0, 6.0, 9.0}) {
    const double s = ucbScore(0.3, 0.7, {k});
    EXPECT_GE(s, prev);
    prev = s;
  }
}

TEST(Feasibility, Examples) {
  EXPECT_EQ(feasibilityProbability(0.5, 1.0, 0.5), 0.5);
  EXPECT_NEAR(feasibilityProbability(0.0, 0.25, 0.5), oracle::normalCdf(2.0), 1e-10);
  EXPECT_NEAR(feasibilityProbability(0.0, 0.25, 0.5), 0.97725, 1e-5);
  EXPECT_EQ(feasibilityProbability(0.6, 0.0, 0.5), 0.0);
  EXPECT_EQ(feasibilityProbability(0.5, 0.0, 0.5), 1.0);
  EXPECT_NEAR(logFeasibilityProbability(0.0, 0.25, 0.5), std::log(0.977249868), 1e-8);
}

TEST(ConstrainedEI, Examples) {
  EXPECT_EQ(constrainedEI(0.7, 1.0), 0.7);
  EXPECT_EQ(constrainedEI(0.7, 0.0), 0.0);
  EXPECT_NEAR(constrainedEI(1.08332, 0.5), 0.54166, 1e-12);
  for (double p = 0.0; p <= 1.0; p += 0.125) EXPECT_LE(constrainedEI(0.9, p), 0.9);
}

}  // namespace
}  // namespace dcbo
