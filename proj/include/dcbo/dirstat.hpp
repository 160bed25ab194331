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

#ifndef DCBO_DIRSTAT_HPP
#define DCBO_DIRSTAT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dcbo/surrogate.hpp"

namespace dcbo {

/// Von Mises-Fisher belief over search directions on S^{d-1}.
///
/// The concentration is not capped here (test fixtures use kappa = 20);
/// the update rules clamp to kappaMax(d).
struct VmfState {
  Vector meanDirection;
  double concentration = 0.0;

  VmfState() = default;
  /// Normalizes `direction`; throws DegenerateDirection if it is ~0 and
  /// InvalidArgument for negative kappa or d < 2.
  VmfState(const Vector& direction, double kappa);

  int dim() const noexcept { return static_cast<int>(meanDirection.size()); }
};

/// Directional summary of sampled minimizer locations seen from a base point.
struct SuggestionSummary {
  Vector direction;
  double concentration = 0.0;
  double meanResultantLength = 0.0;
  std::size_t sampleCount = 0;
};

/// Largest concentration the small-argument update rules are trusted at:
/// sqrt(d (d + 2) / 2).
double kappaMax(int d);

/// (to - from) / |to - from|; DegenerateDirection if the points coincide.
Vector unitDirection(const Vector& from, const Vector& to);

/// log I_order(x) for order >= 0, x >= 0. Power series up to x = 30, the
/// large-argument expansion beyond. Intended for small orders.
double logBesselI(double order, double x);

/// log C_d(kappa), the normalizer making C exp(kappa theta'g) a density
/// with respect to surface measure on S^{d-1}.
double logNormConst(int d, double kappa);

/// Log density; `g` within 1e-6 of unit norm is renormalized.
double vmfLogPdf(const Vector& g, const VmfState& state);

/// R (d - R^2) / (1 - R^2), unclamped.
double banerjeeKappa(double meanResultantLength, int d);

/// banerjeeKappa clamped to kappaMax(d). R >= 1 is SaturatedConcentration.
double kappaFromR(double meanResultantLength, int d);

/// Exact A_d(kappa) = I_{d/2}(kappa) / I_{d/2-1}(kappa).
double meanResultantOf(double kappa, int d);

enum class Saturation {
  Throw,  ///< R-hat >= 1 - 1e-12 throws SaturatedConcentration
  Clamp,  ///< ... or is pinned just below 1, giving kappa = kappaMax(d)
};

/// Averages unit directions from `basePoint` to each sample. Samples within
/// 1e-12 of the base point are skipped. Perfect cancellation (R-hat ~ 0)
/// yields kappa 0 with the first sample's direction.
SuggestionSummary estimateSuggestion(std::span<const Vector> samples, const Vector& basePoint, int d,
                                     Saturation saturation = Saturation::Throw);

struct VmfUpdate {
  VmfState state;
  /// Natural-parameter sum vanished; `state` is the unchanged prior.
  bool stalled = false;
};

/// General-dimension posterior update in natural-parameter form:
///   k1 = -kh kt (kh^2 + kt^2 - d (d + 2)) / (d^2 (d + 2))
///   v  = k1 theta_hat + kt theta_t
/// with kh, kt clamped to kappaMax(d). Returns theta = v/|v| and
/// kappa = min(|v|, kappaMax(d)).
VmfUpdate updateState(const VmfState& state, const SuggestionSummary& suggestion);

/// Planar update blending the suggestion direction `gStar` into the prior
/// mean with weight k; see dirstat.cpp for the formulas. Inputs are used
/// unclamped; the returned concentration is clamped to kappaMax(2).
VmfState updateState2d(const VmfState& state, const Vector& gStar, double kappaStar);

/// Draws `n` unit vectors. d = 2 uses angle-domain rejection against the
/// von Mises density, d >= 3 Wood's tangent-normal scheme.
std::vector<Vector> sampleVmf(const VmfState& state, std::size_t n, std::uint64_t seed);

inline constexpr int kOracleBins = 36;

/// Angle in [0, 2 pi) of a planar direction.
double planarAngle(const Vector& g);
/// Bin index over kOracleBins (or `bins`) equal arcs starting at angle 0.
int angleBin(double angle, int bins = kOracleBins);

struct OracleResult {
  std::vector<double> histogram;  ///< normalized, kOracleBins entries
  std::size_t pairs = 0;
  std::size_t accepted = 0;
  double acceptanceRate = 0.0;
  bool starved = false;    ///< acceptanceRate < 1%
  Vector acceptedResultant;  ///< sum of accepted directions
};

/// Sampling-based posterior over the next direction: pairs a prior draw
/// g_t ~ prior with a uniformly chosen suggestion direction and keeps the
/// suggestion iff <g, g_t> >= 0. Planar only; pairCount >= 1000.
OracleResult rejectionPosteriorOracle(const VmfState& prior, std::span<const Vector> suggestionSamples,
                                      const Vector& basePoint, std::size_t pairCount, std::uint64_t seed);

/// Probability mass of a planar VMF on each of `bins` equal arcs.
std::vector<double> vmfBinProbabilities(const VmfState& state, int bins = kOracleBins);

double totalVariation(std::span<const double> p, std::span<const double> q);

/// Smoothed circular density built from an oracle histogram: add-one
/// counts, linear interpolation between bin centres.
class HistogramDensity {
 public:
  HistogramDensity(std::span<const double> histogram, std::size_t sampleCount);
  /// Log density per radian of a planar direction.
  double logPdf(const Vector& g) const;
  const std::vector<double>& binDensity() const noexcept { return density_; }

 private:
  std::vector<double> density_;
};

}  // namespace dcbo

#endif  // DCBO_DIRSTAT_HPP
