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

#include "dcbo/dirstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "dcbo/errors.hpp"
#include "dcbo/rng.hpp"

namespace dcbo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCoincident = 1e-12;
constexpr double kUnitTolerance = 1e-6;
constexpr double kSaturatedR = 1.0 - 1e-12;

void requireDim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(got) + ", expected " +
                            std::to_string(want));
  }
}

void requirePlanar(Eigen::Index d, const char* what) {
  if (d != 2) throw DimensionMismatch(std::string(what) + " is defined for d = 2 only");
}

double logBesselSeries(double order, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 1000; ++k) {
    term *= q / ((k + 1.0) * (k + 1.0 + order));
    sum += term;
    if (term < 1e-17 * sum && k + 1 > q) break;
  }
  return order * std::log(0.5 * x) - std::lgamma(order + 1.0) + std::log(sum);
}

double logBesselAsymptotic(double order, double x) {
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return x - 0.5 * std::log(kTwoPi * x) + std::log(sum);
}

}  // namespace

VmfState::VmfState(const Vector& direction, double kappa) {
  if (direction.size() < 2) throw InvalidArgument("VMF dimension must be >= 2");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InvalidArgument("VMF concentration must be finite and >= 0");
  const double n = direction.norm();
  if (!(n > kCoincident)) throw DegenerateDirection("VMF mean direction has zero length");
  meanDirection = direction / n;
  concentration = kappa;
}

double kappaMax(int d) { return std::sqrt(d * (d + 2.0) / 2.0); }

Vector unitDirection(const Vector& from, const Vector& to) {
  requireDim(to.size(), from.size(), "unitDirection");
  Vector diff = to - from;
  const double n = diff.norm();
  if (!(n >= kCoincident)) throw DegenerateDirection("points coincide; direction undefined");
  return diff / n;
}

double logBesselI(double order, double x) {
  if (!(order >= 0.0) || !(x >= 0.0)) throw InvalidArgument("logBesselI requires order >= 0 and x >= 0");
  if (x == 0.0) return order == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return x <= 30.0 ? logBesselSeries(order, x) : logBesselAsymptotic(order, x);
}

double logNormConst(int d, double kappa) {
  if (d < 2) throw InvalidArgument("logNormConst requires d >= 2");
  if (!(kappa >= 0.0)) throw InvalidArgument("logNormConst requires kappa >= 0");
  const double half = 0.5 * d;
  if (kappa == 0.0) {
    // 1 / surface area of S^{d-1} = Gamma(d/2) / (2 pi^{d/2})
    return std::lgamma(half) - std::log(2.0) - half * std::log(std::numbers::pi);
  }
  const double order = half - 1.0;
  return order * std::log(kappa) - half * std::log(kTwoPi) - logBesselI(order, kappa);
}

double vmfLogPdf(const Vector& g, const VmfState& state) {
  requireDim(g.size(), state.meanDirection.size(), "vmfLogPdf");
  const double n = g.norm();
  if (std::abs(n - 1.0) > kUnitTolerance) throw InvalidArgument("vmfLogPdf expects a unit vector");
  return logNormConst(state.dim(), state.concentration) + state.concentration * state.meanDirection.dot(g) / n;
}

double banerjeeKappa(double r, int d) {
  if (!(r >= 0.0)) throw InvalidArgument("mean resultant length must be >= 0");
  if (r >= 1.0) throw SaturatedConcentration("mean resultant length reached 1");
  return r * (d - r * r) / (1.0 - r * r);
}

double kappaFromR(double r, int d) { return std::min(banerjeeKappa(r, d), kappaMax(d)); }

double meanResultantOf(double kappa, int d) {
  if (kappa == 0.0) return 0.0;
  return std::exp(logBesselI(0.5 * d, kappa) - logBesselI(0.5 * d - 1.0, kappa));
}

SuggestionSummary estimateSuggestion(std::span<const Vector> samples, const Vector& basePoint, int d,
                                     Saturation saturation) {
  requireDim(basePoint.size(), d, "estimateSuggestion base point");
  Vector sum = Vector::Zero(d);
  Vector first;
  std::size_t used = 0;
  for (const Vector& x : samples) {
    requireDim(x.size(), d, "estimateSuggestion sample");
    Vector diff = x - basePoint;
    const double n = diff.norm();
    if (n <= kCoincident) continue;
    diff /= n;
    if (used == 0) first = diff;
    sum += diff;
    ++used;
  }
  if (used == 0) throw DegenerateDirection("all suggestion samples coincide with the base point");

  SuggestionSummary out;
  out.sampleCount = used;
  const double norm = sum.norm();
  out.meanResultantLength = norm / static_cast<double>(used);
  if (out.meanResultantLength < 1e-12) {
    out.meanResultantLength = 0.0;
    out.direction = first;
    out.concentration = 0.0;
    return out;
  }
  out.direction = sum / norm;
  if (out.meanResultantLength >= kSaturatedR) {
    if (saturation == Saturation::Throw) {
      throw SaturatedConcentration("suggestion directions are perfectly aligned");
    }
    out.meanResultantLength = kSaturatedR;
  }
  out.concentration = kappaFromR(out.meanResultantLength, d);
  return out;
}

VmfUpdate updateState(const VmfState& state, const SuggestionSummary& suggestion) {
  const int d = state.dim();
  requireDim(suggestion.direction.size(), d, "updateState suggestion");
  const double cap = kappaMax(d);
  const double kt = std::min(state.concentration, cap);
  const double kh = std::min(suggestion.concentration, cap);
  const double dd = static_cast<double>(d);
  const double k1 = -kh * kt * (-dd * (dd + 2.0) + kh * kh + kt * kt) / (dd * dd * (dd + 2.0));

  const Vector v = k1 * suggestion.direction + kt * state.meanDirection;
  const double norm = v.norm();
  if (norm < 1e-12) return {state, true};
  VmfState next;
  next.meanDirection = v / norm;
  next.concentration = std::min(norm, cap);
  return {next, false};
}

// Planar rule with k balancing the suggestion against the prior mean:
//   k          = sqrt(kh kt (kh^2 + kt^2 - 8)) / (4 kt)
//   kappa_next = sqrt(kh kt (kh^2 + kt^2 - 8 + 16 kt^2)) / 4
//   theta_next = (k g* + theta_t) / sqrt(1 + k^2)
// Negative radicands are taken as zero.
VmfState updateState2d(const VmfState& state, const Vector& gStar, double kappaStar) {
  requirePlanar(state.dim(), "updateState2d");
  requirePlanar(gStar.size(), "updateState2d");
  if (!(kappaStar >= 0.0)) throw InvalidArgument("suggestion concentration must be >= 0");
  const double kt = state.concentration;
  const double kh = kappaStar;
  if (kt == 0.0) return VmfState(gStar, 0.0);

  const double base = kh * kt * (kh * kh + kt * kt - 8.0);
  const double k = base > 0.0 ? std::sqrt(base) / (4.0 * kt) : 0.0;
  const double kappaRadicand = base + 16.0 * kh * kt * kt * kt;
  const double kappaNext = std::min(0.25 * std::sqrt(std::max(0.0, kappaRadicand)), kappaMax(2));

  Vector theta = (k * gStar.normalized() + state.meanDirection) / std::sqrt(1.0 + k * k);
  if (theta.norm() < 1e-12) theta = state.meanDirection;
  return VmfState(theta, kappaNext);
}

std::vector<Vector> sampleVmf(const VmfState& state, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sampleVmf requires n >= 1");
  const int d = state.dim();
  if (d < 2) throw InvalidArgument("VMF dimension must be >= 2");
  const double kappa = state.concentration;
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(n);

  if (d == 2) {
    const double mu = std::atan2(state.meanDirection[1], state.meanDirection[0]);
    while (out.size() < n) {
      const double phi = kTwoPi * unif(rng) - std::numbers::pi;
      if (kappa > 0.0 && unif(rng) > std::exp(kappa * (std::cos(phi) - 1.0))) continue;
      Vector g(2);
      g << std::cos(mu + phi), std::sin(mu + phi);
      out.push_back(std::move(g));
    }
    return out;
  }

  const double dm1 = d - 1.0;
  const double b = dm1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + dm1 * dm1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + dm1 * std::log(1.0 - x0 * x0);
  std::gamma_distribution<double> gamma(0.5 * dm1, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vector& theta = state.meanDirection;

  while (out.size() < n) {
    const double ga = gamma(rng);
    const double gb = gamma(rng);
    const double z = ga / (ga + gb);
    const double w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = unif(rng);
    if (kappa * w + dm1 * std::log(1.0 - x0 * w) - c < std::log(u)) continue;

    Vector v(d);
    double vn = 0.0;
    do {
      for (int i = 0; i < d; ++i) v[i] = normal(rng);
      v -= v.dot(theta) * theta;
      vn = v.norm();
    } while (vn < 1e-12);
    out.push_back(w * theta + std::sqrt(std::max(0.0, 1.0 - w * w)) * (v / vn));
  }
  return out;
}

double planarAngle(const Vector& g) {
  requirePlanar(g.size(), "planarAngle");
  double a = std::atan2(g[1], g[0]);
  if (a < 0.0) a += kTwoPi;
  return a >= kTwoPi ? 0.0 : a;
}

int angleBin(double angle, int bins) {
  const int b = static_cast<int>(std::floor(angle / (kTwoPi / bins)));
  return std::clamp(b, 0, bins - 1);
}

OracleResult rejectionPosteriorOracle(const VmfState& prior, std::span<const Vector> suggestionSamples,
                                      const Vector& basePoint, std::size_t pairCount, std::uint64_t seed) {
  requirePlanar(prior.dim(), "rejectionPosteriorOracle");
  requirePlanar(basePoint.size(), "rejectionPosteriorOracle");
  if (pairCount < 1000) throw InvalidArgument("rejectionPosteriorOracle requires pairCount >= 1000");

  std::vector<Vector> directions;
  directions.reserve(suggestionSamples.size());
  for (const Vector& x : suggestionSamples) {
    requirePlanar(x.size(), "rejectionPosteriorOracle sample");
    const Vector diff = x - basePoint;
    const double n = diff.norm();
    if (n > kCoincident) directions.push_back(diff / n);
  }
  if (directions.empty()) throw DegenerateDirection("all suggestion samples coincide with the base point");

  const auto priorDraws = sampleVmf(prior, pairCount, deriveSeed(seed, {1}));
  Rng rng(deriveSeed(seed, {2}));
  std::uniform_int_distribution<std::size_t> pick(0, directions.size() - 1);

  OracleResult out;
  out.pairs = pairCount;
  out.histogram.assign(kOracleBins, 0.0);
  out.acceptedResultant = Vector::Zero(2);
  for (const Vector& gt : priorDraws) {
    const Vector& cand = directions[pick(rng)];
    if (cand.dot(gt) < 0.0) continue;
    ++out.accepted;
    out.acceptedResultant += cand;
    out.histogram[static_cast<std::size_t>(angleBin(planarAngle(cand)))] += 1.0;
  }
  out.acceptanceRate = static_cast<double>(out.accepted) / static_cast<double>(pairCount);
  out.starved = out.acceptanceRate < 0.01;
  if (out.accepted > 0) {
    for (double& h : out.histogram) h /= static_cast<double>(out.accepted);
  }
  return out;
}

std::vector<double> vmfBinProbabilities(const VmfState& state, int bins) {
  requirePlanar(state.dim(), "vmfBinProbabilities");
  if (bins < 1) throw InvalidArgument("bin count must be positive");
  const double mu = std::atan2(state.meanDirection[1], state.meanDirection[0]);
  const double logC = logNormConst(2, state.concentration);
  const double width = kTwoPi / bins;
  constexpr int kPanels = 64;  // Simpson, even
  const double h = width / kPanels;
  std::vector<double> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    const double a0 = b * width;
    double acc = 0.0;
    for (int i = 0; i <= kPanels; ++i) {
      const double w = (i == 0 || i == kPanels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += w * std::exp(logC + state.concentration * std::cos(a0 + i * h - mu));
    }
    out[static_cast<std::size_t>(b)] = acc * h / 3.0;
  }
  return out;
}

double totalVariation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionMismatch("totalVariation: histograms differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

HistogramDensity::HistogramDensity(std::span<const double> histogram, std::size_t sampleCount) {
  if (histogram.empty()) throw InvalidArgument("histogram is empty");
  const double bins = static_cast<double>(histogram.size());
  const double n = static_cast<double>(sampleCount);
  const double width = kTwoPi / bins;
  density_.reserve(histogram.size());
  for (double h : histogram) density_.push_back((h * n + 1.0) / (n + bins) / width);
}

double HistogramDensity::logPdf(const Vector& g) const {
  const int bins = static_cast<int>(density_.size());
  const double u = planarAngle(g) / (kTwoPi / bins) - 0.5;
  const double fl = std::floor(u);
  const double frac = u - fl;
  const int i0 = ((static_cast<int>(fl) % bins) + bins) % bins;
  const int i1 = (i0 + 1) % bins;
  return std::log((1.0 - frac) * density_[static_cast<std::size_t>(i0)] + frac * density_[static_cast<std::size_t>(i1)]);
}

}  // namespace dcbo
