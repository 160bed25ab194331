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

#include "dcbo/surrogate.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dcbo/errors.hpp"

namespace dcbo {

Box::Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw DimensionMismatch("box bounds differ in length");
  if (lo.size() == 0) throw InvalidArgument("box must have at least one dimension");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      throw InvalidArgument("box requires finite lo[i] < hi[i] (dimension " + std::to_string(i) + ")");
    }
  }
}

bool Box::contains(const Vector& x) const {
  if (x.size() != lo.size()) return false;
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

void Dataset::append(const Vector& x, double value, std::optional<double> constraint) {
  if (!points.empty() && x.size() != points.front().size()) {
    throw DimensionMismatch("appended point has dimension " + std::to_string(x.size()) + ", dataset has " +
                            std::to_string(points.front().size()));
  }
  if (constraint.has_value() != constraintValues.has_value() && !points.empty()) {
    throw InvalidArgument("constraint value presence must match the dataset");
  }
  points.push_back(x);
  values.push_back(value);
  if (constraint) {
    if (!constraintValues) constraintValues.emplace();
    constraintValues->push_back(*constraint);
  }
}

void Dataset::validate(const Box* box) const {
  if (values.size() != points.size()) throw InvalidArgument("dataset values and points differ in length");
  if (constraintValues && constraintValues->size() != points.size()) {
    throw InvalidArgument("dataset constraint values and points differ in length");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != points.front().size()) throw DimensionMismatch("ragged dataset points");
    if (!std::isfinite(values[i])) throw InvalidArgument("non-finite objective value at index " + std::to_string(i));
    if (constraintValues && !std::isfinite((*constraintValues)[i])) {
      throw InvalidArgument("non-finite constraint value at index " + std::to_string(i));
    }
    if (box != nullptr && !box->contains(points[i])) {
      throw InvalidArgument("dataset point " + std::to_string(i) + " lies outside the box");
    }
  }
}

std::string_view toString(KernelVariant v) {
  switch (v) {
    case KernelVariant::AsWritten:
      return "as-written";
    case KernelVariant::Squared:
      return "squared";
  }
  return "unknown";
}

KernelVariant kernelVariantFromString(std::string_view s) {
  if (s == "as-written") return KernelVariant::AsWritten;
  if (s == "squared") return KernelVariant::Squared;
  throw InvalidArgument("unknown kernel variant '" + std::string(s) + "'");
}

void KernelParams::validate() const {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) throw InvalidArgument("lengthscale must be positive");
  if (!(noiseJitter >= 0.0) || !std::isfinite(noiseJitter)) throw InvalidArgument("noise jitter must be >= 0");
}

namespace {

inline double kernelFromSquaredDistance(double sq, const KernelParams& p) {
  const double r = p.variant == KernelVariant::Squared ? sq : std::sqrt(sq);
  return std::exp(-r / (2.0 * p.lengthscale));
}

void requireDim(Eigen::Index got, Eigen::Index want) {
  if (got != want) {
    throw DimensionMismatch("dimension mismatch: got " + std::to_string(got) + ", expected " + std::to_string(want));
  }
}

}  // namespace

double kernel(const Vector& xi, const Vector& xj, const KernelParams& params) {
  requireDim(xj.size(), xi.size());
  return kernelFromSquaredDistance((xi - xj).squaredNorm(), params);
}

Matrix gramMatrix(std::span<const Vector> points, const KernelParams& params) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernelFromSquaredDistance((points[i] - points[j]).squaredNorm(), params);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

std::optional<Matrix> choleskyWithJitter(const Matrix& a, double jitter, double* usedJitter) {
  std::vector<double> ladder{jitter};
  if (jitter > 0.0) {
    for (double j : kJitterLadder) {
      if (j > jitter) ladder.push_back(j);
    }
  }
  for (double j : ladder) {
    Matrix shifted = a;
    shifted.diagonal().array() += j;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Matrix l = llt.matrixL();
    const auto diag = l.diagonal().array();
    if (!diag.isFinite().all() || (diag <= 0.0).any()) continue;
    if (usedJitter != nullptr) *usedJitter = j;
    return l;
  }
  return std::nullopt;
}

GpModel GpModel::fit(const Dataset& data, const KernelParams& params) {
  data.validate();
  Vector y = Eigen::Map<const Vector>(data.values.data(), static_cast<Eigen::Index>(data.values.size()));
  return fit(data.points, std::move(y), params);
}

GpModel GpModel::fit(std::vector<Vector> points, Vector targets, const KernelParams& params) {
  params.validate();
  if (points.empty()) throw InvalidArgument("cannot fit a GP to an empty dataset");
  if (static_cast<Eigen::Index>(points.size()) != targets.size()) {
    throw InvalidArgument("points and targets differ in length");
  }
  for (const auto& p : points) requireDim(p.size(), points.front().size());

  GpModel model;
  model.params_ = params;
  const Matrix k = gramMatrix(points, params);
  auto chol = choleskyWithJitter(k, params.noiseJitter, &model.jitter_);
  if (!chol) {
    throw IllConditionedKernel("kernel matrix of " + std::to_string(points.size()) +
                               " points is not positive definite after jitter escalation");
  }
  model.chol_ = std::move(*chol);
  model.alpha_ = model.chol_.transpose().triangularView<Eigen::Upper>().solve(
      model.chol_.triangularView<Eigen::Lower>().solve(targets));
  model.points_ = std::move(points);
  model.targets_ = std::move(targets);
  return model;
}

Vector GpModel::crossKernel(const Vector& x) const {
  requireDim(x.size(), dim());
  Vector k(static_cast<Eigen::Index>(points_.size()));
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    k[i] = kernelFromSquaredDistance((points_[static_cast<std::size_t>(i)] - x).squaredNorm(), params_);
  }
  return k;
}

Matrix GpModel::crossKernel(std::span<const Vector> xs) const {
  const auto n = static_cast<Eigen::Index>(points_.size());
  Matrix k(n, static_cast<Eigen::Index>(xs.size()));
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    const Vector& x = xs[static_cast<std::size_t>(j)];
    requireDim(x.size(), dim());
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, j) = kernelFromSquaredDistance((points_[static_cast<std::size_t>(i)] - x).squaredNorm(), params_);
    }
  }
  return k;
}

Prediction GpModel::predict(const Vector& x) const {
  const Vector k = crossKernel(x);
  const Vector v = chol_.triangularView<Eigen::Lower>().solve(k);
  return {k.dot(alpha_), std::max(0.0, 1.0 - v.squaredNorm())};
}

void GpModel::predict(std::span<const Vector> xs, Vector& mean, Vector& variance) const {
  const Matrix k = crossKernel(xs);
  const Matrix v = chol_.triangularView<Eigen::Lower>().solve(k);
  mean = k.transpose() * alpha_;
  variance = (1.0 - v.colwise().squaredNorm().array()).max(0.0).matrix().transpose();
}

JointPosterior GpModel::jointPosterior(std::span<const Vector> xs) const {
  const Matrix k = crossKernel(xs);
  const Matrix v = chol_.triangularView<Eigen::Lower>().solve(k);
  JointPosterior post;
  post.mean = k.transpose() * alpha_;
  post.covariance = gramMatrix(xs, params_);
  post.covariance.noalias() -= v.transpose() * v;
  return post;
}

double GpModel::logMarginalLikelihood() const {
  const double n = static_cast<double>(targets_.size());
  return -0.5 * targets_.dot(alpha_) - chol_.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

std::vector<double> logSpaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw InvalidArgument("logSpaced requires 0 < lo <= hi and count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + step * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<KernelParams> lengthscaleGrid(const KernelParams& base, std::span<const double> lengthscales) {
  std::vector<KernelParams> grid;
  grid.reserve(lengthscales.size());
  for (double l : lengthscales) {
    KernelParams p = base;
    p.lengthscale = l;
    grid.push_back(p);
  }
  return grid;
}

KernelParams selectHyperparams(const Dataset& data, std::span<const KernelParams> grid) {
  data.validate();
  Vector y = Eigen::Map<const Vector>(data.values.data(), static_cast<Eigen::Index>(data.values.size()));
  return selectHyperparams(data.points, y, grid);
}

KernelParams selectHyperparams(const std::vector<Vector>& points, const Vector& targets,
                               std::span<const KernelParams> grid) {
  if (grid.empty()) throw InvalidArgument("hyperparameter grid is empty");
  const KernelParams* best = nullptr;
  double bestLml = -std::numeric_limits<double>::infinity();
  for (const auto& p : grid) {
    double lml;
    try {
      lml = GpModel::fit(points, targets, p).logMarginalLikelihood();
    } catch (const IllConditionedKernel&) {
      continue;
    }
    if (!std::isfinite(lml)) continue;
    if (best == nullptr || lml > bestLml || (lml == bestLml && p.lengthscale < best->lengthscale)) {
      best = &p;
      bestLml = lml;
    }
  }
  if (best == nullptr) throw IllConditionedKernel("no hyperparameter grid element produced a valid fit");
  return *best;
}

}  // namespace dcbo
