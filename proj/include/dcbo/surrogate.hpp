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

#ifndef DCBO_SURROGATE_HPP
#define DCBO_SURROGATE_HPP

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dcbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned search box, lo[i] < hi[i].
struct Box {
  Vector lo;
  Vector hi;

  Box(Vector lo_, Vector hi_);

  Eigen::Index dim() const noexcept { return lo.size(); }
  bool contains(const Vector& x) const;
  bool operator==(const Box& other) const { return lo == other.lo && hi == other.hi; }
};

/// Evaluated points with their objective values and, for constrained
/// problems, constraint values. All sequences have equal length.
struct Dataset {
  std::vector<Vector> points;
  std::vector<double> values;
  std::optional<std::vector<double>> constraintValues;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  void append(const Vector& x, double value, std::optional<double> constraint = std::nullopt);
  /// Throws InvalidArgument on ragged sequences, non-finite values, or
  /// points outside `box` when one is supplied.
  void validate(const Box* box = nullptr) const;
};

enum class KernelVariant {
  AsWritten,  ///< exp(-|xi - xj| / (2 l))
  Squared,    ///< exp(-|xi - xj|^2 / (2 l))
};

std::string_view toString(KernelVariant v);
KernelVariant kernelVariantFromString(std::string_view s);

struct KernelParams {
  double lengthscale = 1.0;
  double noiseJitter = 1e-8;
  KernelVariant variant = KernelVariant::AsWritten;

  void validate() const;
  bool operator==(const KernelParams&) const = default;
};

double kernel(const Vector& xi, const Vector& xj, const KernelParams& params);

/// Jitter values tried in order when a factorization fails.
inline constexpr double kJitterLadder[] = {1e-10, 1e-8, 1e-6};

struct Prediction {
  double mean;
  double variance;
};

/// Joint posterior over a finite point set.
struct JointPosterior {
  Vector mean;
  Matrix covariance;
};

/// Zero-mean GP regression model. Immutable once fitted.
class GpModel {
 public:
  /// Fits on `data.values`.
  static GpModel fit(const Dataset& data, const KernelParams& params);
  /// Fits on arbitrary targets, e.g. constraint values.
  static GpModel fit(std::vector<Vector> points, Vector targets, const KernelParams& params);

  Prediction predict(const Vector& x) const;
  /// Batched predict; variance is clamped at zero.
  void predict(std::span<const Vector> xs, Vector& mean, Vector& variance) const;
  JointPosterior jointPosterior(std::span<const Vector> xs) const;

  double logMarginalLikelihood() const;

  const Matrix& choleskyFactor() const noexcept { return chol_; }
  const Vector& alpha() const noexcept { return alpha_; }
  const KernelParams& params() const noexcept { return params_; }
  const std::vector<Vector>& points() const noexcept { return points_; }
  const Vector& targets() const noexcept { return targets_; }
  /// Diagonal jitter actually used, after escalation.
  double effectiveJitter() const noexcept { return jitter_; }
  Eigen::Index dim() const noexcept { return points_.front().size(); }

 private:
  GpModel() = default;
  Vector crossKernel(const Vector& x) const;
  Matrix crossKernel(std::span<const Vector> xs) const;

  std::vector<Vector> points_;
  Vector targets_;
  KernelParams params_;
  double jitter_ = 0.0;
  Matrix chol_;
  Vector alpha_;
};

/// Gram matrix K(X, X) without jitter.
Matrix gramMatrix(std::span<const Vector> points, const KernelParams& params);

/// Lower Cholesky factor of `a + jitter I`, escalating through kJitterLadder
/// (values above `jitter`) when `jitter > 0`. Returns nullopt on failure.
/// `usedJitter` receives the jitter that succeeded.
std::optional<Matrix> choleskyWithJitter(const Matrix& a, double jitter, double* usedJitter = nullptr);

/// `count` log-spaced values in [lo, hi].
std::vector<double> logSpaced(double lo, double hi, int count);

/// Grid of kernel params differing only in lengthscale.
std::vector<KernelParams> lengthscaleGrid(const KernelParams& base, std::span<const double> lengthscales);

/// Grid element with the highest log marginal likelihood; ties go to the
/// smallest lengthscale. Elements whose fit fails are skipped.
KernelParams selectHyperparams(const Dataset& data, std::span<const KernelParams> grid);
KernelParams selectHyperparams(const std::vector<Vector>& points, const Vector& targets,
                               std::span<const KernelParams> grid);

}  // namespace dcbo

#endif  // DCBO_SURROGATE_HPP
