// Copyright 2026 The LinReBoot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense symmetric linear algebra for online ridge regression.

#ifndef LINREBOOT_LINALG_HPP_
#define LINREBOOT_LINALG_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace linreboot::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Sufficient statistics of a ridge regression fit: the regularized Gram
/// matrix V = X'X + lambda*I, its inverse, and the cross moment X'Y.
///
/// The inverse is maintained with the Sherman-Morrison rank-one identity and
/// re-derived from V by a direct Cholesky inversion every
/// `kRefreshInterval` updates, which bounds accumulated round-off.
class GramState {
 public:
  static constexpr std::size_t kRefreshInterval = 1000;

  /// Throws ConfigError when dim == 0 or lambda <= 0.
  GramState(std::size_t dim, double lambda);

  /// V += x x', b += y x. Throws DimensionError on a length mismatch.
  void update(const VectorRef& x, double y);

  /// Ridge estimate V^{-1} b.
  Vector ridge_fit() const;

  /// sqrt(x' V^{-1} x).
  double vinv_norm(const VectorRef& x) const;

  std::size_t dim() const { return static_cast<std::size_t>(gram_.rows()); }
  double lambda() const { return lambda_; }
  std::size_t num_updates() const { return updates_; }
  const Matrix& gram() const { return gram_; }
  const Matrix& gram_inverse() const { return gram_inv_; }
  const Vector& cross_moment() const { return cross_; }

 private:
  void check_dim(const VectorRef& x) const;
  void refresh_inverse();

  double lambda_;
  std::size_t updates_ = 0;
  Matrix gram_;
  Matrix gram_inv_;
  Vector cross_;
  Vector scratch_;
};

/// Singular-value summary of a context matrix X_K (rows = arms).
struct Spectrum {
  std::vector<double> singular_values;  // nonzero values only, descending
  std::size_t rank = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Singular values below `rel_tol * sigma_max` count as zero.
Spectrum context_spectrum(const MatrixRef& contexts, double rel_tol = 1e-12);

struct ShrinkageGap {
  double value = 0.0;
  // All-zero context matrix: the shrinkage lower bound cannot hold.
  bool degenerate = false;
};

/// |x_1'theta - z_1'theta| where Z = G Omega Sigma U is the ridge-shrunk
/// context matrix built from the SVD X_K = G Sigma U and
/// Omega = Sigma (Sigma'Sigma + lambda I)^{-1} Sigma'. Row 0 of `contexts`
/// is taken to be the optimal arm.
ShrinkageGap shrinkage_gap(const MatrixRef& contexts, const VectorRef& theta,
                           double lambda);

/// Max-absolute-entry distance of `a * b` from the identity.
double identity_residual(const MatrixRef& a, const MatrixRef& b);

}  // namespace linreboot::linalg

#endif  // LINREBOOT_LINALG_HPP_
