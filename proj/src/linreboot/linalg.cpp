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

#include "linreboot/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linreboot/errors.hpp"

namespace linreboot::linalg {

GramState::GramState(std::size_t dim, double lambda) : lambda_(lambda) {
  if (dim == 0) throw ConfigError("gram: dimension must be at least 1");
  if (!(lambda > 0.0)) {
    throw ConfigError("gram: lambda must be positive, got " +
                      std::to_string(lambda));
  }
  const auto d = static_cast<Eigen::Index>(dim);
  gram_ = lambda * Matrix::Identity(d, d);
  gram_inv_ = (1.0 / lambda) * Matrix::Identity(d, d);
  cross_ = Vector::Zero(d);
  scratch_ = Vector::Zero(d);
}

void GramState::check_dim(const VectorRef& x) const {
  if (x.size() != gram_.rows()) {
    throw DimensionError("gram: expected vector of length " +
                         std::to_string(gram_.rows()) + ", got " +
                         std::to_string(x.size()));
  }
}

void GramState::update(const VectorRef& x, double y) {
  check_dim(x);
  gram_.noalias() += x * x.transpose();
  cross_.noalias() += y * x;
  ++updates_;

  if (updates_ % kRefreshInterval == 0) {
    refresh_inverse();
    return;
  }
  // (V + xx')^{-1} = V^{-1} - (V^{-1}x)(V^{-1}x)' / (1 + x'V^{-1}x)
  scratch_.noalias() = gram_inv_ * x;
  const double denom = 1.0 + x.dot(scratch_);
  gram_inv_.noalias() -= (scratch_ / denom) * scratch_.transpose();
  gram_inv_ = 0.5 * (gram_inv_ + gram_inv_.transpose()).eval();
}

void GramState::refresh_inverse() {
  const Eigen::LLT<Matrix> llt(gram_);
  if (llt.info() != Eigen::Success) {
    throw RuntimeError("gram: V lost positive definiteness");
  }
  gram_inv_ = llt.solve(Matrix::Identity(gram_.rows(), gram_.cols()));
  gram_inv_ = 0.5 * (gram_inv_ + gram_inv_.transpose()).eval();
}

Vector GramState::ridge_fit() const { return gram_inv_ * cross_; }

double GramState::vinv_norm(const VectorRef& x) const {
  check_dim(x);
  const double q = x.dot(gram_inv_ * x);
  return std::sqrt(std::max(q, 0.0));
}

Spectrum context_spectrum(const MatrixRef& contexts, double rel_tol) {
  Spectrum out;
  if (contexts.size() == 0) return out;
  const Eigen::JacobiSVD<Matrix> svd(contexts);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return out;
  const double cutoff = rel_tol * sv(0);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) out.singular_values.push_back(sv(i));
  }
  out.rank = out.singular_values.size();
  out.sigma_max = out.singular_values.front();
  out.sigma_min = out.singular_values.back();
  return out;
}

ShrinkageGap shrinkage_gap(const MatrixRef& contexts, const VectorRef& theta,
                           double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("shrinkage_gap: lambda must be positive");
  if (contexts.rows() < 1) throw DimensionError("shrinkage_gap: no contexts");
  if (contexts.cols() != theta.size()) {
    throw DimensionError("shrinkage_gap: theta length does not match contexts");
  }
  if (contexts.cwiseAbs().maxCoeff() == 0.0) return {0.0, true};

  // X_K = G Sigma U with G = svd.matrixU() and U = svd.matrixV()'.
  const Eigen::JacobiSVD<Matrix> svd(contexts,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const Matrix& g = svd.matrixU();
  const Matrix& v = svd.matrixV();
  const double cutoff = 1e-12 * sv(0);

  // Omega Sigma is diagonal with entries sigma^3 / (sigma^2 + lambda).
  Vector z1 = Vector::Zero(contexts.cols());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double s = sv(i);
    if (s <= cutoff) continue;
    const double omega_sigma = s * s * s / (s * s + lambda);
    z1.noalias() += (g(0, i) * omega_sigma) * v.col(i);
  }
  const double gap = std::abs(contexts.row(0).dot(theta) - z1.dot(theta));
  return {gap, false};
}

double identity_residual(const MatrixRef& a, const MatrixRef& b) {
  const Matrix prod = a * b;
  return (prod - Matrix::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff();
}

}  // namespace linreboot::linalg
