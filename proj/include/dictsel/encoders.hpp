// Copyright 2026 The Authors.
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

// Sparse coding inside a fixed dictionary and the squared-l2 utility
//
//   u(y, A w) = 1/2 ||y||^2 - 1/2 ||y - A w||^2,
//
// whose value at the least-squares coefficients of a support Z is f_t(Z).
// The 1/2 factor is global, so it never changes which atom a selector picks.

#ifndef DICTSEL_ENCODERS_HPP_
#define DICTSEL_ENCODERS_HPP_

#include <vector>

#include "dictsel/linalg.hpp"

namespace dictsel {

struct SparseCode {
  std::vector<int> support;  // dictionary column indices, in selection order
  Vector coefficients;       // aligned with support
  double residual_sq = 0.0;  // ||y - D_support * coefficients||^2
};

// Orthogonal matching pursuit: repeatedly add the column with the largest
// normalized |<d_j, r>|, re-solve least squares on the support, and stop after
// s columns, once ||r|| <= 1e-10, or when no column correlates with r above
// 1e-10 ||y||. Columns that are numerically dependent on the support are
// skipped.
SparseCode omp_encode(const Matrix& dictionary, const Eigen::Ref<const Vector>& y,
                      int s);

// OMP restricted to the observed coordinates: inner products, least squares
// and the reported residual only use rows where observed[i] is true.
SparseCode omp_encode_masked(const Matrix& dictionary,
                             const Eigen::Ref<const Vector>& y, int s,
                             const std::vector<bool>& observed);

// D_support * coefficients.
Vector reconstruct(const Matrix& dictionary, const SparseCode& code);

// 1/2 ||y||^2 - 1/2 ||y - A w||^2.
double utility(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& w,
               const Matrix& atoms);

// grad_w u = A^T (y - A w).
Vector utility_gradient(const Eigen::Ref<const Vector>& y,
                        const Eigen::Ref<const Vector>& w, const Matrix& atoms);

// f_t(Z + a) - f_t(Z) + offset for every column a of `atoms`, where Z is the
// factorized support and `gradient` = A^T (y - P_Z y). Computed as
// 1/2 (a^T r)^2 / ||(I - Q Q^T) a||^2; columns dependent on Z get -infinity.
Vector addition_gains(const SupportFactorization& factor,
                      const Eigen::Ref<const Vector>& gradient, const Matrix& atoms,
                      double offset = 0.0);

}  // namespace dictsel

#endif  // DICTSEL_ENCODERS_HPP_
