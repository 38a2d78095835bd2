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

// Dense kernels shared by the selectors: least squares on a support through an
// incrementally maintained thin QR factorization, mutual coherence, and the
// restricted extremal singular values sigma_max(A, k) and sigma_min(A, k).

#ifndef DICTSEL_LINALG_HPP_
#define DICTSEL_LINALG_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dictsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Columns whose projection residual (or |R_ii|) falls below this, relative to
// the column norm, are treated as linearly dependent.
inline constexpr double kRankTolerance = 1e-10;

// Thin QR factorization Q * R of the columns of a matrix restricted to an
// ordered support. Q is d x m with orthonormal columns, R is m x m upper
// triangular. Insertion appends a column (Gram-Schmidt with one
// reorthogonalization pass); removal deletes a column and restores the
// triangular shape with Givens rotations. Both cost O(d m).
class SupportFactorization {
 public:
  explicit SupportFactorization(Eigen::Index dim = 0);

  // Appends column `atom` of `atoms`. Throws RankDeficient when the column is
  // numerically in the span of the current support or the support is full
  // (m == d), InvalidArgument when the atom is already present.
  void insert(const Matrix& atoms, int atom);

  // Same as above for an explicit column vector tagged with `label`. Used by
  // masked encoding, where the stored column is a row-restriction of an atom.
  void insert_column(int label, const Eigen::Ref<const Vector>& column);

  // Removes the column at `position` (0-based index into columns()).
  void remove(std::size_t position);

  // Least-squares coefficients for y, aligned with columns().
  Vector solve(const Eigen::Ref<const Vector>& y) const;

  // y minus its orthogonal projection onto the span of the support.
  Vector residual(const Eigen::Ref<const Vector>& y) const;

  std::optional<std::size_t> position_of(int atom) const;

  const std::vector<int>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  bool empty() const { return columns_.empty(); }
  Eigen::Index dim() const { return dim_; }
  const Matrix& q() const { return q_; }
  const Matrix& r() const { return r_; }

 private:
  Eigen::Index dim_ = 0;
  std::vector<int> columns_;
  Matrix q_;
  Matrix r_;
};

// Least-squares coefficients of y on the columns `support` of `atoms`,
// returned as a length-n vector that is zero outside the support.
// Throws RankDeficient for dependent support columns.
Vector ls_solve(const Matrix& atoms, std::span<const int> support,
                const Eigen::Ref<const Vector>& y);

// Throws InvalidGroundSet unless every column has unit norm to within `tol`.
void validate_unit_columns(const Matrix& atoms, double tol = 1e-8);

// max_{i != j} |<a_i, a_j>| over unit-norm columns; 0 for a single column.
double coherence(const Matrix& atoms);

struct RestrictedSpectrum {
  int size = 1;
  double sigma_max_sq = 1.0;
  double sigma_min_sq = 1.0;
  bool exact = true;  // false when the size-2 coherence shortcut was used
};

enum class SpectrumMode {
  kAuto,   // size 2 uses 1 +/- coherence, larger sizes enumerate
  kExact,  // always enumerate subsets
};

// Maximum subsets enumerated by restricted_spectrum before TooLarge.
inline constexpr double kSpectrumEnumerationLimit = 1e6;

// Extremal eigenvalues of A_X^T A_X over column subsets |X| <= size, that is
// sigma_max^2(A, size) and sigma_min^2(A, size). The extremes are attained at
// |X| = min(size, n) by eigenvalue interlacing, so only those are enumerated.
RestrictedSpectrum restricted_spectrum(const Matrix& atoms, int size,
                                       SpectrumMode mode = SpectrumMode::kAuto);

// Number of k-subsets of an n-set as a double (saturates instead of
// overflowing).
double binomial(int n, int k);

}  // namespace dictsel

#endif  // DICTSEL_LINALG_HPP_
