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

#include "dictsel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <sstream>
#include <utility>

#include "dictsel/errors.hpp"

namespace dictsel {

SupportFactorization::SupportFactorization(Eigen::Index dim)
    : dim_(dim), q_(dim, 0), r_(0, 0) {}

void SupportFactorization::insert(const Matrix& atoms, int atom) {
  if (atom < 0 || atom >= atoms.cols()) {
    throw InvalidArgument("atom index out of range");
  }
  insert_column(atom, atoms.col(atom));
}

void SupportFactorization::insert_column(int label,
                                         const Eigen::Ref<const Vector>& column) {
  if (column.size() != dim_) {
    throw DimensionMismatch("column length does not match factorization");
  }
  if (position_of(label)) {
    throw InvalidArgument("atom already in support");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(columns_.size());
  const double norm = column.norm();
  if (m >= dim_ || norm == 0.0) {
    throw RankDeficient("column cannot extend a full-rank support");
  }

  Vector coeffs = q_.transpose() * column;
  Vector v = column - q_ * coeffs;
  // A second pass keeps Q orthonormal to working precision.
  const Vector correction = q_.transpose() * v;
  v -= q_ * correction;
  coeffs += correction;

  const double rho = v.norm();
  if (rho < kRankTolerance * norm) {
    throw RankDeficient("column is numerically dependent on the support");
  }

  q_.conservativeResize(dim_, m + 1);
  q_.col(m) = v / rho;
  r_.conservativeResize(m + 1, m + 1);
  r_.row(m).setZero();
  r_.col(m).head(m) = coeffs;
  r_(m, m) = rho;
  columns_.push_back(label);
}

void SupportFactorization::remove(std::size_t position) {
  const Eigen::Index m = static_cast<Eigen::Index>(columns_.size());
  const auto p = static_cast<Eigen::Index>(position);
  if (p >= m) throw InvalidArgument("support position out of range");

  // Deleting column p leaves R upper Hessenberg from column p onward.
  for (Eigen::Index col = p; col + 1 < m; ++col) {
    r_.col(col) = r_.col(col + 1);
  }
  for (Eigen::Index j = p; j + 1 < m; ++j) {
    const double a = r_(j, j);
    const double b = r_(j + 1, j);
    const double h = std::hypot(a, b);
    if (h == 0.0) continue;
    const double c = a / h;
    const double s = b / h;
    for (Eigen::Index l = j; l + 1 < m; ++l) {
      const double x = r_(j, l);
      const double y = r_(j + 1, l);
      r_(j, l) = c * x + s * y;
      r_(j + 1, l) = -s * x + c * y;
    }
    r_(j + 1, j) = 0.0;
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const double x = q_(i, j);
      const double y = q_(i, j + 1);
      q_(i, j) = c * x + s * y;
      q_(i, j + 1) = -s * x + c * y;
    }
  }
  q_.conservativeResize(dim_, m - 1);
  r_.conservativeResize(m - 1, m - 1);
  columns_.erase(columns_.begin() + p);
}

Vector SupportFactorization::solve(const Eigen::Ref<const Vector>& y) const {
  if (columns_.empty()) return Vector(0);
  const Vector qty = q_.transpose() * y;
  return r_.triangularView<Eigen::Upper>().solve(qty);
}

Vector SupportFactorization::residual(const Eigen::Ref<const Vector>& y) const {
  if (columns_.empty()) return y;
  return y - q_ * (q_.transpose() * y);
}

std::optional<std::size_t> SupportFactorization::position_of(int atom) const {
  const auto it = std::find(columns_.begin(), columns_.end(), atom);
  if (it == columns_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns_.begin());
}

Vector ls_solve(const Matrix& atoms, std::span<const int> support,
                const Eigen::Ref<const Vector>& y) {
  if (y.size() != atoms.rows()) {
    throw DimensionMismatch("target length does not match atom dimension");
  }
  Vector full = Vector::Zero(atoms.cols());
  if (support.empty()) return full;
  SupportFactorization factor(atoms.rows());
  for (int atom : support) {
    if (factor.position_of(atom)) {
      throw RankDeficient("support lists an atom twice");
    }
    factor.insert(atoms, atom);
  }
  const Vector w = factor.solve(y);
  for (std::size_t i = 0; i < support.size(); ++i) {
    full(support[i]) = w(static_cast<Eigen::Index>(i));
  }
  return full;
}

void validate_unit_columns(const Matrix& atoms, double tol) {
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    const double norm = atoms.col(j).norm();
    if (!(std::abs(norm - 1.0) <= tol)) {
      std::ostringstream msg;
      msg << "column " << j << " has norm " << norm << ", expected 1";
      throw InvalidGroundSet(msg.str());
    }
  }
}

double coherence(const Matrix& atoms) {
  validate_unit_columns(atoms);
  const Eigen::Index n = atoms.cols();
  if (n < 2) return 0.0;
  const Matrix gram = atoms.transpose() * atoms;
  double mu = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      mu = std::max(mu, std::abs(gram(i, j)));
    }
  }
  return std::min(mu, 1.0);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double value = 1.0;
  for (int i = 1; i <= k; ++i) {
    value = value * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(value);
}

namespace {

// Calls visit(indices) for every k-subset of {0..n-1} in lexicographic order.
template <typename Visit>
void for_each_combination(int n, int k, Visit&& visit) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(std::as_const(idx));
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace

RestrictedSpectrum restricted_spectrum(const Matrix& atoms, int size,
                                       SpectrumMode mode) {
  if (size < 1) throw InvalidArgument("restricted spectrum size must be >= 1");
  const int n = static_cast<int>(atoms.cols());
  if (n < 1) throw InvalidGroundSet("empty atom matrix");

  RestrictedSpectrum out;
  out.size = size;
  const int k = std::min(size, n);

  if (k == 1) {
    const Vector sq = atoms.colwise().squaredNorm();
    out.sigma_max_sq = sq.maxCoeff();
    out.sigma_min_sq = sq.minCoeff();
    return out;
  }
  if (k == 2 && mode == SpectrumMode::kAuto) {
    const double mu = coherence(atoms);
    out.sigma_max_sq = 1.0 + mu;
    out.sigma_min_sq = 1.0 - mu;
    out.exact = false;
    return out;
  }
  if (binomial(n, k) > kSpectrumEnumerationLimit) {
    throw TooLarge("restricted spectrum enumeration exceeds subset limit");
  }

  const Matrix gram = atoms.transpose() * atoms;
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  Matrix sub(k, k);
  Eigen::SelfAdjointEigenSolver<Matrix> solver;
  for_each_combination(n, k, [&](const std::vector<int>& idx) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        sub(a, b) = gram(idx[static_cast<std::size_t>(a)],
                         idx[static_cast<std::size_t>(b)]);
      }
    }
    solver.compute(sub, Eigen::EigenvaluesOnly);
    const Vector& ev = solver.eigenvalues();
    hi = std::max(hi, ev(k - 1));
    lo = std::min(lo, ev(0));
  });
  out.sigma_max_sq = hi;
  out.sigma_min_sq = std::max(lo, 0.0);
  return out;
}

}  // namespace dictsel
