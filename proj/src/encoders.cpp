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

#include "dictsel/encoders.hpp"

#include <cmath>
#include <limits>

#include "dictsel/errors.hpp"

namespace dictsel {

namespace {

constexpr double kResidualFloor = 1e-10;
constexpr double kCorrelationFloor = 1e-10;

SparseCode omp_core(const Matrix& dict, const Eigen::Ref<const Vector>& y, int s) {
  if (dict.cols() == 0) throw InvalidArgument("OMP needs a nonempty dictionary");
  if (s < 0) throw InvalidArgument("sparsity must be >= 0");
  if (y.size() != dict.rows()) throw DimensionMismatch("target length mismatch");

  const Vector norms = dict.colwise().norm();
  std::vector<bool> usable(static_cast<std::size_t>(dict.cols()));
  for (Eigen::Index j = 0; j < dict.cols(); ++j) {
    usable[static_cast<std::size_t>(j)] = norms(j) > 0.0;
  }

  SupportFactorization factor(dict.rows());
  Vector residual = y;
  Vector w(0);
  const double y_norm = y.norm();

  while (static_cast<int>(factor.size()) < s && residual.norm() > kResidualFloor) {
    const Vector corr = dict.transpose() * residual;
    Eigen::Index best = -1;
    double best_score = kCorrelationFloor * y_norm;
    for (Eigen::Index j = 0; j < dict.cols(); ++j) {
      if (!usable[static_cast<std::size_t>(j)]) continue;
      const double score = std::abs(corr(j)) / norms(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) break;
    usable[static_cast<std::size_t>(best)] = false;
    try {
      factor.insert_column(static_cast<int>(best), dict.col(best));
    } catch (const RankDeficient&) {
      continue;
    }
    w = factor.solve(y);
    residual = factor.residual(y);
  }

  SparseCode code;
  code.support = factor.columns();
  code.coefficients = w.size() == static_cast<Eigen::Index>(code.support.size())
                          ? w
                          : Vector(Vector::Zero(static_cast<Eigen::Index>(code.support.size())));
  code.residual_sq = residual.squaredNorm();
  return code;
}

}  // namespace

SparseCode omp_encode(const Matrix& dictionary, const Eigen::Ref<const Vector>& y,
                      int s) {
  return omp_core(dictionary, y, s);
}

SparseCode omp_encode_masked(const Matrix& dictionary,
                             const Eigen::Ref<const Vector>& y, int s,
                             const std::vector<bool>& observed) {
  if (static_cast<Eigen::Index>(observed.size()) != dictionary.rows() ||
      y.size() != dictionary.rows()) {
    throw DimensionMismatch("mask length must equal the atom dimension");
  }
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (observed[i]) rows.push_back(static_cast<Eigen::Index>(i));
  }
  const Matrix sub_dict = dictionary(rows, Eigen::all);
  const Vector sub_y = y(rows);
  if (rows.empty()) {
    return SparseCode{{}, Vector(0), 0.0};
  }
  return omp_core(sub_dict, sub_y, s);
}

Vector reconstruct(const Matrix& dictionary, const SparseCode& code) {
  Vector out = Vector::Zero(dictionary.rows());
  for (std::size_t i = 0; i < code.support.size(); ++i) {
    out += code.coefficients(static_cast<Eigen::Index>(i)) * dictionary.col(code.support[i]);
  }
  return out;
}

double utility(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& w,
               const Matrix& atoms) {
  return 0.5 * y.squaredNorm() - 0.5 * (y - atoms * w).squaredNorm();
}

Vector utility_gradient(const Eigen::Ref<const Vector>& y,
                        const Eigen::Ref<const Vector>& w, const Matrix& atoms) {
  return atoms.transpose() * (y - atoms * w);
}

Vector addition_gains(const SupportFactorization& factor,
                      const Eigen::Ref<const Vector>& gradient, const Matrix& atoms,
                      double offset) {
  const Eigen::Index n = atoms.cols();
  const Vector norm_sq = atoms.colwise().squaredNorm();
  Vector proj_sq = norm_sq;
  if (!factor.empty()) proj_sq -= (factor.q().transpose() * atoms).colwise().squaredNorm();
  Vector out(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    double p = proj_sq(a);
    if (p < 1e-8 * norm_sq(a) && !factor.empty()) {
      // Cancellation in ||a||^2 - ||Q^T a||^2; project explicitly instead.
      Vector v = atoms.col(a) - factor.q() * (factor.q().transpose() * atoms.col(a));
      v -= factor.q() * (factor.q().transpose() * v);
      p = v.squaredNorm();
    }
    if (!(p >= kRankTolerance * kRankTolerance * norm_sq(a)) || norm_sq(a) == 0.0) {
      out(a) = -std::numeric_limits<double>::infinity();
    } else {
      out(a) = offset + 0.5 * gradient(a) * gradient(a) / p;
    }
  }
  return out;
}

}  // namespace dictsel
