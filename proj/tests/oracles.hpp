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

// Reference implementations used only by the tests. Each one takes a route
// unrelated to the library code it checks: normal equations instead of
// incremental QR, SVD instead of Gram eigenvalues, exhaustive enumeration
// instead of greedy queues.

#ifndef DICTSEL_TESTS_ORACLES_HPP_
#define DICTSEL_TESTS_ORACLES_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix select_columns(const Matrix& atoms, const std::vector<int>& support) {
  Matrix out(atoms.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = atoms.col(support[i]);
  }
  return out;
}

// Least squares through (A_S^T A_S) w = A_S^T y.
inline Vector normal_equations(const Matrix& atoms, const std::vector<int>& support,
                               const Vector& y) {
  if (support.empty()) return Vector();
  const Matrix sub = select_columns(atoms, support);
  return (sub.transpose() * sub).ldlt().solve(sub.transpose() * y);
}

// f(S) = max_w 1/2 ||y||^2 - 1/2 ||y - A_S w||^2, via a rank-revealing solve
// so dependent columns are harmless.
inline double subset_utility(const Matrix& atoms, const std::vector<int>& support,
                             const Vector& y) {
  if (support.empty()) return 0.0;
  const Matrix sub = select_columns(atoms, support);
  const Vector w = sub.completeOrthogonalDecomposition().solve(y);
  return 0.5 * y.squaredNorm() - 0.5 * (y - sub * w).squaredNorm();
}

// Calls fn on every size-`size` subset of {0..n-1} in lexicographic order.
inline void for_each_subset(int n, int size, const std::function<void(const std::vector<int>&)>& fn) {
  if (size < 0 || size > n) return;
  std::vector<int> idx(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(idx);
    int i = size - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - size + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j) - 1] + 1;
  }
}

// Extremal squared singular values of A_X over |X| = size, by SVD.
struct Extremes {
  double max_sq = 0.0;
  double min_sq = std::numeric_limits<double>::infinity();
};

inline Extremes subset_singular_values(const Matrix& atoms, int size) {
  Extremes e;
  for_each_subset(static_cast<int>(atoms.cols()), size, [&](const std::vector<int>& s) {
    const Matrix sub = select_columns(atoms, s);
    Eigen::JacobiSVD<Matrix> svd(sub);
    const Vector sv = svd.singularValues();
    e.max_sq = std::max(e.max_sq, sv(0) * sv(0));
    // A tall-or-square submatrix has `size` singular values; a wide one has
    // a zero singular value in the restricted sense.
    const double smallest = sub.cols() > sub.rows() ? 0.0 : sv(sv.size() - 1);
    e.min_sq = std::min(e.min_sq, smallest * smallest);
  });
  return e;
}

// Maximum of sum_{t in A} g_t - sum_{t in B} c_t over A, B subsets of [T]
// with (A intersect tight) within B and |A| <= |B| + theta, by trying all
// 4^T membership patterns.
inline double alg2_exhaustive(const std::vector<double>& g, const std::vector<double>& c,
                              const std::vector<bool>& tight, int theta) {
  const int T = static_cast<int>(g.size());
  double best = 0.0;
  const std::uint64_t total = std::uint64_t{1} << (2 * T);
  for (std::uint64_t code = 0; code < total; ++code) {
    const std::uint64_t add = code & ((std::uint64_t{1} << T) - 1);
    const std::uint64_t rem = code >> T;
    bool ok = true;
    double value = 0.0;
    int na = 0, nb = 0;
    for (int t = 0; t < T && ok; ++t) {
      const bool a = (add >> t) & 1u;
      const bool b = (rem >> t) & 1u;
      if (a && tight[static_cast<std::size_t>(t)] && !b) ok = false;
      if (b && std::isinf(c[static_cast<std::size_t>(t)])) ok = false;
      if (a) {
        value += g[static_cast<std::size_t>(t)];
        ++na;
      }
      if (b) {
        value -= c[static_cast<std::size_t>(t)];
        ++nb;
      }
    }
    if (ok && na <= nb + theta) best = std::max(best, value);
  }
  return best;
}

// Central differences of u(w) = 1/2 ||y||^2 - 1/2 ||y - A w||^2.
inline Vector finite_difference_gradient(const Matrix& atoms, const Vector& y, const Vector& w,
                                         double h) {
  auto u = [&](const Vector& v) { return 0.5 * y.squaredNorm() - 0.5 * (y - atoms * v).squaredNorm(); };
  Vector g(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    Vector plus = w, minus = w;
    plus(i) += h;
    minus(i) -= h;
    g(i) = (u(plus) - u(minus)) / (2.0 * h);
  }
  return g;
}

// Sequences obeying delta_i >= C (v - sum_{j<i} delta_j) - r_i with
// delta_i, r_i >= 0.
struct DecaySequence {
  double c = 0.0;
  double v = 0.0;
  std::vector<double> delta;
  std::vector<double> r;
};

inline DecaySequence make_decay_sequence(std::mt19937_64& rng, int length) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DecaySequence s;
  s.c = unit(rng);
  s.v = 10.0 * unit(rng);
  double sum = 0.0;
  for (int i = 0; i < length; ++i) {
    const double r = unit(rng) < 0.5 ? 0.0 : unit(rng);
    const double floor = s.c * (s.v - sum) - r;
    const double d = std::max(0.0, floor) + (unit(rng) < 0.5 ? 0.0 : 0.3 * unit(rng));
    s.delta.push_back(d);
    s.r.push_back(r);
    sum += d;
  }
  return s;
}

inline bool decay_hypothesis_holds(const DecaySequence& s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.delta.size(); ++i) {
    if (s.delta[i] < 0.0 || s.r[i] < 0.0) return false;
    if (s.delta[i] < s.c * (s.v - sum) - s.r[i]) return false;
    sum += s.delta[i];
  }
  return true;
}

// Checks both bounds of the recursion for every prefix length l:
//   sum_{i<=l} delta_i >= (1 - (1 - C)^l) v - sum r_i >= (1 - e^{-Cl}) v - sum r_i.
inline bool decay_bound_holds(const DecaySequence& s) {
  double sum_delta = 0.0, sum_r = 0.0;
  for (std::size_t l = 1; l <= s.delta.size(); ++l) {
    sum_delta += s.delta[l - 1];
    sum_r += s.r[l - 1];
    const double geometric = (1.0 - std::pow(1.0 - s.c, static_cast<double>(l))) * s.v - sum_r;
    const double exponential = (1.0 - std::exp(-s.c * static_cast<double>(l))) * s.v - sum_r;
    if (sum_delta < geometric || geometric < exponential) return false;
  }
  return true;
}

// max over |X| = k of sum_t max over |Z| = s, Z within X, of f_t(Z), written
// as plain nested loops over the subsets.
inline double nested_loop_individual_optimum(const Matrix& atoms, const Matrix& data, int k, int s) {
  const int n = static_cast<int>(atoms.cols());
  double best = -std::numeric_limits<double>::infinity();
  for_each_subset(n, k, [&](const std::vector<int>& dict) {
    double total = 0.0;
    for (Eigen::Index t = 0; t < data.cols(); ++t) {
      double top = 0.0;
      for_each_subset(k, std::min(s, k), [&](const std::vector<int>& pos) {
        std::vector<int> z;
        for (int p : pos) z.push_back(dict[static_cast<std::size_t>(p)]);
        top = std::max(top, subset_utility(atoms, z, data.col(t)));
      });
      total += top;
    }
    best = std::max(best, total);
  });
  return best;
}

// Random d x n matrix with unit-norm Gaussian columns.
inline Matrix random_unit_columns(std::mt19937_64& rng, Eigen::Index d, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(d, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) a(i, j) = normal(rng);
    a.col(j).normalize();
  }
  return a;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

// 1D orthonormal DCT-II matrix, row u = frequency, from the cosine formula.
inline Matrix dct_matrix(int side) {
  Matrix c(side, side);
  const double pi = std::acos(-1.0);
  for (int u = 0; u < side; ++u) {
    const double scale = u == 0 ? std::sqrt(1.0 / side) : std::sqrt(2.0 / side);
    for (int x = 0; x < side; ++x) c(u, x) = scale * std::cos(pi * (2 * x + 1) * u / (2.0 * side));
  }
  return c;
}

}  // namespace oracle

#endif  // DICTSEL_TESTS_ORACLES_HPP_
