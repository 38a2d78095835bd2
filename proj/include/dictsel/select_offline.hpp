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

// Offline dictionary selection: pick k atoms X from the ground set and
// supports Z_t within X, feasible for a sparsity constraint, to maximize
// sum_t f_t(Z_t).

#ifndef DICTSEL_SELECT_OFFLINE_HPP_
#define DICTSEL_SELECT_OFFLINE_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dictsel/constraints.hpp"
#include "dictsel/ground_set.hpp"
#include "dictsel/linalg.hpp"

namespace dictsel {

enum class Method {
  kSdsMa,                // modular approximation greedy
  kReplacementGreedy,    // exact replacement gains
  kReplacementOmp,       // gradient/coefficient proxy gains
  kReplacementOmpDecay,  // proxy gains with smoothness M / sqrt(i)
};

std::string method_name(Method method);
// Accepts SDS_MA, RG, ROMP, ROMPd (case-insensitive). Throws ParseError.
Method parse_method(std::string_view name);

struct SelectorConfig {
  int k = 1;
  Method method = Method::kReplacementOmp;
  // Smoothness M_{s,2}; defaults to 1 + coherence, the sigma_max^2(A, 2) bound.
  std::optional<double> smoothness;
  int threads = 1;
  // Keep a PointUpdate for every support change (smoothness inequality audit).
  bool record_updates = false;
};

// One support change of one applied replacement, with the quantities of the
// per-point smoothness lower bound evaluated before the change.
struct PointUpdate {
  int t = 0;
  double utility_before = 0.0;
  double utility_after = 0.0;
  double added_gradient_sq = 0.0;  // ||grad u_t(w_t)_{Z' \ Z}||^2
  double removed_coef_sq = 0.0;    // ||(w_t)_{Z \ Z'}||^2
};

struct IterationRecord {
  int iteration = 0;  // 1-based
  int atom = -1;
  double gain = 0.0;       // selection criterion value of the chosen atom
  double smoothness = 0.0; // M used for the proxy gains (0 for exact gains)
  bool fallback = false;   // no positive gain; atom added without replacement
  double objective = 0.0;  // sum_t f_t(Z_t) after the iteration
  std::vector<PointUpdate> updates;
};

// Everything a selector maintains. supports[t] always equals
// factors[t].columns(); coefficients[t] are the least-squares weights on that
// support, residuals[t] = y_t - A w_t, gradients.col(t) = A^T residuals[t],
// utilities[t] = f_t(Z_t).
struct SelectionState {
  std::vector<int> dictionary;  // X in insertion order
  SupportAssignment supports;
  std::vector<SupportFactorization> factors;
  std::vector<Vector> coefficients;
  std::vector<Vector> residuals;
  Matrix gradients;  // n x T
  std::vector<double> utilities;
  double objective = 0.0;
  double smoothness = 0.0;
  std::vector<IterationRecord> history;

  // Empty supports for every column of data.
  static SelectionState empty(const Matrix& data, const GroundSet& ground_set);
};

// Greedy on the modular surrogate: singleton gains f_t({a}) = 1/2 <a, y_t>^2,
// objective sum_t (sum of the s largest singleton gains among X). Supports
// are the top-s selected atoms per point; the state's objective is the true
// sum_t f_t(Z_t) of those supports. History objectives track the surrogate.
SelectionState sds_ma(const Matrix& data, const GroundSet& ground_set, int k, int s);

// Picks, k times, the atom whose best feasible replacement has the largest
// exact gain sum_t f_t(Z'_t) - f_t(Z_t). Individual and matroid constraints
// only; throws UnsupportedConstraint otherwise.
SelectionState replacement_greedy(const Matrix& data, const GroundSet& ground_set,
                                  const SparsityConstraint& constraint,
                                  const SelectorConfig& config);

// Picks, k times, the atom maximizing
//   (1/M) sum_t ||grad u_t(w_t)_{Z'_t \ Z_t}||^2 - M sum_t ||(w_t)_{Z_t \ Z'_t}||^2
// over feasible replacements, for any constraint family. With
// Method::kReplacementOmpDecay, iteration i uses M / sqrt(i).
SelectionState replacement_omp(const Matrix& data, const GroundSet& ground_set,
                               const SparsityConstraint& constraint,
                               const SelectorConfig& config);

// Dispatches on config.method. SDS_MA takes s from an individual constraint.
SelectionState select(const Matrix& data, const GroundSet& ground_set,
                      const SparsityConstraint& constraint, const SelectorConfig& config);

// Least-squares fit of every data point on the given supports, as a state
// (no dictionary bookkeeping). Dependent support columns are dropped.
SelectionState evaluate_supports(const Matrix& data, const GroundSet& ground_set,
                                 const SupportAssignment& supports);

}  // namespace dictsel

#endif  // DICTSEL_SELECT_OFFLINE_HPP_
