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

// Benchmark harness: builds ground sets, datasets and constraints from an
// ExperimentConfig, runs the selectors, scores them, and solves small
// instances exactly.

#ifndef DICTSEL_EXPERIMENT_HPP_
#define DICTSEL_EXPERIMENT_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "dictsel/config.hpp"
#include "dictsel/constraints.hpp"
#include "dictsel/data_io.hpp"
#include "dictsel/ground_set.hpp"
#include "dictsel/select_online.hpp"

namespace dictsel {

// (1 / (T d)) sum_t ||y_t - D w_t||^2 with w_t = omp_encode(dictionary, y_t, s).
// An empty dictionary gives the mean squared entry of the data.
double residual_variance(const Matrix& dictionary, const Matrix& data, int s);

GroundSet build_ground_set(const GroundSetRecipe& recipe);

// Instantiates the family for T points and n atoms.
SparsityConstraint build_constraint(const ConstraintSpec& spec, int num_points, int num_atoms);

// Deterministic per-trial seed derived from the base seed.
std::uint64_t trial_seed(std::uint64_t base, int trial);

struct TrialData {
  Dataset train;
  Dataset test;
};

TrialData make_trial_data(const DatasetRecipe& recipe, const GroundSet& ground_set,
                          std::uint64_t seed);

// Called with each trial's rows as soon as the trial finishes (completion
// order when trials run in parallel).
using TrialCallback = std::function<void(int trial, const std::vector<ResultRow>&)>;

// Every trial draws fresh data from its own seed, then runs each method at
// each k. Only the selector call is timed. Rows come back ordered by trial,
// method and k regardless of the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const TrialCallback& on_trial = {});

struct BruteForceResult {
  double objective = 0.0;
  std::vector<int> dictionary;  // ascending
  SupportAssignment supports;
};

// Exact optimum of sum_t f_t(Z_t) over |X| = min(k, n) and feasible supports
// inside X. Throws TooLarge when C(n, k) times the supports examined per
// dictionary exceeds 1e7, and InvalidArgument when n > 64.
BruteForceResult brute_force_optimum(const Matrix& data, const GroundSet& ground_set,
                                     const SparsityConstraint& constraint, int k);

struct OnlineTrace {
  OnlineLedger ledger;
  std::vector<double> max_expert_regret;  // after each round
  std::vector<double> regret_bound;       // G sqrt(2 t ln n) after each round
};

// Plays every column of the stream in order.
OnlineTrace run_online(const GroundSet& ground_set, const OnlineConfig& config,
                       const Matrix& stream);

}  // namespace dictsel

#endif  // DICTSEL_EXPERIMENT_HPP_
