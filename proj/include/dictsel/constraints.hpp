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

// Generalized sparsity constraints on the per-point supports Z_1..Z_T, the
// feasible-replacement search used by the greedy selectors, and the
// O(T log T) gain computation for average sparsity.

#ifndef DICTSEL_CONSTRAINTS_HPP_
#define DICTSEL_CONSTRAINTS_HPP_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dictsel {

// Ordered support of one data point; order matches its factorization.
using Support = std::vector<int>;
using SupportAssignment = std::vector<Support>;

// |Z_t| <= s for every t.
struct IndividualSparsity {
  int s = 0;
};

// Partition of the atoms into categories with a cap per category.
struct Partition {
  std::vector<int> category_of_atom;  // length n, values index into caps
  std::vector<int> caps;
};

// Z_t independent in its own partition matroid. The uniform matroid is the
// one-category case; see uniform_matroid().
struct PartitionMatroid {
  std::vector<Partition> per_point;  // length T
};

// |union_{t in B_b} Z_t| <= caps[b] for disjoint blocks covering [T].
struct BlockSparsity {
  std::vector<std::vector<int>> blocks;
  std::vector<int> caps;
};

// |Z_t| <= per_point_caps[t] and sum_t |Z_t| <= total_cap.
struct AverageSparsity {
  std::vector<int> per_point_caps;
  int total_cap = 0;
};

using SparsityConstraint = std::variant<IndividualSparsity, PartitionMatroid,
                                        BlockSparsity, AverageSparsity>;

PartitionMatroid uniform_matroid(int num_points, int num_atoms, int cap);
AverageSparsity uniform_average(int num_points, int per_point_cap, int total_cap);

std::string family_name(const SparsityConstraint& constraint);

// Checks parameter sanity against T points and n atoms (non-negative caps,
// blocks partition [T], vector lengths). Throws InvalidConstraint.
void validate(const SparsityConstraint& constraint, int num_points, int num_atoms);

// Largest support any single point may hold under the constraint.
int max_support_size(const SparsityConstraint& constraint, int t);

// Membership of the assignment in the down-closed family. Supports with
// repeated or out-of-range atoms are infeasible.
bool is_feasible(const SparsityConstraint& constraint,
                 const SupportAssignment& assignment, int num_atoms);

// Replacement-sparsity parameter p for a dictionary of size k: k for
// individual matroids and blocks, 3k - 1 for average sparsity, 2k - 1 when
// every per-point cap is at least the total cap.
int replacement_sparsity_p(const SparsityConstraint& constraint, int k);

struct PointChange {
  int t = 0;
  std::optional<int> removed;  // atom dropped from Z_t
  bool add = false;            // whether the replacement's atom joins Z_t
};

// Z'_t = Z_t - removed + added for the listed t; other supports unchanged.
struct Replacement {
  int added_atom = -1;
  std::vector<PointChange> changes;  // sorted by t, no-ops omitted
  double gain = 0.0;

  bool empty() const { return changes.empty(); }
};

// Removals erase in place; additions append.
SupportAssignment apply_replacement(const SupportAssignment& assignment,
                                    const Replacement& replacement);

// Input of the average-sparsity gain problem for one candidate atom:
// maximize sum_{t in A} g_t - sum_{t in B} c_t subject to A cap S within B
// and |A| <= |B| + theta, where S is the set of tight points. Costs may be
// +infinity (nothing to remove).
struct Alg2Instance {
  std::vector<double> g;
  std::vector<double> c;
  std::vector<bool> tight;
  int theta = 0;
};

struct Alg2Solution {
  std::vector<int> add;     // A, ascending
  std::vector<int> remove;  // B, ascending
  double value = 0.0;
};

// Three-queue greedy: non-tight points by g descending, all points by c
// ascending, tight points by g - c descending. Each step takes the best of
// "add a non-tight point (paying the cheapest removal when the slack theta is
// used up)" and "add and remove a tight point", and stops when neither is
// positive. The dummy zero-cost elements of the matching view are the
// |A| <= |B| + theta counter. O(T log T).
Alg2Solution alg2_solve(const Alg2Instance& instance);

// Proxy (Replacement OMP) gains for one candidate atom a.
struct ProxyGains {
  // Per t: (1/M) (grad u_t(w_t))_a^2. Entries for t with a in Z_t are ignored.
  std::span<const double> add_gain;
};

// Exact (Replacement Greedy) gains: f_t(Z_t - Z_t[position] + a) - f_t(Z_t),
// with position == kNoRemoval for a pure addition. -infinity marks an
// unusable option (dependent columns).
inline constexpr int kNoRemoval = -1;
using ExactGainFn = std::function<double(int t, int position)>;

using GainInputs = std::variant<ProxyGains, ExactGainFn>;

// Best feasible replacement search against a fixed feasible assignment.
// Construction validates the state (InfeasibleState) and precomputes
// everything independent of the candidate atom, so one instance serves a
// whole greedy iteration. Removal costs are M * (w_t)^2 per support position
// and are required for proxy gains only. Holds references to its arguments.
class ReplacementSearch {
 public:
  ReplacementSearch(const SparsityConstraint& constraint,
                    const SupportAssignment& assignment, int num_atoms,
                    std::vector<std::vector<double>> removal_costs = {});

  Replacement best(int atom, const GainInputs& gains) const;

 private:
  Replacement best_proxy(int atom, std::span<const double> add_gain) const;
  Replacement best_exact(int atom, const ExactGainFn& gain) const;

  const SparsityConstraint& constraint_;
  const SupportAssignment& assignment_;
  int num_atoms_ = 0;
  std::vector<std::vector<double>> costs_;
  std::vector<double> min_cost_;    // per t, +inf for empty supports
  std::vector<int> min_position_;   // per t, -1 for empty supports
  // Block sparsity: per block the cheapest atom to evict from the union and
  // the union size.
  std::vector<int> block_evict_atom_;
  std::vector<double> block_evict_cost_;
  std::vector<int> block_union_size_;
  std::vector<std::vector<int>> block_union_;
  // Average sparsity.
  std::vector<bool> tight_;
  int slack_ = 0;
};

// One-shot convenience wrapper around ReplacementSearch.
Replacement best_replacement(const SparsityConstraint& constraint,
                             const SupportAssignment& assignment, int num_atoms,
                             int atom, const GainInputs& gains,
                             std::vector<std::vector<double>> removal_costs = {});

}  // namespace dictsel

#endif  // DICTSEL_CONSTRAINTS_HPP_
