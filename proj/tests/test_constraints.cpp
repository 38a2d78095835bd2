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

#include "dictsel/constraints.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "dictsel/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "random_instances.hpp"

using namespace dictsel;
using testing_support::RandomState;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool contains(const Support& z, int a) { return std::find(z.begin(), z.end(), a) != z.end(); }

// Value of an option for point t: position of the removed atom (-1 for none)
// and whether the atom is added.
using OptionValue = std::function<double(int t, int removed_position, bool add)>;

// Best total value over every member of F_a, enumerating each point's options
// (keep, add, remove one, add and remove one) and keeping feasible
// combinations.
double exhaustive_replacement(const SparsityConstraint& constraint, const SupportAssignment& z,
                              int num_atoms, int atom, const OptionValue& value) {
  const std::size_t T = z.size();
  struct Option {
    int removed;
    bool add;
  };
  std::vector<std::vector<Option>> options(T);
  for (std::size_t t = 0; t < T; ++t) {
    const bool can_add = !contains(z[t], atom);
    for (int p = -1; p < static_cast<int>(z[t].size()); ++p) {
      options[t].push_back({p, false});
      if (can_add) options[t].push_back({p, true});
    }
  }
  double best = 0.0;
  std::vector<std::size_t> choice(T, 0);
  while (true) {
    SupportAssignment next = z;
    double total = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const Option& o = options[t][choice[t]];
      if (o.removed >= 0) next[t].erase(next[t].begin() + o.removed);
      if (o.add) next[t].push_back(atom);
      total += value(static_cast<int>(t), o.removed, o.add);
    }
    if (is_feasible(constraint, next, num_atoms)) best = std::max(best, total);
    std::size_t i = 0;
    while (i < T && ++choice[i] == options[i].size()) choice[i++] = 0;
    if (i == T) break;
  }
  return best;
}

double proxy_value(const RandomState& st, int t, int removed, bool add) {
  const auto ti = static_cast<std::size_t>(t);
  double v = add ? st.add_gain[ti] : 0.0;
  if (removed >= 0) v -= st.removal_costs[ti][static_cast<std::size_t>(removed)];
  return v;
}

void check_well_formed(const Replacement& rep, const SupportAssignment& z, int atom) {
  CHECK(rep.added_atom == atom);
  int last_t = -1;
  for (const auto& c : rep.changes) {
    CHECK(c.t > last_t);
    last_t = c.t;
    if (c.removed) CHECK(contains(z[static_cast<std::size_t>(c.t)], *c.removed));
    if (c.add) CHECK_FALSE(contains(z[static_cast<std::size_t>(c.t)], atom));
    CHECK((c.add || c.removed.has_value()));
  }
}

Alg2Instance random_alg2(std::mt19937_64& rng, int T, bool with_infinite_costs) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Alg2Instance inst;
  inst.theta = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int t = 0; t < T; ++t) {
    inst.g.push_back(unit(rng));
    inst.c.push_back(with_infinite_costs && unit(rng) < 0.25 ? kInf : unit(rng));
    inst.tight.push_back(unit(rng) < 0.5);
  }
  return inst;
}

double value_of(const Alg2Instance& inst, const Alg2Solution& sol) {
  double v = 0.0;
  for (int t : sol.add) v += inst.g[static_cast<std::size_t>(t)];
  for (int t : sol.remove) v -= inst.c[static_cast<std::size_t>(t)];
  return v;
}

bool alg2_feasible(const Alg2Instance& inst, const Alg2Solution& sol) {
  for (int t : sol.add) {
    if (inst.tight[static_cast<std::size_t>(t)] &&
        std::find(sol.remove.begin(), sol.remove.end(), t) == sol.remove.end()) {
      return false;
    }
  }
  return static_cast<int>(sol.add.size()) <= static_cast<int>(sol.remove.size()) + inst.theta;
}

}  // namespace

TEST_CASE("is_feasible examples") {
  CHECK(is_feasible(IndividualSparsity{2}, SupportAssignment(3), 5));
  CHECK_FALSE(is_feasible(AverageSparsity{{3, 3}, 4}, {{0, 1, 2}, {3, 4}}, 5));
  CHECK(is_feasible(AverageSparsity{{3, 3}, 5}, {{0, 1, 2}, {3, 4}}, 5));
  CHECK(is_feasible(BlockSparsity{{{0, 1}}, {2}}, {{0}, {1}}, 5));
  CHECK_FALSE(is_feasible(BlockSparsity{{{0, 1}}, {1}}, {{0}, {1}}, 5));
  CHECK(is_feasible(BlockSparsity{{{0, 1}}, {1}}, {{3}, {3}}, 5));
  CHECK_FALSE(is_feasible(IndividualSparsity{2}, {{1, 2, 3}}, 5));
  CHECK_FALSE(is_feasible(IndividualSparsity{3}, {{1, 1}}, 5));
  CHECK_FALSE(is_feasible(IndividualSparsity{3}, {{7}}, 5));
}

TEST_CASE("partition matroid feasibility counts per category") {
  const Partition p{{0, 0, 1, 1, 1}, {1, 2}};
  const PartitionMatroid m{{p, p}};
  CHECK(is_feasible(m, {{0, 2, 3}, {1, 4}}, 5));
  CHECK_FALSE(is_feasible(m, {{0, 1}, {}}, 5));
  CHECK_FALSE(is_feasible(m, {{2, 3, 4}, {}}, 5));
  const PartitionMatroid u = uniform_matroid(2, 5, 2);
  CHECK(is_feasible(u, {{0, 4}, {1}}, 5));
  CHECK_FALSE(is_feasible(u, {{0, 1, 4}, {}}, 5));
}

TEST_CASE("validate rejects malformed parameters") {
  CHECK_THROWS_AS(validate(IndividualSparsity{-1}, 2, 4), InvalidConstraint);
  CHECK_THROWS_AS(validate(BlockSparsity{{{0}, {0, 1}}, {1, 1}}, 2, 4), InvalidConstraint);
  CHECK_THROWS_AS(validate(BlockSparsity{{{0}}, {1}}, 2, 4), InvalidConstraint);
  CHECK_THROWS_AS(validate(AverageSparsity{{1, 1}, -1}, 2, 4), InvalidConstraint);
  CHECK_THROWS_AS(validate(AverageSparsity{{1}, 1}, 2, 4), InvalidConstraint);
  CHECK_THROWS_AS(validate(PartitionMatroid{{Partition{{0, 0, 0}, {1}}}}, 1, 4), InvalidConstraint);
  CHECK_NOTHROW(validate(uniform_average(3, 2, 4), 3, 4));
}

TEST_CASE("replacement sparsity parameters") {
  CHECK(replacement_sparsity_p(IndividualSparsity{3}, 5) == 5);
  CHECK(replacement_sparsity_p(uniform_matroid(2, 4, 1), 5) == 5);
  CHECK(replacement_sparsity_p(BlockSparsity{{{0, 1}}, {2}}, 5) == 5);
  CHECK(replacement_sparsity_p(uniform_average(4, 2, 5), 5) == 14);
  CHECK(replacement_sparsity_p(uniform_average(4, 5, 5), 5) == 9);
}

TEST_CASE("alg2 examples") {
  SUBCASE("zero gains") {
    const auto sol = alg2_solve({{0, 0, 0}, {1, 1, 1}, {false, true, false}, 2});
    CHECK(sol.add.empty());
    CHECK(sol.remove.empty());
    CHECK(sol.value == 0.0);
  }
  SUBCASE("slack covers one addition") {
    const auto sol = alg2_solve({{5}, {9}, {false}, 1});
    CHECK(sol.add == std::vector<int>{0});
    CHECK(sol.remove.empty());
    CHECK(sol.value == 5.0);
  }
  SUBCASE("three points, one tight") {
    const Alg2Instance inst{{5, 3, 4}, {1, 2, 1}, {false, true, false}, 1};
    const auto sol = alg2_solve(inst);
    CHECK(sol.value == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(value_of(inst, sol) == doctest::Approx(sol.value).epsilon(1e-15));
    CHECK(alg2_feasible(inst, sol));
    CHECK(oracle::alg2_exhaustive(inst.g, inst.c, inst.tight, inst.theta) == 9.0);
  }
  SUBCASE("no slack and nothing removable") {
    const auto sol = alg2_solve({{2, 2}, {kInf, kInf}, {false, false}, 0});
    CHECK(sol.value == 0.0);
  }
}

TEST_CASE("alg2 matches exhaustive search") {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 600; ++trial) {
    const int T = 1 + trial % 8;
    const Alg2Instance inst = random_alg2(rng, T, trial % 2 == 1);
    const Alg2Solution sol = alg2_solve(inst);
    const double ref = oracle::alg2_exhaustive(inst.g, inst.c, inst.tight, inst.theta);
    CAPTURE(trial);
    CHECK(std::abs(sol.value - ref) <= 1e-12);
    CHECK(std::abs(value_of(inst, sol) - sol.value) <= 1e-12);
    CHECK(alg2_feasible(inst, sol));
  }
}

TEST_CASE("alg2 value is monotone in its inputs") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Alg2Instance inst = random_alg2(rng, 1 + trial % 7, false);
    const double base = alg2_solve(inst).value;
    Alg2Instance more_slack = inst;
    ++more_slack.theta;
    CHECK(alg2_solve(more_slack).value >= base - 1e-12);
    const auto t = static_cast<std::size_t>(trial) % inst.g.size();
    Alg2Instance more_gain = inst;
    more_gain.g[t] += unit(rng);
    CHECK(alg2_solve(more_gain).value >= base - 1e-12);
    Alg2Instance more_cost = inst;
    more_cost.c[t] += unit(rng);
    CHECK(alg2_solve(more_cost).value <= base + 1e-12);
  }
}

TEST_CASE("best_replacement examples") {
  SUBCASE("empty supports take every positive gain") {
    const std::vector<double> g{1, 2, 3};
    const auto rep = best_replacement(IndividualSparsity{2}, SupportAssignment(3), 4, 1,
                                      ProxyGains{g}, {{}, {}, {}});
    CHECK(rep.gain == 6.0);
    REQUIRE(rep.changes.size() == 3);
    for (const auto& c : rep.changes) {
      CHECK(c.add);
      CHECK_FALSE(c.removed);
    }
  }
  SUBCASE("swap not worth its cost") {
    const std::vector<double> g{0.5, 0.5};
    const auto rep = best_replacement(IndividualSparsity{1}, {{0}, {2}}, 4, 1, ProxyGains{g},
                                      {{1.0}, {1.0}});
    CHECK(rep.gain == 0.0);
    CHECK(rep.empty());
  }
  SUBCASE("swap the cheapest atom") {
    const std::vector<double> g{2.0};
    const auto rep = best_replacement(IndividualSparsity{2}, {{0, 2}}, 4, 3, ProxyGains{g},
                                      {{0.7, 0.4}});
    CHECK(rep.gain == doctest::Approx(1.6));
    REQUIRE(rep.changes.size() == 1);
    CHECK(rep.changes[0].removed == 2);
    CHECK(apply_replacement({{0, 2}}, rep) == SupportAssignment{{0, 3}});
  }
  SUBCASE("atom already in the support") {
    const std::vector<double> g{5.0};
    const auto rep = best_replacement(IndividualSparsity{2}, {{3}}, 4, 3, ProxyGains{g}, {{0.1}});
    CHECK(rep.empty());
  }
  SUBCASE("infeasible state") {
    const std::vector<double> g{1.0};
    CHECK_THROWS_AS(best_replacement(IndividualSparsity{1}, {{0, 1}}, 4, 3, ProxyGains{g}, {{0, 0}}),
                    InfeasibleState);
  }
}

TEST_CASE("individual proxy gain has the closed form") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomState st = testing_support::random_state(rng, 0);
    const int s = std::get<IndividualSparsity>(st.constraint).s;
    const int atom = testing_support::uniform_int(rng, 0, st.num_atoms - 1);
    double expected = 0.0;
    for (std::size_t t = 0; t < st.assignment.size(); ++t) {
      if (contains(st.assignment[t], atom)) continue;
      if (static_cast<int>(st.assignment[t].size()) < s) {
        expected += std::max(0.0, st.add_gain[t]);
      } else if (!st.assignment[t].empty()) {
        const double cheapest = *std::min_element(st.removal_costs[t].begin(), st.removal_costs[t].end());
        expected += std::max(0.0, st.add_gain[t] - cheapest);
      }
    }
    const auto rep = best_replacement(st.constraint, st.assignment, st.num_atoms, atom,
                                      ProxyGains{st.add_gain}, st.removal_costs);
    CHECK(rep.gain == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("proxy replacements are optimal over F_a and stay feasible") {
  std::mt19937_64 rng(23);
  for (int family = 0; family < 4; ++family) {
    for (int trial = 0; trial < 150; ++trial) {
      const RandomState st = testing_support::random_state(rng, family);
      const int atom = testing_support::uniform_int(rng, 0, st.num_atoms - 1);
      const auto rep = best_replacement(st.constraint, st.assignment, st.num_atoms, atom,
                                        ProxyGains{st.add_gain}, st.removal_costs);
      CAPTURE(family);
      CAPTURE(trial);
      check_well_formed(rep, st.assignment, atom);
      CHECK(rep.gain >= 0.0);
      CHECK(is_feasible(st.constraint, apply_replacement(st.assignment, rep), st.num_atoms));
      double realized = 0.0;
      for (const auto& c : rep.changes) {
        const auto& z = st.assignment[static_cast<std::size_t>(c.t)];
        const int pos = c.removed ? static_cast<int>(std::find(z.begin(), z.end(), *c.removed) - z.begin()) : -1;
        realized += proxy_value(st, c.t, pos, c.add);
      }
      CHECK(realized == doctest::Approx(rep.gain).epsilon(1e-12));
      const double ref = exhaustive_replacement(
          st.constraint, st.assignment, st.num_atoms, atom,
          [&](int t, int removed, bool add) { return proxy_value(st, t, removed, add); });
      CHECK(rep.gain == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact replacements are optimal over F_a") {
  std::mt19937_64 rng(24);
  for (int family = 0; family < 2; ++family) {
    for (int trial = 0; trial < 150; ++trial) {
      const RandomState st = testing_support::random_state(rng, family);
      const int atom = testing_support::uniform_int(rng, 0, st.num_atoms - 1);
      // Random exact gains where a pure addition dominates every swap, as it
      // does for a monotone f.
      std::vector<std::vector<double>> table;
      for (const auto& z : st.assignment) {
        std::vector<double> row{testing_support::uniform01(rng) - 0.2};
        for (std::size_t p = 0; p < z.size(); ++p) {
          row.push_back(row[0] - testing_support::uniform01(rng) * 0.6);
        }
        table.push_back(row);
      }
      const ExactGainFn gain = [&](int t, int position) {
        return table[static_cast<std::size_t>(t)][static_cast<std::size_t>(position + 1)];
      };
      const auto rep = best_replacement(st.constraint, st.assignment, st.num_atoms, atom, gain);
      check_well_formed(rep, st.assignment, atom);
      CHECK(is_feasible(st.constraint, apply_replacement(st.assignment, rep), st.num_atoms));
      const double ref = exhaustive_replacement(
          st.constraint, st.assignment, st.num_atoms, atom, [&](int t, int removed, bool add) {
            if (!add) return removed >= 0 ? -1.0 : 0.0;
            return table[static_cast<std::size_t>(t)][static_cast<std::size_t>(removed + 1)];
          });
      CHECK(rep.gain == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact gains are refused for block and average families") {
  const ExactGainFn gain = [](int, int) { return 1.0; };
  CHECK_THROWS_AS(best_replacement(BlockSparsity{{{0}}, {1}}, {{}}, 3, 0, gain), UnsupportedConstraint);
  CHECK_THROWS_AS(best_replacement(uniform_average(1, 1, 1), {{}}, 3, 0, gain), UnsupportedConstraint);
}

TEST_CASE("block replacement evicts one atom from the whole block") {
  // Block {0, 1} with cap 2 holds atoms {0, 1}; adding atom 2 to point 0
  // must evict one of them from every support that uses it.
  const BlockSparsity block{{{0, 1}}, {2}};
  const SupportAssignment z{{0, 1}, {1}};
  const std::vector<double> g{3.0, 0.0};
  const auto rep = best_replacement(block, z, 4, 2, ProxyGains{g}, {{0.5, 0.2}, {0.4}});
  // Evicting 0 costs 0.5, evicting 1 costs 0.2 + 0.4.
  CHECK(rep.gain == doctest::Approx(2.5));
  CHECK(apply_replacement(z, rep) == SupportAssignment{{1, 2}, {1}});
}
