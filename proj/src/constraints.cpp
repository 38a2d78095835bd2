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

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "dictsel/errors.hpp"

namespace dictsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool contains(const Support& support, int atom) {
  return std::find(support.begin(), support.end(), atom) != support.end();
}

bool well_formed(const Support& support, int num_atoms) {
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= num_atoms) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (support[i] == support[j]) return false;
    }
  }
  return true;
}

int block_union_size(const BlockSparsity& c, const SupportAssignment& z,
                     std::size_t block) {
  std::vector<int> atoms;
  for (int t : c.blocks[block]) {
    atoms.insert(atoms.end(), z[static_cast<std::size_t>(t)].begin(),
                 z[static_cast<std::size_t>(t)].end());
  }
  std::sort(atoms.begin(), atoms.end());
  return static_cast<int>(std::unique(atoms.begin(), atoms.end()) - atoms.begin());
}

[[noreturn]] void invalid(const std::string& what) { throw InvalidConstraint(what); }

}  // namespace

PartitionMatroid uniform_matroid(int num_points, int num_atoms, int cap) {
  Partition p{std::vector<int>(static_cast<std::size_t>(num_atoms), 0), {cap}};
  return PartitionMatroid{std::vector<Partition>(static_cast<std::size_t>(num_points), p)};
}

AverageSparsity uniform_average(int num_points, int per_point_cap, int total_cap) {
  return AverageSparsity{
      std::vector<int>(static_cast<std::size_t>(num_points), per_point_cap), total_cap};
}

std::string family_name(const SparsityConstraint& constraint) {
  return std::visit(Overloaded{
                        [](const IndividualSparsity&) { return std::string("individual"); },
                        [](const PartitionMatroid&) { return std::string("matroid"); },
                        [](const BlockSparsity&) { return std::string("block"); },
                        [](const AverageSparsity&) { return std::string("average"); },
                    },
                    constraint);
}

void validate(const SparsityConstraint& constraint, int num_points, int num_atoms) {
  const auto T = static_cast<std::size_t>(num_points);
  std::visit(
      Overloaded{
          [&](const IndividualSparsity& c) {
            if (c.s < 0) invalid("individual sparsity s must be >= 0");
          },
          [&](const PartitionMatroid& c) {
            if (c.per_point.size() != T) invalid("matroid needs one partition per point");
            for (const auto& p : c.per_point) {
              if (p.category_of_atom.size() != static_cast<std::size_t>(num_atoms)) {
                invalid("partition must assign every atom a category");
              }
              for (int cap : p.caps) {
                if (cap < 0) invalid("partition caps must be >= 0");
              }
              for (int q : p.category_of_atom) {
                if (q < 0 || q >= static_cast<int>(p.caps.size())) {
                  invalid("atom category out of range");
                }
              }
            }
          },
          [&](const BlockSparsity& c) {
            if (c.blocks.size() != c.caps.size()) invalid("one cap per block is required");
            std::vector<int> seen(T, 0);
            for (const auto& block : c.blocks) {
              for (int t : block) {
                if (t < 0 || t >= num_points) invalid("block member out of range");
                ++seen[static_cast<std::size_t>(t)];
              }
            }
            for (int count : seen) {
              if (count != 1) invalid("blocks must partition the data points");
            }
            for (int cap : c.caps) {
              if (cap < 0) invalid("block caps must be >= 0");
            }
          },
          [&](const AverageSparsity& c) {
            if (c.per_point_caps.size() != T) invalid("average sparsity needs one cap per point");
            if (c.total_cap < 0) invalid("total cap must be >= 0");
            for (int cap : c.per_point_caps) {
              if (cap < 0) invalid("per-point caps must be >= 0");
            }
          },
      },
      constraint);
}

int max_support_size(const SparsityConstraint& constraint, int t) {
  const auto ti = static_cast<std::size_t>(t);
  return std::visit(
      Overloaded{
          [](const IndividualSparsity& c) { return c.s; },
          [&](const PartitionMatroid& c) {
            const auto& caps = c.per_point[ti].caps;
            return std::accumulate(caps.begin(), caps.end(), 0);
          },
          [&](const BlockSparsity& c) {
            for (std::size_t b = 0; b < c.blocks.size(); ++b) {
              if (contains(c.blocks[b], t)) return c.caps[b];
            }
            return 0;
          },
          [&](const AverageSparsity& c) {
            return std::min(c.per_point_caps[ti], c.total_cap);
          },
      },
      constraint);
}

bool is_feasible(const SparsityConstraint& constraint,
                 const SupportAssignment& z, int num_atoms) {
  for (const auto& support : z) {
    if (!well_formed(support, num_atoms)) return false;
  }
  return std::visit(
      Overloaded{
          [&](const IndividualSparsity& c) {
            return std::all_of(z.begin(), z.end(), [&](const Support& s) {
              return static_cast<int>(s.size()) <= c.s;
            });
          },
          [&](const PartitionMatroid& c) {
            if (c.per_point.size() != z.size()) return false;
            for (std::size_t t = 0; t < z.size(); ++t) {
              const auto& p = c.per_point[t];
              std::vector<int> used(p.caps.size(), 0);
              for (int atom : z[t]) {
                const auto q = static_cast<std::size_t>(
                    p.category_of_atom[static_cast<std::size_t>(atom)]);
                if (++used[q] > p.caps[q]) return false;
              }
            }
            return true;
          },
          [&](const BlockSparsity& c) {
            for (std::size_t b = 0; b < c.blocks.size(); ++b) {
              for (int t : c.blocks[b]) {
                if (t < 0 || static_cast<std::size_t>(t) >= z.size()) return false;
              }
              if (block_union_size(c, z, b) > c.caps[b]) return false;
            }
            return true;
          },
          [&](const AverageSparsity& c) {
            if (c.per_point_caps.size() != z.size()) return false;
            long total = 0;
            for (std::size_t t = 0; t < z.size(); ++t) {
              if (static_cast<int>(z[t].size()) > c.per_point_caps[t]) return false;
              total += static_cast<long>(z[t].size());
            }
            return total <= c.total_cap;
          },
      },
      constraint);
}

int replacement_sparsity_p(const SparsityConstraint& constraint, int k) {
  if (k < 1) throw InvalidArgument("dictionary size must be >= 1");
  if (const auto* avg = std::get_if<AverageSparsity>(&constraint)) {
    const bool caps_slack =
        std::all_of(avg->per_point_caps.begin(), avg->per_point_caps.end(),
                    [&](int cap) { return cap >= avg->total_cap; });
    return caps_slack ? 2 * k - 1 : 3 * k - 1;
  }
  return k;
}

SupportAssignment apply_replacement(const SupportAssignment& assignment,
                                    const Replacement& replacement) {
  SupportAssignment out = assignment;
  for (const auto& change : replacement.changes) {
    auto& support = out.at(static_cast<std::size_t>(change.t));
    if (change.removed) {
      const auto it = std::find(support.begin(), support.end(), *change.removed);
      if (it == support.end()) throw InvalidArgument("removed atom not in support");
      support.erase(it);
    }
    if (change.add) support.push_back(replacement.added_atom);
  }
  return out;
}

Alg2Solution alg2_solve(const Alg2Instance& in) {
  const std::size_t T = in.g.size();
  if (in.c.size() != T || in.tight.size() != T) {
    throw InvalidArgument("Algorithm inputs g, c, tight must share length T");
  }
  if (in.theta < 0) throw InvalidArgument("slack theta must be >= 0");

  // Q1 changes during the run (tight points move in), so it is a real heap.
  // Q2 and Q3 only shrink and are scanned with lazy skipping.
  const auto q1_less = [&](int a, int b) {
    const double ga = in.g[static_cast<std::size_t>(a)];
    const double gb = in.g[static_cast<std::size_t>(b)];
    return ga != gb ? ga < gb : a > b;
  };
  std::priority_queue<int, std::vector<int>, decltype(q1_less)> q1(q1_less);
  std::vector<int> q2(T);
  std::vector<int> q3;
  std::iota(q2.begin(), q2.end(), 0);
  for (std::size_t t = 0; t < T; ++t) {
    if (in.tight[t]) {
      q3.push_back(static_cast<int>(t));
    } else {
      q1.push(static_cast<int>(t));
    }
  }
  std::stable_sort(q2.begin(), q2.end(), [&](int a, int b) {
    return in.c[static_cast<std::size_t>(a)] < in.c[static_cast<std::size_t>(b)];
  });
  const auto net = [&](int t) {
    return in.g[static_cast<std::size_t>(t)] - in.c[static_cast<std::size_t>(t)];
  };
  std::stable_sort(q3.begin(), q3.end(), [&](int a, int b) { return net(a) > net(b); });

  std::vector<bool> in_a(T, false);
  std::vector<bool> in_b(T, false);
  std::size_t q2_head = 0;
  std::size_t q3_head = 0;
  long size_a = 0;
  long size_b = 0;
  double value = 0.0;

  for (std::size_t step = 0; step < T; ++step) {
    while (q2_head < q2.size() && in_b[static_cast<std::size_t>(q2[q2_head])]) ++q2_head;
    while (q3_head < q3.size() && (in_b[static_cast<std::size_t>(q3[q3_head])] ||
                                   in_a[static_cast<std::size_t>(q3[q3_head])])) {
      ++q3_head;
    }
    const bool at_cap = size_a == size_b + in.theta;
    const int beta = q2_head < q2.size() ? q2[q2_head] : -1;

    double alpha_value = -kInf;
    const int alpha = q1.empty() ? -1 : q1.top();
    if (alpha >= 0) {
      const double pay = at_cap ? (beta >= 0 ? in.c[static_cast<std::size_t>(beta)] : kInf) : 0.0;
      alpha_value = in.g[static_cast<std::size_t>(alpha)] - pay;
    }
    const int gamma = q3_head < q3.size() ? q3[q3_head] : -1;
    const double gamma_value = gamma >= 0 ? net(gamma) : -kInf;

    if (!(alpha_value > 0.0) && !(gamma_value > 0.0)) break;

    if (alpha_value >= gamma_value) {
      q1.pop();
      in_a[static_cast<std::size_t>(alpha)] = true;
      ++size_a;
      value += in.g[static_cast<std::size_t>(alpha)];
      if (at_cap) {
        in_b[static_cast<std::size_t>(beta)] = true;
        ++size_b;
        ++q2_head;
        value -= in.c[static_cast<std::size_t>(beta)];
        // A tight point that lost an atom may now take the new one freely.
        if (in.tight[static_cast<std::size_t>(beta)] && !in_a[static_cast<std::size_t>(beta)]) {
          q1.push(beta);
        }
      }
    } else {
      in_a[static_cast<std::size_t>(gamma)] = true;
      in_b[static_cast<std::size_t>(gamma)] = true;
      ++size_a;
      ++size_b;
      ++q3_head;
      value += net(gamma);
    }
  }

  Alg2Solution out;
  for (std::size_t t = 0; t < T; ++t) {
    if (in_a[t]) out.add.push_back(static_cast<int>(t));
    if (in_b[t]) out.remove.push_back(static_cast<int>(t));
  }
  out.value = value;
  return out;
}

ReplacementSearch::ReplacementSearch(const SparsityConstraint& constraint,
                                     const SupportAssignment& assignment,
                                     int num_atoms,
                                     std::vector<std::vector<double>> removal_costs)
    : constraint_(constraint),
      assignment_(assignment),
      num_atoms_(num_atoms),
      costs_(std::move(removal_costs)) {
  const std::size_t T = assignment_.size();
  if (!is_feasible(constraint_, assignment_, num_atoms_)) {
    throw InfeasibleState("support assignment violates the " +
                          family_name(constraint_) + " constraint");
  }
  if (!costs_.empty()) {
    if (costs_.size() != T) throw InvalidArgument("removal costs need one row per point");
    for (std::size_t t = 0; t < T; ++t) {
      if (costs_[t].size() != assignment_[t].size()) {
        throw InvalidArgument("removal costs must align with support positions");
      }
    }
  }
  min_cost_.assign(T, kInf);
  min_position_.assign(T, -1);
  if (!costs_.empty()) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t p = 0; p < costs_[t].size(); ++p) {
        if (costs_[t][p] < min_cost_[t]) {
          min_cost_[t] = costs_[t][p];
          min_position_[t] = static_cast<int>(p);
        }
      }
    }
  }

  if (const auto* block = std::get_if<BlockSparsity>(&constraint_)) {
    const std::size_t nb = block->blocks.size();
    block_union_.resize(nb);
    block_evict_atom_.assign(nb, -1);
    block_evict_cost_.assign(nb, kInf);
    block_union_size_.assign(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) {
      std::vector<int> atoms;
      for (int t : block->blocks[b]) {
        const auto& z = assignment_[static_cast<std::size_t>(t)];
        atoms.insert(atoms.end(), z.begin(), z.end());
      }
      std::sort(atoms.begin(), atoms.end());
      atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
      block_union_size_[b] = static_cast<int>(atoms.size());
      if (!costs_.empty()) {
        // Evicting r removes it from every support of the block holding it.
        for (int r : atoms) {
          double cost = 0.0;
          for (int t : block->blocks[b]) {
            const auto ti = static_cast<std::size_t>(t);
            const auto& z = assignment_[ti];
            const auto it = std::find(z.begin(), z.end(), r);
            if (it != z.end()) cost += costs_[ti][static_cast<std::size_t>(it - z.begin())];
          }
          if (cost < block_evict_cost_[b]) {
            block_evict_cost_[b] = cost;
            block_evict_atom_[b] = r;
          }
        }
      }
      block_union_[b] = std::move(atoms);
    }
  }

  if (const auto* avg = std::get_if<AverageSparsity>(&constraint_)) {
    tight_.assign(T, false);
    long used = 0;
    for (std::size_t t = 0; t < T; ++t) {
      tight_[t] = static_cast<int>(assignment_[t].size()) >= avg->per_point_caps[t];
      used += static_cast<long>(assignment_[t].size());
    }
    slack_ = static_cast<int>(avg->total_cap - used);
  }
}

Replacement ReplacementSearch::best(int atom, const GainInputs& gains) const {
  if (atom < 0 || atom >= num_atoms_) throw InvalidArgument("atom index out of range");
  if (const auto* proxy = std::get_if<ProxyGains>(&gains)) {
    if (proxy->add_gain.size() != assignment_.size()) {
      throw InvalidArgument("proxy gains need one entry per point");
    }
    if (costs_.empty() && !assignment_.empty()) {
      for (const auto& z : assignment_) {
        if (!z.empty()) throw InvalidArgument("proxy gains require removal costs");
      }
    }
    return best_proxy(atom, proxy->add_gain);
  }
  return best_exact(atom, std::get<ExactGainFn>(gains));
}

Replacement ReplacementSearch::best_proxy(int atom,
                                          std::span<const double> add_gain) const {
  Replacement rep;
  rep.added_atom = atom;
  const std::size_t T = assignment_.size();

  // Shared by the individual and matroid families: pure addition when the
  // cap allows it, otherwise the best swap among `candidates`.
  const auto per_point = [&](std::size_t t, bool can_add, auto&& candidate) {
    const double g = add_gain[t];
    if (can_add) {
      if (g > 0.0) {
        rep.changes.push_back({static_cast<int>(t), std::nullopt, true});
        rep.gain += g;
      }
      return;
    }
    int best_pos = -1;
    double best_cost = kInf;
    for (std::size_t p = 0; p < assignment_[t].size(); ++p) {
      if (!candidate(p)) continue;
      if (costs_[t][p] < best_cost) {
        best_cost = costs_[t][p];
        best_pos = static_cast<int>(p);
      }
    }
    if (best_pos >= 0 && g - best_cost > 0.0) {
      rep.changes.push_back(
          {static_cast<int>(t), assignment_[t][static_cast<std::size_t>(best_pos)], true});
      rep.gain += g - best_cost;
    }
  };

  std::visit(
      Overloaded{
          [&](const IndividualSparsity& c) {
            for (std::size_t t = 0; t < T; ++t) {
              if (contains(assignment_[t], atom)) continue;
              per_point(t, static_cast<int>(assignment_[t].size()) < c.s,
                        [](std::size_t) { return true; });
            }
          },
          [&](const PartitionMatroid& c) {
            for (std::size_t t = 0; t < T; ++t) {
              if (contains(assignment_[t], atom)) continue;
              const auto& part = c.per_point[t];
              const int q = part.category_of_atom[static_cast<std::size_t>(atom)];
              int used = 0;
              for (int z : assignment_[t]) {
                if (part.category_of_atom[static_cast<std::size_t>(z)] == q) ++used;
              }
              per_point(t, used < part.caps[static_cast<std::size_t>(q)], [&](std::size_t p) {
                return part.category_of_atom[static_cast<std::size_t>(assignment_[t][p])] == q;
              });
            }
          },
          [&](const BlockSparsity& c) {
            for (std::size_t b = 0; b < c.blocks.size(); ++b) {
              const bool in_union = std::binary_search(block_union_[b].begin(),
                                                       block_union_[b].end(), atom);
              std::vector<int> adds;
              double add_total = 0.0;
              for (int t : c.blocks[b]) {
                const auto ti = static_cast<std::size_t>(t);
                if (add_gain[ti] > 0.0 && !contains(assignment_[ti], atom)) {
                  adds.push_back(t);
                  add_total += add_gain[ti];
                }
              }
              if (adds.empty()) continue;
              std::sort(adds.begin(), adds.end());
              if (in_union || block_union_size_[b] < c.caps[b]) {
                for (int t : adds) rep.changes.push_back({t, std::nullopt, true});
                rep.gain += add_total;
                continue;
              }
              const int evict = block_evict_atom_[b];
              if (evict < 0 || add_total - block_evict_cost_[b] <= 0.0) continue;
              std::vector<int> members = c.blocks[b];
              std::sort(members.begin(), members.end());
              for (int t : members) {
                const bool has = contains(assignment_[static_cast<std::size_t>(t)], evict);
                const bool add = std::binary_search(adds.begin(), adds.end(), t);
                if (!has && !add) continue;
                rep.changes.push_back({t, has ? std::optional<int>(evict) : std::nullopt, add});
              }
              rep.gain += add_total - block_evict_cost_[b];
            }
          },
          [&](const AverageSparsity&) {
            Alg2Instance inst;
            inst.g.resize(T);
            inst.c = min_cost_;
            inst.tight = tight_;
            inst.theta = slack_;
            for (std::size_t t = 0; t < T; ++t) {
              inst.g[t] = contains(assignment_[t], atom) ? 0.0 : std::max(0.0, add_gain[t]);
            }
            const Alg2Solution sol = alg2_solve(inst);
            std::size_t ia = 0;
            std::size_t ib = 0;
            while (ia < sol.add.size() || ib < sol.remove.size()) {
              const int ta = ia < sol.add.size() ? sol.add[ia] : std::numeric_limits<int>::max();
              const int tb = ib < sol.remove.size() ? sol.remove[ib] : std::numeric_limits<int>::max();
              const int t = std::min(ta, tb);
              PointChange change{t, std::nullopt, false};
              if (ta == t) {
                change.add = true;
                ++ia;
              }
              if (tb == t) {
                const auto ti = static_cast<std::size_t>(t);
                change.removed = assignment_[ti][static_cast<std::size_t>(min_position_[ti])];
                ++ib;
              }
              rep.changes.push_back(change);
            }
            rep.gain = sol.value;
          },
      },
      constraint_);

  std::sort(rep.changes.begin(), rep.changes.end(),
            [](const PointChange& a, const PointChange& b) { return a.t < b.t; });
  return rep;
}

Replacement ReplacementSearch::best_exact(int atom, const ExactGainFn& gain) const {
  Replacement rep;
  rep.added_atom = atom;
  const std::size_t T = assignment_.size();

  const auto per_point = [&](std::size_t t, bool can_add, auto&& candidate) {
    const int ti = static_cast<int>(t);
    if (can_add) {
      const double g = gain(ti, kNoRemoval);
      if (g > 0.0) {
        rep.changes.push_back({ti, std::nullopt, true});
        rep.gain += g;
      }
      return;
    }
    int best_pos = -1;
    double best_gain = 0.0;
    for (std::size_t p = 0; p < assignment_[t].size(); ++p) {
      if (!candidate(p)) continue;
      const double g = gain(ti, static_cast<int>(p));
      if (g > best_gain) {
        best_gain = g;
        best_pos = static_cast<int>(p);
      }
    }
    if (best_pos >= 0) {
      rep.changes.push_back({ti, assignment_[t][static_cast<std::size_t>(best_pos)], true});
      rep.gain += best_gain;
    }
  };

  std::visit(
      Overloaded{
          [&](const IndividualSparsity& c) {
            for (std::size_t t = 0; t < T; ++t) {
              if (contains(assignment_[t], atom)) continue;
              per_point(t, static_cast<int>(assignment_[t].size()) < c.s,
                        [](std::size_t) { return true; });
            }
          },
          [&](const PartitionMatroid& c) {
            for (std::size_t t = 0; t < T; ++t) {
              if (contains(assignment_[t], atom)) continue;
              const auto& part = c.per_point[t];
              const int q = part.category_of_atom[static_cast<std::size_t>(atom)];
              int used = 0;
              for (int z : assignment_[t]) {
                if (part.category_of_atom[static_cast<std::size_t>(z)] == q) ++used;
              }
              per_point(t, used < part.caps[static_cast<std::size_t>(q)], [&](std::size_t p) {
                return part.category_of_atom[static_cast<std::size_t>(assignment_[t][p])] == q;
              });
            }
          },
          [&](const BlockSparsity&) {
            throw UnsupportedConstraint(
                "exact replacement gains only support individual and matroid constraints");
          },
          [&](const AverageSparsity&) {
            throw UnsupportedConstraint(
                "exact replacement gains only support individual and matroid constraints");
          },
      },
      constraint_);
  return rep;
}

Replacement best_replacement(const SparsityConstraint& constraint,
                             const SupportAssignment& assignment, int num_atoms,
                             int atom, const GainInputs& gains,
                             std::vector<std::vector<double>> removal_costs) {
  const ReplacementSearch search(constraint, assignment, num_atoms,
                                 std::move(removal_costs));
  return search.best(atom, gains);
}

}  // namespace dictsel
