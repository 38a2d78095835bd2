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

#include "dictsel/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "dictsel/encoders.hpp"
#include "dictsel/errors.hpp"
#include "dictsel/parallel.hpp"
#include "dictsel/select_offline.hpp"

namespace dictsel {

namespace {

constexpr double kBruteForceLimit = 1e7;

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// All subsets of {0..k-1} of size `size`, as bitmasks, in lexicographic order.
std::vector<std::uint64_t> position_subsets(int k, int size) {
  std::vector<std::uint64_t> out;
  if (size < 0 || size > k) return out;
  std::vector<int> idx(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    std::uint64_t mask = 0;
    for (int i : idx) mask |= std::uint64_t{1} << i;
    out.push_back(mask);
    int i = size - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == k - size + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::vector<int> atoms_of(std::uint64_t mask) {
  std::vector<int> out;
  while (mask) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

// f_t of every data point for one atom set, memoized by bitmask.
class UtilityTable {
 public:
  UtilityTable(const Matrix& data, const Matrix& atoms) : data_(data), atoms_(atoms) {}

  const Vector& at(std::uint64_t mask) {
    auto it = cache_.find(mask);
    if (it != cache_.end()) return it->second;
    SupportFactorization factor(atoms_.rows());
    for (int a : atoms_of(mask)) {
      if (static_cast<Eigen::Index>(factor.size()) >= atoms_.rows()) break;
      try {
        factor.insert(atoms_, a);
      } catch (const RankDeficient&) {
      }
    }
    Vector values = Vector::Zero(data_.cols());
    if (!factor.empty()) {
      const Matrix proj = factor.q().leftCols(static_cast<Eigen::Index>(factor.size())).transpose() * data_;
      values = 0.5 * proj.colwise().squaredNorm().transpose();
    }
    return cache_.emplace(mask, std::move(values)).first->second;
  }

 private:
  const Matrix& data_;
  const Matrix& atoms_;
  std::unordered_map<std::uint64_t, Vector> cache_;
};

std::uint64_t to_atom_mask(std::uint64_t positions, const std::vector<int>& dictionary) {
  std::uint64_t mask = 0;
  while (positions) {
    mask |= std::uint64_t{1} << dictionary[static_cast<std::size_t>(std::countr_zero(positions))];
    positions &= positions - 1;
  }
  return mask;
}

bool independent(const Partition& partition, std::uint64_t atom_mask) {
  std::vector<int> used(partition.caps.size(), 0);
  for (int a : atoms_of(atom_mask)) {
    const int cat = partition.category_of_atom[static_cast<std::size_t>(a)];
    if (++used[static_cast<std::size_t>(cat)] > partition.caps[static_cast<std::size_t>(cat)]) return false;
  }
  return true;
}

struct DictionaryOptimum {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> supports;  // atom masks per t
};

DictionaryOptimum solve_individual(UtilityTable& table, const std::vector<int>& dict, int T,
                                   const std::vector<std::uint64_t>& subsets) {
  DictionaryOptimum best;
  best.supports.assign(static_cast<std::size_t>(T), 0);
  std::vector<double> per_t(static_cast<std::size_t>(T), -std::numeric_limits<double>::infinity());
  for (std::uint64_t pos : subsets) {
    const std::uint64_t mask = to_atom_mask(pos, dict);
    const Vector& vals = table.at(mask);
    for (int t = 0; t < T; ++t) {
      if (vals(t) > per_t[static_cast<std::size_t>(t)]) {
        per_t[static_cast<std::size_t>(t)] = vals(t);
        best.supports[static_cast<std::size_t>(t)] = mask;
      }
    }
  }
  best.value = 0.0;
  for (double v : per_t) best.value += v;
  return best;
}

DictionaryOptimum solve_matroid(UtilityTable& table, const std::vector<int>& dict,
                                const PartitionMatroid& matroid,
                                const std::vector<std::uint64_t>& subsets) {
  const int T = static_cast<int>(matroid.per_point.size());
  DictionaryOptimum best;
  best.value = 0.0;
  best.supports.assign(static_cast<std::size_t>(T), 0);
  for (int t = 0; t < T; ++t) {
    double top = table.at(0)(t);
    for (std::uint64_t pos : subsets) {
      const std::uint64_t mask = to_atom_mask(pos, dict);
      if (!independent(matroid.per_point[static_cast<std::size_t>(t)], mask)) continue;
      const double v = table.at(mask)(t);
      if (v > top) {
        top = v;
        best.supports[static_cast<std::size_t>(t)] = mask;
      }
    }
    best.value += top;
  }
  return best;
}

DictionaryOptimum solve_average(UtilityTable& table, const std::vector<int>& dict,
                                const AverageSparsity& avg,
                                const std::vector<std::vector<std::uint64_t>>& by_size) {
  const int T = static_cast<int>(avg.per_point_caps.size());
  const int k = static_cast<int>(dict.size());
  // Best value and support of each size per point.
  std::vector<std::vector<double>> value(static_cast<std::size_t>(T));
  std::vector<std::vector<std::uint64_t>> arg(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const int cap = std::min(avg.per_point_caps[static_cast<std::size_t>(t)], k);
    for (int j = 0; j <= cap; ++j) {
      double top = -std::numeric_limits<double>::infinity();
      std::uint64_t top_mask = 0;
      for (std::uint64_t pos : by_size[static_cast<std::size_t>(j)]) {
        const std::uint64_t mask = to_atom_mask(pos, dict);
        const double v = table.at(mask)(t);
        if (v > top) {
          top = v;
          top_mask = mask;
        }
      }
      value[static_cast<std::size_t>(t)].push_back(top);
      arg[static_cast<std::size_t>(t)].push_back(top_mask);
    }
  }
  // Knapsack over the total cap.
  const int budget = std::min(avg.total_cap, T * k);
  const double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(static_cast<std::size_t>(T + 1),
                                      std::vector<double>(static_cast<std::size_t>(budget + 1), kNegInf));
  std::vector<std::vector<int>> take(static_cast<std::size_t>(T + 1),
                                     std::vector<int>(static_cast<std::size_t>(budget + 1), 0));
  std::fill(dp[0].begin(), dp[0].end(), 0.0);
  for (int t = 0; t < T; ++t) {
    const auto& vt = value[static_cast<std::size_t>(t)];
    for (int b = 0; b <= budget; ++b) {
      for (int j = 0; j < static_cast<int>(vt.size()) && j <= b; ++j) {
        const double v = dp[static_cast<std::size_t>(t)][static_cast<std::size_t>(b - j)] + vt[static_cast<std::size_t>(j)];
        if (v > dp[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(b)]) {
          dp[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(b)] = v;
          take[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(b)] = j;
        }
      }
    }
  }
  DictionaryOptimum best;
  best.value = dp[static_cast<std::size_t>(T)][static_cast<std::size_t>(budget)];
  best.supports.assign(static_cast<std::size_t>(T), 0);
  int b = budget;
  for (int t = T; t >= 1; --t) {
    const int j = take[static_cast<std::size_t>(t)][static_cast<std::size_t>(b)];
    best.supports[static_cast<std::size_t>(t - 1)] = arg[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(j)];
    b -= j;
  }
  return best;
}

DictionaryOptimum solve_block(UtilityTable& table, const std::vector<int>& dict,
                              const BlockSparsity& block, int T,
                              const std::vector<std::vector<std::uint64_t>>& by_size) {
  const int k = static_cast<int>(dict.size());
  DictionaryOptimum best;
  best.value = 0.0;
  best.supports.assign(static_cast<std::size_t>(T), 0);
  // f is monotone, so every point of a block uses the whole block union.
  for (std::size_t b = 0; b < block.blocks.size(); ++b) {
    const int cap = std::min(block.caps[b], k);
    double top = -std::numeric_limits<double>::infinity();
    std::uint64_t top_mask = 0;
    for (std::uint64_t pos : by_size[static_cast<std::size_t>(cap)]) {
      const std::uint64_t mask = to_atom_mask(pos, dict);
      const Vector& vals = table.at(mask);
      double v = 0.0;
      for (int t : block.blocks[b]) v += vals(t);
      if (v > top) {
        top = v;
        top_mask = mask;
      }
    }
    best.value += top;
    for (int t : block.blocks[b]) best.supports[static_cast<std::size_t>(t)] = top_mask;
  }
  return best;
}

double supports_per_dictionary(const SparsityConstraint& constraint, int k) {
  return std::visit(
      [k](const auto& c) -> double {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, IndividualSparsity>) {
          return binomial(k, std::min(c.s, k));
        } else if constexpr (std::is_same_v<C, PartitionMatroid>) {
          return std::ldexp(1.0, k) * static_cast<double>(std::max<std::size_t>(c.per_point.size(), 1));
        } else if constexpr (std::is_same_v<C, AverageSparsity>) {
          int cap = 0;
          for (int s : c.per_point_caps) cap = std::max(cap, s);
          double total = 0.0;
          for (int j = 0; j <= std::min(cap, k); ++j) total += binomial(k, j);
          return total * static_cast<double>(std::max<std::size_t>(c.per_point_caps.size(), 1));
        } else {
          double total = 0.0;
          for (int cap : c.caps) total += binomial(k, std::min(cap, k));
          return std::max(total, 1.0);
        }
      },
      constraint);
}

}  // namespace

double residual_variance(const Matrix& dictionary, const Matrix& data, int s) {
  if (s < 0) throw InvalidArgument("sparsity must be >= 0");
  if (dictionary.rows() != data.rows() && dictionary.cols() > 0) {
    throw DimensionMismatch("dictionary and data dimensions differ");
  }
  if (data.size() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index t = 0; t < data.cols(); ++t) {
    total += dictionary.cols() == 0 ? data.col(t).squaredNorm()
                                    : omp_encode(dictionary, data.col(t), s).residual_sq;
  }
  return total / (static_cast<double>(data.cols()) * static_cast<double>(data.rows()));
}

GroundSet build_ground_set(const GroundSetRecipe& recipe) {
  std::vector<AtomBlock> blocks;
  for (const auto& b : recipe.bases) {
    if (b.kind == "dct") {
      blocks.push_back(dct2_basis(recipe.side));
    } else if (b.kind == "haar") {
      blocks.push_back(haar2_basis(recipe.side));
    } else if (b.kind == "csv") {
      blocks.push_back(load_atom_block_csv(b.path, b.path));
    } else {
      throw ConfigError("unknown basis '" + b.kind + "'");
    }
  }
  return assemble(blocks);
}

SparsityConstraint build_constraint(const ConstraintSpec& spec, int num_points, int num_atoms) {
  SparsityConstraint out;
  if (spec.family == "individual") {
    out = IndividualSparsity{spec.s};
  } else if (spec.family == "matroid") {
    out = uniform_matroid(num_points, num_atoms, spec.s);
  } else if (spec.family == "block") {
    BlockSparsity block;
    for (int t0 = 0; t0 < num_points; t0 += spec.block_size) {
      std::vector<int> members;
      for (int t = t0; t < std::min(num_points, t0 + spec.block_size); ++t) members.push_back(t);
      block.blocks.push_back(std::move(members));
      block.caps.push_back(spec.block_cap);
    }
    out = block;
  } else if (spec.family == "average") {
    const int total = spec.total ? *spec.total
                      : spec.total_per_point ? *spec.total_per_point * num_points
                                             : spec.s * num_points;
    out = uniform_average(num_points, spec.s, total);
  } else {
    throw ConfigError("constraint.family: unknown family '" + spec.family + "'");
  }
  validate(out, num_points, num_atoms);
  return out;
}

std::uint64_t trial_seed(std::uint64_t base, int trial) {
  return mix(base ^ mix(static_cast<std::uint64_t>(trial)));
}

TrialData make_trial_data(const DatasetRecipe& recipe, const GroundSet& ground_set,
                          std::uint64_t seed) {
  TrialData out;
  if (recipe.kind == "synthetic") {
    out.train = synth_dataset(ground_set, recipe.train_points, recipe.planted, recipe.s, seed);
    const auto& planted = std::get<SyntheticOrigin>(out.train.provenance).planted;
    out.test = synth_from_dictionary(ground_set, planted, recipe.test_points, recipe.s, mix(seed));
  } else if (recipe.kind == "patches") {
    const Matrix image = read_image(recipe.image_path);
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(ground_set.dim()))));
    if (static_cast<Eigen::Index>(side) * side != ground_set.dim()) {
      throw ConfigError("ground set dimension is not a square patch size");
    }
    Dataset all = extract_patches(image, side, recipe.train_points + recipe.test_points, seed,
                                  recipe.image_path);
    out.train = all;
    out.train.points = all.points.leftCols(recipe.train_points);
    out.test = all;
    out.test.points = all.points.rightCols(recipe.test_points);
  } else if (recipe.kind == "file") {
    out.train = load_dataset(recipe.train_path);
    out.test = recipe.test_path.empty() ? out.train : load_dataset(recipe.test_path);
  } else {
    throw ConfigError("data.kind: unknown dataset kind '" + recipe.kind + "'");
  }
  if (out.train.dim() != ground_set.dim() || (out.test.size() > 0 && out.test.dim() != ground_set.dim())) {
    throw DimensionMismatch("dataset dimension does not match the ground set");
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const TrialCallback& on_trial) {
  validate(config);
  const GroundSet ground_set = build_ground_set(config.ground_set);
  ExperimentResult result;
  result.config = config;
  std::vector<std::vector<ResultRow>> per_trial(static_cast<std::size_t>(config.trials));
  const int trial_threads = std::min(config.threads, config.trials);
  const int selector_threads = trial_threads > 1 ? 1 : config.threads;
  std::mutex callback_mutex;

  parallel_for(per_trial.size(), trial_threads, [&](std::size_t trial) {
    const std::uint64_t seed = trial_seed(config.seed, static_cast<int>(trial));
    const TrialData data = make_trial_data(config.data, ground_set, seed);
    const SparsityConstraint constraint =
        build_constraint(config.constraint, data.train.size(), ground_set.size());
    auto& rows = per_trial[trial];
    for (const auto& spec : config.methods) {
      for (int k : spec.k) {
        SelectorConfig sc;
        sc.k = std::min(k, ground_set.size());
        sc.method = spec.method;
        sc.smoothness = spec.smoothness;
        sc.threads = selector_threads;
        const auto start = std::chrono::steady_clock::now();
        const SelectionState state = select(data.train.points, ground_set, constraint, sc);
        const auto stop = std::chrono::steady_clock::now();
        const Matrix dictionary = ground_set.columns(state.dictionary);
        ResultRow row;
        row.trial = static_cast<int>(trial);
        row.seed = seed;
        row.method = method_name(spec.method);
        row.k = k;
        row.objective = state.objective;
        row.train_residual_variance = residual_variance(dictionary, data.train.points, config.eval_s);
        row.test_residual_variance = residual_variance(dictionary, data.test.points, config.eval_s);
        row.seconds = std::chrono::duration<double>(stop - start).count();
        rows.push_back(row);
      }
    }
    if (on_trial) {
      const std::lock_guard<std::mutex> lock(callback_mutex);
      on_trial(static_cast<int>(trial), rows);
    }
  });

  for (auto& rows : per_trial) {
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  result.aggregates = aggregate(result.rows);
  return result;
}

BruteForceResult brute_force_optimum(const Matrix& data, const GroundSet& ground_set,
                                     const SparsityConstraint& constraint, int k) {
  const int n = ground_set.size();
  const int T = static_cast<int>(data.cols());
  if (n > 64) throw InvalidArgument("exhaustive search supports at most 64 atoms");
  if (k < 0) throw InvalidArgument("dictionary size must be >= 0");
  if (data.rows() != ground_set.dim()) throw DimensionMismatch("data and ground set dimensions differ");
  validate(constraint, T, n);
  k = std::min(k, n);
  const double work = binomial(n, k) * supports_per_dictionary(constraint, k);
  if (work > kBruteForceLimit) {
    throw TooLarge("exhaustive search would examine " + std::to_string(work) + " supports");
  }

  // Position subsets up to the largest support size the family allows.
  const int largest = std::visit(
      [k](const auto& c) -> int {
        using C = std::decay_t<decltype(c)>;
        int cap = k;
        if constexpr (std::is_same_v<C, IndividualSparsity>) {
          cap = c.s;
        } else if constexpr (std::is_same_v<C, AverageSparsity>) {
          cap = 0;
          for (int s : c.per_point_caps) cap = std::max(cap, s);
        } else if constexpr (std::is_same_v<C, BlockSparsity>) {
          cap = 0;
          for (int b : c.caps) cap = std::max(cap, b);
        }
        return std::min(cap, k);
      },
      constraint);
  std::vector<std::vector<std::uint64_t>> by_size(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= largest; ++j) by_size[static_cast<std::size_t>(j)] = position_subsets(k, j);
  std::vector<std::uint64_t> all_subsets;
  if (std::holds_alternative<PartitionMatroid>(constraint)) {
    for (const auto& v : by_size) all_subsets.insert(all_subsets.end(), v.begin(), v.end());
  }

  UtilityTable table(data, ground_set.atoms());
  DictionaryOptimum best;
  std::vector<int> best_dict;
  for (std::uint64_t pos : position_subsets(n, k)) {
    const std::vector<int> dict = atoms_of(pos);
    DictionaryOptimum cur = std::visit(
        [&](const auto& c) -> DictionaryOptimum {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, IndividualSparsity>) {
            return solve_individual(table, dict, T, by_size[static_cast<std::size_t>(std::min(c.s, k))]);
          } else if constexpr (std::is_same_v<C, PartitionMatroid>) {
            return solve_matroid(table, dict, c, all_subsets);
          } else if constexpr (std::is_same_v<C, AverageSparsity>) {
            return solve_average(table, dict, c, by_size);
          } else {
            return solve_block(table, dict, c, T, by_size);
          }
        },
        constraint);
    if (cur.value > best.value) {
      best = std::move(cur);
      best_dict = dict;
    }
  }

  BruteForceResult out;
  out.objective = T == 0 ? 0.0 : best.value;
  out.dictionary = best_dict;
  out.supports.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T && !best.supports.empty(); ++t) {
    out.supports[static_cast<std::size_t>(t)] = atoms_of(best.supports[static_cast<std::size_t>(t)]);
  }
  return out;
}

OnlineTrace run_online(const GroundSet& ground_set, const OnlineConfig& config,
                       const Matrix& stream) {
  if (stream.rows() != ground_set.dim()) throw DimensionMismatch("stream and ground set dimensions differ");
  OnlineSelector selector(ground_set, config);
  OnlineTrace trace;
  const double log_n = std::log(static_cast<double>(ground_set.size()));
  for (Eigen::Index t = 0; t < stream.cols(); ++t) {
    selector.play_round(stream.col(t));
    const auto regrets = selector.ledger().expert_regrets();
    trace.max_expert_regret.push_back(*std::max_element(regrets.begin(), regrets.end()));
    trace.regret_bound.push_back(selector.ledger().gain_bound *
                                 std::sqrt(2.0 * static_cast<double>(t + 1) * log_n));
  }
  trace.ledger = selector.ledger();
  return trace;
}

}  // namespace dictsel
