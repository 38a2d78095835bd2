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

#include "dictsel/select_offline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "dictsel/encoders.hpp"
#include "dictsel/errors.hpp"
#include "dictsel/parallel.hpp"

namespace dictsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Squared gradient entries below this fraction of ||y_t||^2 are rounding
// noise (the residual is orthogonal to the support span) and count as zero.
constexpr double kGradientNoiseFloor = 1e-20;

void check_inputs(const Matrix& data, const GroundSet& ground_set, int k) {
  if (data.rows() != ground_set.dim()) {
    throw DimensionMismatch("data points and atoms have different dimensions");
  }
  if (k < 1 || k > ground_set.size()) {
    throw InvalidArgument("dictionary size k must be in [1, n]");
  }
}

void refresh_point(SelectionState& st, std::size_t t, const Matrix& data,
                   const Matrix& atoms) {
  const auto ti = static_cast<Eigen::Index>(t);
  const auto& factor = st.factors[t];
  st.supports[t] = factor.columns();
  st.coefficients[t] = factor.solve(data.col(ti));
  st.residuals[t] = factor.residual(data.col(ti));
  st.gradients.col(ti).noalias() = atoms.transpose() * st.residuals[t];
  st.utilities[t] = 0.5 * (data.col(ti).squaredNorm() - st.residuals[t].squaredNorm());
}

double sum_of(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

void add_to_dictionary(SelectionState& st, int atom) {
  if (std::find(st.dictionary.begin(), st.dictionary.end(), atom) == st.dictionary.end()) {
    st.dictionary.push_back(atom);
  }
}

// Unselected atom with the largest sum_t (grad u_t)_a^2, lowest index on ties.
int fallback_atom(const SelectionState& st) {
  const Vector score = st.gradients.rowwise().squaredNorm();
  int best = -1;
  for (Eigen::Index a = 0; a < score.size(); ++a) {
    if (std::find(st.dictionary.begin(), st.dictionary.end(), static_cast<int>(a)) !=
        st.dictionary.end()) {
      continue;
    }
    if (best < 0 || score(a) > score(best)) best = static_cast<int>(a);
  }
  return best;
}

// Applies a replacement to the factorizations. A change whose insertion turns
// out to be numerically dependent is skipped for that point (its gain is
// treated as -infinity after the fact).
void apply_to_state(SelectionState& st, const Replacement& rep, const Matrix& data,
                    const Matrix& atoms, const SelectorConfig& config,
                    IterationRecord& record) {
  std::vector<PointUpdate> updates(rep.changes.size());
  parallel_for(rep.changes.size(), config.threads, [&](std::size_t i) {
    const PointChange& change = rep.changes[i];
    const auto t = static_cast<std::size_t>(change.t);
    PointUpdate& up = updates[i];
    up.t = change.t;
    up.utility_before = st.utilities[t];

    SupportFactorization next = st.factors[t];
    double removed_sq = 0.0;
    if (change.removed) {
      const auto pos = next.position_of(*change.removed);
      if (!pos) throw InvalidArgument("replacement removes an atom outside the support");
      const double w = st.coefficients[t](static_cast<Eigen::Index>(*pos));
      removed_sq = w * w;
      next.remove(*pos);
    }
    double added_sq = 0.0;
    if (change.add) {
      added_sq = std::pow(st.gradients(rep.added_atom, static_cast<Eigen::Index>(t)), 2);
      try {
        next.insert(atoms, rep.added_atom);
      } catch (const RankDeficient&) {
        up.utility_after = up.utility_before;
        return;
      }
    }
    up.added_gradient_sq = added_sq;
    up.removed_coef_sq = removed_sq;
    st.factors[t] = std::move(next);
    refresh_point(st, t, data, atoms);
    up.utility_after = st.utilities[t];
  });
  if (config.record_updates) record.updates = std::move(updates);
}

void finish_iteration(SelectionState& st, IterationRecord record) {
  st.objective = sum_of(st.utilities);
  record.objective = st.objective;
  st.history.push_back(std::move(record));
}

Replacement pick_best(std::vector<Replacement>& candidates) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < candidates.size(); ++a) {
    if (candidates[a].gain > candidates[best].gain) best = a;
  }
  return std::move(candidates[best]);
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::kSdsMa:
      return "SDS_MA";
    case Method::kReplacementGreedy:
      return "RG";
    case Method::kReplacementOmp:
      return "ROMP";
    case Method::kReplacementOmpDecay:
      return "ROMPd";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "sds_ma" || lower == "sdsma") return Method::kSdsMa;
  if (lower == "rg" || lower == "replacement_greedy") return Method::kReplacementGreedy;
  if (lower == "romp" || lower == "replacement_omp") return Method::kReplacementOmp;
  if (lower == "rompd") return Method::kReplacementOmpDecay;
  throw ParseError("unknown method '" + std::string(name) + "'");
}

SelectionState SelectionState::empty(const Matrix& data, const GroundSet& ground_set) {
  if (data.rows() != ground_set.dim()) {
    throw DimensionMismatch("data points and atoms have different dimensions");
  }
  const auto T = static_cast<std::size_t>(data.cols());
  SelectionState st;
  st.supports.assign(T, {});
  st.factors.assign(T, SupportFactorization(ground_set.dim()));
  st.coefficients.assign(T, Vector(0));
  st.residuals.resize(T);
  for (std::size_t t = 0; t < T; ++t) st.residuals[t] = data.col(static_cast<Eigen::Index>(t));
  st.gradients = ground_set.atoms().transpose() * data;
  st.utilities.assign(T, 0.0);
  return st;
}

SelectionState evaluate_supports(const Matrix& data, const GroundSet& ground_set,
                                 const SupportAssignment& supports) {
  SelectionState st = SelectionState::empty(data, ground_set);
  if (supports.size() != st.supports.size()) {
    throw DimensionMismatch("one support per data point is required");
  }
  for (std::size_t t = 0; t < supports.size(); ++t) {
    for (int atom : supports[t]) {
      try {
        st.factors[t].insert(ground_set.atoms(), atom);
      } catch (const RankDeficient&) {
      }
    }
    refresh_point(st, t, data, ground_set.atoms());
  }
  st.objective = sum_of(st.utilities);
  return st;
}

SelectionState sds_ma(const Matrix& data, const GroundSet& ground_set, int k, int s) {
  check_inputs(data, ground_set, k);
  if (s < 0) throw InvalidArgument("sparsity s must be >= 0");
  const int n = ground_set.size();
  const auto T = static_cast<std::size_t>(data.cols());

  // singleton(a, t) = f_t({a}) = 1/2 <a, y_t>^2 for unit atoms.
  const Matrix singleton = 0.5 * (ground_set.atoms().transpose() * data).array().square().matrix();

  // Per point, the selected singleton gains kept in descending order (top s).
  std::vector<std::vector<double>> top(T);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  SelectionState st = SelectionState::empty(data, ground_set);
  double surrogate = 0.0;

  for (int iter = 1; iter <= k; ++iter) {
    int best = -1;
    double best_gain = -kInf;
    for (int a = 0; a < n; ++a) {
      if (chosen[static_cast<std::size_t>(a)]) continue;
      double gain = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        const double v = singleton(a, static_cast<Eigen::Index>(t));
        const double floor = static_cast<int>(top[t].size()) < s ? 0.0
                             : s == 0                           ? kInf
                                                                : top[t][static_cast<std::size_t>(s - 1)];
        if (v > floor) gain += v - floor;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = a;
      }
    }
    chosen[static_cast<std::size_t>(best)] = true;
    st.dictionary.push_back(best);
    for (std::size_t t = 0; t < T; ++t) {
      auto& list = top[t];
      const double v = singleton(best, static_cast<Eigen::Index>(t));
      list.insert(std::upper_bound(list.begin(), list.end(), v, std::greater<>()), v);
      if (static_cast<int>(list.size()) > s) list.pop_back();
    }
    surrogate += best_gain;
    IterationRecord rec;
    rec.iteration = iter;
    rec.atom = best;
    rec.gain = best_gain;
    rec.objective = surrogate;
    st.history.push_back(std::move(rec));
  }

  // Supports: the s selected atoms with the largest positive singleton gain.
  SupportAssignment supports(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<int> order = st.dictionary;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return singleton(a, static_cast<Eigen::Index>(t)) > singleton(b, static_cast<Eigen::Index>(t));
    });
    for (int a : order) {
      if (static_cast<int>(supports[t].size()) >= s) break;
      if (singleton(a, static_cast<Eigen::Index>(t)) > 0.0) supports[t].push_back(a);
    }
  }
  SelectionState fitted = evaluate_supports(data, ground_set, supports);
  fitted.dictionary = std::move(st.dictionary);
  fitted.history = std::move(st.history);
  return fitted;
}

SelectionState replacement_greedy(const Matrix& data, const GroundSet& ground_set,
                                  const SparsityConstraint& constraint,
                                  const SelectorConfig& config) {
  check_inputs(data, ground_set, config.k);
  if (!std::holds_alternative<IndividualSparsity>(constraint) &&
      !std::holds_alternative<PartitionMatroid>(constraint)) {
    throw UnsupportedConstraint(
        "Replacement Greedy handles only individual and matroid constraints");
  }
  const auto T = static_cast<std::size_t>(data.cols());
  const int n = ground_set.size();
  const Matrix& atoms = ground_set.atoms();
  validate(constraint, static_cast<int>(T), n);

  SelectionState st = SelectionState::empty(data, ground_set);
  const auto* individual = std::get_if<IndividualSparsity>(&constraint);

  for (int iter = 1; iter <= config.k; ++iter) {
    // options[t][0] holds pure-addition gains, options[t][p + 1] the gains of
    // swapping out support position p, each as a length-n vector.
    std::vector<std::vector<Vector>> options(T);
    parallel_for(T, config.threads, [&](std::size_t t) {
      const auto ti = static_cast<Eigen::Index>(t);
      const auto& factor = st.factors[t];
      const std::size_t m = factor.size();
      const bool need_add = !individual || static_cast<int>(m) < individual->s;
      const bool need_swap = !individual || static_cast<int>(m) >= individual->s;
      options[t].resize(m + 1);
      if (need_add) {
        options[t][0] = addition_gains(factor, st.gradients.col(ti), atoms, 0.0);
      }
      if (!need_swap) return;
      const double y_sq = data.col(ti).squaredNorm();
      for (std::size_t p = 0; p < m; ++p) {
        SupportFactorization reduced = factor;
        reduced.remove(p);
        const Vector r = reduced.residual(data.col(ti));
        const double reduced_utility = 0.5 * (y_sq - r.squaredNorm());
        const Vector grad = atoms.transpose() * r;
        options[t][p + 1] = addition_gains(reduced, grad, atoms,
                                                 reduced_utility - st.utilities[t]);
      }
    });

    const ReplacementSearch search(constraint, st.supports, n);
    std::vector<Replacement> candidates(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), config.threads, [&](std::size_t a) {
      const ExactGainFn gain = [&](int t, int position) {
        const Vector& row = options[static_cast<std::size_t>(t)][static_cast<std::size_t>(position + 1)];
        return row.size() == 0 ? -kInf : row(static_cast<Eigen::Index>(a));
      };
      candidates[a] = search.best(static_cast<int>(a), gain);
    });

    IterationRecord rec;
    rec.iteration = iter;
    Replacement best = pick_best(candidates);
    if (best.gain > 0.0) {
      rec.atom = best.added_atom;
      rec.gain = best.gain;
      apply_to_state(st, best, data, atoms, config, rec);
    } else {
      rec.atom = fallback_atom(st);
      rec.fallback = true;
    }
    add_to_dictionary(st, rec.atom);
    finish_iteration(st, std::move(rec));
  }
  return st;
}

SelectionState replacement_omp(const Matrix& data, const GroundSet& ground_set,
                               const SparsityConstraint& constraint,
                               const SelectorConfig& config) {
  check_inputs(data, ground_set, config.k);
  const auto T = static_cast<std::size_t>(data.cols());
  const int n = ground_set.size();
  const Matrix& atoms = ground_set.atoms();
  validate(constraint, static_cast<int>(T), n);

  const double smoothness = config.smoothness.value_or(1.0 + ground_set.coherence());
  if (!(smoothness > 0.0) || !std::isfinite(smoothness)) {
    throw InvalidArgument("smoothness parameter must be positive and finite");
  }
  const bool decay = config.method == Method::kReplacementOmpDecay;

  SelectionState st = SelectionState::empty(data, ground_set);
  st.smoothness = smoothness;
  Vector noise_floor(static_cast<Eigen::Index>(T));
  for (std::size_t t = 0; t < T; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    noise_floor(ti) = kGradientNoiseFloor * data.col(ti).squaredNorm();
  }

  for (int iter = 1; iter <= config.k; ++iter) {
    const double m_i = decay ? smoothness / std::sqrt(static_cast<double>(iter)) : smoothness;

    // gains(t, a) = (1/M) (grad u_t)_a^2, stored T x n so each atom's column is
    // contiguous for the replacement search.
    Matrix gains = st.gradients.transpose().array().square().matrix();
    for (Eigen::Index a = 0; a < gains.cols(); ++a) {
      for (Eigen::Index t = 0; t < gains.rows(); ++t) {
        double& g = gains(t, a);
        g = g <= noise_floor(t) ? 0.0 : g / m_i;
      }
    }
    std::vector<std::vector<double>> costs(T);
    for (std::size_t t = 0; t < T; ++t) {
      const Vector& w = st.coefficients[t];
      costs[t].resize(static_cast<std::size_t>(w.size()));
      for (Eigen::Index p = 0; p < w.size(); ++p) costs[t][static_cast<std::size_t>(p)] = m_i * w(p) * w(p);
    }

    const ReplacementSearch search(constraint, st.supports, n, std::move(costs));
    std::vector<Replacement> candidates(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), config.threads, [&](std::size_t a) {
      const auto col = gains.col(static_cast<Eigen::Index>(a));
      candidates[a] = search.best(static_cast<int>(a),
                                  ProxyGains{std::span<const double>(col.data(), T)});
    });

    IterationRecord rec;
    rec.iteration = iter;
    rec.smoothness = m_i;
    Replacement best = pick_best(candidates);
    if (best.gain > 0.0) {
      rec.atom = best.added_atom;
      rec.gain = best.gain;
      apply_to_state(st, best, data, atoms, config, rec);
    } else {
      rec.atom = fallback_atom(st);
      rec.fallback = true;
    }
    add_to_dictionary(st, rec.atom);
    finish_iteration(st, std::move(rec));
  }
  return st;
}

SelectionState select(const Matrix& data, const GroundSet& ground_set,
                      const SparsityConstraint& constraint, const SelectorConfig& config) {
  switch (config.method) {
    case Method::kSdsMa: {
      const auto* individual = std::get_if<IndividualSparsity>(&constraint);
      if (!individual) {
        throw UnsupportedConstraint("SDS_MA is implemented for individual sparsity only");
      }
      return sds_ma(data, ground_set, config.k, individual->s);
    }
    case Method::kReplacementGreedy:
      return replacement_greedy(data, ground_set, constraint, config);
    case Method::kReplacementOmp:
    case Method::kReplacementOmpDecay:
      return replacement_omp(data, ground_set, constraint, config);
  }
  throw InvalidArgument("unknown selection method");
}

}  // namespace dictsel
