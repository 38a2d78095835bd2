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

#include "dictsel/select_online.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "dictsel/encoders.hpp"
#include "dictsel/errors.hpp"

namespace dictsel {

namespace {

constexpr double kGradientNoiseFloor = 1e-20;

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

double hedge_learning_rate(int num_actions, int horizon) {
  if (num_actions < 1 || horizon < 1) throw InvalidArgument("hedge needs n >= 1 and horizon >= 1");
  return std::sqrt(8.0 * std::log(static_cast<double>(num_actions)) / horizon);
}

HedgeExpert::HedgeExpert(int num_actions, int horizon, std::uint64_t seed)
    : log_weights_(Vector::Zero(num_actions)), horizon_(horizon), rng_(seed) {
  if (num_actions < 1) throw InvalidArgument("hedge needs at least one action");
  if (horizon < 0) throw InvalidArgument("hedge horizon must be >= 0");
  eta_ = hedge_learning_rate(num_actions, horizon > 0 ? horizon : 1);
}

Vector HedgeExpert::probabilities() const {
  const double top = log_weights_.maxCoeff();
  Vector p = (log_weights_.array() - top).exp().matrix();
  return p / p.sum();
}

int HedgeExpert::sample() {
  const Vector p = probabilities();
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  double acc = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    acc += p(a);
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(p.size() - 1);
}

void HedgeExpert::update(std::span<const double> gains, double scale) {
  if (static_cast<Eigen::Index>(gains.size()) != log_weights_.size()) {
    throw InvalidArgument("hedge gains need one entry per action");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("hedge scale must be positive");
  for (double g : gains) {
    if (!std::isfinite(g) || g < 0.0 || g > scale * (1.0 + 1e-12)) {
      throw InvalidArgument("hedge gains must lie in [0, scale]");
    }
  }
  if (horizon_ == 0) {
    if (epoch_updates_ == epoch_length_) {
      log_weights_.setZero();
      epoch_length_ *= 2;
      epoch_updates_ = 0;
      eta_ = hedge_learning_rate(num_actions(), static_cast<int>(epoch_length_));
    }
    ++epoch_updates_;
  }
  for (std::size_t a = 0; a < gains.size(); ++a) {
    log_weights_(static_cast<Eigen::Index>(a)) += eta_ * gains[a] / scale;
  }
}

int hedge_step(HedgeExpert& expert, std::span<const double> gains, double scale) {
  expert.update(gains, scale);
  return expert.sample();
}

std::string online_method_name(OnlineMethod method) {
  switch (method) {
    case OnlineMethod::kSdsMa:
      return "OSDS_MA";
    case OnlineMethod::kReplacementGreedy:
      return "ORG";
    case OnlineMethod::kReplacementOmp:
      return "OROMP";
  }
  return "unknown";
}

OnlineMethod parse_online_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "osds_ma" || lower == "sds_ma") return OnlineMethod::kSdsMa;
  if (lower == "org" || lower == "rg") return OnlineMethod::kReplacementGreedy;
  if (lower == "oromp" || lower == "romp") return OnlineMethod::kReplacementOmp;
  throw ParseError("unknown online method '" + std::string(name) + "'");
}

std::vector<double> OnlineLedger::expert_regrets() const {
  std::vector<double> out(cumulative_feedback.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = cumulative_feedback[i].maxCoeff() - cumulative_expert_gain[i];
  }
  return out;
}

OnlineSelector::OnlineSelector(const GroundSet& ground_set, OnlineConfig config)
    : ground_set_(ground_set), config_(config) {
  if (config_.k < 1) throw InvalidArgument("online dictionary size k must be >= 1");
  if (config_.s < 0 || config_.s > config_.k) throw InvalidArgument("online sparsity must satisfy 0 <= s <= k");
  smoothness_ = config_.smoothness.value_or(1.0 + ground_set_.coherence());
  if (!(smoothness_ > 0.0)) throw InvalidArgument("smoothness must be positive");
  const int n = ground_set_.size();
  std::seed_seq seq{config_.seed, static_cast<std::uint64_t>(0x9e3779b97f4a7c15ULL)};
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(config_.k));
  seq.generate(seeds.begin(), seeds.end());
  for (int i = 0; i < config_.k; ++i) {
    experts_.emplace_back(n, config_.horizon, seeds[static_cast<std::size_t>(i)]);
  }
  ledger_.cumulative_feedback.assign(static_cast<std::size_t>(config_.k), Vector::Zero(n));
  ledger_.cumulative_expert_gain.assign(static_cast<std::size_t>(config_.k), 0.0);
}

std::vector<int> OnlineSelector::propose() {
  if (!proposed_) {
    sampled_.clear();
    for (auto& expert : experts_) sampled_.push_back(expert.sample());
    proposed_ = true;
  }
  std::vector<int> played;
  for (int a : sampled_) {
    if (!contains(played, a)) played.push_back(a);
  }
  return played;
}

const RoundRecord& OnlineSelector::observe(const Eigen::Ref<const Vector>& y) {
  if (!proposed_) propose();
  const Matrix& atoms = ground_set_.atoms();
  if (y.size() != atoms.rows()) throw DimensionMismatch("data point dimension mismatch");
  const Eigen::Index n = atoms.cols();
  const int k = config_.k;
  const int s = config_.s;
  const double y_sq = y.squaredNorm();
  const double m = smoothness_;

  std::vector<Vector> feedback(static_cast<std::size_t>(k));
  SupportFactorization factor(atoms.rows());
  const Vector singleton = 0.5 * (atoms.transpose() * y).array().square().matrix();

  for (int i = 0; i < k; ++i) {
    const int pick = sampled_[static_cast<std::size_t>(i)];
    Vector fb = Vector::Zero(n);

    switch (config_.method) {
      case OnlineMethod::kSdsMa: {
        // Marginal gain of the surrogate max_{|Z| <= s} sum_{a in Z} f({a})
        // over the earlier slots' picks.
        std::vector<double> prefix;
        for (int j = 0; j < i; ++j) {
          const int a = sampled_[static_cast<std::size_t>(j)];
          if (!contains(std::vector<int>(sampled_.begin(), sampled_.begin() + j), a)) {
            prefix.push_back(singleton(a));
          }
        }
        std::sort(prefix.begin(), prefix.end(), std::greater<>());
        const double floor = static_cast<int>(prefix.size()) < s
                                 ? 0.0
                                 : (s == 0 ? std::numeric_limits<double>::infinity()
                                           : prefix[static_cast<std::size_t>(s - 1)]);
        const std::vector<int> earlier(sampled_.begin(), sampled_.begin() + i);
        for (Eigen::Index a = 0; a < n; ++a) {
          if (contains(earlier, static_cast<int>(a))) continue;
          fb(a) = std::max(0.0, singleton(a) - floor);
        }
        break;
      }
      case OnlineMethod::kReplacementGreedy: {
        const Vector r = factor.residual(y);
        const Vector grad = atoms.transpose() * r;
        const auto& support = factor.columns();
        int best_position = -1;
        if (static_cast<int>(support.size()) < s) {
          fb = addition_gains(factor, grad, atoms).cwiseMax(0.0);
        } else if (!support.empty()) {
          const double u = 0.5 * (y_sq - r.squaredNorm());
          double pick_best = 0.0;
          for (std::size_t p = 0; p < support.size(); ++p) {
            SupportFactorization reduced = factor;
            reduced.remove(p);
            const Vector rr = reduced.residual(y);
            const Vector g = addition_gains(reduced, atoms.transpose() * rr, atoms,
                                            0.5 * (y_sq - rr.squaredNorm()) - u);
            fb = fb.cwiseMax(g);
            if (g(pick) > pick_best) {
              pick_best = g(pick);
              best_position = static_cast<int>(p);
            }
          }
        }
        for (int a : support) fb(a) = 0.0;
        if (fb(pick) > 0.0) {
          SupportFactorization next = factor;
          if (static_cast<int>(support.size()) >= s) next.remove(static_cast<std::size_t>(best_position));
          try {
            next.insert(atoms, pick);
            factor = std::move(next);
          } catch (const RankDeficient&) {
          }
        }
        break;
      }
      case OnlineMethod::kReplacementOmp: {
        const Vector r = factor.residual(y);
        const Vector grad = atoms.transpose() * r;
        const Vector w = factor.solve(y);
        const auto& support = factor.columns();
        for (Eigen::Index a = 0; a < n; ++a) {
          const double g2 = grad(a) * grad(a);
          fb(a) = g2 <= kGradientNoiseFloor * y_sq ? 0.0 : g2 / m;
        }
        const bool full = static_cast<int>(support.size()) >= s;
        Eigen::Index cheapest = -1;
        if (full) {
          if (support.empty()) {
            fb.setZero();
          } else {
            const double min_cost = m * w.array().square().minCoeff(&cheapest);
            fb = (fb.array() - min_cost).cwiseMax(0.0).matrix();
          }
        }
        for (int a : support) fb(a) = 0.0;
        if (fb(pick) > 0.0) {
          SupportFactorization next = factor;
          if (full) next.remove(static_cast<std::size_t>(cheapest));
          try {
            next.insert(atoms, pick);
            factor = std::move(next);
          } catch (const RankDeficient&) {
          }
        }
        break;
      }
    }
    feedback[static_cast<std::size_t>(i)] = std::move(fb);
  }

  RoundRecord rec;
  rec.round = static_cast<int>(ledger_.rounds.size()) + 1;
  rec.sampled = sampled_;
  if (config_.method == OnlineMethod::kSdsMa) {
    // The surrogate's support: top-s played atoms by singleton gain.
    std::vector<int> played = propose();
    std::stable_sort(played.begin(), played.end(),
                     [&](int a, int b) { return singleton(a) > singleton(b); });
    SupportFactorization fit(atoms.rows());
    for (int a : played) {
      if (static_cast<int>(fit.size()) >= s || !(singleton(a) > 0.0)) break;
      try {
        fit.insert(atoms, a);
      } catch (const RankDeficient&) {
      }
    }
    factor = std::move(fit);
  }
  rec.support = factor.columns();
  rec.player_gain = 0.5 * (y_sq - factor.residual(y).squaredNorm());

  double round_max = 0.0;
  for (const auto& fb : feedback) round_max = std::max(round_max, fb.maxCoeff());
  ledger_.gain_bound = std::max(ledger_.gain_bound, round_max);
  rec.best_fixed_gain_bound = ledger_.gain_bound;

  for (int i = 0; i < k; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const Vector& fb = feedback[ii];
    if (ledger_.gain_bound > 0.0) {
      experts_[ii].update(std::span<const double>(fb.data(), static_cast<std::size_t>(n)),
                          ledger_.gain_bound);
    }
    ledger_.cumulative_feedback[ii] += fb;
    const double own = fb(sampled_[ii]);
    ledger_.cumulative_expert_gain[ii] += own;
    rec.expert_gain.push_back(own);
  }
  ledger_.cumulative_player_gain += rec.player_gain;
  ledger_.rounds.push_back(std::move(rec));
  last_feedback_ = std::move(feedback);
  proposed_ = false;
  return ledger_.rounds.back();
}

const RoundRecord& OnlineSelector::play_round(const Eigen::Ref<const Vector>& y) {
  propose();
  return observe(y);
}

double alpha_regret(const OnlineLedger& ledger, double offline_opt, double alpha) {
  return alpha * offline_opt - ledger.cumulative_player_gain;
}

}  // namespace dictsel
