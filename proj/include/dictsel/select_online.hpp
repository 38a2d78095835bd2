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

// Online dictionary selection with full-information feedback. Each of the k
// greedy slots is played by a hedge expert over the n atoms; after a point
// y_t is revealed, every expert is told how much each atom would have gained
// in its slot given the supports built from the earlier slots.

#ifndef DICTSEL_SELECT_ONLINE_HPP_
#define DICTSEL_SELECT_ONLINE_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dictsel/ground_set.hpp"
#include "dictsel/linalg.hpp"

namespace dictsel {

// sqrt(8 ln n / horizon), the usual tuning for gains in [0, 1].
double hedge_learning_rate(int num_actions, int horizon);

// Exponential weights over n actions. Weights are kept as logarithms, so they
// stay strictly positive over long runs. With horizon == 0 the learning rate
// follows the doubling trick: epochs of length 1, 2, 4, ... each restart the
// weights with the rate tuned to the epoch length.
class HedgeExpert {
 public:
  HedgeExpert(int num_actions, int horizon, std::uint64_t seed);

  // Sampling distribution; sums to 1.
  Vector probabilities() const;

  int sample();

  // weight_a <- weight_a * exp(eta * gains[a] / scale). Gains must be finite
  // and in [0, scale].
  void update(std::span<const double> gains, double scale);

  double eta() const { return eta_; }
  int num_actions() const { return static_cast<int>(log_weights_.size()); }

 private:
  Vector log_weights_;
  double eta_ = 0.0;
  int horizon_ = 0;
  long epoch_length_ = 1;
  long epoch_updates_ = 0;
  std::mt19937_64 rng_;
};

// One hedge round: update with the gains, then draw the next action.
int hedge_step(HedgeExpert& expert, std::span<const double> gains, double scale);

enum class OnlineMethod {
  kSdsMa,             // online greedy on the modular surrogate
  kReplacementGreedy, // exact marginal / swap gains
  kReplacementOmp,    // gradient/coefficient proxy gains
};

std::string online_method_name(OnlineMethod method);
OnlineMethod parse_online_method(std::string_view name);

struct OnlineConfig {
  int k = 1;
  int s = 1;
  OnlineMethod method = OnlineMethod::kReplacementOmp;
  int horizon = 0;  // expected number of rounds; 0 for anytime
  std::optional<double> smoothness;  // M_{s,2}; default 1 + coherence
  std::uint64_t seed = 0;
};

struct RoundRecord {
  int round = 0;                        // 1-based
  std::vector<int> sampled;             // a_t^1 .. a_t^k
  std::vector<int> support;             // final Z_t
  double player_gain = 0.0;             // f_t(Z_t)
  std::vector<double> expert_gain;      // feedback of each expert's own pick
  double best_fixed_gain_bound = 0.0;   // running max feedback G
};

// Cumulative accounting needed for regret: per expert the total feedback of
// every atom and of its own picks.
struct OnlineLedger {
  std::vector<RoundRecord> rounds;
  std::vector<Vector> cumulative_feedback;  // per expert, length n
  std::vector<double> cumulative_expert_gain;
  double cumulative_player_gain = 0.0;
  double gain_bound = 0.0;  // G: max feedback value seen so far

  // max_a sum_t feedback_t^i(a) - sum_t feedback_t^i(a_t^i) for each expert.
  std::vector<double> expert_regrets() const;
};

class OnlineSelector {
 public:
  OnlineSelector(const GroundSet& ground_set, OnlineConfig config);

  // Samples a_t^1..a_t^k and returns the played dictionary X_t (distinct
  // atoms in slot order).
  std::vector<int> propose();

  // Reveals y_t for the proposed dictionary: computes the player gain, feeds
  // every expert its full gain vector and advances the round.
  const RoundRecord& observe(const Eigen::Ref<const Vector>& y);

  // propose() followed by observe(y).
  const RoundRecord& play_round(const Eigen::Ref<const Vector>& y);

  // Feedback vectors of the last observed round, one per expert.
  const std::vector<Vector>& last_feedback() const { return last_feedback_; }

  const OnlineLedger& ledger() const { return ledger_; }
  const std::vector<HedgeExpert>& experts() const { return experts_; }
  const OnlineConfig& config() const { return config_; }
  double smoothness() const { return smoothness_; }

 private:
  const GroundSet& ground_set_;
  OnlineConfig config_;
  double smoothness_ = 1.0;
  std::vector<HedgeExpert> experts_;
  std::vector<int> sampled_;
  bool proposed_ = false;
  OnlineLedger ledger_;
  std::vector<Vector> last_feedback_;
};

// alpha * offline_opt - cumulative player gain.
double alpha_regret(const OnlineLedger& ledger, double offline_opt, double alpha);

}  // namespace dictsel

#endif  // DICTSEL_SELECT_ONLINE_HPP_
