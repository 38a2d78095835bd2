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

#include <cmath>
#include <random>

#include "dictsel/data_io.hpp"
#include "dictsel/encoders.hpp"
#include "dictsel/errors.hpp"
#include "dictsel/experiment.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace dictsel;

namespace {

GroundSet dct_ground_set(int side) { return assemble({dct2_basis(side)}); }

}  // namespace

TEST_CASE("hedge learning rate") {
  CHECK(hedge_learning_rate(64, 500) == doctest::Approx(std::sqrt(8.0 * std::log(64.0) / 500.0)));
  CHECK(hedge_learning_rate(2, 1) == doctest::Approx(std::sqrt(8.0 * std::log(2.0))));
}

TEST_CASE("hedge expert") {
  SUBCASE("zero gains keep the distribution uniform") {
    HedgeExpert e(5, 100, 1);
    const std::vector<double> zeros(5, 0.0);
    for (int i = 0; i < 50; ++i) e.update(zeros, 1.0);
    const Vector p = e.probabilities();
    for (Eigen::Index a = 0; a < 5; ++a) CHECK(p(a) == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("a consistently rewarded action dominates") {
    HedgeExpert e(10, 200, 2);
    std::vector<double> gains(10, 0.0);
    gains[7] = 1.0;
    for (int i = 0; i < 200; ++i) e.update(gains, 1.0);
    CHECK(e.probabilities()(7) > 0.99);
    int hits = 0;
    for (int i = 0; i < 100; ++i) hits += e.sample() == 7 ? 1 : 0;
    CHECK(hits >= 95);
  }
  SUBCASE("probabilities stay normalized under long runs") {
    HedgeExpert e(6, 0, 3);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
      std::vector<double> g(6);
      for (auto& x : g) x = u(rng);
      e.update(g, 1.0);
      const Vector p = e.probabilities();
      CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
      CHECK(p.minCoeff() > 0.0);
    }
  }
  SUBCASE("anytime rate follows the epoch length") {
    HedgeExpert e(4, 0, 4);
    CHECK(e.eta() == doctest::Approx(hedge_learning_rate(4, 1)));
    const std::vector<double> g(4, 0.5);
    e.update(g, 1.0);
    e.update(g, 1.0);
    CHECK(e.eta() == doctest::Approx(hedge_learning_rate(4, 2)));
    e.update(g, 1.0);
    e.update(g, 1.0);
    CHECK(e.eta() == doctest::Approx(hedge_learning_rate(4, 4)));
  }
  SUBCASE("invalid gains") {
    HedgeExpert e(3, 10, 5);
    CHECK_THROWS_AS(e.update(std::vector<double>{0.0, 2.0, 0.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(e.update(std::vector<double>{0.0, -0.1, 0.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(e.update(std::vector<double>{0.0, NAN, 0.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(e.update(std::vector<double>{0.0, 0.0}, 1.0), InvalidArgument);
  }
}

TEST_CASE("online method names") {
  for (OnlineMethod m : {OnlineMethod::kSdsMa, OnlineMethod::kReplacementGreedy, OnlineMethod::kReplacementOmp}) {
    CHECK(parse_online_method(online_method_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_online_method("hedge"), ParseError);
}

TEST_CASE("online feedback invariants") {
  std::mt19937_64 rng(60);
  const GroundSet gs = assemble({dct2_basis(4), haar2_basis(4)});
  const Dataset data = synth_dataset(gs, 80, 8, 2, 61);
  for (OnlineMethod m : {OnlineMethod::kSdsMa, OnlineMethod::kReplacementGreedy, OnlineMethod::kReplacementOmp}) {
    CAPTURE(online_method_name(m));
    OnlineSelector sel(gs, {.k = 6, .s = 2, .method = m, .horizon = 80, .seed = 7});
    for (Eigen::Index t = 0; t < data.points.cols(); ++t) {
      const std::vector<int> played = sel.propose();
      const RoundRecord& rec = sel.observe(data.points.col(t));
      CHECK(rec.round == t + 1);
      CHECK(rec.sampled.size() == 6);
      CHECK(static_cast<int>(rec.support.size()) <= 2);
      for (int a : rec.support) CHECK(std::find(played.begin(), played.end(), a) != played.end());
      CHECK(rec.player_gain >= -1e-12);
      CHECK(rec.player_gain <= 0.5 * data.points.col(t).squaredNorm() + 1e-12);
      const double fit = oracle::subset_utility(gs.atoms(), rec.support, data.points.col(t));
      CHECK(rec.player_gain == doctest::Approx(fit).epsilon(1e-9));
      for (const Vector& fb : sel.last_feedback()) {
        CHECK(fb.minCoeff() >= 0.0);
        CHECK(fb.maxCoeff() <= rec.best_fixed_gain_bound);
      }
    }
    const OnlineLedger& ledger = sel.ledger();
    CHECK(ledger.rounds.size() == 80);
    CHECK(ledger.cumulative_feedback.size() == 6);
    for (double r : ledger.expert_regrets()) CHECK(r >= -1e-9);
  }
}

TEST_CASE("OROMP feedback before the support fills") {
  std::mt19937_64 rng(62);
  const GroundSet gs = dct_ground_set(4);
  OnlineSelector sel(gs, {.k = 4, .s = 4, .method = OnlineMethod::kReplacementOmp, .seed = 3});
  const Vector y = oracle::random_vector(rng, 16);
  sel.play_round(y);
  const double big_m = sel.smoothness();
  CHECK(big_m == doctest::Approx(1.0));
  const Vector first = sel.last_feedback().front();
  const Vector corr = gs.atoms().transpose() * y;
  for (Eigen::Index a = 0; a < 16; ++a) CHECK(first(a) == doctest::Approx(corr(a) * corr(a) / big_m));
  // On an orthonormal basis with s = k every slot adds its pick, so later
  // slots see the residual correlations.
  const RoundRecord& rec = sel.ledger().rounds.back();
  std::vector<int> played;
  for (int a : rec.sampled) {
    if (std::find(played.begin(), played.end(), a) == played.end()) played.push_back(a);
  }
  CHECK(rec.support.size() == played.size());
}

TEST_CASE("OSDS_MA feedback is the surrogate marginal") {
  std::mt19937_64 rng(63);
  const GroundSet gs = dct_ground_set(4);
  OnlineSelector sel(gs, {.k = 3, .s = 1, .method = OnlineMethod::kSdsMa, .seed = 11});
  const Vector y = oracle::random_vector(rng, 16);
  const RoundRecord& rec = sel.play_round(y);
  const Vector single = 0.5 * (gs.atoms().transpose() * y).array().square().matrix();
  const auto& fb = sel.last_feedback();
  for (Eigen::Index a = 0; a < 16; ++a) CHECK(fb[0](a) == doctest::Approx(single(a)));
  const double floor = single(rec.sampled[0]);
  for (Eigen::Index a = 0; a < 16; ++a) {
    if (a == rec.sampled[0]) {
      CHECK(fb[1](a) == 0.0);
    } else {
      CHECK(fb[1](a) == doctest::Approx(std::max(0.0, single(a) - floor)));
    }
  }
}

TEST_CASE("online learning on a stationary stream") {
  const GroundSet gs = dct_ground_set(4);
  const Dataset data = synth_dataset(gs, 400, 4, 1, 64);
  const OnlineTrace trace = run_online(gs, {.k = 4, .s = 1, .method = OnlineMethod::kReplacementOmp, .seed = 5},
                                       data.points);
  CHECK(trace.max_expert_regret.size() == 400);
  CHECK(trace.regret_bound.size() == 400);
  double early = 0.0;
  double late = 0.0;
  for (int t = 0; t < 50; ++t) early += trace.ledger.rounds[static_cast<std::size_t>(t)].player_gain;
  for (int t = 350; t < 400; ++t) late += trace.ledger.rounds[static_cast<std::size_t>(t)].player_gain;
  CHECK(late > early);
  for (std::size_t t = 0; t < 400; ++t) {
    const double bound = trace.ledger.rounds[t].best_fixed_gain_bound *
                         std::sqrt(2.0 * static_cast<double>(t + 1) * std::log(16.0));
    CHECK(trace.regret_bound[t] == doctest::Approx(bound));
  }
}

TEST_CASE("alpha regret") {
  OnlineLedger ledger;
  ledger.cumulative_player_gain = 3.0;
  CHECK(alpha_regret(ledger, 10.0, 0.5) == doctest::Approx(2.0));
  CHECK(alpha_regret(ledger, 2.0, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("online selector validation") {
  const GroundSet gs = dct_ground_set(4);
  CHECK_THROWS_AS(OnlineSelector(gs, {.k = 0}), InvalidArgument);
  CHECK_THROWS_AS(OnlineSelector(gs, {.k = 2, .s = 3}), InvalidArgument);
  OnlineSelector sel(gs, {.k = 2, .s = 1});
  CHECK_THROWS_AS(sel.play_round(Vector::Zero(9)), DimensionMismatch);
}

TEST_CASE("online runs are reproducible") {
  const GroundSet gs = dct_ground_set(4);
  const Dataset data = synth_dataset(gs, 60, 5, 2, 65);
  const OnlineConfig cfg{.k = 5, .s = 2, .method = OnlineMethod::kReplacementGreedy, .seed = 9};
  const OnlineTrace a = run_online(gs, cfg, data.points);
  const OnlineTrace b = run_online(gs, cfg, data.points);
  for (std::size_t t = 0; t < 60; ++t) CHECK(a.ledger.rounds[t].sampled == b.ledger.rounds[t].sampled);
  CHECK(a.ledger.cumulative_player_gain == b.ledger.cumulative_player_gain);
}
