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

// Command-line front end: select, bench, online, oracle, groundset.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dictsel/config.hpp"
#include "dictsel/data_io.hpp"
#include "dictsel/errors.hpp"
#include "dictsel/experiment.hpp"
#include "dictsel/select_offline.hpp"
#include "dictsel/select_online.hpp"
#include "json.hpp"

namespace {

using dictsel::ExperimentConfig;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment configuration (JSON)");
  cmd->add_option("--seed", opts.seed, "override the base seed");
  cmd->add_option("--out", opts.out, "output path (default: stdout)");
  cmd->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

ExperimentConfig load(const CommonOptions& opts) {
  ExperimentConfig config;
  if (!opts.config_path.empty()) {
    try {
      config = dictsel::load_config(opts.config_path);
    } catch (const dictsel::IoError& e) {
      throw dictsel::ConfigError(e.what());
    }
  }
  if (opts.seed) config.seed = *opts.seed;
  if (opts.threads) config.threads = *opts.threads;
  dictsel::validate(config);
  return config;
}

void emit(const CommonOptions& opts, const std::string& text) {
  if (opts.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    dictsel::write_text_file(opts.out, text);
  }
}

std::string replace_extension(const std::string& path, const std::string& ext) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ext;
  return path.substr(0, dot) + ext;
}

json labels_json(const dictsel::GroundSet& gs, const std::vector<int>& atoms) {
  json out = json::array();
  for (int a : atoms) {
    const auto& l = gs.labels()[static_cast<std::size_t>(a)];
    out.push_back({l.basis, l.index});
  }
  return out;
}

dictsel::MethodSpec pick_method(const ExperimentConfig& config,
                                const std::optional<std::string>& method,
                                const std::optional<int>& k) {
  dictsel::MethodSpec spec;
  if (!config.methods.empty()) spec = config.methods.front();
  if (method) {
    try {
      spec.method = dictsel::parse_method(*method);
    } catch (const dictsel::ParseError&) {
      throw dictsel::ConfigError("--method: unknown method '" + *method + "'");
    }
  }
  if (k) spec.k = {*k};
  if (spec.k.empty() || spec.k.front() < 1) throw dictsel::ConfigError("--k: must be >= 1");
  return spec;
}

int run_select(const CommonOptions& opts, const std::optional<std::string>& method,
               const std::optional<int>& k) {
  const ExperimentConfig config = load(opts);
  const dictsel::MethodSpec spec = pick_method(config, method, k);
  const auto gs = dictsel::build_ground_set(config.ground_set);
  const std::uint64_t seed = dictsel::trial_seed(config.seed, 0);
  const auto data = dictsel::make_trial_data(config.data, gs, seed);
  const auto constraint =
      dictsel::build_constraint(config.constraint, data.train.size(), gs.size());
  dictsel::SelectorConfig sc;
  sc.k = std::min(spec.k.front(), gs.size());
  sc.method = spec.method;
  sc.smoothness = spec.smoothness;
  sc.threads = config.threads;
  const auto start = std::chrono::steady_clock::now();
  const auto state = dictsel::select(data.train.points, gs, constraint, sc);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const dictsel::Matrix dict = gs.columns(state.dictionary);

  if (opts.format == "csv") {
    std::ostringstream out;
    out << std::setprecision(17) << "iteration,atom,basis,index,gain,objective,fallback\n";
    for (const auto& rec : state.history) {
      const auto& l = gs.labels()[static_cast<std::size_t>(rec.atom)];
      out << rec.iteration << ',' << rec.atom << ',' << l.basis << ',' << l.index << ','
          << rec.gain << ',' << rec.objective << ',' << (rec.fallback ? 1 : 0) << '\n';
    }
    emit(opts, out.str());
    return 0;
  }
  json history = json::array();
  for (const auto& rec : state.history) {
    history.push_back({{"iteration", rec.iteration},
                       {"atom", rec.atom},
                       {"gain", rec.gain},
                       {"objective", rec.objective},
                       {"fallback", rec.fallback}});
  }
  const json doc{
      {"method", dictsel::method_name(spec.method)},
      {"k", sc.k},
      {"seed", seed},
      {"constraint", dictsel::family_name(constraint)},
      {"objective", state.objective},
      {"train_residual_variance",
       dictsel::residual_variance(dict, data.train.points, config.eval_s)},
      {"test_residual_variance", dictsel::residual_variance(dict, data.test.points, config.eval_s)},
      {"seconds", seconds},
      {"dictionary", state.dictionary},
      {"labels", labels_json(gs, state.dictionary)},
      {"history", history}};
  emit(opts, doc.dump(2));
  return 0;
}

int run_bench(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  if (config.methods.empty()) throw dictsel::ConfigError("methods: at least one method is required");
  const std::string csv_path =
      opts.out.empty() ? "" : (opts.format == "csv" ? opts.out : replace_extension(opts.out, ".csv"));
  std::ofstream partial;
  dictsel::TrialCallback flush;
  if (!csv_path.empty()) {
    partial.open(csv_path, std::ios::trunc);
    if (!partial) throw dictsel::IoError("cannot open '" + csv_path + "' for writing");
    dictsel::write_result_csv(partial, {});
    flush = [&](int, const std::vector<dictsel::ResultRow>& rows) {
      dictsel::ExperimentResult chunk;
      chunk.rows = rows;
      std::ostringstream ss;
      dictsel::write_result_csv(ss, chunk);
      const std::string text = ss.str();
      partial << text.substr(text.find('\n') + 1) << std::flush;
    };
  }
  const auto result = dictsel::run_experiment(config, flush);
  if (partial.is_open()) partial.close();

  std::ostringstream csv;
  dictsel::write_result_csv(csv, result);
  if (!csv_path.empty()) dictsel::write_text_file(csv_path, csv.str());
  if (opts.format == "json") {
    emit(opts, dictsel::result_to_json(result));
  } else if (opts.out.empty()) {
    std::cout << csv.str();
  }
  return 0;
}

int run_online_cmd(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  const dictsel::OnlineSpec spec = config.online.value_or(dictsel::OnlineSpec{});
  const auto gs = dictsel::build_ground_set(config.ground_set);
  dictsel::DatasetRecipe recipe = config.data;
  recipe.train_points = spec.rounds;
  recipe.test_points = 0;
  const std::uint64_t seed = dictsel::trial_seed(config.seed, 0);
  const auto data = dictsel::make_trial_data(recipe, gs, seed);
  dictsel::OnlineConfig oc;
  oc.k = spec.k;
  oc.s = spec.s;
  oc.method = spec.method;
  oc.horizon = spec.horizon > 0 ? spec.horizon : data.train.size();
  oc.smoothness = spec.smoothness;
  oc.seed = seed;
  const auto trace = dictsel::run_online(gs, oc, data.train.points);
  const auto& ledger = trace.ledger;

  if (opts.format == "csv") {
    std::ostringstream out;
    out << std::setprecision(17)
        << "round,player_gain,cumulative_player_gain,gain_bound,max_expert_regret,regret_bound\n";
    double cumulative = 0.0;
    for (std::size_t i = 0; i < ledger.rounds.size(); ++i) {
      const auto& r = ledger.rounds[i];
      cumulative += r.player_gain;
      out << r.round << ',' << r.player_gain << ',' << cumulative << ','
          << r.best_fixed_gain_bound << ',' << trace.max_expert_regret[i] << ','
          << trace.regret_bound[i] << '\n';
    }
    emit(opts, out.str());
    return 0;
  }
  json rounds = json::array();
  for (std::size_t i = 0; i < ledger.rounds.size(); ++i) {
    const auto& r = ledger.rounds[i];
    rounds.push_back({{"round", r.round},
                      {"sampled", r.sampled},
                      {"support", r.support},
                      {"player_gain", r.player_gain},
                      {"gain_bound", r.best_fixed_gain_bound},
                      {"max_expert_regret", trace.max_expert_regret[i]},
                      {"regret_bound", trace.regret_bound[i]}});
  }
  const json doc{{"method", dictsel::online_method_name(spec.method)},
                 {"k", oc.k},
                 {"s", oc.s},
                 {"horizon", oc.horizon},
                 {"seed", seed},
                 {"cumulative_player_gain", ledger.cumulative_player_gain},
                 {"expert_regrets", ledger.expert_regrets()},
                 {"rounds", rounds}};
  emit(opts, doc.dump(2));
  return 0;
}

int run_oracle(const CommonOptions& opts, const std::optional<int>& k) {
  const ExperimentConfig config = load(opts);
  const dictsel::MethodSpec spec = pick_method(config, std::nullopt, k);
  const auto gs = dictsel::build_ground_set(config.ground_set);
  const std::uint64_t seed = dictsel::trial_seed(config.seed, 0);
  const auto data = dictsel::make_trial_data(config.data, gs, seed);
  const auto constraint =
      dictsel::build_constraint(config.constraint, data.train.size(), gs.size());
  const auto best = dictsel::brute_force_optimum(data.train.points, gs, constraint, spec.k.front());
  if (opts.format == "csv") {
    std::ostringstream out;
    out << "t,support\n";
    for (std::size_t t = 0; t < best.supports.size(); ++t) {
      out << t << ',';
      for (std::size_t i = 0; i < best.supports[t].size(); ++i) {
        out << (i ? ";" : "") << best.supports[t][i];
      }
      out << '\n';
    }
    emit(opts, out.str());
    return 0;
  }
  const json doc{{"k", spec.k.front()},
                 {"seed", seed},
                 {"objective", best.objective},
                 {"dictionary", best.dictionary},
                 {"labels", labels_json(gs, best.dictionary)},
                 {"supports", best.supports}};
  emit(opts, doc.dump(2));
  return 0;
}

int run_groundset(const CommonOptions& opts, const std::string& save_path) {
  const ExperimentConfig config = load(opts);
  const auto gs = dictsel::build_ground_set(config.ground_set);
  if (!save_path.empty()) dictsel::save_ground_set(save_path, gs);
  if (opts.format == "csv") {
    std::ostringstream out;
    dictsel::write_matrix_csv(out, gs.atoms());
    emit(opts, out.str());
    return 0;
  }
  json blocks = json::object();
  for (const auto& l : gs.labels()) blocks[l.basis] = blocks.value(l.basis, 0) + 1;
  const auto spectrum = dictsel::restricted_spectrum(gs.atoms(), 2);
  const json doc{{"dim", gs.dim()},
                 {"size", gs.size()},
                 {"coherence", gs.coherence()},
                 {"sigma_max_sq_2", spectrum.sigma_max_sq},
                 {"sigma_min_sq_2", spectrum.sigma_min_sq},
                 {"blocks", blocks}};
  emit(opts, doc.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dictionary selection with generalized sparsity constraints"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::optional<std::string> method;
  std::optional<int> k;
  std::string save_path;

  auto* select = app.add_subcommand("select", "run one selector on trial 0 of the configuration");
  add_common(select, opts);
  select->add_option("--method", method, "SDS_MA, RG, ROMP or ROMPd (default: first configured)");
  select->add_option("--k", k, "dictionary size (default: first configured)");

  auto* bench = app.add_subcommand("bench", "run the configured sweep over trials, methods and k");
  add_common(bench, opts);

  auto* online = app.add_subcommand("online", "stream synthetic points through the online selector");
  add_common(online, opts);

  auto* oracle = app.add_subcommand("oracle", "exact optimum by exhaustive search (small instances)");
  add_common(oracle, opts);
  oracle->add_option("--k", k, "dictionary size (default: first configured)");

  auto* groundset = app.add_subcommand("groundset", "build and describe the ground set");
  add_common(groundset, opts);
  groundset->add_option("--save", save_path, "write the ground set (.csv or binary)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (select->parsed()) return run_select(opts, method, k);
    if (bench->parsed()) return run_bench(opts);
    if (online->parsed()) return run_online_cmd(opts);
    if (oracle->parsed()) return run_oracle(opts, k);
    if (groundset->parsed()) return run_groundset(opts, save_path);
  } catch (const dictsel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dictsel::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dictsel::SchemaVersionMismatch& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
