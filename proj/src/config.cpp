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

#include "dictsel/config.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "dictsel/errors.hpp"

namespace dictsel {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

}  // namespace

void validate(const ExperimentConfig& config) {
  require(config.trials >= 1, "trials", "must be >= 1");
  require(config.threads >= 1, "threads", "must be >= 1");
  require(config.eval_s >= 0, "eval_s", "must be >= 0");
  require(config.ground_set.side >= 2, "ground_set.side", "must be >= 2");
  require(!config.ground_set.bases.empty(), "ground_set.bases", "must not be empty");
  for (std::size_t i = 0; i < config.ground_set.bases.size(); ++i) {
    const auto& b = config.ground_set.bases[i];
    const std::string field = "ground_set.bases[" + std::to_string(i) + "]";
    require(b.kind == "dct" || b.kind == "haar" || b.kind == "csv", field + ".kind",
            "unknown basis '" + b.kind + "'");
    require(b.kind != "csv" || !b.path.empty(), field + ".path", "required for csv bases");
  }

  const auto& d = config.data;
  require(d.kind == "synthetic" || d.kind == "patches" || d.kind == "file", "data.kind",
          "unknown dataset kind '" + d.kind + "'");
  if (d.kind != "file") {
    require(d.train_points >= 1, "data.train_points", "must be >= 1");
    require(d.test_points >= 0, "data.test_points", "must be >= 0");
  }
  if (d.kind == "synthetic") {
    require(d.planted >= 0, "data.planted", "must be >= 0");
    require(d.s >= 0 && d.s <= d.planted, "data.s", "must be in [0, data.planted]");
  }
  if (d.kind == "patches") require(!d.image_path.empty(), "data.image_path", "required for patches");
  if (d.kind == "file") require(!d.train_path.empty(), "data.train_path", "required for file data");

  const auto& c = config.constraint;
  require(c.family == "individual" || c.family == "matroid" || c.family == "block" ||
              c.family == "average",
          "constraint.family", "unknown family '" + c.family + "'");
  require(c.s >= 0, "constraint.s", "must be >= 0");
  if (c.family == "block") {
    require(c.block_size >= 1, "constraint.block_size", "must be >= 1");
    require(c.block_cap >= 0, "constraint.block_cap", "must be >= 0");
  }
  if (c.total) require(*c.total >= 0, "constraint.total", "must be >= 0");
  if (c.total_per_point) require(*c.total_per_point >= 0, "constraint.total_per_point", "must be >= 0");

  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    const auto& m = config.methods[i];
    const std::string field = "methods[" + std::to_string(i) + "]";
    require(!m.k.empty(), field + ".k", "must list at least one size");
    for (int k : m.k) {
      require(k >= 1, field + ".k", "sizes must be >= 1");
      if (c.family == "individual" || c.family == "matroid") {
        require(k >= c.s, field + ".k", "sizes must be >= constraint.s");
      }
    }
    if (m.smoothness) require(*m.smoothness > 0.0, field + ".smoothness", "must be positive");
    if (m.method == Method::kSdsMa) {
      require(c.family == "individual", field + ".name", "SDS_MA needs an individual constraint");
    }
    if (m.method == Method::kReplacementGreedy) {
      require(c.family == "individual" || c.family == "matroid", field + ".name",
              "RG needs an individual or matroid constraint");
    }
  }
  if (config.online) {
    const auto& o = *config.online;
    require(o.k >= 1, "online.k", "must be >= 1");
    require(o.s >= 0 && o.s <= o.k, "online.s", "must be in [0, online.k]");
    require(o.rounds >= 1, "online.rounds", "must be >= 1");
    require(o.horizon >= 0, "online.horizon", "must be >= 0");
    if (o.smoothness) require(*o.smoothness > 0.0, "online.smoothness", "must be positive");
  }
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  std::vector<std::pair<std::string, int>> order;
  std::map<std::pair<std::string, int>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.method, r.k);
    auto& g = groups[key];
    if (g.empty()) order.push_back(key);
    g.push_back(&r);
  }
  std::vector<AggregateRow> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    std::vector<double> obj, train, test, secs;
    for (const ResultRow* r : g) {
      obj.push_back(r->objective);
      train.push_back(r->train_residual_variance);
      test.push_back(r->test_residual_variance);
      secs.push_back(r->seconds);
    }
    AggregateRow a;
    a.method = key.first;
    a.k = key.second;
    a.count = static_cast<int>(g.size());
    a.objective = summarize(obj);
    a.train_residual_variance = summarize(train);
    a.test_residual_variance = summarize(test);
    a.seconds = summarize(secs);
    out.push_back(a);
  }
  return out;
}

}  // namespace dictsel
