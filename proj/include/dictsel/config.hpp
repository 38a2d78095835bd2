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

// Plain descriptions of experiments and their outcomes. Serialization lives
// in data_io; running them lives in experiment.

#ifndef DICTSEL_CONFIG_HPP_
#define DICTSEL_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dictsel/select_offline.hpp"
#include "dictsel/select_online.hpp"

namespace dictsel {

// One block of the ground set: "dct", "haar" (built for side x side patches)
// or "csv" (unit-norm columns read from path).
struct BasisSpec {
  std::string kind = "dct";
  std::string path;
};

struct GroundSetRecipe {
  int side = 8;
  std::vector<BasisSpec> bases{{"dct", ""}, {"haar", ""}};
};

// kind "synthetic": planted sparse combinations of the ground set.
// kind "patches": normalized tiles of a PGM/CSV image at image_path.
// kind "file": matrices stored at train_path and test_path.
struct DatasetRecipe {
  std::string kind = "synthetic";
  int train_points = 100;
  int test_points = 100;
  int planted = 20;
  int s = 5;
  std::string image_path;
  std::string train_path;
  std::string test_path;
};

// family: "individual" (s), "matroid" (uniform cap s), "block" (consecutive
// blocks of block_size points, union cap block_cap), "average" (per-point
// cap s, total cap total or total_per_point * T).
struct ConstraintSpec {
  std::string family = "individual";
  int s = 5;
  int block_size = 10;
  int block_cap = 10;
  std::optional<int> total;
  std::optional<int> total_per_point;
};

struct MethodSpec {
  Method method = Method::kReplacementOmp;
  std::vector<int> k{10, 20, 30};
  std::optional<double> smoothness;
};

struct OnlineSpec {
  OnlineMethod method = OnlineMethod::kReplacementOmp;
  int k = 10;
  int s = 3;
  int rounds = 500;
  int horizon = 0;  // 0: use rounds
  std::optional<double> smoothness;
};

struct ExperimentConfig {
  GroundSetRecipe ground_set;
  DatasetRecipe data;
  ConstraintSpec constraint;
  std::vector<MethodSpec> methods;
  std::optional<OnlineSpec> online;
  int eval_s = 5;  // OMP sparsity of the residual-variance metric
  std::uint64_t seed = 0;
  int trials = 1;
  int threads = 1;
};

// Checks ranges (trials >= 1, k >= 1, sizes, family names). Throws
// ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

struct ResultRow {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string method;
  int k = 0;
  double objective = 0.0;
  double train_residual_variance = 0.0;
  double test_residual_variance = 0.0;
  double seconds = 0.0;
};

struct Summary {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(count); 0 for one sample
};

struct AggregateRow {
  std::string method;
  int k = 0;
  int count = 0;
  Summary objective;
  Summary train_residual_variance;
  Summary test_residual_variance;
  Summary seconds;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;
};

Summary summarize(const std::vector<double>& values);

// Groups rows by (method, k) in order of first appearance.
std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

}  // namespace dictsel

#endif  // DICTSEL_CONFIG_HPP_
