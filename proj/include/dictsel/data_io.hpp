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

#ifndef DICTSEL_DATA_IO_HPP_
#define DICTSEL_DATA_IO_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "dictsel/config.hpp"
#include "dictsel/ground_set.hpp"
#include "dictsel/linalg.hpp"

namespace dictsel {

struct SyntheticOrigin {
  std::uint64_t seed = 0;
  std::vector<int> planted;  // ground-set indices, ascending
  int s = 0;
};

struct PatchOrigin {
  std::string source;
  std::uint64_t seed = 0;
};

struct LoadedOrigin {
  std::string path;
};

using Provenance = std::variant<SyntheticOrigin, PatchOrigin, LoadedOrigin>;

// Data points y_1..y_T as the columns of a d x T matrix.
struct Dataset {
  Matrix points;
  Provenance provenance = LoadedOrigin{};
  bool normalized = false;

  int size() const { return static_cast<int>(points.cols()); }
  Eigen::Index dim() const { return points.rows(); }
};

// Picks `planted` atoms uniformly without replacement, then draws every y_t
// as a standard-normal combination of a uniform s-subset of them.
Dataset synth_dataset(const GroundSet& ground_set, int num_points, int planted, int s,
                      std::uint64_t seed);

// Same generator for a fixed planted dictionary (held-out data).
Dataset synth_from_dictionary(const GroundSet& ground_set, const std::vector<int>& planted,
                              int num_points, int s, std::uint64_t seed);

// Rescales to mean 0 and population variance 1. Throws InvalidArgument for
// vectors with variance below 1e-8.
Vector normalize_patch(const Eigen::Ref<const Vector>& patch);

// Non-overlapping side x side tiles in a random order; tiles with variance
// below 1e-8 are passed over. Each kept tile is vectorized row-major and
// normalized. Throws InsufficientPatches when fewer than num_points remain.
Dataset extract_patches(const Matrix& image, int side, int num_points, std::uint64_t seed,
                        const std::string& source = "");

// Binary matrix file: "DSELMAT" + NUL, version byte (1), rows and cols as
// little-endian u64, row-major little-endian f64 values, then an optional
// trailer (little-endian u64 length + UTF-8 JSON).
inline constexpr std::uint8_t kMatrixFormatVersion = 1;

void write_matrix_binary(std::ostream& out, const Matrix& m, const std::string& trailer = "");
Matrix read_matrix_binary(std::istream& in, std::string* trailer = nullptr);
void write_matrix_binary(const std::string& path, const Matrix& m,
                         const std::string& trailer = "");
Matrix read_matrix_binary(const std::string& path, std::string* trailer = nullptr);

// Comma-separated rows, full round-trip precision. Blank lines and lines
// starting with '#' are skipped. Row numbers in errors are 1-based lines.
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

// 8-bit binary PGM (P5), maxval <= 255, as a rows x cols matrix of raw
// intensities.
Matrix read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Matrix& image);

// .pgm through read_pgm, anything else through read_matrix_csv.
Matrix read_image(const std::string& path);

// Files ending in .csv hold the bare matrix; other paths use the binary
// format with the metadata in the trailer.
void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);
void save_ground_set(const std::string& path, const GroundSet& ground_set);
GroundSet load_ground_set(const std::string& path);

// d x width CSV of atoms; throws InvalidGroundSet for non-unit columns.
AtomBlock load_atom_block_csv(const std::string& path, const std::string& name);

std::string config_to_json(const ExperimentConfig& config);
// Throws ParseError naming the field for malformed values and unknown names.
ExperimentConfig config_from_json(const std::string& text);
void save_config(const std::string& path, const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

std::string result_to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const std::string& text);
void save_result(const std::string& path, const ExperimentResult& result);
ExperimentResult load_result(const std::string& path);
// One line per ResultRow with a header.
void write_result_csv(std::ostream& out, const ExperimentResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dictsel

#endif  // DICTSEL_DATA_IO_HPP_
