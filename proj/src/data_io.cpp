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

#include "dictsel/data_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "dictsel/errors.hpp"
#include "json.hpp"

namespace dictsel {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'D', 'S', 'E', 'L', 'M', 'A', 'T', '\0'};
constexpr int kSchemaVersion = 1;
constexpr double kMinPatchVariance = 1e-8;

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                    [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (in.gcount() != 8) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return true;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

// Normal-weight combination of a random s-subset of the planted columns.
Matrix planted_points(const GroundSet& ground_set, const std::vector<int>& planted,
                      int num_points, int s, std::mt19937_64& rng) {
  Matrix points = Matrix::Zero(ground_set.dim(), num_points);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<int> slots(planted.size());
  std::iota(slots.begin(), slots.end(), 0);
  std::vector<int> chosen;
  for (int t = 0; t < num_points; ++t) {
    chosen.clear();
    std::sample(slots.begin(), slots.end(), std::back_inserter(chosen), s, rng);
    for (int slot : chosen) {
      points.col(t) += normal(rng) * ground_set.atoms().col(planted[static_cast<std::size_t>(slot)]);
    }
  }
  return points;
}

// ---- JSON field access with path-qualified errors ----

class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(where() + ": expected an object");
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const {
    seen_.push_back(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) const {
    seen_.push_back(key);
    return j_.at(key);
  }

  template <class T>
  void get(const std::string& key, T& out) const {
    if (!has(key)) return;
    out = convert<T>(j_.at(key), at(key));
  }

  template <class T>
  void get(const std::string& key, std::optional<T>& out) const {
    if (!has(key)) return;
    out = convert<T>(j_.at(key), at(key));
  }

  template <class T>
  T require(const std::string& key) const {
    if (!has(key)) throw ParseError(at(key) + ": missing field");
    return convert<T>(j_.at(key), at(key));
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ParseError(at(key) + ": unknown field");
      }
    }
  }

  template <class T>
  static T convert(const json& v, const std::string& where) {
    try {
      if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
        const auto x = v.get<std::int64_t>();
        if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
          throw ParseError(where + ": integer out of range");
        }
        return static_cast<int>(x);
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned()) throw ParseError(where + ": expected a non-negative integer");
        return v.get<std::uint64_t>();
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ParseError(where + ": expected a number");
        return v.get<double>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ParseError(where + ": expected a boolean");
        return v.get<bool>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ParseError(where + ": expected a string");
        return v.get<std::string>();
      } else {
        return v.get<T>();
      }
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }

 private:
  std::string where() const { return path_.empty() ? "document" : path_; }

  const json& j_;
  std::string path_;
  mutable std::vector<std::string> seen_;
};

std::vector<int> int_list(const json& v, const std::string& where) {
  if (v.is_number_integer()) return {Fields::convert<int>(v, where)};
  if (!v.is_array()) throw ParseError(where + ": expected an integer or a list of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(Fields::convert<int>(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

void check_schema(const Fields& f) {
  int version = kSchemaVersion;
  f.get("schema_version", version);
  if (version != kSchemaVersion) {
    throw SchemaVersionMismatch("schema_version " + std::to_string(version) +
                                " is not supported (expected " +
                                std::to_string(kSchemaVersion) + ")");
  }
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  json bases = json::array();
  for (const auto& b : c.ground_set.bases) {
    json e{{"kind", b.kind}};
    if (!b.path.empty()) e["path"] = b.path;
    bases.push_back(e);
  }
  j["ground_set"] = {{"side", c.ground_set.side}, {"bases", bases}};
  const auto& d = c.data;
  j["data"] = {{"kind", d.kind},       {"train_points", d.train_points},
               {"test_points", d.test_points}, {"planted", d.planted},
               {"s", d.s}};
  if (!d.image_path.empty()) j["data"]["image_path"] = d.image_path;
  if (!d.train_path.empty()) j["data"]["train_path"] = d.train_path;
  if (!d.test_path.empty()) j["data"]["test_path"] = d.test_path;
  const auto& cs = c.constraint;
  j["constraint"] = {{"family", cs.family}, {"s", cs.s}};
  if (cs.family == "block") {
    j["constraint"]["block_size"] = cs.block_size;
    j["constraint"]["block_cap"] = cs.block_cap;
  }
  put_optional(j["constraint"], "total", cs.total);
  put_optional(j["constraint"], "total_per_point", cs.total_per_point);
  json methods = json::array();
  for (const auto& m : c.methods) {
    json e{{"name", method_name(m.method)}, {"k", m.k}};
    put_optional(e, "smoothness", m.smoothness);
    methods.push_back(e);
  }
  j["methods"] = methods;
  if (c.online) {
    const auto& o = *c.online;
    j["online"] = {{"method", online_method_name(o.method)},
                   {"k", o.k},
                   {"s", o.s},
                   {"rounds", o.rounds},
                   {"horizon", o.horizon}};
    put_optional(j["online"], "smoothness", o.smoothness);
  }
  j["eval_s"] = c.eval_s;
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["threads"] = c.threads;
  return j;
}

ExperimentConfig config_from(const json& j, const std::string& path) {
  ExperimentConfig c;
  Fields root(j, path);
  check_schema(root);
  if (root.has("ground_set")) {
    Fields g(root.raw("ground_set"), root.at("ground_set"));
    g.get("side", c.ground_set.side);
    if (g.has("bases")) {
      const json& arr = g.raw("bases");
      if (!arr.is_array()) throw ParseError(g.at("bases") + ": expected a list");
      c.ground_set.bases.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Fields b(arr[i], g.at("bases") + "[" + std::to_string(i) + "]");
        BasisSpec spec;
        spec.kind = b.require<std::string>("kind");
        b.get("path", spec.path);
        if (spec.kind != "dct" && spec.kind != "haar" && spec.kind != "csv") {
          throw ParseError(b.at("kind") + ": unknown basis '" + spec.kind + "'");
        }
        b.reject_unknown();
        c.ground_set.bases.push_back(spec);
      }
    }
    g.reject_unknown();
  }
  if (root.has("data")) {
    Fields d(root.raw("data"), root.at("data"));
    d.get("kind", c.data.kind);
    if (c.data.kind != "synthetic" && c.data.kind != "patches" && c.data.kind != "file") {
      throw ParseError(d.at("kind") + ": unknown dataset kind '" + c.data.kind + "'");
    }
    d.get("train_points", c.data.train_points);
    d.get("test_points", c.data.test_points);
    d.get("planted", c.data.planted);
    d.get("s", c.data.s);
    d.get("image_path", c.data.image_path);
    d.get("train_path", c.data.train_path);
    d.get("test_path", c.data.test_path);
    d.reject_unknown();
  }
  if (root.has("constraint")) {
    Fields k(root.raw("constraint"), root.at("constraint"));
    k.get("family", c.constraint.family);
    const auto& fam = c.constraint.family;
    if (fam != "individual" && fam != "matroid" && fam != "block" && fam != "average") {
      throw ParseError(k.at("family") + ": unknown constraint family '" + fam + "'");
    }
    k.get("s", c.constraint.s);
    k.get("block_size", c.constraint.block_size);
    k.get("block_cap", c.constraint.block_cap);
    k.get("total", c.constraint.total);
    k.get("total_per_point", c.constraint.total_per_point);
    k.reject_unknown();
  }
  if (root.has("methods")) {
    const json& arr = root.raw("methods");
    if (!arr.is_array()) throw ParseError(root.at("methods") + ": expected a list");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields m(arr[i], root.at("methods") + "[" + std::to_string(i) + "]");
      MethodSpec spec;
      const auto name = m.require<std::string>("name");
      try {
        spec.method = parse_method(name);
      } catch (const ParseError&) {
        throw ParseError(m.at("name") + ": unknown method '" + name + "'");
      }
      if (m.has("k")) spec.k = int_list(m.raw("k"), m.at("k"));
      m.get("smoothness", spec.smoothness);
      m.reject_unknown();
      c.methods.push_back(spec);
    }
  }
  if (root.has("online")) {
    Fields o(root.raw("online"), root.at("online"));
    OnlineSpec spec;
    if (o.has("method")) {
      const auto name = o.require<std::string>("method");
      try {
        spec.method = parse_online_method(name);
      } catch (const ParseError&) {
        throw ParseError(o.at("method") + ": unknown method '" + name + "'");
      }
    }
    o.get("k", spec.k);
    o.get("s", spec.s);
    o.get("rounds", spec.rounds);
    o.get("horizon", spec.horizon);
    o.get("smoothness", spec.smoothness);
    o.reject_unknown();
    c.online = spec;
  }
  root.get("eval_s", c.eval_s);
  root.get("seed", c.seed);
  root.get("trials", c.trials);
  root.get("threads", c.threads);
  root.reject_unknown();
  return c;
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std_error", s.std_error}}; }

Summary summary_from(const json& j, const std::string& where) {
  Fields f(j, where);
  Summary s;
  s.mean = f.require<double>("mean");
  s.std_error = f.require<double>("std_error");
  f.reject_unknown();
  return s;
}

json provenance_json(const Provenance& p) {
  return std::visit(
      [](const auto& o) -> json {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, SyntheticOrigin>) {
          return {{"type", "synthetic"}, {"seed", o.seed}, {"planted", o.planted}, {"s", o.s}};
        } else if constexpr (std::is_same_v<T, PatchOrigin>) {
          return {{"type", "patches"}, {"source", o.source}, {"seed", o.seed}};
        } else {
          return {{"type", "loaded"}, {"path", o.path}};
        }
      },
      p);
}

Provenance provenance_from(const json& j) {
  Fields f(j, "provenance");
  const auto type = f.require<std::string>("type");
  if (type == "synthetic") {
    SyntheticOrigin o;
    f.get("seed", o.seed);
    if (f.has("planted")) o.planted = int_list(f.raw("planted"), f.at("planted"));
    f.get("s", o.s);
    return o;
  }
  if (type == "patches") {
    PatchOrigin o;
    f.get("source", o.source);
    f.get("seed", o.seed);
    return o;
  }
  if (type == "loaded") {
    LoadedOrigin o;
    f.get("path", o.path);
    return o;
  }
  throw ParseError(f.at("type") + ": unknown provenance '" + type + "'");
}

}  // namespace

Dataset synth_dataset(const GroundSet& ground_set, int num_points, int planted, int s,
                      std::uint64_t seed) {
  if (num_points < 0) throw InvalidArgument("number of points must be >= 0");
  if (planted < 0 || planted > ground_set.size()) {
    throw InvalidArgument("planted dictionary size must be in [0, n]");
  }
  if (s < 0 || s > planted) throw InvalidArgument("sparsity must be in [0, planted]");
  std::mt19937_64 rng(seed);
  std::vector<int> all(static_cast<std::size_t>(ground_set.size()));
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> chosen;
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), planted, rng);
  Dataset ds;
  ds.points = planted_points(ground_set, chosen, num_points, s, rng);
  ds.provenance = SyntheticOrigin{seed, chosen, s};
  return ds;
}

Dataset synth_from_dictionary(const GroundSet& ground_set, const std::vector<int>& planted,
                              int num_points, int s, std::uint64_t seed) {
  if (num_points < 0) throw InvalidArgument("number of points must be >= 0");
  if (s < 0 || s > static_cast<int>(planted.size())) {
    throw InvalidArgument("sparsity must be in [0, planted]");
  }
  for (int a : planted) {
    if (a < 0 || a >= ground_set.size()) throw InvalidArgument("planted atom out of range");
  }
  std::mt19937_64 rng(seed);
  Dataset ds;
  ds.points = planted_points(ground_set, planted, num_points, s, rng);
  ds.provenance = SyntheticOrigin{seed, planted, s};
  return ds;
}

Vector normalize_patch(const Eigen::Ref<const Vector>& patch) {
  if (patch.size() == 0) throw InvalidArgument("empty patch");
  const double mean = patch.mean();
  Vector centered = patch.array() - mean;
  const double variance = centered.squaredNorm() / static_cast<double>(patch.size());
  if (variance < kMinPatchVariance) throw InvalidArgument("patch variance is too small");
  return centered / std::sqrt(variance);
}

Dataset extract_patches(const Matrix& image, int side, int num_points, std::uint64_t seed,
                        const std::string& source) {
  if (side < 1) throw InvalidArgument("patch side must be >= 1");
  if (image.rows() < side || image.cols() < side) {
    throw InvalidArgument("image is smaller than one patch");
  }
  if (num_points < 0) throw InvalidArgument("number of patches must be >= 0");
  const Eigen::Index tile_rows = image.rows() / side;
  const Eigen::Index tile_cols = image.cols() / side;
  std::vector<Eigen::Index> tiles(static_cast<std::size_t>(tile_rows * tile_cols));
  std::iota(tiles.begin(), tiles.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(tiles.begin(), tiles.end(), rng);

  Dataset ds;
  ds.points.resize(static_cast<Eigen::Index>(side) * side, num_points);
  ds.provenance = PatchOrigin{source, seed};
  ds.normalized = true;
  int kept = 0;
  Vector patch(static_cast<Eigen::Index>(side) * side);
  for (Eigen::Index tile : tiles) {
    if (kept == num_points) break;
    const Eigen::Index r0 = (tile / tile_cols) * side;
    const Eigen::Index c0 = (tile % tile_cols) * side;
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) patch(r * side + c) = image(r0 + r, c0 + c);
    }
    const double variance = (patch.array() - patch.mean()).square().mean();
    if (variance < kMinPatchVariance) continue;
    ds.points.col(kept++) = normalize_patch(patch);
  }
  if (kept < num_points) {
    throw InsufficientPatches("image yields " + std::to_string(kept) +
                              " usable patches, " + std::to_string(num_points) +
                              " requested");
  }
  return ds;
}

void write_matrix_binary(std::ostream& out, const Matrix& m, const std::string& trailer) {
  out.write(kMagic, sizeof(kMagic));
  out.put(static_cast<char>(kMatrixFormatVersion));
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_u64(out, std::bit_cast<std::uint64_t>(m(r, c)));
  }
  if (!trailer.empty()) {
    put_u64(out, trailer.size());
    out.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
  }
  if (!out) throw IoError("matrix write failed");
}

Matrix read_matrix_binary(std::istream& in, std::string* trailer) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(magic)) ||
      !std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw ParseError("not a binary matrix file (bad magic)");
  }
  const int version = in.get();
  if (version == std::char_traits<char>::eof()) throw ParseError("truncated matrix header");
  if (version != kMatrixFormatVersion) {
    throw SchemaVersionMismatch("matrix format version " + std::to_string(version) +
                                " is not supported (expected " +
                                std::to_string(kMatrixFormatVersion) + ")");
  }
  std::uint64_t rows = 0, cols = 0;
  if (!get_u64(in, rows) || !get_u64(in, cols)) throw ParseError("truncated matrix header");
  if (rows > (1ull << 32) || cols > (1ull << 32) || (rows && cols > (1ull << 34) / rows)) {
    throw ParseError("matrix dimensions are implausibly large");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::uint64_t bits = 0;
      if (!get_u64(in, bits)) throw ParseError("truncated matrix data");
      m(r, c) = std::bit_cast<double>(bits);
    }
  }
  std::uint64_t length = 0;
  std::string text;
  if (get_u64(in, length)) {
    if (length > (1ull << 30)) throw ParseError("matrix trailer is implausibly large");
    text.resize(length);
    in.read(text.data(), static_cast<std::streamsize>(length));
    if (in.gcount() != static_cast<std::streamsize>(length)) throw ParseError("truncated matrix trailer");
  }
  if (trailer) *trailer = std::move(text);
  return m;
}

void write_matrix_binary(const std::string& path, const Matrix& m, const std::string& trailer) {
  auto out = open_out(path);
  write_matrix_binary(out, m, trailer);
  finish_write(out, path);
}

Matrix read_matrix_binary(const std::string& path, std::string* trailer) {
  auto in = open_in(path);
  return read_matrix_binary(in, trailer);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("matrix write failed");
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    Eigen::Index width = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      std::string_view cell(line.data() + pos, comma - pos);
      while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
      double v = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || end != cell.data() + cell.size()) {
        throw ParseError("row " + std::to_string(line_no) + ": cannot parse '" +
                         std::string(cell) + "' as a number");
      }
      values.push_back(v);
      ++width;
      if (comma == line.size()) break;
      pos = comma + 1;
    }
    if (cols < 0) {
      cols = width;
    } else if (width != cols) {
      throw ParseError("row " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                       " values, found " + std::to_string(width));
    }
    ++rows;
  }
  if (rows == 0) return Matrix(0, 0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  auto out = open_out(path);
  write_matrix_csv(out, m);
  finish_write(out, path);
}

Matrix read_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_matrix_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Matrix read_pgm(const std::string& path) {
  auto in = open_in(path);
  auto token = [&]() {
    std::string tok;
    int ch = 0;
    while ((ch = in.get()) != EOF) {
      if (ch == '#') {
        while ((ch = in.get()) != EOF && ch != '\n') {
        }
        continue;
      }
      if (std::isspace(ch)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(ch));
    }
    if (tok.empty()) throw ParseError(path + ": truncated PGM header");
    return tok;
  };
  if (token() != "P5") throw ParseError(path + ": not a binary PGM (P5) file");
  auto number = [&](const char* what) {
    const std::string tok = token();
    int v = 0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || end != tok.data() + tok.size() || v <= 0) {
      throw ParseError(path + ": bad PGM " + what + " '" + tok + "'");
    }
    return v;
  };
  const int width = number("width");
  const int height = number("height");
  const int maxval = number("maxval");
  if (maxval > 255) throw ParseError(path + ": only 8-bit PGM images are supported");
  std::vector<unsigned char> pixels(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) {
    throw ParseError(path + ": truncated PGM pixel data");
  }
  Matrix image(height, width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) image(r, c) = pixels[static_cast<std::size_t>(r) * width + c];
  }
  return image;
}

void write_pgm(const std::string& path, const Matrix& image) {
  auto out = open_out(path);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      out.put(static_cast<char>(std::clamp(std::lround(image(r, c)), 0L, 255L)));
    }
  }
  finish_write(out, path);
}

Matrix read_image(const std::string& path) {
  return ends_with(path, ".pgm") ? read_pgm(path) : read_matrix_csv(path);
}

void save_dataset(const std::string& path, const Dataset& dataset) {
  if (ends_with(path, ".csv")) {
    write_matrix_csv(path, dataset.points);
    return;
  }
  const json meta{{"schema_version", kSchemaVersion},
                  {"kind", "dataset"},
                  {"normalized", dataset.normalized},
                  {"provenance", provenance_json(dataset.provenance)}};
  write_matrix_binary(path, dataset.points, meta.dump());
}

Dataset load_dataset(const std::string& path) {
  Dataset ds;
  ds.provenance = LoadedOrigin{path};
  if (ends_with(path, ".csv")) {
    ds.points = read_matrix_csv(path);
    return ds;
  }
  std::string trailer;
  ds.points = read_matrix_binary(path, &trailer);
  if (!trailer.empty()) {
    const json meta = parse_json(trailer);
    Fields f(meta, "");
    check_schema(f);
    if (f.has("kind") && f.require<std::string>("kind") != "dataset") {
      throw ParseError(path + ": file holds a " + f.require<std::string>("kind") +
                       ", not a dataset");
    }
    f.get("normalized", ds.normalized);
    if (f.has("provenance")) ds.provenance = provenance_from(f.raw("provenance"));
  }
  return ds;
}

void save_ground_set(const std::string& path, const GroundSet& ground_set) {
  if (ends_with(path, ".csv")) {
    write_matrix_csv(path, ground_set.atoms());
    return;
  }
  json labels = json::array();
  for (const auto& l : ground_set.labels()) labels.push_back({l.basis, l.index});
  const json meta{{"schema_version", kSchemaVersion}, {"kind", "ground_set"}, {"labels", labels}};
  write_matrix_binary(path, ground_set.atoms(), meta.dump());
}

GroundSet load_ground_set(const std::string& path) {
  std::string trailer;
  Matrix atoms = ends_with(path, ".csv") ? read_matrix_csv(path) : read_matrix_binary(path, &trailer);
  std::vector<AtomLabel> labels;
  if (!trailer.empty()) {
    const json meta = parse_json(trailer);
    Fields f(meta, "");
    check_schema(f);
    if (f.has("labels")) {
      const json& arr = f.raw("labels");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "labels[" + std::to_string(i) + "]";
        if (!arr[i].is_array() || arr[i].size() != 2) throw ParseError(where + ": expected [basis, index]");
        labels.push_back({Fields::convert<std::string>(arr[i][0], where),
                          Fields::convert<int>(arr[i][1], where)});
      }
    }
  }
  if (labels.empty()) {
    for (Eigen::Index a = 0; a < atoms.cols(); ++a) labels.push_back({"loaded", static_cast<int>(a)});
  }
  return GroundSet(std::move(atoms), std::move(labels));
}

AtomBlock load_atom_block_csv(const std::string& path, const std::string& name) {
  AtomBlock block{name, read_matrix_csv(path)};
  validate_unit_columns(block.atoms);
  return block;
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

ExperimentConfig config_from_json(const std::string& text) {
  return config_from(parse_json(text), "");
}

void save_config(const std::string& path, const ExperimentConfig& config) {
  write_text_file(path, config_to_json(config) + "\n");
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json(read_text_file(path));
}

std::string result_to_json(const ExperimentResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"trial", r.trial},
                    {"seed", r.seed},
                    {"method", r.method},
                    {"k", r.k},
                    {"objective", r.objective},
                    {"train_residual_variance", r.train_residual_variance},
                    {"test_residual_variance", r.test_residual_variance},
                    {"seconds", r.seconds}});
  }
  json aggregates = json::array();
  for (const auto& a : result.aggregates) {
    aggregates.push_back({{"method", a.method},
                          {"k", a.k},
                          {"count", a.count},
                          {"objective", summary_json(a.objective)},
                          {"train_residual_variance", summary_json(a.train_residual_variance)},
                          {"test_residual_variance", summary_json(a.test_residual_variance)},
                          {"seconds", summary_json(a.seconds)}});
  }
  const json doc{{"schema_version", kSchemaVersion},
                 {"config", config_json(result.config)},
                 {"rows", rows},
                 {"aggregates", aggregates}};
  return doc.dump(2);
}

ExperimentResult result_from_json(const std::string& text) {
  const json doc = parse_json(text);
  Fields root(doc, "");
  check_schema(root);
  ExperimentResult result;
  result.config = config_from(root.raw("config"), "config");
  const json& rows = root.raw("rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Fields f(rows[i], "rows[" + std::to_string(i) + "]");
    ResultRow r;
    r.trial = f.require<int>("trial");
    r.seed = f.require<std::uint64_t>("seed");
    r.method = f.require<std::string>("method");
    r.k = f.require<int>("k");
    r.objective = f.require<double>("objective");
    r.train_residual_variance = f.require<double>("train_residual_variance");
    r.test_residual_variance = f.require<double>("test_residual_variance");
    r.seconds = f.require<double>("seconds");
    f.reject_unknown();
    result.rows.push_back(r);
  }
  const json& aggs = root.raw("aggregates");
  for (std::size_t i = 0; i < aggs.size(); ++i) {
    const std::string where = "aggregates[" + std::to_string(i) + "]";
    Fields f(aggs[i], where);
    AggregateRow a;
    a.method = f.require<std::string>("method");
    a.k = f.require<int>("k");
    a.count = f.require<int>("count");
    a.objective = summary_from(f.raw("objective"), f.at("objective"));
    a.train_residual_variance =
        summary_from(f.raw("train_residual_variance"), f.at("train_residual_variance"));
    a.test_residual_variance =
        summary_from(f.raw("test_residual_variance"), f.at("test_residual_variance"));
    a.seconds = summary_from(f.raw("seconds"), f.at("seconds"));
    f.reject_unknown();
    result.aggregates.push_back(a);
  }
  root.reject_unknown();
  return result;
}

void save_result(const std::string& path, const ExperimentResult& result) {
  write_text_file(path, result_to_json(result) + "\n");
}

ExperimentResult load_result(const std::string& path) {
  return result_from_json(read_text_file(path));
}

void write_result_csv(std::ostream& out, const ExperimentResult& result) {
  out << "trial,seed,method,k,objective,train_residual_variance,test_residual_variance,seconds\n";
  out << std::setprecision(17);
  for (const auto& r : result.rows) {
    out << r.trial << ',' << r.seed << ',' << r.method << ',' << r.k << ',' << r.objective
        << ',' << r.train_residual_variance << ',' << r.test_residual_variance << ','
        << r.seconds << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish_write(out, path);
}

}  // namespace dictsel
