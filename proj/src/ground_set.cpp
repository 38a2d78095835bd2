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

#include "dictsel/ground_set.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dictsel/errors.hpp"

namespace dictsel {

GroundSet::GroundSet(Matrix atoms, std::vector<AtomLabel> labels)
    : atoms_(std::move(atoms)), labels_(std::move(labels)) {
  if (atoms_.rows() < 1 || atoms_.cols() < 1) {
    throw InvalidGroundSet("ground set needs d >= 1 and n >= 1");
  }
  if (static_cast<Eigen::Index>(labels_.size()) != atoms_.cols()) {
    throw InvalidGroundSet("one label per atom is required");
  }
  coherence_ = dictsel::coherence(atoms_);
}

Matrix GroundSet::columns(std::span<const int> indices) const {
  Matrix out(atoms_.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = atoms_.col(indices[i]);
  }
  return out;
}

namespace {

// Rows of the returned matrix are the 1D basis functions.
Matrix dct1_matrix(int n) {
  Matrix c(n, n);
  for (int k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int x = 0; x < n; ++x) {
      c(k, x) = scale * std::cos(std::numbers::pi * (2 * x + 1) * k / (2.0 * n));
    }
  }
  return c;
}

// H_n = [H_{n/2} (x) (1, 1); I_{n/2} (x) (1, -1)] / sqrt(2).
Matrix haar1_matrix(int n) {
  if (n == 1) return Matrix::Ones(1, 1);
  const Matrix half = haar1_matrix(n / 2);
  Matrix h = Matrix::Zero(n, n);
  const double r = 1.0 / std::numbers::sqrt2;
  for (int i = 0; i < n / 2; ++i) {
    for (int j = 0; j < n / 2; ++j) {
      h(i, 2 * j) = half(i, j) * r;
      h(i, 2 * j + 1) = half(i, j) * r;
    }
    h(n / 2 + i, 2 * i) = r;
    h(n / 2 + i, 2 * i + 1) = -r;
  }
  return h;
}

Matrix tensor_basis(const Matrix& rows1d) {
  const Eigen::Index side = rows1d.rows();
  Matrix out(side * side, side * side);
  for (Eigen::Index u = 0; u < side; ++u) {
    for (Eigen::Index v = 0; v < side; ++v) {
      const Eigen::Index col = u * side + v;
      for (Eigen::Index x = 0; x < side; ++x) {
        for (Eigen::Index y = 0; y < side; ++y) {
          out(x * side + y, col) = rows1d(u, x) * rows1d(v, y);
        }
      }
    }
  }
  return out;
}

}  // namespace

AtomBlock dct2_basis(int side) {
  if (side < 2) throw InvalidSide("DCT basis side must be >= 2");
  return {"dct", tensor_basis(dct1_matrix(side))};
}

AtomBlock haar2_basis(int side) {
  if (side < 2 || (side & (side - 1)) != 0) {
    throw InvalidSide("Haar basis side must be a power of two >= 2");
  }
  return {"haar", tensor_basis(haar1_matrix(side))};
}

GroundSet assemble(const std::vector<AtomBlock>& blocks) {
  if (blocks.empty()) throw InvalidGroundSet("no atom blocks given");
  const Eigen::Index d = blocks.front().atoms.rows();
  Eigen::Index n = 0;
  for (const auto& block : blocks) {
    if (block.atoms.rows() != d) {
      std::ostringstream msg;
      msg << "block '" << block.name << "' has dimension " << block.atoms.rows()
          << ", expected " << d;
      throw DimensionMismatch(msg.str());
    }
    n += block.atoms.cols();
  }
  Matrix atoms(d, n);
  std::vector<AtomLabel> labels;
  labels.reserve(static_cast<std::size_t>(n));
  Eigen::Index offset = 0;
  for (const auto& block : blocks) {
    atoms.middleCols(offset, block.atoms.cols()) = block.atoms;
    for (Eigen::Index j = 0; j < block.atoms.cols(); ++j) {
      labels.push_back({block.name, static_cast<int>(j)});
    }
    offset += block.atoms.cols();
  }
  return GroundSet(std::move(atoms), std::move(labels));
}

}  // namespace dictsel
