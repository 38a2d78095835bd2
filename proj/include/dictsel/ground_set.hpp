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

#ifndef DICTSEL_GROUND_SET_HPP_
#define DICTSEL_GROUND_SET_HPP_

#include <string>
#include <vector>

#include "dictsel/linalg.hpp"

namespace dictsel {

struct AtomLabel {
  std::string basis;
  int index = 0;

  bool operator==(const AtomLabel&) const = default;
};

// A named block of atoms sharing one dimension, e.g. one orthonormal basis.
struct AtomBlock {
  std::string name;
  Matrix atoms;  // d x width, one atom per column
};

// The candidate atoms V as the columns of a d x n matrix. Immutable once
// built; every column has unit norm to 1e-8. The coherence is computed at
// construction so the smoothness default is free to query afterwards.
class GroundSet {
 public:
  GroundSet(Matrix atoms, std::vector<AtomLabel> labels);

  const Matrix& atoms() const { return atoms_; }
  const std::vector<AtomLabel>& labels() const { return labels_; }
  Eigen::Index dim() const { return atoms_.rows(); }
  int size() const { return static_cast<int>(atoms_.cols()); }
  double coherence() const { return coherence_; }

  // Matrix of the selected columns, in the given order.
  Matrix columns(std::span<const int> indices) const;

 private:
  Matrix atoms_;
  std::vector<AtomLabel> labels_;
  double coherence_ = 0.0;
};

// Orthonormal 2D DCT-II basis for side x side patches. Atom (u, v) is the
// outer product of the 1D basis rows u and v, vectorized row-major, and sits
// in column u * side + v.
AtomBlock dct2_basis(int side);

// Orthonormal 2D separable Haar basis for side x side patches; side must be a
// power of two. Column 0 is the constant atom.
AtomBlock haar2_basis(int side);

// Concatenates blocks column-wise in the given order. Throws
// DimensionMismatch when the blocks disagree on d and InvalidGroundSet when a
// column is not unit norm.
GroundSet assemble(const std::vector<AtomBlock>& blocks);

}  // namespace dictsel

#endif  // DICTSEL_GROUND_SET_HPP_
