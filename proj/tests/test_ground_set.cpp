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

#include "dictsel/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace dictsel;

namespace {

double gram_defect(const Matrix& b) {
  return (b.transpose() * b - Matrix::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("built-in bases are orthonormal") {
  for (int side : {2, 4, 8}) {
    CAPTURE(side);
    const AtomBlock dct = dct2_basis(side);
    const AtomBlock haar = haar2_basis(side);
    CHECK(dct.atoms.rows() == side * side);
    CHECK(dct.atoms.cols() == side * side);
    CHECK(haar.atoms.cols() == side * side);
    CHECK(gram_defect(dct.atoms) <= 1e-10);
    CHECK(gram_defect(haar.atoms) <= 1e-10);
  }
  CHECK(dct2_basis(5).atoms.cols() == 25);
  CHECK(gram_defect(dct2_basis(5).atoms) <= 1e-10);
}

TEST_CASE("DCT atoms follow the cosine formula, row-major") {
  const int side = 8;
  const Matrix c = oracle::dct_matrix(side);
  const Matrix atoms = dct2_basis(side).atoms;
  double worst = 0.0;
  for (int u = 0; u < side; ++u) {
    for (int v = 0; v < side; ++v) {
      for (int x = 0; x < side; ++x) {
        for (int y = 0; y < side; ++y) {
          worst = std::max(worst, std::abs(atoms(x * side + y, u * side + v) - c(u, x) * c(v, y)));
        }
      }
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("Haar basis at side 2") {
  const Matrix h = haar2_basis(2).atoms;
  CHECK((h.col(0) - Vector::Constant(4, 0.5)).cwiseAbs().maxCoeff() <= 1e-15);
  // Every other atom has zero mean.
  for (int j = 1; j < 4; ++j) CHECK(std::abs(h.col(j).sum()) <= 1e-12);
}

TEST_CASE("Haar constant atom at side 8") {
  const Matrix h = haar2_basis(8).atoms;
  CHECK((h.col(0) - Vector::Constant(64, 0.125)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("invalid sides") {
  CHECK_THROWS_AS(dct2_basis(1), InvalidSide);
  CHECK_THROWS_AS(haar2_basis(1), InvalidSide);
  CHECK_THROWS_AS(haar2_basis(6), InvalidSide);
}

TEST_CASE("assemble concatenates blocks in order") {
  const AtomBlock dct = dct2_basis(8);
  const AtomBlock haar = haar2_basis(8);
  const GroundSet gs = assemble({dct, haar});
  CHECK(gs.dim() == 64);
  CHECK(gs.size() == 128);
  CHECK(gs.atoms().leftCols(64) == dct.atoms);
  CHECK(gs.atoms().rightCols(64) == haar.atoms);
  CHECK(gs.labels()[0] == AtomLabel{dct.name, 0});
  CHECK(gs.labels()[70] == AtomLabel{haar.name, 6});
  const std::vector<int> pick{70, 3};
  const Matrix cols = gs.columns(pick);
  CHECK(cols.col(0) == gs.atoms().col(70));
  CHECK(cols.col(1) == gs.atoms().col(3));
}

TEST_CASE("assemble keeps duplicate columns") {
  const GroundSet gs = assemble({dct2_basis(4), dct2_basis(4)});
  CHECK(gs.size() == 32);
  CHECK(gs.coherence() == doctest::Approx(1.0));
}

TEST_CASE("assemble errors") {
  CHECK_THROWS_AS(assemble({dct2_basis(8), haar2_basis(4)}), DimensionMismatch);
  AtomBlock bad{"bad", Matrix::Identity(4, 4) * 1.1};
  CHECK_THROWS_AS(assemble({bad}), InvalidGroundSet);
  CHECK_THROWS_AS(assemble({}), InvalidGroundSet);
  CHECK_THROWS_AS(GroundSet(Matrix::Identity(3, 3), {{"x", 0}}), InvalidGroundSet);
}
