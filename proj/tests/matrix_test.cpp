// Copyright 2026 The cogroute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "cogroute/matrix.hpp"

namespace cogroute {
namespace {

TEST(Matrix, KroneckerOfTwoByTwo) {
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  const Matrix b = Matrix::from_rows({{0, 5}, {6, 7}});
  const Matrix k = kronecker(a, b);
  ASSERT_EQ(k.rows(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(k(i, j), a(i / 2, j / 2) * b(i % 2, j % 2));
}

TEST(Matrix, LuSolveRecoversKnownSolution) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t n : {1, 2, 5, 30}) {
    Matrix a(n, n);
    std::vector<double> x(n), b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(rng);
      for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng) + (i == j ? n : 0.0);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b[i] += a(i, j) * x[j];
    EXPECT_LT(max_abs_diff(lu_solve(a, b), x), 1e-12);
  }
}

TEST(Matrix, VecmatAndTranspose) {
  const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  const std::vector<double> x{1, -1};
  EXPECT_EQ(vecmat(x, m), (std::vector<double>{-3, -3, -3}));
  EXPECT_EQ(m.transpose().transpose(), m);
  EXPECT_EQ(Matrix::identity(3)(1, 1), 1.0);
}

}  // namespace
}  // namespace cogroute
