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

#ifndef COGROUTE_MATRIX_HPP_
#define COGROUTE_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace cogroute {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Matrix transpose() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Kronecker product a (x) b.
Matrix kronecker(const Matrix& a, const Matrix& b);

// x^T M, accumulated row by row with the dispatched axpy kernel.
std::vector<double> vecmat(std::span<const double> x, const Matrix& m);

// Solves a x = b by Gaussian elimination with partial pivoting. Throws
// DimensionError on shape mismatch and Error on a singular system.
std::vector<double> lu_solve(Matrix a, std::vector<double> b);

double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace cogroute

#endif  // COGROUTE_MATRIX_HPP_
