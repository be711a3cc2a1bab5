// Copyright 2026 The SGU Authors.
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

#ifndef SGU_MATRIX_HPP_
#define SGU_MATRIX_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sgu {

using NodeId = std::uint32_t;

/// Dense row-major matrix of 64-bit reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// C = A * B. Throws ShapeError on mismatched inner dimensions.
Matrix matmul(const Matrix& a, const Matrix& b);
// C = A^T * B.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// C = A * B^T.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// Copies the listed rows of `source` into a new matrix, in order.
Matrix gather_rows(const Matrix& source, std::span<const NodeId> rows);

double squared_norm(std::span<const double> values);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace sgu

#endif  // SGU_MATRIX_HPP_
