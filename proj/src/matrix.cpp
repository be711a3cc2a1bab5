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

#include "sgu/matrix.hpp"

#include <algorithm>
#include <string>

#include "sgu/errors.hpp"

namespace sgu {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

namespace {

inline void axpy(double s, const double* __restrict x, double* __restrict y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] += s * x[j];
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + dims(a) + " * " + dims(b));
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t inner = a.cols();
  const std::size_t width = b.cols();
  const double* av = a.values().data();
  const double* bv = b.values().data();
  double* cv = c.values().data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* __restrict out = cv + i * width;
    for (std::size_t p = 0; p < inner; ++p) {
      const double s = av[i * inner + p];
      if (s == 0.0) continue;
      axpy(s, bv + p * width, out, width);
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: " + dims(a) + "^T * " + dims(b));
  }
  Matrix c(a.cols(), b.cols());
  const std::size_t left = a.cols();
  const std::size_t width = b.cols();
  const double* av = a.values().data();
  const double* bv = b.values().data();
  double* cv = c.values().data();
  for (std::size_t p = 0; p < a.rows(); ++p) {
    const double* arow = av + p * left;
    const double* brow = bv + p * width;
    for (std::size_t i = 0; i < left; ++i) {
      const double s = arow[i];
      if (s == 0.0) continue;
      axpy(s, brow, cv + i * width, width);
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: " + dims(a) + " * " + dims(b) + "^T");
  }
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
  }
  return c;
}

Matrix gather_rows(const Matrix& source, std::span<const NodeId> rows) {
  Matrix out(rows.size(), source.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= source.rows()) {
      throw IndexError("gather_rows: row " + std::to_string(rows[i]) + " out of range");
    }
    auto src = source.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

double squared_norm(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace sgu
