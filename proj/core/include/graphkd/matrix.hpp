// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace graphkd {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. Deliberately minimal: the kernels in
/// this library accumulate with explicit loops in a fixed order so that runs
/// are bit-reproducible and oracle comparisons stay tight.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& storage() const { return data_; }

  bool operator==(const Matrix& other) const = default;

  /// y = M x, with x of length cols(). Accumulates left to right.
  Vec matvec(const Vec& x) const {
    if (x.size() != cols_) {
      throw std::invalid_argument("Matrix::matvec: dimension mismatch");
    }
    Vec y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      double acc = 0.0;
      const double* row = data_.data() + r * cols_;
      for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * x[c];
      y[r] = acc;
    }
    return y;
  }

  /// y = M^T x, with x of length rows().
  Vec matvec_transposed(const Vec& x) const {
    if (x.size() != rows_) {
      throw std::invalid_argument("Matrix::matvec_transposed: dimension mismatch");
    }
    Vec y(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double* row = data_.data() + r * cols_;
      for (std::size_t c = 0; c < cols_; ++c) y[c] += row[c] * x[r];
    }
    return y;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double squared_norm(const Vec& a) { return dot(a, a); }

inline double squared_distance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("squared_distance: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

inline void axpy(double scale, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += scale * x[i];
}

inline Vec scaled(const Vec& x, double scale) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = scale * x[i];
  return y;
}

}  // namespace graphkd
