// Copyright 2026 The gmprod Authors.
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

#ifndef GMPROD_CORE_HPP_
#define GMPROD_CORE_HPP_

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmprod {

/// Raised when operand shapes do not conform.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a dimension profile violates the chain constraints.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("matrix entry count " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(rows_) + "x" +
                       std::to_string(cols_));
    }
  }

  /// Builds from nested rows; all rows must have equal length.
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw ShapeError("ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<double> entries() noexcept { return data_; }
  std::span<const double> entries() const noexcept { return data_; }

  std::span<double> row(std::size_t i) noexcept {
    return std::span<double>(data_).subspan(i * cols_, cols_);
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  Matrix& operator*=(double c) noexcept {
    for (double& x : data_) x *= c;
    return *this;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(double c, Matrix m) {
  m *= c;
  return m;
}

inline Matrix transpose(const Matrix& x) {
  Matrix t(x.cols(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) t(j, i) = x(i, j);
  return t;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " times " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

/// Returns X^T X. Only the upper triangle is accumulated; the lower one is
/// a mirror, so the result is exactly symmetric.
inline Matrix gram(const Matrix& x) {
  const std::size_t n = x.cols();
  Matrix g(n, n);
  for (std::size_t k = 0; k < x.rows(); ++k) {
    const auto xr = x.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = xr[i];
      if (xi == 0.0) continue;
      auto gi = g.row(i);
      for (std::size_t j = i; j < n; ++j) gi[j] += xi * xr[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

inline double trace(const Matrix& x) {
  if (!x.square()) throw ShapeError("trace of non-square matrix");
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) s += x(i, i);
  return s;
}

inline double frobenius_sq(const Matrix& x) {
  double s = 0.0;
  for (double v : x.entries()) s += v * v;
  return s;
}

enum class Validation {
  relaxed,     // positivity only
  structural,  // plus d_{r-1} == d_1 when r >= 3
  strict,      // plus every inner d_i >= max(p, q)
};

/// Dimension profile of a product G_1 ... G_r, where G_i is d_{i-1} x d_i,
/// d_0 = p, d_r = q and `inner` holds d_1 ... d_{r-1}.
struct ChainSpec {
  std::size_t p = 1;
  std::size_t q = 1;
  std::vector<std::size_t> inner;

  std::size_t r() const noexcept { return inner.size() + 1; }

  /// First inner dimension; the normalizer of A_1 and of the last factor.
  std::size_t d1() const {
    if (inner.empty()) throw SpecError("chain has no inner dimension (r = 1)");
    return inner.front();
  }

  /// Full profile d_0 ... d_r.
  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d;
    d.reserve(inner.size() + 2);
    d.push_back(p);
    d.insert(d.end(), inner.begin(), inner.end());
    d.push_back(q);
    return d;
  }

  void validate(Validation mode = Validation::structural) const {
    if (p == 0 || q == 0) throw SpecError("p and q must be positive");
    if (std::any_of(inner.begin(), inner.end(),
                    [](std::size_t d) { return d == 0; })) {
      throw SpecError("inner dimensions must be positive");
    }
    if (mode == Validation::relaxed) return;
    if (inner.size() >= 2 && inner.back() != inner.front()) {
      throw SpecError("last inner dimension must equal the first (d_{r-1} = d_1)");
    }
    if (mode == Validation::strict) {
      const std::size_t floor = std::max(p, q);
      for (std::size_t d : inner) {
        if (d < floor) {
          throw SpecError("strict mode requires every inner dimension >= max(p, q) = " +
                          std::to_string(floor));
        }
      }
    }
  }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

}  // namespace gmprod

#endif  // GMPROD_CORE_HPP_
