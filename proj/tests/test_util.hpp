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

// Test-only generators. They use std::mt19937_64 rather than the library's
// sampler so property tests do not depend on the code they exercise.

#ifndef GMPROD_TESTS_TEST_UTIL_HPP_
#define GMPROD_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <random>

#include "gmprod/core.hpp"

namespace gmprod::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (double& x : m.entries()) x = normal(rng);
  return m;
}

/// Orthogonal n x n matrix from modified Gram-Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  Matrix g = random_matrix(n, n, rng);
  Matrix q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = g(i, j);
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += q(i, k) * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q(i, k);
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / norm;
  }
  return q;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace gmprod::testing

#endif  // GMPROD_TESTS_TEST_UTIL_HPP_
