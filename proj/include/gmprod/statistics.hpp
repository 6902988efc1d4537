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

#ifndef GMPROD_STATISTICS_HPP_
#define GMPROD_STATISTICS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "gmprod/core.hpp"

namespace gmprod {

/// h(X) = tr((X^T X)^2), evaluated as ||X^T X||_F^2.
inline double stat_h(const Matrix& x) { return frobenius_sq(gram(x)); }

/// t(X) = tr(X^T X)^2.
inline double stat_t(const Matrix& x) {
  const double f = frobenius_sq(x);
  return f * f;
}

struct StatSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 when n == 1
  double std_error_of_mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline StatSummary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty sample");
  StatSummary s;
  s.n = values.size();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;

  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = std::clamp(sum / static_cast<double>(s.n), s.min, s.max);

  if (s.n > 1) {
    // corrected two-pass
    double ss = 0.0;
    double comp = 0.0;
    for (double v : values) {
      const double dev = v - s.mean;
      ss += dev * dev;
      comp += dev;
    }
    const double n = static_cast<double>(s.n);
    s.variance = std::max(0.0, (ss - comp * comp / n) / (n - 1.0));
    s.std_error_of_mean = std::sqrt(s.variance / n);
  }
  return s;
}

}  // namespace gmprod

#endif  // GMPROD_STATISTICS_HPP_
