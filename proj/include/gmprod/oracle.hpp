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

// Ground-truth engines for the analytic formulas in moments.hpp.
//
// The Wick engine expands tr((A^T A)^2) into monomials in the Gaussian
// entries and takes expectations entry by entry (E g^k = (k-1)!! for even k,
// 0 for odd k). It shares no code with the moment recursion, so agreement
// between the two is a genuine check. Monte Carlo helpers cover the sizes
// the enumeration cannot reach.

#ifndef GMPROD_ORACLE_HPP_
#define GMPROD_ORACLE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmprod/exact.hpp"
#include "gmprod/parallel.hpp"
#include "gmprod/sampling.hpp"
#include "gmprod/statistics.hpp"

namespace gmprod {

/// Raised when an exact enumeration would exceed its monomial cap or the
/// requested chain is outside what the enumeration supports.
class OracleBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WickBudget {
  std::uint64_t max_monomials = 10'000'000;
};

struct CIEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

namespace wick_detail {

// Entry id: factor in the top byte, then row and column.
constexpr std::uint32_t entry_id(std::uint32_t factor, std::size_t row, std::size_t col) {
  return (factor << 24) | (static_cast<std::uint32_t>(row) << 12) |
         static_cast<std::uint32_t>(col);
}

constexpr std::uint64_t double_factorial_moment(unsigned k) {
  if (k % 2 == 1) return 0;
  std::uint64_t m = 1;
  for (unsigned j = k - 1; j > 1; j -= 2) m *= j;
  return m;
}

/// E of a product of standard Gaussian entries given by id (with repeats).
template <std::size_t N>
std::uint64_t monomial_expectation(std::array<std::uint32_t, N> ids) {
  std::sort(ids.begin(), ids.end());
  std::uint64_t value = 1;
  std::size_t i = 0;
  while (i < N) {
    std::size_t j = i;
    while (j < N && ids[j] == ids[i]) ++j;
    const auto power = static_cast<unsigned>(j - i);
    if (power % 2 == 1) return 0;
    value *= double_factorial_moment(power);
    i = j;
  }
  return value;
}

inline std::uint64_t checked_count(std::initializer_list<std::uint64_t> factors,
                                   const WickBudget& budget, const char* what) {
  std::uint64_t count = 1;
  for (std::uint64_t f : factors) {
    if (f != 0 && count > budget.max_monomials / f) {
      throw OracleBudgetError(std::string(what) + ": too large for exact oracle");
    }
    count *= f;
  }
  if (count > budget.max_monomials) {
    throw OracleBudgetError(std::string(what) + ": too large for exact oracle");
  }
  return count;
}

inline void check_dims(std::size_t p, std::size_t q, std::span<const std::size_t> inner) {
  if (p == 0 || q == 0) throw std::invalid_argument("wick oracle: p and q must be positive");
  for (std::size_t d : inner)
    if (d == 0) throw std::invalid_argument("wick oracle: inner dimensions must be positive");
  if (p >= 4096 || q >= 4096 || std::any_of(inner.begin(), inner.end(),
                                             [](std::size_t d) { return d >= 4096; })) {
    throw OracleBudgetError("wick oracle: dimension too large for exact oracle");
  }
}

// Sum over (i, j, k, l) of E[A_ki A_kj A_li A_lj] for A = G.
inline std::uint64_t single_fourth(std::size_t p, std::size_t q) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l)
          total += monomial_expectation<4>(
              {entry_id(0, k, i), entry_id(0, k, j), entry_id(0, l, i), entry_id(0, l, j)});
  return total;
}

// Same sum for A = G1 G2, each A_ab expanded as sum_m G1_am G2_mb.
inline std::uint64_t product_fourth(std::size_t p, std::size_t q, std::size_t d) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l)
          for (std::size_t m1 = 0; m1 < d; ++m1)
            for (std::size_t m2 = 0; m2 < d; ++m2)
              for (std::size_t m3 = 0; m3 < d; ++m3)
                for (std::size_t m4 = 0; m4 < d; ++m4)
                  total += monomial_expectation<8>(
                      {entry_id(0, k, m1), entry_id(1, m1, i),   // A_ki
                       entry_id(0, k, m2), entry_id(1, m2, j),   // A_kj
                       entry_id(0, l, m3), entry_id(1, m3, i),   // A_li
                       entry_id(0, l, m4), entry_id(1, m4, j)});  // A_lj
  return total;
}

}  // namespace wick_detail

/// Exact E[tr((A^T A)^2)] for the chain with the given inner dimensions
/// (at most one), divided by d_1^2 ... d_{r-1}^2 d_1^2. With no inner
/// dimension the single unnormalized Gaussian value is returned.
inline Rational wick_exact_mean_h(std::size_t p, std::size_t q,
                                  std::span<const std::size_t> inner,
                                  const WickBudget& budget = {}) {
  using namespace wick_detail;
  check_dims(p, q, inner);
  if (inner.size() > 1) {
    throw OracleBudgetError("wick oracle: r >= 3 is too large for exact oracle");
  }
  if (inner.empty()) {
    checked_count({p, p, q, q}, budget, "wick mean");
    return Rational(BigInt(single_fourth(p, q)));
  }
  const std::size_t d = inner.front();
  checked_count({p, p, q, q, d, d, d, d}, budget, "wick mean");
  const BigInt dd(d);
  return Rational(BigInt(product_fourth(p, q, d)), dd * dd * dd * dd);
}

/// Exact Var(tr((G^T G)^2)) for a p x q standard Gaussian G.
inline Rational wick_exact_var_h_single(std::size_t p, std::size_t q,
                                        const WickBudget& budget = {}) {
  using namespace wick_detail;
  check_dims(p, q, {});
  checked_count({p, p, p, p, q, q, q, q}, budget, "wick variance");

  // Index tuples (i, j, k, l) of h's monomials A_ki A_kj A_li A_lj.
  std::vector<std::array<std::uint32_t, 4>> terms;
  terms.reserve(p * p * q * q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < p; ++l)
          terms.push_back({entry_id(0, k, i), entry_id(0, k, j), entry_id(0, l, i),
                           entry_id(0, l, j)});

  std::uint64_t second = 0;
  for (const auto& a : terms)
    for (const auto& b : terms)
      second += monomial_expectation<8>({a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]});

  const BigInt first(single_fourth(p, q));
  return Rational(BigInt(second) - first * first);
}

/// Mean of `statistic(seed.offset(i))` over i in [0, n).
template <class Statistic>
CIEstimate mc_mean(Statistic&& statistic, std::size_t n, SeedSpec seed) {
  if (n < 2) throw std::invalid_argument("mc_mean: need at least 2 trials");
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t i) { values[i] = statistic(seed.offset(i)); });
  const auto s = summarize(values);
  return {s.mean, s.std_error_of_mean, n};
}

/// Unbiased sample variance with its leave-one-out jackknife standard error.
inline CIEstimate variance_with_jackknife(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3) throw std::invalid_argument("jackknife variance: need at least 3 values");
  const double mean = summarize(values).mean;
  const double nd = static_cast<double>(n);

  double total_sq = 0.0;
  for (double v : values) total_sq += (v - mean) * (v - mean);

  // Dropping y_i = x_i - mean leaves sum of squares (S - y_i^2) - y_i^2/(n-1)
  // around the reduced mean.
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = values[i] - mean;
    loo[i] = (total_sq - y * y - y * y / (nd - 1.0)) / (nd - 2.0);
    loo_mean += loo[i];
  }
  loo_mean /= nd;
  double spread = 0.0;
  for (double t : loo) spread += (t - loo_mean) * (t - loo_mean);

  return {total_sq / (nd - 1.0), std::sqrt((nd - 1.0) / nd * spread), n};
}

template <class Statistic>
CIEstimate mc_variance(Statistic&& statistic, std::size_t n, SeedSpec seed) {
  if (n < 10) throw std::invalid_argument("mc_variance: need at least 10 trials");
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t i) { values[i] = statistic(seed.offset(i)); });
  return variance_with_jackknife(values);
}

}  // namespace gmprod

#endif  // GMPROD_ORACLE_HPP_
