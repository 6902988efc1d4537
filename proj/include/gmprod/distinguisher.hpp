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

#ifndef GMPROD_DISTINGUISHER_HPP_
#define GMPROD_DISTINGUISHER_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "gmprod/moments.hpp"
#include "gmprod/parallel.hpp"
#include "gmprod/sampling.hpp"
#include "gmprod/statistics.hpp"

namespace gmprod {

enum class Label { single, product };

constexpr const char* to_string(Label l) noexcept {
  return l == Label::single ? "single" : "product";
}

/// Threshold test on h separating A_1 from A_r.
struct TestPlan {
  ChainSpec spec;
  double mu_single = 0.0;
  double mu_product = 0.0;
  double threshold = 0.0;
  double var_single = 0.0;
  double var_product_bound = 0.0;

  double gap() const noexcept { return mu_product - mu_single; }
};

struct PowerReport {
  std::size_t n_trials = 0;  // per ensemble
  double accuracy = 0.0;
  double false_positive_rate = 0.0;  // A_1 labelled "product"
  double false_negative_rate = 0.0;  // A_r labelled "single"
  double chebyshev_error_bound = 1.0;
};

/// h-values drawn from both ensembles for one experiment.
struct HSamples {
  std::vector<double> single;
  std::vector<double> product;
};

inline TestPlan build_test(const ChainSpec& spec, const BoundConstants& constants = {},
                           Validation mode = Validation::structural) {
  spec.validate(mode);
  if (spec.r() < 2) throw SpecError("build_test needs r >= 2");
  TestPlan plan;
  plan.spec = spec;
  const std::size_t d1 = spec.d1();
  plan.mu_single = mean_h_single(spec.p, spec.q, d1);
  plan.mu_product = mean_h_product(spec);
  plan.threshold = 0.5 * (plan.mu_single + plan.mu_product);
  plan.var_single = variance_single_exact<double>(spec.p, spec.q) /
                    std::pow(static_cast<double>(d1), 4);
  plan.var_product_bound = variance_bound_product(spec, constants);
  return plan;
}

/// "product" iff h exceeds the threshold; equality goes to "single".
inline Label classify(double h_value, const TestPlan& plan) noexcept {
  return h_value > plan.threshold ? Label::product : Label::single;
}

/// Chebyshev bound on either per-hypothesis error of the midpoint rule.
inline double chebyshev_error(const TestPlan& plan) noexcept {
  const double gap = plan.gap();
  if (!(gap > 0.0)) return 1.0;
  const double half = 0.5 * gap;
  const double var = std::max(plan.var_single, plan.var_product_bound);
  return std::min(1.0, var / (half * half));
}

/// n draws of h from each ensemble. Trial i of A_1 uses stream i of
/// seed.derive(1); trial i of A_r uses stream i of seed.derive(2).
inline HSamples draw_h_samples(const ChainSpec& spec, std::size_t n, SeedSpec seed,
                               Validation mode = Validation::structural) {
  spec.validate(mode);
  const SeedSpec single_seed = seed.derive(1);
  const SeedSpec product_seed = seed.derive(2);
  HSamples out{std::vector<double>(n), std::vector<double>(n)};
  parallel_for(n, [&](std::size_t i) {
    out.single[i] = stat_h(sample_single(spec, single_seed.offset(i)));
    out.product[i] = stat_h(sample_product(spec, product_seed.offset(i), mode));
  });
  return out;
}

inline PowerReport power_from_samples(const HSamples& samples, const TestPlan& plan) {
  if (samples.single.empty() || samples.product.empty()) {
    throw std::invalid_argument("power_from_samples: empty sample");
  }
  std::size_t false_pos = 0;
  for (double h : samples.single) false_pos += classify(h, plan) == Label::product;
  std::size_t false_neg = 0;
  for (double h : samples.product) false_neg += classify(h, plan) == Label::single;

  PowerReport r;
  r.n_trials = samples.single.size();
  r.false_positive_rate =
      static_cast<double>(false_pos) / static_cast<double>(samples.single.size());
  r.false_negative_rate =
      static_cast<double>(false_neg) / static_cast<double>(samples.product.size());
  r.accuracy = 1.0 - 0.5 * (r.false_positive_rate + r.false_negative_rate);
  r.chebyshev_error_bound = chebyshev_error(plan);
  return r;
}

inline PowerReport empirical_power(const ChainSpec& spec, std::size_t n, SeedSpec seed,
                                   const BoundConstants& constants = {}) {
  if (n < 10) throw std::invalid_argument("empirical_power: need at least 10 trials");
  const TestPlan plan = build_test(spec, constants);
  return power_from_samples(draw_h_samples(spec, n, seed), plan);
}

/// Two-sample Kolmogorov-Smirnov statistic sup_t |F_x(t) - F_y(t)|. Threshold
/// events are a subfamily of all events, so this lower-bounds the total
/// variation distance between the laws that generated the samples.
inline double tv_lower_bound_empirical(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) {
    throw std::invalid_argument("tv_lower_bound_empirical: empty sample");
  }
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

/// min(1, c * sum_i sqrt(pq / d_i)).
inline double tv_upper_bound(const ChainSpec& spec, double c = 1.0) {
  if (!(c > 0.0)) throw std::invalid_argument("tv_upper_bound: c must be positive");
  if (spec.r() < 2) throw SpecError("tv_upper_bound needs r >= 2");
  const double pq = static_cast<double>(spec.p) * static_cast<double>(spec.q);
  double sum = 0.0;
  for (std::size_t d : spec.inner) sum += std::sqrt(pq / static_cast<double>(d));
  return std::min(1.0, c * sum);
}

/// KL bound c * pq / d between a p x q block of a random orthogonal matrix
/// (scaled) and a Gaussian block; requires p, q <= d.
inline double kl_jiang_ma(std::size_t p, std::size_t q, std::size_t d, double c = 1.0) {
  if (!(c > 0.0)) throw std::invalid_argument("kl_jiang_ma: c must be positive");
  if (p == 0 || q == 0 || d == 0) throw std::invalid_argument("kl_jiang_ma: dims must be positive");
  if (p > d || q > d) throw std::invalid_argument("kl_jiang_ma: requires p, q <= d");
  return c * static_cast<double>(p) * static_cast<double>(q) / static_cast<double>(d);
}

/// Pinsker: TV <= sqrt(KL / 2), clamped to 1.
inline double pinsker_tv_from_kl(double kl) {
  if (!(kl >= 0.0)) throw std::invalid_argument("pinsker_tv_from_kl: KL must be nonnegative");
  return std::min(1.0, std::sqrt(kl / 2.0));
}

}  // namespace gmprod

#endif  // GMPROD_DISTINGUISHER_HPP_
