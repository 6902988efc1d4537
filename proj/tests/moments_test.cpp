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

#include "gmprod/moments.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace gmprod {
namespace {

using testing::rel_diff;
using Exact = MomentVector<BigInt>;

Exact exact(long s1, long s2, long s3, long s4, long s5, long s6) {
  return {BigInt(s1), BigInt(s2), BigInt(s3), BigInt(s4), BigInt(s5), BigInt(s6)};
}

TEST(BaseMoments, SingleGaussian) {
  const auto m = base_gaussian_moments<BigInt>();
  EXPECT_EQ(m, exact(3, 3, 1, 1, 1, 0));
  EXPECT_EQ(m.s1, 3 * m.s4);
  EXPECT_EQ(m.s3, 2 * m.s6 + m.s5);
}

TEST(LayerUpdate, HandAppliedAtTwo) {
  EXPECT_EQ(layer_update(base_gaussian_moments<BigInt>(), 2), exact(24, 24, 8, 8, 4, 2));
}

TEST(LayerUpdate, OneLayerClosedForm) {
  for (std::size_t d = 1; d <= 50; ++d) {
    const auto s = layer_update(base_gaussian_moments<BigInt>(), d);
    const BigInt expected = BigInt(d) * (d + 2);
    EXPECT_EQ(s.s3, expected) << d;
    EXPECT_EQ(s.s4, expected) << d;
    EXPECT_EQ(s.s1, 3 * s.s4) << d;
    EXPECT_EQ(s.s1, s.s2) << d;
  }
}

TEST(LayerUpdate, PreservesInvariantIdentities) {
  // Any T with T1 = 3 T4, T3 = 2 T6 + T5 and T3 = T4 maps to an S with the
  // same three identities.
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const long t6 = static_cast<long>(rng() % 1000);
    const long t5 = static_cast<long>(rng() % 1000);
    const long t3 = 2 * t6 + t5;
    const auto t = exact(3 * t3, 3 * t3, t3, t3, t5, t6);
    const auto s = layer_update(t, 1 + rng() % 60);
    EXPECT_EQ(s.s1, 3 * s.s4);
    EXPECT_EQ(s.s3, 2 * s.s6 + s.s5);
    EXPECT_EQ(s.s3, s.s4);
  }
}

TEST(ClosedForm, EmptyChainIsSingleGaussian) {
  EXPECT_EQ(closed_form_moments<BigInt>({}), exact(3, 3, 1, 1, 1, 0));
}

TEST(ClosedForm, OneInnerDimension) {
  for (std::size_t d = 1; d <= 30; ++d) {
    const std::vector<std::size_t> inner{d};
    const auto m = closed_form_moments<BigInt>(inner);
    const long dl = static_cast<long>(d);
    EXPECT_EQ(m, exact(3 * dl * (dl + 2), 3 * dl * (dl + 2), dl * (dl + 2), dl * (dl + 2),
                       dl * dl, dl));
  }
}

TEST(ClosedForm, TwoTwoMatchesTwoUpdates) {
  const std::vector<std::size_t> inner{2, 2};
  const auto twice = layer_update(layer_update(base_gaussian_moments<BigInt>(), 2), 2);
  EXPECT_EQ(closed_form_moments<BigInt>(inner), twice);
}

TEST(ClosedForm, MatchesIterationExactlyAndInDoubles) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::size_t> inner(rng() % 6);
    for (auto& d : inner) d = 1 + rng() % 50;
    EXPECT_EQ(closed_form_moments<BigInt>(inner), iterated_moments<BigInt>(inner));

    const auto a = closed_form_moments<double>(inner);
    const auto b = iterated_moments<double>(inner);
    for (auto [x, y] : {std::pair{a.s1, b.s1}, {a.s2, b.s2}, {a.s3, b.s3}, {a.s4, b.s4},
                        {a.s5, b.s5}, {a.s6, b.s6}}) {
      EXPECT_LE(rel_diff(x, y), 1e-12);
    }
    EXPECT_GE(a.s5, 0.0);
  }
}

TEST(MeanProduct, Examples) {
  EXPECT_EQ(mean_h_product_exact({2, 2, {4}}), Rational(31, 16));
  EXPECT_DOUBLE_EQ(mean_h_product({2, 2, {4}}), 1.9375);
  EXPECT_EQ(mean_h_product_exact({1, 1, {1}}), Rational(9));
  EXPECT_DOUBLE_EQ(mean_h_product({1, 1, {1}}), 9.0);
  // r = 1: empty normalizer, unnormalized pq(p+q+1)
  EXPECT_EQ(mean_h_product_exact({2, 2, {}}), Rational(20));
  EXPECT_DOUBLE_EQ(mean_h_product({2, 2, {}}), 20.0);
}

TEST(MeanProduct, DoublePathMatchesExact) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    ChainSpec spec{1 + rng() % 40, 1 + rng() % 40, {}};
    const std::size_t r = 1 + rng() % 5;
    if (r >= 2) {
      spec.inner.assign(r - 1, 0);
      for (auto& d : spec.inner) d = 1 + rng() % 5000;
      spec.inner.back() = spec.inner.front();
    }
    EXPECT_LE(rel_diff(mean_h_product(spec), to_double(mean_h_product_exact(spec))), 1e-13);
  }
}

TEST(MeanAsymptotic, Examples) {
  EXPECT_DOUBLE_EQ(mean_h_asymptotic({2, 2, {4}}), 1.3125);
  const ChainSpec big{2, 2, {1000}};
  const double exact_mean = mean_h_product(big);
  EXPECT_LT(std::abs(exact_mean - mean_h_asymptotic(big)) / exact_mean, 0.01);
  // (p-1)(q-1) = 0 kills the second term
  EXPECT_DOUBLE_EQ(mean_h_asymptotic({1, 5, {7}}), 5.0 * 7.0 / 49.0);
  EXPECT_DOUBLE_EQ(mean_h_asymptotic({5, 1, {7, 3, 7}}), 5.0 * 7.0 / 49.0);
  EXPECT_THROW(mean_h_asymptotic({2, 2, {}}), SpecError);
}

TEST(MeanAsymptotic, RelativeGapShrinksWithDimension) {
  double previous = 1.0;
  for (std::size_t d : {10u, 100u, 1000u, 10000u}) {
    const ChainSpec spec{2, 2, {d}};
    const double gap = std::abs(mean_h_product(spec) - mean_h_asymptotic(spec)) /
                       mean_h_product(spec);
    EXPECT_LT(gap, previous);
    previous = gap;
  }
}

TEST(MeanSingle, Examples) {
  EXPECT_DOUBLE_EQ(mean_h_single(2, 2, 4), 1.25);
  EXPECT_DOUBLE_EQ(mean_h_single(1, 1, 1), 3.0);
  EXPECT_DOUBLE_EQ(mean_h_single(3, 2, 1), 36.0);
  EXPECT_EQ(mean_h_single_exact(2, 2, 4), Rational(5, 4));
}

TEST(UComponents, GaussianValues) {
  using U = UComponents<BigInt>;
  EXPECT_EQ(u_components_gaussian<BigInt>(2), (U{320, 20, 32, 4, 0, 0, 0}));
  EXPECT_EQ(u_components_gaussian<BigInt>(1), (U{96, 8, 12, 2, 0, 0, 0}));
  for (std::size_t p = 1; p <= 100; ++p) {
    const auto u = u_components_gaussian<double>(p);
    for (double x : {u.u1, u.u2, u.u3, u.u4, u.u5, u.u6, u.u7}) EXPECT_GE(x, 0.0);
  }
}

TEST(VarianceFromComponents, Examples) {
  EXPECT_EQ(variance_from_components(u_components_gaussian<BigInt>(2), 2), BigInt(976));
  EXPECT_EQ(variance_from_components(u_components_gaussian<BigInt>(1), 1), BigInt(96));
  const UComponents<double> u{7, 11, 13, 17, 19, 23, 29};
  EXPECT_DOUBLE_EQ(variance_from_components(u, 1), 7.0);
  EXPECT_THROW(variance_from_components(u, 0), std::invalid_argument);
}

TEST(VarianceSingleExact, Examples) {
  EXPECT_EQ(variance_single_exact<BigInt>(1, 1), BigInt(96));
  EXPECT_EQ(variance_single_exact<BigInt>(2, 2), BigInt(976));
  EXPECT_EQ(variance_single_exact<BigInt>(2, 1), BigInt(320));
  EXPECT_EQ(variance_single_exact<BigInt>(3, 5), variance_single_exact<BigInt>(5, 3));
}

TEST(VarianceSingleExact, AgreesWithComponentSum) {
  for (std::size_t p = 1; p <= 20; ++p)
    for (std::size_t q = 1; q <= 20; ++q)
      EXPECT_EQ(variance_from_components(u_components_gaussian<BigInt>(p), q),
                variance_single_exact<BigInt>(p, q))
          << p << "," << q;
}

TEST(VarianceBound, SeedsAtExactSingleVariance) {
  const auto s = initial_bound_state({1, 1, {1}});
  EXPECT_DOUBLE_EQ(s.u, 96.0);
  EXPECT_DOUBLE_EQ(s.v, 1.0);
  EXPECT_DOUBLE_EQ(s.p_term, 2.0);
  EXPECT_DOUBLE_EQ(s.q_term, 1.0);
}

TEST(VarianceBound, OneStepArithmetic) {
  EXPECT_NEAR(variance_bound_product({1, 1, {1}}), 195.0 + 3.0 * std::sqrt(96.0), 1e-12);
  EXPECT_NEAR(variance_bound_product({1, 1, {1}}), 224.394, 5e-4);
}

TEST(VarianceBound, MonotoneInEveryConstant) {
  const ChainSpec spec{6, 4, {9, 13, 9}};
  const double base = variance_bound_product(spec);
  for (int which = 0; which < 6; ++which) {
    double previous = base;
    for (double value : {1.5, 2.0, 4.0, 10.0}) {
      BoundConstants c;
      double* fields[] = {&c.c1, &c.c2, &c.c3, &c.c4, &c.kappa_p, &c.kappa_q};
      *fields[which] = value;
      const double bound = variance_bound_product(spec, c);
      EXPECT_GE(bound, previous) << which << " " << value;
      previous = bound;
    }
  }
}

TEST(VarianceBound, GrowsAtMostGeometricallyInChainLength) {
  // p = q = d = 32 with unit constants: U / ((p^3 q + p q^3) / d^4) grows by
  // less than a factor 3 per extra factor (observed ratios 2.2 to 2.6).
  const double scale = 2.0 * std::pow(32.0, 4) / std::pow(32.0, 4);
  double previous = variance_single_exact<double>(32, 32) / std::pow(32.0, 4) / scale;
  for (std::size_t r = 2; r <= 6; ++r) {
    const ChainSpec spec{32, 32, std::vector<std::size_t>(r - 1, 32)};
    const double k = variance_bound_product(spec) / scale;
    EXPECT_GT(k, previous);
    EXPECT_LE(k / previous, 3.0) << "r = " << r;
    previous = k;
  }
}

TEST(VarianceBound, RejectsBadInput) {
  BoundConstants c;
  c.c3 = 0.0;
  EXPECT_THROW(variance_bound_product({2, 2, {4}}, c), std::invalid_argument);
  c.c3 = -1.0;
  EXPECT_THROW(variance_bound_product({2, 2, {4}}, c), std::invalid_argument);
  EXPECT_THROW(variance_bound_product({2, 2, {}}), SpecError);
}

}  // namespace
}  // namespace gmprod
