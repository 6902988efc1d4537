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

#ifndef GMPROD_MOMENTS_HPP_
#define GMPROD_MOMENTS_HPP_

#include <cmath>
#include <span>
#include <stdexcept>

#include "gmprod/core.hpp"
#include "gmprod/exact.hpp"

namespace gmprod {

// Fourth-order moments of a p x q ensemble that is invariant under left and
// right orthogonal rotations:
//   s1 = E A11^4              s2 = E A21^4
//   s3 = E Ai1^2 Aj1^2        s4 = E A1i^2 A1j^2       (i != j)
//   s5 = E A1i^2 A2j^2        s6 = E Aik Ail Ajk Ajl   (i != j, k != l)
// E tr((A^T A)^2) depends on the ensemble only through these six numbers.
template <class T>
struct MomentVector {
  T s1{}, s2{}, s3{}, s4{}, s5{}, s6{};

  friend bool operator==(const MomentVector&, const MomentVector&) = default;
};

/// Moments of one unnormalized standard Gaussian matrix.
template <class T = double>
MomentVector<T> base_gaussian_moments() {
  return {T(3), T(3), T(1), T(1), T(1), T(0)};
}

/// Moments of B G given the moments `t` of B (p x d) and an independent
/// d x q standard Gaussian G.
template <class T>
MomentVector<T> layer_update(const MomentVector<T>& t, std::size_t d) {
  const T n(d);
  const T pairs = n * (n - T(1));
  MomentVector<T> s;
  s.s1 = T(3) * n * t.s1 + T(3) * pairs * t.s4;
  s.s2 = s.s1;
  s.s3 = T(3) * n * t.s3 + pairs * t.s5 + T(2) * pairs * t.s6;
  s.s4 = n * t.s1 + pairs * t.s4;
  s.s5 = n * t.s3 + pairs * t.s5;
  s.s6 = n * t.s3 + pairs * t.s6;
  return s;
}

/// Closed-form moments of the unnormalized product with the given inner
/// dimensions (an empty list is the single Gaussian).
template <class T = double>
MomentVector<T> closed_form_moments(std::span<const std::size_t> inner) {
  T s4(1);
  for (std::size_t d : inner) s4 *= T(d) * (T(d) + T(2));

  T s6(0);
  for (std::size_t j = 0; j < inner.size(); ++j) {
    T term(inner[j]);
    for (std::size_t i = 0; i < j; ++i) term *= T(inner[i]) * (T(inner[i]) + T(2));
    for (std::size_t i = j + 1; i < inner.size(); ++i)
      term *= T(inner[i]) * (T(inner[i]) - T(1));
    s6 += term;
  }

  MomentVector<T> m;
  m.s3 = s4;
  m.s4 = s4;
  m.s1 = T(3) * s4;
  m.s2 = m.s1;
  m.s6 = s6;
  m.s5 = s4 - T(2) * s6;
  return m;
}

template <class T = double>
MomentVector<T> iterated_moments(std::span<const std::size_t> inner) {
  auto m = base_gaussian_moments<T>();
  for (std::size_t d : inner) m = layer_update(m, d);
  return m;
}

/// Product d_1^2 d_2^2 ... d_{r-1}^2 d_1^2; 1 when r = 1.
inline BigInt chain_normalizer(const ChainSpec& spec) {
  if (spec.inner.empty()) return BigInt(1);
  BigInt n(1);
  for (std::size_t d : spec.inner) n *= BigInt(d) * BigInt(d);
  n *= BigInt(spec.d1()) * BigInt(spec.d1());
  return n;
}

/// Exact E[h(A_r)] for the normalized product. With r = 1 the normalizer is
/// empty and the unnormalized single-Gaussian value pq(p+q+1) is returned.
inline Rational mean_h_product_exact(const ChainSpec& spec) {
  const auto m = closed_form_moments<BigInt>(spec.inner);
  const BigInt p(spec.p), q(spec.q);
  const BigInt numer = p * q * (p + q + 1) * m.s3 + p * q * (p - 1) * (q - 1) * m.s6;
  return Rational(numer, chain_normalizer(spec));
}

/// Double-precision E[h(A_r)], evaluated in ratio form so it stays finite for
/// large chains.
inline double mean_h_product(const ChainSpec& spec) {
  const double p = static_cast<double>(spec.p);
  const double q = static_cast<double>(spec.q);
  // s3 / prod d_i^2 and s6 / prod d_i^2
  double s3_ratio = 1.0;
  for (std::size_t d : spec.inner) s3_ratio *= 1.0 + 2.0 / static_cast<double>(d);
  double s6_ratio = 0.0;
  for (std::size_t j = 0; j < spec.inner.size(); ++j) {
    double term = 1.0 / static_cast<double>(spec.inner[j]);
    for (std::size_t i = 0; i < j; ++i) term *= 1.0 + 2.0 / static_cast<double>(spec.inner[i]);
    for (std::size_t i = j + 1; i < spec.inner.size(); ++i)
      term *= 1.0 - 1.0 / static_cast<double>(spec.inner[i]);
    s6_ratio += term;
  }
  const double tail =
      spec.inner.empty() ? 1.0 : 1.0 / std::pow(static_cast<double>(spec.d1()), 2);
  return (p * q * (p + q + 1.0) * s3_ratio + p * q * (p - 1.0) * (q - 1.0) * s6_ratio) * tail;
}

/// Large-dimension approximation of E[h(A_r)], with d_r read as d_1.
inline double mean_h_asymptotic(const ChainSpec& spec) {
  if (spec.r() < 2) throw SpecError("mean_h_asymptotic needs r >= 2");
  const double p = static_cast<double>(spec.p);
  const double q = static_cast<double>(spec.q);
  const double d1sq = std::pow(static_cast<double>(spec.d1()), 2);
  double inv_sum = 0.0;
  for (std::size_t d : spec.inner) inv_sum += 1.0 / static_cast<double>(d);
  return p * q * (p + q + 1.0) / d1sq + p * q * (p - 1.0) * (q - 1.0) / d1sq * inv_sum;
}

/// E[h(G / sqrt(d))] = pq(p+q+1) / d^2 for a p x q standard Gaussian G.
inline double mean_h_single(std::size_t p, std::size_t q, std::size_t d) {
  const double pd = static_cast<double>(p), qd = static_cast<double>(q);
  return pd * qd * (pd + qd + 1.0) / std::pow(static_cast<double>(d), 2);
}

inline Rational mean_h_single_exact(std::size_t p, std::size_t q, std::size_t d) {
  const BigInt pp(p), qq(q), dd(d);
  return Rational(pp * qq * (pp + qq + 1), dd * dd);
}

// Variance and covariance components of the squared entries of A^T A:
//   u1 = Var (A^TA)_ii^2           u2 = Var (A^TA)_ij^2
//   u3 = Cov((A^TA)_ii^2, (A^TA)_ik^2)   u4 = Cov((A^TA)_ij^2, (A^TA)_ik^2)
//   u5 = Cov((A^TA)_ii^2, (A^TA)_jj^2)   u6 = Cov((A^TA)_ii^2, (A^TA)_jk^2)
//   u7 = Cov((A^TA)_ij^2, (A^TA)_kl^2)
template <class T>
struct UComponents {
  T u1{}, u2{}, u3{}, u4{}, u5{}, u6{}, u7{};

  friend bool operator==(const UComponents&, const UComponents&) = default;
};

/// Components for an unnormalized p x q standard Gaussian (they do not
/// depend on q).
template <class T = double>
UComponents<T> u_components_gaussian(std::size_t p) {
  const T n(p);
  return {T(8) * n * (n + T(2)) * (n + T(3)), T(2) * n * (n + T(3)),
          T(4) * n * (n + T(2)), T(2) * n, T(0), T(0), T(0)};
}

template <class T>
T variance_from_components(const UComponents<T>& u, std::size_t q) {
  if (q == 0) throw std::invalid_argument("variance_from_components: q must be positive");
  const T n(q);
  const T n1 = n * (n - T(1));
  const T n2 = n1 * (n - T(2));
  const T n3 = n2 * (n - T(3));
  return n * u.u1 + n1 * (T(2) * u.u2 + T(4) * u.u3 + u.u5) +
         T(2) * n2 * (T(2) * u.u4 + u.u6) + n3 * u.u7;
}

/// Var(tr((G^T G)^2)) for an unnormalized p x q standard Gaussian G.
template <class T = double>
T variance_single_exact(std::size_t p, std::size_t q) {
  const T a(p), b(q);
  return T(4) * a * b *
         (T(5) + T(5) * a + T(5) * b + T(2) * a * a + T(5) * a * b + T(2) * b * b);
}

/// Multipliers of the variance-bound recurrence. None are known numerically;
/// all default to 1.
struct BoundConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c4 = 1.0;
  double kappa_p = 1.0;
  double kappa_q = 1.0;

  void validate() const {
    for (double c : {c1, c2, c3, c4, kappa_p, kappa_q}) {
      if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("variance-bound constants must be positive and finite");
      }
    }
  }
};

/// (U, V, P, Q): bounds on Var h, Var tr^2 and the two forcing terms.
struct VarianceBoundState {
  double u = 0.0;
  double v = 0.0;
  double p_term = 0.0;
  double q_term = 0.0;
  BoundConstants constants;
};

/// Seed at r = 1: U is the exact single-Gaussian variance, V, P and Q are
/// the kappa-scaled orders of magnitude, all normalized by d_1^4.
inline VarianceBoundState initial_bound_state(const ChainSpec& spec,
                                              const BoundConstants& constants = {}) {
  constants.validate();
  const double p = static_cast<double>(spec.p);
  const double q = static_cast<double>(spec.q);
  const double d4 = std::pow(static_cast<double>(spec.d1()), 4);
  VarianceBoundState s;
  s.constants = constants;
  s.u = variance_single_exact<double>(spec.p, spec.q) / d4;
  s.v = constants.kappa_q * p * p * p * q * q * q / d4;
  s.p_term = constants.kappa_p * (p * p * p * q + p * q * q * q) / d4;
  s.q_term = constants.kappa_q * p * p * p * q * q * q / d4;
  return s;
}

/// One layer of the recurrence with inner dimension d.
inline VarianceBoundState bound_step(const VarianceBoundState& s, std::size_t d) {
  const double dd = static_cast<double>(d);
  const double cross = std::sqrt(s.u * s.v);
  const auto& c = s.constants;
  VarianceBoundState next = s;
  next.u = c.c1 * s.p_term + 2.0 * s.u + s.v / (dd * dd) + 3.0 * cross / dd;
  next.v = c.c2 * s.q_term + s.u / (dd * dd) + s.v + 2.0 * cross / dd;
  next.p_term = c.c3 * s.p_term;
  next.q_term = c.c4 * s.q_term;
  return next;
}

/// Upper bound on Var h(A_r): seeds at r = 1 and applies one step per inner
/// dimension.
inline double variance_bound_product(const ChainSpec& spec,
                                     const BoundConstants& constants = {}) {
  if (spec.r() < 2) throw SpecError("variance_bound_product needs r >= 2");
  auto state = initial_bound_state(spec, constants);
  for (std::size_t d : spec.inner) state = bound_step(state, d);
  return state.u;
}

}  // namespace gmprod

#endif  // GMPROD_MOMENTS_HPP_
