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

#ifndef GMPROD_SAMPLING_HPP_
#define GMPROD_SAMPLING_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "gmprod/core.hpp"

namespace gmprod {

/// Identifies one reproducible random stream: a master seed shared by a run
/// and the index of the trial that owns the stream.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Stream `i` positions after this one, same master.
  constexpr SeedSpec offset(std::uint64_t i) const noexcept {
    return {master_seed, stream_index + i};
  }

  /// A different master derived from this one, for independent families of
  /// streams (e.g. one per ensemble).
  SeedSpec derive(std::uint64_t tag) const noexcept;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline SeedSpec SeedSpec::derive(std::uint64_t tag) const noexcept {
  return {splitmix64(master_seed ^ splitmix64(tag + 0x5851F42D4C957F2DULL)),
          stream_index};
}

/// Philox4x32-10 counter-based block function (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Block apply(Block ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Standard normal stream for one SeedSpec.
///
/// The key is the master seed, the upper counter half is the stream index and
/// the lower half counts blocks. Each block yields two 53-bit uniforms in
/// (0, 1), mapped to two normals by the Box-Muller transform (cosine branch
/// first). This layout and transform are part of the reproducibility
/// contract: changing either changes every sampled value.
class GaussianStream {
 public:
  explicit GaussianStream(SeedSpec seed) noexcept
      : key_{static_cast<std::uint32_t>(seed.master_seed),
             static_cast<std::uint32_t>(seed.master_seed >> 32)},
        stream_(seed.stream_index) {}

  double next() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto out = Philox4x32::apply(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
         static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
        key_);
    ++block_;
    const double u1 = to_unit((std::uint64_t{out[1]} << 32) | out[0]);
    const double u2 = to_unit((std::uint64_t{out[3]} << 32) | out[2]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  void fill(std::span<double> out) noexcept {
    for (double& x : out) x = next();
  }

 private:
  static double to_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols matrix of i.i.d. N(0, 1) entries, filled row-major.
inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols,
                              GaussianStream& stream) {
  Matrix m(rows, cols);
  stream.fill(m.entries());
  return m;
}

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, SeedSpec seed) {
  GaussianStream stream(seed);
  return gaussian_matrix(rows, cols, stream);
}

/// A_1 = G / sqrt(d_1) with G a p x q standard Gaussian matrix.
inline Matrix sample_single(const ChainSpec& spec, SeedSpec seed) {
  spec.validate(Validation::relaxed);
  Matrix a = gaussian_matrix(spec.p, spec.q, seed);
  a *= 1.0 / std::sqrt(static_cast<double>(spec.d1()));
  return a;
}

/// A_r = W_1 W_2 ... W_r with W_i = G_i / sqrt(d_i) for i < r and
/// W_r = G_r / sqrt(d_1). G_1 is drawn first and G_r last from one stream.
inline Matrix sample_product(const ChainSpec& spec, SeedSpec seed,
                             Validation mode = Validation::structural) {
  spec.validate(mode);
  if (spec.r() < 2) throw SpecError("sample_product needs r >= 2");
  const auto dims = spec.dims();
  const std::size_t r = spec.r();
  GaussianStream stream(seed);

  Matrix acc = gaussian_matrix(dims[0], dims[1], stream);
  double scale = 1.0 / std::sqrt(static_cast<double>(dims[1]));
  for (std::size_t i = 2; i <= r; ++i) {
    const Matrix g = gaussian_matrix(dims[i - 1], dims[i], stream);
    acc = matmul(acc, g);
    const std::size_t norm = (i == r) ? spec.d1() : dims[i];
    scale /= std::sqrt(static_cast<double>(norm));
  }
  acc *= scale;
  return acc;
}

}  // namespace gmprod

#endif  // GMPROD_SAMPLING_HPP_
