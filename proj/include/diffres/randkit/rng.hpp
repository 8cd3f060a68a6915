/*
 * Copyright (C) 2026 The diffres Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DIFFRES_RANDKIT_RNG_HPP
#define DIFFRES_RANDKIT_RNG_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace diffres {

/**
 * Counter-based random stream built on Philox-4x64-10.
 *
 * The 256-bit key is split in two: words 0-1 are the Philox key and words 2-3
 * are folded into the upper half of the 256-bit Philox counter, whose lower
 * half holds the draw index and a domain tag. A 64-bit seed expands to the
 * key through four consecutive SplitMix64 outputs.
 *
 * `split(label)` derives a child key by encrypting (label, split-tag, key2,
 * key3) under the parent key, so siblings with distinct labels get distinct
 * keys and the child never depends on how many draws the parent has made.
 */
class RngStream {
public:
  using Key = std::array<std::uint64_t, 4>;

  explicit RngStream(std::uint64_t seed);
  static RngStream from_key(const Key &key) { return RngStream(key); }

  RngStream split(std::uint64_t label) const;

  const Key &key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double gumbel();

  friend bool operator==(const RngStream &, const RngStream &) = default;

private:
  explicit RngStream(const Key &key) : key_(key) {}
  void refill();

  Key key_{};
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 4> block_{};
  unsigned block_pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// One Philox-4x64-10 block.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                        std::array<std::uint64_t, 2> key);

std::uint64_t splitmix64(std::uint64_t &state);

std::vector<double> draw_normal(RngStream &s, std::size_t n);
std::vector<double> draw_uniform(RngStream &s, std::size_t n);
std::vector<double> draw_gumbel(RngStream &s, std::size_t n);

/// Poisson count; inversion below rate 10, PTRS rejection above.
std::uint64_t draw_poisson(RngStream &s, double rate);

/**
 * Inverse-CDF categorical draw on log-weights (normalised internally).
 * Returns the smallest index whose cumulative weight exceeds u * total.
 */
std::size_t draw_categorical(RngStream &s, std::span<const double> log_weights);

/// Cumulative weights for repeated categorical draws; see sample_cdf.
std::vector<double> categorical_cdf(std::span<const double> log_weights);
std::size_t sample_cdf(RngStream &s, std::span<const double> cdf);

} // namespace diffres

#endif // DIFFRES_RANDKIT_RNG_HPP
