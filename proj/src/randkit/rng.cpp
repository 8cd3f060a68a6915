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

#include "diffres/randkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diffres/error.hpp"

namespace diffres {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73Bull;

// Domain tags occupying counter word 1.
constexpr std::uint64_t kDrawTag = 0;
constexpr std::uint64_t kSplitTag = 0x5eed5eed5eed5eedull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t &hi, std::uint64_t &lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

} // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                        std::array<std::uint64_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto &k : key_)
    k = splitmix64(state);
}

RngStream RngStream::split(std::uint64_t label) const {
  return RngStream(philox4x64({label, kSplitTag, key_[2], key_[3]}, {key_[0], key_[1]}));
}

void RngStream::refill() {
  block_ = philox4x64({counter_, kDrawTag, key_[2], key_[3]}, {key_[0], key_[1]});
  ++counter_;
  block_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (block_pos_ == 4)
    refill();
  return block_[block_pos_++];
}

double RngStream::uniform() {
  // 53 random bits centred in their cell: never exactly 0 or 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double RngStream::gumbel() { return -std::log(-std::log(uniform())); }

std::vector<double> draw_normal(RngStream &s, std::size_t n) {
  std::vector<double> out(n);
  for (auto &x : out)
    x = s.normal();
  return out;
}

std::vector<double> draw_uniform(RngStream &s, std::size_t n) {
  std::vector<double> out(n);
  for (auto &x : out)
    x = s.uniform();
  return out;
}

std::vector<double> draw_gumbel(RngStream &s, std::size_t n) {
  std::vector<double> out(n);
  for (auto &x : out)
    x = s.gumbel();
  return out;
}

namespace {

// Hörmann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS.
std::uint64_t poisson_ptrs(RngStream &s, double rate) {
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = s.uniform() - 0.5;
    const double v = s.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= vr)
      return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us))
      continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -rate + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

} // namespace

std::uint64_t draw_poisson(RngStream &s, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw Error(ErrorCode::InvalidRate, "Poisson rate must be finite and >= 0");
  if (rate == 0.0)
    return 0;
  if (rate >= 10.0)
    return poisson_ptrs(s, rate);
  const double u = s.uniform();
  double p = std::exp(-rate);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= rate / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf)
      break;
    cdf = next;
  }
  return k;
}

std::vector<double> categorical_cdf(std::span<const double> log_weights) {
  if (log_weights.empty())
    throw Error(ErrorCode::EmptyInput, "categorical over zero outcomes");
  double m = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (std::isnan(lw))
      throw Error(ErrorCode::DegenerateWeights, "NaN log-weight");
    m = std::max(m, lw);
  }
  if (!std::isfinite(m))
    throw Error(ErrorCode::DegenerateWeights, "all log-weights are -inf");
  std::vector<double> cdf(log_weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    acc += std::exp(log_weights[i] - m);
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t sample_cdf(RngStream &s, std::span<const double> cdf) {
  const double target = s.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.end())
    return cdf.size() - 1;
  return static_cast<std::size_t>(it - cdf.begin());
}

std::size_t draw_categorical(RngStream &s, std::span<const double> log_weights) {
  const auto cdf = categorical_cdf(log_weights);
  return sample_cdf(s, cdf);
}

} // namespace diffres
