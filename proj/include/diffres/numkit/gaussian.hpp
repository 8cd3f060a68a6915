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

#ifndef DIFFRES_NUMKIT_GAUSSIAN_HPP
#define DIFFRES_NUMKIT_GAUSSIAN_HPP

#include <numbers>
#include <span>

#include "diffres/numkit/spd.hpp"

namespace diffres {

inline constexpr double kLog2Pi = 1.8378770664093454836;

template <class S>
S gaussian_logpdf(std::span<const S> x, std::span<const S> mean, const SpdFactor<S> &cov) {
  const std::size_t d = cov.dim();
  if (x.size() != d || mean.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "gaussian_logpdf dimensions differ");
  std::vector<S> r(d);
  for (std::size_t i = 0; i < d; ++i)
    r[i] = x[i] - mean[i];
  auto pr = spd_solve(cov, r);
  S quad = dot(std::span<const S>(r), std::span<const S>(pr));
  return -0.5 * (quad + cov.log_det() + double(d) * kLog2Pi);
}

template <class S>
S gaussian_logpdf(const std::vector<S> &x, const std::vector<S> &mean, const SpdFactor<S> &cov) {
  return gaussian_logpdf(std::span<const S>(x), std::span<const S>(mean), cov);
}

/// KL(N(m1, V1) || N(m2, V2)).
template <class S>
S gaussian_kl(const std::vector<S> &m1, const SpdFactor<S> &v1, const std::vector<S> &m2,
              const SpdFactor<S> &v2) {
  const std::size_t d = v1.dim();
  if (v2.dim() != d || m1.size() != d || m2.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "gaussian_kl dimensions differ");
  const auto &inv2 = v2.inverse();
  S tr(0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      tr += inv2(i, j) * v1.matrix()(j, i);
  std::vector<S> dm(d);
  for (std::size_t i = 0; i < d; ++i)
    dm[i] = m2[i] - m1[i];
  auto p = matvec(inv2, dm);
  S quad = dot(std::span<const S>(dm), std::span<const S>(p));
  return 0.5 * (tr + quad - double(d) + v2.log_det() - v1.log_det());
}

} // namespace diffres

#endif // DIFFRES_NUMKIT_GAUSSIAN_HPP
