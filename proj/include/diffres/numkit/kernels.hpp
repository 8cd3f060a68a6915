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

#ifndef DIFFRES_NUMKIT_KERNELS_HPP
#define DIFFRES_NUMKIT_KERNELS_HPP

#include <bit>
#include <cstddef>
#include <cstdint>

namespace diffres {

/// exp(x) to about 1e-15 relative on [-700, 700]; inputs below -700 clamp there.
inline double fast_exp(double x) {
  constexpr double kLog2e = 1.4426950408889634074;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  constexpr double kShift = 6755399441055744.0; // 1.5 * 2^52
  x = x < -700.0 ? -700.0 : (x > 700.0 ? 700.0 : x);
  double k = x * kLog2e + kShift;
  std::int64_t ni = std::bit_cast<std::int64_t>(k) - std::bit_cast<std::int64_t>(kShift);
  double n = static_cast<double>(ni);
  double r = (x - n * kLn2Hi) - n * kLn2Lo;
  double p = 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  return std::bit_cast<double>(std::bit_cast<std::int64_t>(p) + (ni << 52));
}

enum class KernelPrecision { f64, f32 };

/**
 * Row-wise softmax over affine logits l_ij = beta * <q_i, k_j> + c_j.
 *
 * q is nq x d row-major; keys are stored transposed (kt is d x nk, row
 * stride nk). For each query writes the log-sum-exp of its logits and, when
 * `mean` is non-null, the softmax-weighted average of the key rows (nq x d).
 * Entries of c may be -inf. Streams over keys, so memory stays O((nq + nk) d).
 *
 * With f32 the logits and exponentials run in single precision (block sums
 * are still accumulated in double); relative error is then about 1e-6.
 */
void affine_softmax_rows(const double *q, std::size_t nq, std::size_t d, const double *kt, const double *c,
                         std::size_t nk, double beta, double *lse, double *mean,
                         KernelPrecision precision = KernelPrecision::f64);

/**
 * Tangents of affine_softmax_rows for P directions, given its f64 outputs.
 * Tangent layouts: qdt is nq x P x d, kdt is P x d x nk, cdt is P x nk.
 * Writes dlse (nq x P) and, when mean is non-null, dmean (nq x P x d).
 */
void affine_softmax_tangents(const double *q, const double *qdt, std::size_t nq, std::size_t d, const double *kt,
                             const double *kdt, const double *c, const double *cdt, std::size_t nk, std::size_t P,
                             double beta, const double *lse, const double *mean, double *dlse, double *dmean);

} // namespace diffres

#endif // DIFFRES_NUMKIT_KERNELS_HPP
