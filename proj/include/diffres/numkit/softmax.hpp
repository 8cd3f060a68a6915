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

#ifndef DIFFRES_NUMKIT_SOFTMAX_HPP
#define DIFFRES_NUMKIT_SOFTMAX_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "diffres/numkit/kernels.hpp"
#include "diffres/numkit/matrix.hpp"

namespace diffres {

/**
 * Softmax rows over logits l_ij = beta * <q_i, k_j> + c_j: log-sum-exp per
 * row and, optionally, the softmax-weighted mean of the key rows.
 *
 * Values always come from the streaming kernel, so real and dual runs agree
 * bit for bit; in dual mode a second pass propagates tangents.
 */
template <class S>
void softmax_rows(const Matrix<S> &q, const Matrix<S> &k, const std::vector<S> &c, double beta,
                  std::vector<S> &lse, Matrix<S> *mean, KernelPrecision precision = KernelPrecision::f64) {
  const std::size_t nq = q.rows(), nk = k.rows(), d = q.cols();
  if (k.cols() != d || c.size() != nk)
    throw Error(ErrorCode::DimensionMismatch, "softmax_rows shapes differ");
  std::vector<double> qv(nq * d), kt(d * nk), cv(nk), lv(nq), mv(mean ? nq * d : 0);
  for (std::size_t i = 0; i < nq * d; ++i)
    qv[i] = value_of(q.data()[i]);
  for (std::size_t j = 0; j < nk; ++j) {
    cv[j] = value_of(c[j]);
    for (std::size_t a = 0; a < d; ++a)
      kt[a * nk + j] = value_of(k(j, a));
  }
  affine_softmax_rows(qv.data(), nq, d, kt.data(), cv.data(), nk, beta, lv.data(), mean ? mv.data() : nullptr,
                      precision);
  lse.assign(nq, S(0.0));
  if (mean)
    *mean = Matrix<S>(nq, d);
  for (std::size_t i = 0; i < nq; ++i) {
    lse[i] = S(lv[i]);
    if (mean)
      for (std::size_t a = 0; a < d; ++a)
        (*mean)(i, a) = S(mv[i * d + a]);
  }
  if constexpr (is_dual_v<S>) {
    constexpr std::size_t P = S::width;
    std::vector<double> qdt(nq * P * d), kdt(P * d * nk), cdt(P * nk), dlse(nq * P), dmean(mean ? nq * P * d : 0);
    for (std::size_t i = 0; i < nq; ++i)
      for (std::size_t p = 0; p < P; ++p)
        for (std::size_t a = 0; a < d; ++a)
          qdt[(i * P + p) * d + a] = q(i, a).tangent()[p];
    for (std::size_t j = 0; j < nk; ++j)
      for (std::size_t p = 0; p < P; ++p) {
        cdt[p * nk + j] = c[j].tangent()[p];
        for (std::size_t a = 0; a < d; ++a)
          kdt[(p * d + a) * nk + j] = k(j, a).tangent()[p];
      }
    affine_softmax_tangents(qv.data(), qdt.data(), nq, d, kt.data(), kdt.data(), cv.data(), cdt.data(), nk, P, beta,
                            lv.data(), mean ? mv.data() : nullptr, dlse.data(), mean ? dmean.data() : nullptr);
    for (std::size_t i = 0; i < nq; ++i)
      for (std::size_t p = 0; p < P; ++p) {
        lse[i].tangent()[p] = dlse[i * P + p];
        if (mean)
          for (std::size_t a = 0; a < d; ++a)
            (*mean)(i, a).tangent()[p] = dmean[(i * P + p) * d + a];
      }
  }
}

} // namespace diffres

#endif // DIFFRES_NUMKIT_SOFTMAX_HPP
