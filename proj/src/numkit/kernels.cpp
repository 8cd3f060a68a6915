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

#include "diffres/numkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

namespace diffres {

namespace {

template <class T> struct Simd;

template <> struct Simd<double> {
  typedef double V __attribute__((vector_size(32)));
  typedef std::int64_t I __attribute__((vector_size(32)));
  static constexpr std::size_t lanes = 4;

  static V exp(V x) {
    const V lo = V{} - 700.0, hi = V{} + 700.0;
    x = x < lo ? lo : x;
    x = x > hi ? hi : x;
    const V shift = V{} + 6755399441055744.0;
    V k = x * 1.4426950408889634074 + shift;
    I ni = (I)k - (I)shift;
    V n = __builtin_convertvector(ni, V);
    V r = (x - n * 6.93147180369123816490e-01) - n * 1.90821492927058770002e-10;
    V p = V{} + 1.0 / 39916800.0;
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
    return (V)((I)p + (ni << 52));
  }
};

template <> struct Simd<float> {
  typedef float V __attribute__((vector_size(32)));
  typedef std::int32_t I __attribute__((vector_size(32)));
  static constexpr std::size_t lanes = 8;

  static V exp(V x) {
    const V lo = V{} - 87.0f, hi = V{} + 87.0f;
    x = x < lo ? lo : x;
    x = x > hi ? hi : x;
    const V shift = V{} + 12582912.0f; // 1.5 * 2^23
    V k = x * 1.44269504f + shift;
    I ni = (I)k - (I)shift;
    V n = __builtin_convertvector(ni, V);
    V r = (x - n * 0.693145752f) - n * 1.42860677e-06f;
    V p = V{} + 1.0f / 5040.0f;
    p = p * r + 1.0f / 720.0f;
    p = p * r + 1.0f / 120.0f;
    p = p * r + 1.0f / 24.0f;
    p = p * r + 1.0f / 6.0f;
    p = p * r + 0.5f;
    p = p * r + 1.0f;
    p = p * r + 1.0f;
    return (V)((I)p + (ni << 23));
  }
};

constexpr std::size_t kTile = 8;
constexpr std::size_t kBlock = 512;

template <class T> T hsum(typename Simd<T>::V v) {
  T s = 0;
  for (std::size_t l = 0; l < Simd<T>::lanes; ++l)
    s += v[l];
  return s;
}

template <class T> T hmax(typename Simd<T>::V v) {
  T m = v[0];
  for (std::size_t l = 1; l < Simd<T>::lanes; ++l)
    m = v[l] > m ? v[l] : m;
  return m;
}

/// Keys and offsets converted to T and padded to a whole number of vectors.
template <class T> struct PackedKeys {
  std::size_t nk = 0, stride = 0, d = 0;
  std::vector<T> kt, c;
};

template <class T> PackedKeys<T> pack(const double *kt, const double *c, std::size_t d, std::size_t nk) {
  constexpr std::size_t L = Simd<T>::lanes;
  PackedKeys<T> p;
  p.nk = nk;
  p.d = d;
  p.stride = (nk + L - 1) / L * L;
  p.kt.assign(d * p.stride, T(0));
  p.c.assign(p.stride, -std::numeric_limits<T>::infinity());
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < nk; ++j)
      p.kt[k * p.stride + j] = T(kt[k * nk + j]);
  for (std::size_t j = 0; j < nk; ++j)
    p.c[j] = T(c[j]);
  return p;
}

template <class T, std::size_t TQ>
void tile(const double *q, std::size_t d, const PackedKeys<T> &keys, double beta, double *lse, double *mean) {
  using V = typename Simd<T>::V;
  constexpr std::size_t L = Simd<T>::lanes;
  constexpr T kNegInf = -std::numeric_limits<T>::infinity();
  alignas(64) static thread_local T buf[TQ][kBlock];

  std::vector<T> qb(TQ * d);
  for (std::size_t t = 0; t < TQ; ++t)
    for (std::size_t k = 0; k < d; ++k)
      qb[k * TQ + t] = T(beta * q[t * d + k]);

  double run_max[TQ], run_sum[TQ];
  std::vector<double> acc(TQ * d, 0.0);
  for (std::size_t t = 0; t < TQ; ++t) {
    run_max[t] = -std::numeric_limits<double>::infinity();
    run_sum[t] = 0.0;
  }

  for (std::size_t j0 = 0; j0 < keys.stride; j0 += kBlock) {
    const std::size_t nb = std::min(kBlock, keys.stride - j0);
    V vmax[TQ];
    for (std::size_t t = 0; t < TQ; ++t)
      vmax[t] = V{} + kNegInf;
    for (std::size_t j = 0; j < nb; j += L) {
      V cv;
      std::memcpy(&cv, &keys.c[j0 + j], sizeof(V));
      V a[TQ];
      for (std::size_t t = 0; t < TQ; ++t)
        a[t] = cv;
      for (std::size_t k = 0; k < d; ++k) {
        V kv;
        std::memcpy(&kv, &keys.kt[k * keys.stride + j0 + j], sizeof(V));
        const T *qk = &qb[k * TQ];
        for (std::size_t t = 0; t < TQ; ++t)
          a[t] += qk[t] * kv;
      }
      for (std::size_t t = 0; t < TQ; ++t) {
        std::memcpy(&buf[t][j], &a[t], sizeof(V));
        vmax[t] = a[t] > vmax[t] ? a[t] : vmax[t];
      }
    }
    bool live[TQ];
    for (std::size_t t = 0; t < TQ; ++t) {
      double bmax = double(hmax<T>(vmax[t]));
      live[t] = bmax != -std::numeric_limits<double>::infinity();
      if (!live[t])
        continue;
      if (bmax > run_max[t]) {
        double rescale = std::isinf(run_max[t]) ? 0.0 : std::exp(run_max[t] - bmax);
        run_sum[t] *= rescale;
        for (std::size_t k = 0; k < d; ++k)
          acc[t * d + k] *= rescale;
        run_max[t] = bmax;
      }
      const T m = T(run_max[t]);
      V s = V{};
      for (std::size_t j = 0; j < nb; j += L) {
        V x;
        std::memcpy(&x, &buf[t][j], sizeof(V));
        V e = Simd<T>::exp(x - m);
        x = x == kNegInf ? V{} : e;
        std::memcpy(&buf[t][j], &x, sizeof(V));
        s += x;
      }
      run_sum[t] += double(hsum<T>(s));
    }
    if (!mean)
      continue;
    for (std::size_t k = 0; k < d; ++k) {
      V a[TQ];
      for (std::size_t t = 0; t < TQ; ++t)
        a[t] = V{};
      const T *kr = &keys.kt[k * keys.stride + j0];
      for (std::size_t j = 0; j < nb; j += L) {
        V kv;
        std::memcpy(&kv, kr + j, sizeof(V));
        for (std::size_t t = 0; t < TQ; ++t) {
          V p;
          std::memcpy(&p, &buf[t][j], sizeof(V));
          a[t] += p * kv;
        }
      }
      for (std::size_t t = 0; t < TQ; ++t)
        if (live[t])
          acc[t * d + k] += double(hsum<T>(a[t]));
    }
  }
  for (std::size_t t = 0; t < TQ; ++t) {
    lse[t] = std::isinf(run_max[t]) ? run_max[t] : run_max[t] + std::log(run_sum[t]);
    if (mean)
      for (std::size_t k = 0; k < d; ++k)
        mean[t * d + k] = acc[t * d + k] / run_sum[t];
  }
}

template <class T>
void run(const double *q, std::size_t nq, std::size_t d, const double *kt, const double *c, std::size_t nk,
         double beta, double *lse, double *mean) {
  auto keys = pack<T>(kt, c, d, nk);
  std::size_t i = 0;
  for (; i + kTile <= nq; i += kTile)
    tile<T, kTile>(q + i * d, d, keys, beta, lse + i, mean ? mean + i * d : nullptr);
  for (; i < nq; ++i)
    tile<T, 1>(q + i * d, d, keys, beta, lse + i, mean ? mean + i * d : nullptr);
}

} // namespace

void affine_softmax_rows(const double *q, std::size_t nq, std::size_t d, const double *kt, const double *c,
                         std::size_t nk, double beta, double *lse, double *mean, KernelPrecision precision) {
  if (precision == KernelPrecision::f32)
    run<float>(q, nq, d, kt, c, nk, beta, lse, mean);
  else
    run<double>(q, nq, d, kt, c, nk, beta, lse, mean);
}

void affine_softmax_tangents(const double *q, const double *qdt, std::size_t nq, std::size_t d, const double *kt,
                             const double *kdt, const double *c, const double *cdt, std::size_t nk, std::size_t P,
                             double beta, const double *lse, const double *mean, double *dlse, double *dmean) {
  std::vector<double> pi(nk), dl(nk);
  for (std::size_t i = 0; i < nq; ++i) {
    const double *qi = q + i * d;
    if (!std::isfinite(lse[i])) {
      std::fill(dlse + i * P, dlse + (i + 1) * P, 0.0);
      if (mean)
        std::fill(dmean + i * P * d, dmean + (i + 1) * P * d, 0.0);
      continue;
    }
    for (std::size_t j = 0; j < nk; ++j)
      pi[j] = c[j] - lse[i];
    for (std::size_t a = 0; a < d; ++a) {
      const double s = beta * qi[a];
      const double *row = kt + a * nk;
#pragma omp simd
      for (std::size_t j = 0; j < nk; ++j)
        pi[j] += s * row[j];
    }
#pragma omp simd
    for (std::size_t j = 0; j < nk; ++j)
      pi[j] = c[j] == -std::numeric_limits<double>::infinity() ? 0.0 : fast_exp(pi[j]);
    for (std::size_t p = 0; p < P; ++p) {
      const double *qd = qdt + (i * P + p) * d;
      std::copy(cdt + p * nk, cdt + (p + 1) * nk, dl.begin());
      for (std::size_t a = 0; a < d; ++a) {
        const double s = beta * qi[a], sd = beta * qd[a];
        const double *row = kt + a * nk, *drow = kdt + (p * d + a) * nk;
#pragma omp simd
        for (std::size_t j = 0; j < nk; ++j)
          dl[j] += s * drow[j] + sd * row[j];
      }
      // masked keys may carry non-finite tangents
#pragma omp simd
      for (std::size_t j = 0; j < nk; ++j)
        dl[j] = pi[j] == 0.0 ? 0.0 : dl[j];
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t j = 0; j < nk; ++j)
        acc += pi[j] * dl[j];
      dlse[i * P + p] = acc;
      if (!mean)
        continue;
      for (std::size_t a = 0; a < d; ++a) {
        const double *row = kt + a * nk, *drow = kdt + (p * d + a) * nk;
        double m = 0.0;
#pragma omp simd reduction(+ : m)
        for (std::size_t j = 0; j < nk; ++j)
          m += pi[j] * (drow[j] + dl[j] * row[j]);
        dmean[(i * P + p) * d + a] = m - acc * mean[i * d + a];
      }
    }
  }
}

} // namespace diffres
