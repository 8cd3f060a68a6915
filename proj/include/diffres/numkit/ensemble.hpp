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

#ifndef DIFFRES_NUMKIT_ENSEMBLE_HPP
#define DIFFRES_NUMKIT_ENSEMBLE_HPP

#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "diffres/numkit/matrix.hpp"

namespace diffres {

/// N particles in R^d (one per row) with log-weights.
template <class S> struct WeightedEnsemble {
  Matrix<S> particles;
  std::vector<S> log_weights;

  WeightedEnsemble() = default;
  WeightedEnsemble(Matrix<S> x, std::vector<S> lw) : particles(std::move(x)), log_weights(std::move(lw)) {
    if (particles.rows() != log_weights.size())
      throw Error(ErrorCode::DimensionMismatch, "one log-weight per particle required");
  }

  /// Uniform weights 1/N.
  static WeightedEnsemble uniform(Matrix<S> x) {
    const std::size_t n = x.rows();
    return WeightedEnsemble(std::move(x), std::vector<S>(n, S(-std::log(double(n)))));
  }

  std::size_t size() const { return particles.rows(); }
  std::size_t dim() const { return particles.cols(); }
};

/// Max-shifted log-sum-exp; -inf when every entry is -inf.
template <class S> S logsumexp(std::span<const S> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto &v : x)
    m = std::max(m, value_of(v));
  if (m == -std::numeric_limits<double>::infinity() || x.empty())
    return S(-std::numeric_limits<double>::infinity());
  if (m == std::numeric_limits<double>::infinity())
    return S(m);
  S acc(0.0);
  for (const auto &v : x)
    if (value_of(v) > -std::numeric_limits<double>::infinity())
      acc += exp(v - m);
  return log(acc) + m;
}

template <class S> S logsumexp(const std::vector<S> &x) { return logsumexp(std::span<const S>(x)); }

/// Weighted mean and covariance; weights are assumed normalised.
template <class S> std::pair<std::vector<S>, Matrix<S>> weighted_mean_cov(const WeightedEnsemble<S> &e) {
  const std::size_t n = e.size(), d = e.dim();
  std::vector<S> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = value_of(e.log_weights[i]) == -std::numeric_limits<double>::infinity() ? S(0.0) : exp(e.log_weights[i]);
  std::vector<S> mu(d, S(0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k)
      mu[k] += w[i] * e.particles(i, k);
  Matrix<S> cov(d, d);
  std::vector<S> c(d);
  for (std::size_t i = 0; i < n; ++i) {
    if (value_of(w[i]) == 0.0)
      continue;
    for (std::size_t k = 0; k < d; ++k)
      c[k] = e.particles(i, k) - mu[k];
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t s = r; s < d; ++s)
        cov(r, s) += w[i] * c[r] * c[s];
  }
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t s = 0; s < r; ++s)
      cov(r, s) = cov(s, r);
  return {std::move(mu), std::move(cov)};
}

} // namespace diffres

#endif // DIFFRES_NUMKIT_ENSEMBLE_HPP
