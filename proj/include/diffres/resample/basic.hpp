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

#ifndef DIFFRES_RESAMPLE_BASIC_HPP
#define DIFFRES_RESAMPLE_BASIC_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "diffres/numkit/ensemble.hpp"
#include "diffres/randkit/rng.hpp"

namespace diffres {

/// Shift log-weights so they log-sum-exp to zero.
template <class S> WeightedEnsemble<S> normalise(WeightedEnsemble<S> e) {
  if (e.size() == 0)
    throw Error(ErrorCode::EmptyInput, "empty ensemble");
  S lse = logsumexp(e.log_weights);
  if (!std::isfinite(value_of(lse)))
    throw Error(ErrorCode::DegenerateWeights, "no finite log-weight");
  for (auto &lw : e.log_weights)
    lw -= lse;
  return e;
}

/// Effective sample size 1 / sum w_i^2 of a normalised ensemble.
template <class S> S ess(const WeightedEnsemble<S> &e) {
  S acc(0.0);
  for (const auto &lw : e.log_weights)
    if (value_of(lw) > -std::numeric_limits<double>::infinity())
      acc += exp(2.0 * lw);
  return 1.0 / acc;
}

template <class S> std::vector<double> weight_values(const WeightedEnsemble<S> &e) {
  std::vector<double> lw(e.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    lw[i] = value_of(e.log_weights[i]);
  return lw;
}

template <class S> Matrix<S> gather_rows(const Matrix<S> &x, const std::vector<std::size_t> &idx) {
  Matrix<S> out(idx.size(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k)
      out(i, k) = x(idx[i], k);
  return out;
}

/**
 * Multinomial resampling. In dual mode the selected particles keep their own
 * tangents while the index choice contributes none.
 */
template <class S> WeightedEnsemble<S> multinomial_resample(const WeightedEnsemble<S> &e, RngStream &rng) {
  auto cdf = categorical_cdf(weight_values(e));
  std::vector<std::size_t> idx(e.size());
  for (auto &i : idx)
    i = sample_cdf(rng, cdf);
  return WeightedEnsemble<S>::uniform(gather_rows(e.particles, idx));
}

/// Indices drawn from alpha * w + (1 - alpha) / N, importance-corrected weights.
template <class S> WeightedEnsemble<S> soft_resample(const WeightedEnsemble<S> &e, double alpha, RngStream &rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "soft resampling alpha must lie in [0, 1]");
  const std::size_t n = e.size();
  std::vector<S> log_q(n);
  std::vector<double> log_qv(n);
  for (std::size_t i = 0; i < n; ++i) {
    S w = value_of(e.log_weights[i]) == -std::numeric_limits<double>::infinity() ? S(0.0) : exp(e.log_weights[i]);
    S qi = alpha * w + (1.0 - alpha) / double(n);
    log_q[i] = value_of(qi) > 0.0 ? log(qi) : S(-std::numeric_limits<double>::infinity());
    log_qv[i] = value_of(log_q[i]);
  }
  auto cdf = categorical_cdf(log_qv);
  std::vector<std::size_t> idx(n);
  for (auto &i : idx)
    i = sample_cdf(rng, cdf);
  std::vector<S> lw(n);
  for (std::size_t i = 0; i < n; ++i)
    lw[i] = e.log_weights[idx[i]] - log_q[idx[i]];
  return normalise(WeightedEnsemble<S>(gather_rows(e.particles, idx), std::move(lw)));
}

/// Row-stochastic Gumbel-softmax mixing matrix S_ij = softmax_j((log w_j + g_ij) / tau).
template <class S> Matrix<S> gumbel_softmax_matrix(const WeightedEnsemble<S> &e, double tau, RngStream &rng) {
  if (!(tau > 0.0))
    throw Error(ErrorCode::InvalidConfig, "Gumbel-softmax temperature must be positive");
  const std::size_t n = e.size();
  Matrix<S> s(n, n);
  std::vector<S> logit(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto g = draw_gumbel(rng, n);
    for (std::size_t j = 0; j < n; ++j)
      logit[j] = (e.log_weights[j] + g[j]) / tau;
    S lse = logsumexp(logit);
    for (std::size_t j = 0; j < n; ++j)
      s(i, j) = value_of(logit[j]) == -std::numeric_limits<double>::infinity() ? S(0.0) : exp(logit[j] - lse);
  }
  return s;
}

template <class S> WeightedEnsemble<S> gumbel_softmax_resample(const WeightedEnsemble<S> &e, double tau, RngStream &rng) {
  auto s = gumbel_softmax_matrix(e, tau, rng);
  return WeightedEnsemble<S>::uniform(matmul(s, e.particles));
}

} // namespace diffres

#endif // DIFFRES_RESAMPLE_BASIC_HPP
