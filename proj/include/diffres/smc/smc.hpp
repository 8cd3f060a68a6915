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


#ifndef DIFFRES_SMC_SMC_HPP
#define DIFFRES_SMC_SMC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "diffres/numkit/ensemble.hpp"
#include "diffres/randkit/rng.hpp"
#include "diffres/resample/resampler.hpp"

namespace diffres {

/**
 * Feynman-Kac model over d-dimensional states with potentials at steps 0..J.
 * Step 0 draws from the initial law; step j >= 1 moves z_{j-1} to z_j.
 */
template <class S> class FeynmanKacModel {
public:
  virtual ~FeynmanKacModel() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t steps() const = 0;
  virtual std::vector<S> params() const = 0;

  virtual std::vector<S> init(RngStream &rng) const = 0;
  virtual std::vector<S> transition(std::span<const S> prev, std::size_t j, RngStream &rng) const = 0;
  /// log G_j; prev is empty at j = 0.
  virtual S log_potential(std::span<const S> z, std::span<const S> prev, std::size_t j) const = 0;
};

struct SmcConfig {
  std::size_t n_particles = 32;
  ResamplerSpec resampler = MultinomialSpec{};
  double ess_threshold = 1.0;

  void validate() const {
    if (n_particles < 1)
      throw Error(ErrorCode::InvalidConfig, "need at least one particle");
    if (!(ess_threshold >= 0.0 && ess_threshold <= 1.0))
      throw Error(ErrorCode::InvalidConfig, "ess_threshold must lie in [0, 1]");
  }
};

template <class S> struct SmcOutput {
  S log_lik{0.0};
  Matrix<S> filter_means;
  std::vector<Matrix<S>> filter_covs;
  WeightedEnsemble<S> final_ensemble;
  std::vector<double> ess_trace;
  std::size_t resample_count = 0;
  // aggregated over OT resampling calls
  std::size_t resample_iterations = 0;
  double max_marginal_error = std::numeric_limits<double>::quiet_NaN();
  bool all_converged = true;
};

namespace detail {

inline bool should_resample(double ess, std::size_t n, double threshold) {
  return threshold >= 1.0 || ess / double(n) < threshold;
}

template <class S> void record_step(SmcOutput<S> &out, const WeightedEnsemble<S> &e, std::size_t j) {
  auto [mu, cov] = weighted_mean_cov(e);
  for (std::size_t k = 0; k < mu.size(); ++k)
    out.filter_means(j, k) = mu[k];
  out.filter_covs[j] = std::move(cov);
  out.ess_trace[j] = value_of(ess(e));
}

template <class S> S accumulate_step(WeightedEnsemble<S> &e, std::size_t j) {
  S lj = logsumexp(e.log_weights);
  if (value_of(lj) == -std::numeric_limits<double>::infinity())
    throw Error(ErrorCode::AllParticlesDead, "all potentials are -inf at step " + std::to_string(j));
  for (auto &lw : e.log_weights)
    lw -= lj;
  return lj;
}

} // namespace detail

/**
 * Bootstrap-style SMC. The likelihood uses normalised incoming weights, so
 * log L_0 = LSE(log G_0) - log N and log L_j = LSE(log w_{j-1} + log G_j).
 * Draws: propagation from rng.split(j).split(0).split(i), resampling from rng.split(j).split(1).
 */
template <class S>
SmcOutput<S> run_smc(const FeynmanKacModel<S> &model, const SmcConfig &cfg, const RngStream &rng) {
  cfg.validate();
  const std::size_t n = cfg.n_particles, d = model.dim(), J = model.steps();
  SmcOutput<S> out;
  out.filter_means = Matrix<S>(J + 1, d);
  out.filter_covs.resize(J + 1);
  out.ess_trace.resize(J + 1);

  WeightedEnsemble<S> e(Matrix<S>(n, d), std::vector<S>(n));
  {
    RngStream prop = rng.split(0).split(0);
    for (std::size_t i = 0; i < n; ++i) {
      RngStream r = prop.split(i);
      auto z = model.init(r);
      std::copy(z.begin(), z.end(), e.particles.row(i).begin());
      e.log_weights[i] = model.log_potential(e.particles.row(i), {}, 0);
    }
    out.log_lik = detail::accumulate_step(e, 0) - std::log(double(n));
    detail::record_step(out, e, 0);
  }

  for (std::size_t j = 1; j <= J; ++j) {
    if (detail::should_resample(out.ess_trace[j - 1], n, cfg.ess_threshold)) {
      RngStream r = rng.split(j).split(1);
      ResampleInfo info;
      e = resample(e, cfg.resampler, r, &info);
      ++out.resample_count;
      out.resample_iterations += info.iterations;
      if (!std::isnan(info.marginal_error))
        out.max_marginal_error = std::isnan(out.max_marginal_error)
                                     ? info.marginal_error
                                     : std::max(out.max_marginal_error, info.marginal_error);
      out.all_converged = out.all_converged && info.converged;
    }
    RngStream prop = rng.split(j).split(0);
    Matrix<S> next(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      RngStream r = prop.split(i);
      auto z = model.transition(e.particles.row(i), j, r);
      std::copy(z.begin(), z.end(), next.row(i).begin());
      e.log_weights[i] += model.log_potential(next.row(i), e.particles.row(i), j);
    }
    e.particles = std::move(next);
    out.log_lik += detail::accumulate_step(e, j);
    detail::record_step(out, e, j);
  }
  out.final_ensemble = std::move(e);
  return out;
}

} // namespace diffres

#endif // DIFFRES_SMC_SMC_HPP
