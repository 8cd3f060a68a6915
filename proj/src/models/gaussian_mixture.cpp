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


#include "diffres/models/gaussian_mixture.hpp"

#include <cmath>

#include "diffres/numkit/ensemble.hpp"
#include "diffres/numkit/gaussian.hpp"

namespace diffres {

GaussianMixture gm_posterior(const GaussianMixture &prior, const GmObservation &obs) {
  const std::size_t c = prior.components(), d = prior.dim();
  if (obs.h.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "observation row has the wrong length");
  if (!(obs.xi > 0.0))
    throw Error(ErrorCode::NonPositive, "observation variance must be positive");
  GaussianMixture post;
  post.means = Matrix<double>(c, d);
  std::vector<double> logw(c);
  for (std::size_t i = 0; i < c; ++i) {
    const Matrix<double> &v = prior.covs[i].matrix();
    auto vh = matvec(v, obs.h);
    const double g = dot(std::span<const double>(obs.h), std::span<const double>(vh)) + obs.xi;
    const double pred = dot(std::span<const double>(obs.h), prior.means.row(i));
    logw[i] = std::log(prior.weights[i]) - 0.5 * (kLog2Pi + std::log(g) + (obs.y - pred) * (obs.y - pred) / g);
    Matrix<double> vpost(d, d);
    for (std::size_t k = 0; k < d; ++k) {
      post.means(i, k) = prior.means(i, k) + vh[k] * (obs.y - pred) / g;
      for (std::size_t l = 0; l < d; ++l)
        vpost(k, l) = v(k, l) - vh[k] * vh[l] / g;
    }
    // symmetrise against rounding before factoring
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t l = 0; l < k; ++l)
        vpost(k, l) = vpost(l, k) = 0.5 * (vpost(k, l) + vpost(l, k));
    post.covs.push_back(spd_eigh(vpost, 0.0));
  }
  const double lse = logsumexp(logw);
  if (!std::isfinite(lse))
    throw Error(ErrorCode::DegeneratePosterior, "all posterior component weights vanish");
  for (double &lw : logw)
    post.weights.push_back(std::exp(lw - lse));
  return post;
}

double gm_logpdf(const GaussianMixture &m, std::span<const double> x) {
  std::vector<double> terms(m.components());
  for (std::size_t i = 0; i < m.components(); ++i)
    terms[i] = std::log(m.weights[i]) + gaussian_logpdf(x, m.means.row(i), m.covs[i]);
  return logsumexp(terms);
}

Matrix<double> gm_sample(const GaussianMixture &m, std::size_t n, RngStream &rng) {
  const std::size_t d = m.dim();
  std::vector<double> lw(m.components());
  for (std::size_t i = 0; i < lw.size(); ++i)
    lw[i] = std::log(m.weights[i]);
  auto cdf = categorical_cdf(lw);
  std::vector<Matrix<double>> roots;
  for (const auto &f : m.covs)
    roots.push_back(f.mapped([](double v) { return std::sqrt(v); }).matrix());
  Matrix<double> out(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = sample_cdf(rng, cdf);
    auto z = draw_normal(rng, d);
    auto x = matvec(roots[c], z);
    for (std::size_t k = 0; k < d; ++k)
      out(r, k) = m.means(c, k) + x[k];
  }
  return out;
}

std::pair<std::vector<double>, Matrix<double>> gm_moments(const GaussianMixture &m) {
  const std::size_t d = m.dim();
  std::vector<double> mu(d, 0.0);
  for (std::size_t i = 0; i < m.components(); ++i)
    for (std::size_t k = 0; k < d; ++k)
      mu[k] += m.weights[i] * m.means(i, k);
  Matrix<double> cov(d, d);
  for (std::size_t i = 0; i < m.components(); ++i) {
    const Matrix<double> &v = m.covs[i].matrix();
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t l = 0; l < d; ++l)
        cov(k, l) += m.weights[i] * (v(k, l) + (m.means(i, k) - mu[k]) * (m.means(i, l) - mu[l]));
  }
  return {mu, cov};
}

GmFixture gm_fixture(std::size_t d, std::size_t c, RngStream &rng) {
  GmFixture fx;
  fx.prior.weights.assign(c, 1.0 / double(c));
  fx.prior.means = Matrix<double>(c, d);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t k = 0; k < d; ++k)
      fx.prior.means(i, k) = -5.0 + 10.0 * rng.uniform();
    Matrix<double> v = Matrix<double>::identity(d);
    for (std::size_t s = 0; s < d; ++s) {
      auto g = draw_normal(rng, d);
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l)
          v(k, l) += g[k] * g[l];
    }
    fx.prior.covs.push_back(spd_eigh(v, 0.0));
  }
  fx.obs.h.assign(d, 1.0);
  fx.obs.xi = 1.0;
  auto x = gm_sample(fx.prior, 1, rng);
  double hx = 0.0;
  for (std::size_t k = 0; k < d; ++k)
    hx += x(0, k);
  fx.obs.y = hx + std::sqrt(fx.obs.xi) * rng.normal();
  fx.posterior = gm_posterior(fx.prior, fx.obs);
  return fx;
}

} // namespace diffres
