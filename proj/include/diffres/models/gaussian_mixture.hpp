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


#ifndef DIFFRES_MODELS_GAUSSIAN_MIXTURE_HPP
#define DIFFRES_MODELS_GAUSSIAN_MIXTURE_HPP

#include <vector>

#include "diffres/numkit/matrix.hpp"
#include "diffres/numkit/spd.hpp"
#include "diffres/randkit/rng.hpp"

namespace diffres {

struct GaussianMixture {
  std::vector<double> weights;
  Matrix<double> means; // c x d
  std::vector<SpdFactor<double>> covs;

  std::size_t components() const { return weights.size(); }
  std::size_t dim() const { return means.cols(); }
};

/// Linear-Gaussian observation y = H x + N(0, xi) of a mixture prior.
struct GmObservation {
  std::vector<double> h;
  double xi = 1.0;
  double y = 0.0;
};

GaussianMixture gm_posterior(const GaussianMixture &prior, const GmObservation &obs);

double gm_logpdf(const GaussianMixture &m, std::span<const double> x);
Matrix<double> gm_sample(const GaussianMixture &m, std::size_t n, RngStream &rng);
std::pair<std::vector<double>, Matrix<double>> gm_moments(const GaussianMixture &m);

struct GmFixture {
  GaussianMixture prior;
  GmObservation obs;
  GaussianMixture posterior;
};

/**
 * Random problem: means uniform on [-5, 5]^d, covariances Wishart(I_d, d) + I_d,
 * equal weights, H all ones, xi = 1; y is drawn from the prior predictive.
 */
GmFixture gm_fixture(std::size_t d, std::size_t c, RngStream &rng);

} // namespace diffres

#endif // DIFFRES_MODELS_GAUSSIAN_MIXTURE_HPP
