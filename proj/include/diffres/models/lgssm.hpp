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


#ifndef DIFFRES_MODELS_LGSSM_HPP
#define DIFFRES_MODELS_LGSSM_HPP

#include <cmath>
#include <vector>

#include "diffres/numkit/gaussian.hpp"
#include "diffres/numkit/matrix.hpp"
#include "diffres/randkit/rng.hpp"
#include "diffres/smc/smc.hpp"

namespace diffres {

/// Z_0 ~ N(0, I), Z_j = theta1 Z_{j-1} + N(0, q I), Y_j = theta2 Z_j + N(0, r I) for j = 0..J.
template <class S> struct LgssmParams {
  S theta1{0.5};
  S theta2{1.0};
  std::size_t dim = 2;
  double q = 1.0;
  double r = 0.5;

  void validate() const {
    if (!(q > 0.0 && r > 0.0))
      throw Error(ErrorCode::NonPositive, "noise scales must be positive");
    if (dim == 0)
      throw Error(ErrorCode::InvalidConfig, "state dimension must be positive");
  }
};

struct LgssmData {
  Matrix<double> states; // (J+1) x d
  Matrix<double> obs;    // (J+1) x d
};

LgssmData lgssm_simulate(const LgssmParams<double> &p, std::size_t J, RngStream &rng);

template <class S> struct KalmanResult {
  Matrix<S> means;
  // covariances are P_j I; the model keeps them isotropic
  std::vector<S> variances;
  S log_lik{0.0};
};

template <class S> KalmanResult<S> kalman_filter(const LgssmParams<S> &p, const Matrix<double> &obs) {
  p.validate();
  const std::size_t n = obs.rows(), d = p.dim;
  if (obs.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "observation width differs from the state dimension");
  KalmanResult<S> res;
  res.means = Matrix<S>(n, d);
  res.variances.resize(n);
  std::vector<S> m(d, S(0.0));
  S var(1.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) {
      for (auto &v : m)
        v = p.theta1 * v;
      var = p.theta1 * p.theta1 * var + p.q;
    }
    const S innov_var = p.theta2 * p.theta2 * var + p.r;
    const S gain = var * p.theta2 / innov_var;
    for (std::size_t k = 0; k < d; ++k) {
      const S innov = obs(j, k) - p.theta2 * m[k];
      res.log_lik += -0.5 * (kLog2Pi + log(innov_var) + innov * innov / innov_var);
      m[k] += gain * innov;
      res.means(j, k) = m[k];
    }
    var = p.r * var / innov_var;
    res.variances[j] = var;
  }
  return res;
}

/// Bootstrap Feynman-Kac wiring of the LGSSM against a fixed observation record.
template <class S> class LgssmModel final : public FeynmanKacModel<S> {
public:
  LgssmModel(LgssmParams<S> p, Matrix<double> obs) : p_(std::move(p)), obs_(std::move(obs)) { p_.validate(); }

  std::size_t dim() const override { return p_.dim; }
  std::size_t steps() const override { return obs_.rows() - 1; }
  std::vector<S> params() const override { return {p_.theta1, p_.theta2}; }

  std::vector<S> init(RngStream &rng) const override {
    std::vector<S> z(p_.dim);
    for (auto &v : z)
      v = S(rng.normal());
    return z;
  }

  std::vector<S> transition(std::span<const S> prev, std::size_t, RngStream &rng) const override {
    const double sq = std::sqrt(p_.q);
    std::vector<S> z(p_.dim);
    for (std::size_t k = 0; k < p_.dim; ++k)
      z[k] = p_.theta1 * prev[k] + sq * rng.normal();
    return z;
  }

  S log_potential(std::span<const S> z, std::span<const S>, std::size_t j) const override {
    S acc(0.0);
    for (std::size_t k = 0; k < p_.dim; ++k) {
      const S e = obs_(j, k) - p_.theta2 * z[k];
      acc += -0.5 * (e * e / p_.r);
    }
    return acc - 0.5 * double(p_.dim) * (kLog2Pi + std::log(p_.r));
  }

private:
  LgssmParams<S> p_;
  Matrix<double> obs_;
};

} // namespace diffres

#endif // DIFFRES_MODELS_LGSSM_HPP
