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


#ifndef DIFFRES_MODELS_LOTKA_VOLTERRA_HPP
#define DIFFRES_MODELS_LOTKA_VOLTERRA_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "diffres/numkit/matrix.hpp"
#include "diffres/randkit/rng.hpp"
#include "diffres/smc/smc.hpp"

namespace diffres {

/// dC = C(alpha - beta R) dt + sigma C dW1, dR = R(zeta C - gamma) dt + sigma R dW2.
template <class S> struct LvParams {
  S alpha{6.0};
  S beta{2.0};
  S zeta{4.0};
  S gamma{6.0};
  S sigma{0.15};
  double dt = 3.0 / 256.0;
  std::size_t steps = 256;
  double c0 = 1.0;
  double r0 = 1.0;

  void validate() const {
    for (const S *v : {&alpha, &beta, &zeta, &gamma, &sigma})
      if (value_of(*v) < 0.0)
        throw Error(ErrorCode::NonPositive, "Lotka-Volterra rates must be nonnegative");
    if (!(dt > 0.0) || steps == 0 || !(c0 > 0.0) || !(r0 > 0.0))
      throw Error(ErrorCode::InvalidConfig, "bad Lotka-Volterra grid or initial state");
  }
};

inline constexpr double kLvFloor = 1e-8;
inline constexpr double kLvCeiling = 1e8;

template <class S> std::array<S, 2> lv_rate(const S &c, const S &r) {
  return {5.0 / (1.0 + exp(-5.0 * c + 4.0)), 5.0 / (1.0 + exp(-c * r + 4.0))};
}

template <class S> S poisson_logpmf(double y, const S &rate) {
  return y * log(rate) - rate - std::lgamma(y + 1.0);
}

/// One Milstein step with Brownian increments dw1, dw2; throws Blowup above the ceiling.
template <class S>
std::array<S, 2> lv_milstein_step(const LvParams<S> &p, const S &c, const S &r, double dw1, double dw2,
                                  double dt, std::size_t step = 0) {
  const S half_s2 = 0.5 * p.sigma * p.sigma;
  S cn = c + c * (p.alpha - p.beta * r) * dt + p.sigma * c * dw1 + half_s2 * c * (dw1 * dw1 - dt);
  S rn = r + r * (p.zeta * c - p.gamma) * dt + p.sigma * r * dw2 + half_s2 * r * (dw2 * dw2 - dt);
  for (S *v : {&cn, &rn}) {
    if (!(value_of(*v) <= kLvCeiling))
      throw Error(ErrorCode::Blowup, "Lotka-Volterra state exceeded 1e8 at step " + std::to_string(step));
    if (value_of(*v) < kLvFloor)
      *v = S(kLvFloor);
  }
  return {cn, rn};
}

struct LvData {
  Matrix<double> states; // (steps+1) x 2
  Matrix<double> obs;    // Poisson counts, (steps+1) x 2
};

LvData lv_simulate_milstein(const LvParams<double> &p, RngStream &rng);

/// Bootstrap wiring: one Milstein step per observation, Poisson potentials.
template <class S> class LvModel final : public FeynmanKacModel<S> {
public:
  LvModel(LvParams<S> p, Matrix<double> obs) : p_(std::move(p)), obs_(std::move(obs)) {
    p_.validate();
    if (obs_.cols() != 2 || obs_.rows() < 2)
      throw Error(ErrorCode::DimensionMismatch, "Lotka-Volterra observations must be (J+1) x 2");
  }

  std::size_t dim() const override { return 2; }
  std::size_t steps() const override { return obs_.rows() - 1; }
  std::vector<S> params() const override { return {p_.alpha, p_.beta, p_.zeta, p_.gamma, p_.sigma}; }

  std::vector<S> init(RngStream &) const override { return {S(p_.c0), S(p_.r0)}; }

  std::vector<S> transition(std::span<const S> prev, std::size_t j, RngStream &rng) const override {
    const double sq = std::sqrt(p_.dt);
    const double dw1 = sq * rng.normal();
    const double dw2 = sq * rng.normal();
    auto z = lv_milstein_step(p_, prev[0], prev[1], dw1, dw2, p_.dt, j);
    return {z[0], z[1]};
  }

  S log_potential(std::span<const S> z, std::span<const S>, std::size_t j) const override {
    auto lam = lv_rate(z[0], z[1]);
    return poisson_logpmf(obs_(j, 0), lam[0]) + poisson_logpmf(obs_(j, 1), lam[1]);
  }

private:
  LvParams<S> p_;
  Matrix<double> obs_;
};

} // namespace diffres

#endif // DIFFRES_MODELS_LOTKA_VOLTERRA_HPP
