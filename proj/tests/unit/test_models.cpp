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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "diffres/models/gaussian_mixture.hpp"
#include "diffres/models/lgssm.hpp"
#include "diffres/models/lotka_volterra.hpp"

using diffres::Dual;
using diffres::Matrix;
using diffres::RngStream;

namespace {

double normal_logpdf(double x, double m, double v) { return -0.5 * (std::log(2 * M_PI * v) + (x - m) * (x - m) / v); }

diffres::GaussianMixture two_component_2d() {
  diffres::GaussianMixture m;
  m.weights = {0.4, 0.6};
  m.means = Matrix<double>{{-1.0, 0.5}, {1.5, -0.5}};
  m.covs.push_back(diffres::spd_eigh(Matrix<double>{{0.8, 0.2}, {0.2, 0.5}}, 0.0));
  m.covs.push_back(diffres::spd_eigh(Matrix<double>{{0.4, -0.1}, {-0.1, 0.9}}, 0.0));
  return m;
}

} // namespace

TEST(GmPosterior, SingleComponentIsConjugateUpdate) {
  diffres::GaussianMixture prior;
  prior.weights = {1.0};
  prior.means = Matrix<double>{{0.3, -0.2}};
  Matrix<double> v{{1.2, 0.3}, {0.3, 0.7}};
  prior.covs.push_back(diffres::spd_eigh(v, 0.0));
  diffres::GmObservation obs{{1.0, 2.0}, 0.5, 1.1};
  auto post = diffres::gm_posterior(prior, obs);
  // information form
  Matrix<double> vinv = diffres::spd_eigh(v, 0.0).inverse();
  Matrix<double> prec = vinv;
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t l = 0; l < 2; ++l)
      prec(k, l) += obs.h[k] * obs.h[l] / obs.xi;
  Matrix<double> pcov = diffres::spd_eigh(prec, 0.0).inverse();
  auto rhs = diffres::matvec(vinv, std::vector<double>{0.3, -0.2});
  for (std::size_t k = 0; k < 2; ++k)
    rhs[k] += obs.h[k] * obs.y / obs.xi;
  auto mean = diffres::matvec(pcov, rhs);
  EXPECT_NEAR(post.weights[0], 1.0, 1e-15);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(post.means(0, k), mean[k], 1e-12);
    for (std::size_t l = 0; l < 2; ++l)
      EXPECT_NEAR(post.covs[0].matrix()(k, l), pcov(k, l), 1e-12);
  }
}

TEST(GmPosterior, MatchesKalmanSingleStep) {
  diffres::GaussianMixture prior;
  prior.weights = {1.0};
  prior.means = Matrix<double>{{0.0}};
  prior.covs.push_back(diffres::spd_eigh(Matrix<double>{{1.0}}, 0.0));
  diffres::LgssmParams<double> p;
  p.dim = 1;
  p.theta2 = 1.7;
  Matrix<double> y{{0.9}};
  auto kf = diffres::kalman_filter(p, y);
  auto post = diffres::gm_posterior(prior, {{1.7}, 0.5, 0.9});
  EXPECT_NEAR(post.means(0, 0), kf.means(0, 0), 1e-12);
  EXPECT_NEAR(post.covs[0].matrix()(0, 0), kf.variances[0], 1e-12);
}

TEST(GmPosterior, DominantComponent) {
  diffres::GaussianMixture prior;
  prior.weights = {0.5, 0.5};
  prior.means = Matrix<double>{{0.0}, {20.0}};
  prior.covs = {diffres::spd_eigh(Matrix<double>{{1.0}}, 0.0), diffres::spd_eigh(Matrix<double>{{1.0}}, 0.0)};
  auto post = diffres::gm_posterior(prior, {{1.0}, 1.0, 0.0});
  EXPECT_LT(post.weights[1], 1e-20);
  EXPECT_NEAR(post.weights[0] + post.weights[1], 1.0, 1e-12);
}

TEST(GmPosterior, MatchesGridQuadrature) {
  auto prior = two_component_2d();
  diffres::GmObservation obs{{1.0, 1.0}, 1.0, 0.7};
  auto post = diffres::gm_posterior(prior, obs);
  const std::size_t n = 400;
  const double lo = -7.0, hi = 7.0, h = (hi - lo) / (n - 1);
  std::vector<double> unnorm(n * n), dens(n * n);
  double z = 0.0, mass = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<double> x{lo + a * h, lo + b * h};
      double v = std::exp(diffres::gm_logpdf(prior, x) + normal_logpdf(obs.y, x[0] + x[1], obs.xi));
      unnorm[a * n + b] = v;
      z += v * h * h;
      dens[a * n + b] = std::exp(diffres::gm_logpdf(post, x));
      mass += dens[a * n + b] * h * h;
    }
  double sup = 0.0;
  for (std::size_t k = 0; k < n * n; ++k)
    sup = std::max(sup, std::abs(unnorm[k] / z - dens[k]));
  EXPECT_LT(sup, 1e-3);
  EXPECT_NEAR(mass, 1.0, 1e-3);
  EXPECT_NEAR(post.weights[0] + post.weights[1], 1.0, 1e-12);
}

TEST(GmPosterior, RejectsBadObservation) {
  auto prior = two_component_2d();
  EXPECT_THROW(diffres::gm_posterior(prior, {{1.0, 1.0}, 0.0, 0.0}), diffres::Error);
  EXPECT_THROW(diffres::gm_posterior(prior, {{1.0}, 1.0, 0.0}), diffres::Error);
}

TEST(GmMoments, SymmetricComponents) {
  diffres::GaussianMixture m;
  m.weights = {0.5, 0.5};
  m.means = Matrix<double>{{1.0, 2.0}, {-1.0, -2.0}};
  Matrix<double> s{{0.5, 0.1}, {0.1, 0.3}};
  m.covs = {diffres::spd_eigh(s, 0.0), diffres::spd_eigh(s, 0.0)};
  auto [mu, cov] = diffres::gm_moments(m);
  EXPECT_NEAR(mu[0], 0.0, 1e-15);
  EXPECT_NEAR(mu[1], 0.0, 1e-15);
  const double a[2] = {1.0, 2.0};
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t l = 0; l < 2; ++l)
      EXPECT_NEAR(cov(k, l), s(k, l) + a[k] * a[l], 1e-14);
}

TEST(GmSample, MomentsMatchMonteCarlo) {
  auto m = two_component_2d();
  RngStream rng(31);
  const std::size_t n = 1000000;
  auto x = diffres::gm_sample(m, n, rng);
  auto [mu, cov] = diffres::gm_moments(m);
  for (std::size_t k = 0; k < 2; ++k) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += x(i, k);
      s2 += (x(i, k) - mu[k]) * (x(i, k) - mu[k]);
    }
    EXPECT_NEAR(s / n, mu[k], 4 * std::sqrt(cov(k, k) / n));
    // fourth moment of a mixture is bounded loosely by 3 * (var + spread)^2
    EXPECT_NEAR(s2 / n, cov(k, k), 4 * std::sqrt(3.0 * cov(k, k) * cov(k, k) / n));
  }
}

TEST(GmSample, SingleComponentIsGaussian) {
  diffres::GaussianMixture m;
  m.weights = {1.0};
  m.means = Matrix<double>{{2.0}};
  m.covs = {diffres::spd_eigh(Matrix<double>{{4.0}}, 0.0)};
  RngStream rng(32);
  auto x = diffres::gm_sample(m, 200000, rng);
  double s = 0.0, s2 = 0.0;
  for (double v : x.data()) {
    s += v;
    s2 += v * v;
  }
  const double mean = s / 200000, var = s2 / 200000 - mean * mean;
  EXPECT_NEAR(mean, 2.0, 4 * std::sqrt(4.0 / 200000));
  EXPECT_NEAR(var, 4.0, 0.05);
}

TEST(GmFixture, Structure) {
  RngStream rng(33);
  auto fx = diffres::gm_fixture(8, 5, rng);
  EXPECT_EQ(fx.prior.components(), 5u);
  EXPECT_EQ(fx.prior.dim(), 8u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(fx.prior.weights[i], 0.2);
    for (std::size_t k = 0; k < 8; ++k) {
      EXPECT_GE(fx.prior.means(i, k), -5.0);
      EXPECT_LE(fx.prior.means(i, k), 5.0);
    }
    // Wishart + I has every eigenvalue >= 1
    EXPECT_GE(fx.prior.covs[i].eigvals_value().front(), 1.0 - 1e-10);
  }
  for (double h : fx.obs.h)
    EXPECT_EQ(h, 1.0);
  EXPECT_NEAR(std::accumulate(fx.posterior.weights.begin(), fx.posterior.weights.end(), 0.0), 1.0, 1e-12);
}

TEST(LgssmSimulate, IidStatesWhenTheta1Zero) {
  diffres::LgssmParams<double> p;
  p.theta1 = 0.0;
  p.dim = 1;
  RngStream rng(34);
  auto data = diffres::lgssm_simulate(p, 100000, rng);
  double s = 0.0, s2 = 0.0, lag = 0.0;
  for (std::size_t j = 1; j <= 100000; ++j) {
    double z = data.states(j, 0);
    s += z;
    s2 += z * z;
    if (j > 1)
      lag += z * data.states(j - 1, 0);
  }
  EXPECT_NEAR(s / 1e5, 0.0, 4 / std::sqrt(1e5));
  EXPECT_NEAR(s2 / 1e5, 1.0, 0.02);
  EXPECT_NEAR(lag / 1e5, 0.0, 4 / std::sqrt(1e5));
}

TEST(LgssmSimulate, NoiselessLimit) {
  diffres::LgssmParams<double> p;
  p.theta1 = 0.8;
  p.theta2 = 1.3;
  p.q = 1e-24;
  p.r = 1e-24;
  RngStream rng(35);
  auto data = diffres::lgssm_simulate(p, 10, rng);
  for (std::size_t j = 0; j <= 10; ++j)
    for (std::size_t k = 0; k < 2; ++k)
      EXPECT_NEAR(data.obs(j, k), 1.3 * std::pow(0.8, j) * data.states(0, k), 1e-10);
}

TEST(LgssmSimulate, StationaryVariance) {
  diffres::LgssmParams<double> p;
  p.dim = 1;
  RngStream rng(36);
  auto data = diffres::lgssm_simulate(p, 200000, rng);
  double s2 = 0.0;
  for (std::size_t j = 100; j <= 200000; ++j)
    s2 += data.states(j, 0) * data.states(j, 0);
  EXPECT_NEAR(s2 / (200000 - 99) / (4.0 / 3.0), 1.0, 0.02);
}

TEST(Kalman, HandWorkedTwoSteps) {
  diffres::LgssmParams<double> p;
  p.dim = 1;
  Matrix<double> y{{0.6}, {1.0}};
  auto kf = diffres::kalman_filter(p, y);
  EXPECT_NEAR(kf.means(0, 0), 0.4, 1e-15);
  EXPECT_NEAR(kf.variances[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(kf.means(1, 0), 14.2 / 19.0, 1e-14);
  EXPECT_NEAR(kf.variances[1], 6.5 / 19.0, 1e-14);
  EXPECT_NEAR(kf.log_lik, normal_logpdf(0.6, 0.0, 1.5) + normal_logpdf(1.0, 0.2, 19.0 / 12.0), 1e-14);
}

TEST(Kalman, UninformativeObservations) {
  diffres::LgssmParams<double> p;
  p.theta2 = 0.0;
  RngStream rng(37);
  auto data = diffres::lgssm_simulate(p, 20, rng);
  auto kf = diffres::kalman_filter(p, data.obs);
  double expect = 0.0;
  for (double y : data.obs.data())
    expect += normal_logpdf(y, 0.0, 0.5);
  EXPECT_NEAR(kf.log_lik, expect, 1e-12);
  for (double m : kf.means.data())
    EXPECT_EQ(m, 0.0);
}

TEST(Kalman, InnovationsAreWhite) {
  diffres::LgssmParams<double> p;
  p.dim = 1;
  const std::size_t J = 2000;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RngStream rng(40 + seed);
    auto data = diffres::lgssm_simulate(p, J, rng);
    auto kf = diffres::kalman_filter(p, data.obs);
    std::vector<double> e(J + 1);
    double m = 0.0, v = 1.0;
    for (std::size_t j = 0; j <= J; ++j) {
      if (j > 0) {
        m = 0.5 * kf.means(j - 1, 0);
        v = 0.25 * kf.variances[j - 1] + 1.0;
      }
      EXPECT_GT(kf.variances[j], 0.0);
      e[j] = (data.obs(j, 0) - m) / std::sqrt(v + 0.5);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j <= J; ++j) {
      den += e[j] * e[j];
      if (j > 0)
        num += e[j] * e[j - 1];
    }
    EXPECT_LT(std::abs(num / den), 4 / std::sqrt(double(J)));
    EXPECT_NEAR(den / (J + 1), 1.0, 0.1);
  }
}

TEST(Kalman, DualGradientMatchesFiniteDifference) {
  diffres::LgssmParams<double> p;
  RngStream rng(38);
  auto data = diffres::lgssm_simulate(p, 50, rng);
  diffres::LgssmParams<Dual<2>> pd;
  pd.theta1 = Dual<2>::seed(0.5, 0);
  pd.theta2 = Dual<2>::seed(1.0, 1);
  auto kd = diffres::kalman_filter(pd, data.obs);
  const double h = 1e-6;
  auto ll = [&](double t1, double t2) {
    diffres::LgssmParams<double> q;
    q.theta1 = t1;
    q.theta2 = t2;
    return diffres::kalman_filter(q, data.obs).log_lik;
  };
  EXPECT_NEAR(kd.log_lik.tangent(0), (ll(0.5 + h, 1.0) - ll(0.5 - h, 1.0)) / (2 * h), 1e-5);
  EXPECT_NEAR(kd.log_lik.tangent(1), (ll(0.5, 1.0 + h) - ll(0.5, 1.0 - h)) / (2 * h), 1e-5);
  EXPECT_EQ(kd.log_lik.value(), ll(0.5, 1.0));
}

TEST(LvRate, Values) {
  auto z = diffres::lv_rate(0.0, 0.0);
  EXPECT_NEAR(z[0], 5.0 / (1.0 + std::exp(4.0)), 1e-15);
  EXPECT_NEAR(z[0], 0.0899310498, 1e-10);
  EXPECT_NEAR(z[1], z[0], 1e-15);
  EXPECT_NEAR(diffres::lv_rate(0.8, 1.0)[0], 2.5, 1e-14);
  EXPECT_NEAR(diffres::lv_rate(50.0, 1.0)[0], 5.0, 1e-12);
}

namespace {

std::array<double, 2> lv_rk4(const diffres::LvParams<double> &p, std::size_t n, double t_end) {
  auto f = [&](std::array<double, 2> x) {
    return std::array<double, 2>{x[0] * (p.alpha - p.beta * x[1]), x[1] * (p.zeta * x[0] - p.gamma)};
  };
  std::array<double, 2> x{p.c0, p.r0};
  const double h = t_end / n;
  for (std::size_t i = 0; i < n; ++i) {
    auto k1 = f(x);
    auto k2 = f({x[0] + h / 2 * k1[0], x[1] + h / 2 * k1[1]});
    auto k3 = f({x[0] + h / 2 * k2[0], x[1] + h / 2 * k2[1]});
    auto k4 = f({x[0] + h * k3[0], x[1] + h * k3[1]});
    for (int k = 0; k < 2; ++k)
      x[k] += h / 6 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
  }
  return x;
}

double lv_deterministic_error(std::size_t steps) {
  diffres::LvParams<double> p;
  p.sigma = 0.0;
  p.steps = steps;
  p.dt = 3.0 / steps;
  RngStream rng(1);
  auto data = diffres::lv_simulate_milstein(p, rng);
  auto ref = lv_rk4(p, 4096, 3.0);
  return std::max(std::abs(data.states(steps, 0) - ref[0]), std::abs(data.states(steps, 1) - ref[1]));
}

} // namespace

TEST(LvMilstein, DeterministicLimitConvergesToOdeAtFirstOrder) {
  diffres::LvParams<double> p;
  auto coarse = lv_rk4(p, 256, 3.0), fine = lv_rk4(p, 4096, 3.0);
  EXPECT_NEAR(coarse[0], fine[0], 1e-4);
  EXPECT_NEAR(coarse[1], fine[1], 1e-4);
  double e1 = lv_deterministic_error(4096), e2 = lv_deterministic_error(16384), e3 = lv_deterministic_error(65536);
  EXPECT_GT(e1 / e2, 3.0);
  EXPECT_LT(e1 / e2, 5.0);
  EXPECT_GT(e2 / e3, 3.0);
  EXPECT_LT(e2 / e3, 5.0);
  EXPECT_LT(e3, 2e-2);
}

TEST(LvMilstein, ConstantAndEquilibrium) {
  diffres::LvParams<double> p;
  p.alpha = p.beta = p.zeta = p.gamma = p.sigma = 0.0;
  RngStream rng(2);
  auto data = diffres::lv_simulate_milstein(p, rng);
  for (std::size_t j = 0; j <= p.steps; ++j) {
    EXPECT_EQ(data.states(j, 0), 1.0);
    EXPECT_EQ(data.states(j, 1), 1.0);
  }
  diffres::LvParams<double> q;
  q.sigma = 0.0;
  q.c0 = 1.5;
  q.r0 = 3.0;
  auto eq = diffres::lv_simulate_milstein(q, rng);
  for (std::size_t j = 0; j <= q.steps; ++j) {
    EXPECT_NEAR(eq.states(j, 0), 1.5, 1e-9);
    EXPECT_NEAR(eq.states(j, 1), 3.0, 1e-9);
  }
}

TEST(LvMilstein, StrongOrderOne) {
  diffres::LvParams<double> p;
  p.sigma = 0.5;
  const double t_end = 0.5;
  const std::size_t fine = 64 * 64;
  auto endpoint = [&](const std::vector<double> &w1, const std::vector<double> &w2, std::size_t stride) {
    double c = p.c0, r = p.r0;
    const double dt = t_end * stride / fine;
    for (std::size_t i = 0; i < fine; i += stride) {
      double d1 = 0.0, d2 = 0.0;
      for (std::size_t k = i; k < i + stride; ++k) {
        d1 += w1[k];
        d2 += w2[k];
      }
      auto z = diffres::lv_milstein_step(p, c, r, d1, d2, dt);
      c = z[0];
      r = z[1];
    }
    return std::array<double, 2>{c, r};
  };
  RngStream rng(39);
  double err_coarse = 0.0, err_half = 0.0;
  const double sq = std::sqrt(t_end / fine);
  for (int path = 0; path < 200; ++path) {
    std::vector<double> w1(fine), w2(fine);
    for (std::size_t k = 0; k < fine; ++k) {
      w1[k] = sq * rng.normal();
      w2[k] = sq * rng.normal();
    }
    auto ref = endpoint(w1, w2, 1);
    auto a = endpoint(w1, w2, 128);
    auto b = endpoint(w1, w2, 64);
    err_coarse += std::hypot(a[0] - ref[0], a[1] - ref[1]);
    err_half += std::hypot(b[0] - ref[0], b[1] - ref[1]);
  }
  const double ratio = err_coarse / err_half;
  EXPECT_GE(ratio, 1.6);
  EXPECT_LE(ratio, 2.6);
}

TEST(LvMilstein, FloorAndBlowup) {
  diffres::LvParams<double> p;
  auto z = diffres::lv_milstein_step(p, 1e-9, 1.0, -5.0, 0.0, 0.01);
  EXPECT_EQ(z[0], diffres::kLvFloor);
  EXPECT_THROW(diffres::lv_milstein_step(p, 1e9, 1.0, 0.0, 0.0, 0.01), diffres::Error);
}

TEST(LvModel, DeterministicPotentialIsPoissonAlongPath) {
  diffres::LvParams<double> p;
  p.sigma = 0.0;
  RngStream rng(3);
  auto data = diffres::lv_simulate_milstein(p, rng);
  diffres::LvModel<double> model(p, data.obs);
  RngStream r(4);
  auto z = model.init(r);
  for (std::size_t j = 0; j <= 10; ++j) {
    if (j > 0)
      z = model.transition(z, j, r);
    EXPECT_NEAR(z[0], data.states(j, 0), 1e-12);
    auto lam = diffres::lv_rate(z[0], z[1]);
    double expect = 0.0;
    for (int k = 0; k < 2; ++k) {
      double y = data.obs(j, k);
      expect += y * std::log(lam[k]) - lam[k] - std::lgamma(y + 1);
    }
    EXPECT_NEAR(model.log_potential(z, {}, j), expect, 1e-12);
  }
}
