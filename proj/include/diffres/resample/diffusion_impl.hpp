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

#ifndef DIFFRES_RESAMPLE_DIFFUSION_IMPL_HPP
#define DIFFRES_RESAMPLE_DIFFUSION_IMPL_HPP

// Included from diffusion.hpp.

namespace diffres {

namespace detail {

template <class S> void apply_into(const LinOp<S> &op, const S *x, S *out, std::size_t d) {
  if (op.is_scalar) {
    for (std::size_t k = 0; k < d; ++k)
      out[k] = op.s * x[k];
    return;
  }
  for (std::size_t r = 0; r < d; ++r) {
    S acc(0.0);
    for (std::size_t c = 0; c < d; ++c)
      acc += op.m(r, c) * x[c];
    out[r] = acc;
  }
}

template <class S> void apply_add(const LinOp<S> &op, const double *x, S *out, std::size_t d) {
  if (op.is_scalar) {
    for (std::size_t k = 0; k < d; ++k)
      out[k] += op.s * x[k];
    return;
  }
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      out[r] += op.m(r, c) * x[c];
}

} // namespace detail

template <class S>
WeightedEnsemble<S> diffusion_resample(const WeightedEnsemble<S> &e, const GaussianReference<S> &ref,
                                       const DiffusionConfig &cfg, RngStream &rng) {
  cfg.validate();
  const std::size_t n = e.size(), d = e.dim();
  if (n == 0)
    throw Error(ErrorCode::EmptyInput, "empty ensemble");
  if (ref.dim() != d)
    throw Error(ErrorCode::DimensionMismatch, "reference dimension differs from ensemble");
  if (cfg.single_particle_shortcut && n == 1)
    return WeightedEnsemble<S>::uniform(e.particles);

  const auto root = spd_fn(ref.sigma, [](auto l) { return sqrt(l); });
  const auto root_inv = spd_fn(ref.sigma, [](auto l) { return 1.0 / sqrt(l); });

  // whitened particles Z_i = Sigma^{-1/2} (X_i - mu)
  Matrix<S> z(n, d);
  {
    std::vector<S> c(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k)
        c[k] = e.particles(i, k) - ref.mu[k];
      auto w = matvec(root_inv, c);
      for (std::size_t k = 0; k < d; ++k)
        z(i, k) = w[k];
    }
  }

  std::vector<RngStream> streams;
  streams.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    streams.push_back(rng.split(i));
  std::vector<double> xi(d);
  auto draw = [&](std::size_t i) {
    for (std::size_t k = 0; k < d; ++k)
      xi[k] = streams[i].normal();
  };

  Matrix<S> y(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    draw(i);
    for (std::size_t k = 0; k < d; ++k)
      y(i, k) = S(xi[k]);
  }

  const double dt = cfg.T / double(cfg.K);
  const bool sde = cfg.flow == Flow::sde;
  const double kappa = sde ? 2.0 : 1.0;

  // y <- g1 y + g2 f + g3 xi for the explicit integrators
  LinOp<S> g1, g2, g3;
  switch (cfg.integrator) {
  case Integrator::euler_maruyama:
    g1 = ref.a_fn([&](auto a) { return 1.0 + a * dt; });
    g2.s = S(dt);
    g3 = ref.a_fn([&](auto a) { return sqrt(2.0 * a * dt); });
    break;
  case Integrator::jentzen_kloeden:
    g1 = ref.a_fn([&](auto a) { return exp(a * dt); });
    g2 = ref.a_fn([&](auto a) { return expm1(a * dt) / a; });
    g3 = ref.a_fn([&](auto a) { return sqrt(expm1(2.0 * a * dt)); });
    break;
  case Integrator::lord_rougemont:
    g1 = ref.a_fn([&](auto a) { return exp(a * dt); });
    g2 = ref.a_fn([&](auto a) { return dt * exp(a * dt); });
    g3 = ref.a_fn([&](auto a) { return sqrt(2.0 * a * dt) * exp(a * dt); });
    break;
  case Integrator::tweedie:
    break;
  }

  std::vector<S> c(n), lse;
  Matrix<S> zbar, q;
  std::vector<S> sqz(n, S(0.0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < d; ++k)
      sqz[j] += z(j, k) * z(j, k);
  std::vector<S> r(d), f(d), tmp(d), ez(d);

  for (std::size_t step = 1; step <= cfg.K; ++step) {
    const double tau = cfg.T - double(step - 1) * dt;
    auto E = ref.a_fn([&](auto a) { return exp(-a * tau); });
    auto WE = ref.a_fn([&](auto a) { return exp(-a * tau) / -expm1(-2.0 * a * tau); });
    auto EWE = ref.a_fn([&](auto a) { return exp(-2.0 * a * tau) / -expm1(-2.0 * a * tau); });

    // softmax over i of log w_i + (W E y)^T Z_i - 1/2 Z_i^T E W E Z_i
    double beta = 1.0;
    const Matrix<S> *query = &y;
    if (WE.is_scalar) {
      beta = value_of(WE.s);
    } else {
      q = Matrix<S>(n, d);
      for (std::size_t i = 0; i < n; ++i)
        detail::apply_into(WE, &y(i, 0), &q(i, 0), d);
      query = &q;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (EWE.is_scalar) {
        c[j] = e.log_weights[j] - 0.5 * EWE.s * sqz[j];
      } else {
        detail::apply_into(EWE, &z(j, 0), tmp.data(), d);
        S quad(0.0);
        for (std::size_t k = 0; k < d; ++k)
          quad += z(j, k) * tmp[k];
        c[j] = e.log_weights[j] - 0.5 * quad;
      }
    }
    softmax_rows(*query, z, c, beta, lse, &zbar, cfg.precision);

    if (cfg.integrator == Integrator::tweedie) {
      // ancestral step from the OU bridge between the denoised point and y
      const double sp = step == cfg.K ? 0.0 : tau - dt;
      auto m1 = ref.a_fn([&](auto a) { return -expm1(-2.0 * a * dt) * exp(-a * sp) / -expm1(-2.0 * a * tau); });
      auto m2 = ref.a_fn([&](auto a) { return exp(-a * dt) * -expm1(-2.0 * a * sp) / -expm1(-2.0 * a * tau); });
      LinOp<S> m3;
      m3.s = S(0.0);
      if (sp > 0.0)
        m3 = ref.a_fn([&](auto a) {
          return sqrt(-expm1(-2.0 * a * sp) * -expm1(-2.0 * a * dt) / -expm1(-2.0 * a * tau));
        });
      for (std::size_t i = 0; i < n; ++i) {
        detail::apply_into(m1, &zbar(i, 0), r.data(), d);
        detail::apply_into(m2, &y(i, 0), tmp.data(), d);
        draw(i);
        for (std::size_t k = 0; k < d; ++k)
          y(i, k) = r[k] + tmp[k];
        detail::apply_add(m3, xi.data(), &y(i, 0), d);
      }
      continue;
    }

    // nonlinear part f = kappa A s = -kappa A W (y - E zbar)
    auto AW = ref.a_fn([&](auto a) { return a / -expm1(-2.0 * a * tau); });
    for (std::size_t i = 0; i < n; ++i) {
      detail::apply_into(E, &zbar(i, 0), ez.data(), d);
      for (std::size_t k = 0; k < d; ++k)
        r[k] = y(i, k) - ez[k];
      detail::apply_into(AW, r.data(), f.data(), d);
      for (auto &v : f)
        v *= -kappa;
      detail::apply_into(g1, &y(i, 0), r.data(), d);
      detail::apply_into(g2, f.data(), tmp.data(), d);
      for (std::size_t k = 0; k < d; ++k)
        y(i, k) = r[k] + tmp[k];
      if (sde) {
        draw(i);
        detail::apply_add(g3, xi.data(), &y(i, 0), d);
      }
    }
  }

  Matrix<S> out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    detail::apply_into(LinOp<S>{false, S(1.0), root}, &y(i, 0), r.data(), d);
    for (std::size_t k = 0; k < d; ++k)
      out(i, k) = ref.mu[k] + r[k];
  }
  return WeightedEnsemble<S>::uniform(std::move(out));
}

} // namespace diffres

#endif // DIFFRES_RESAMPLE_DIFFUSION_IMPL_HPP
