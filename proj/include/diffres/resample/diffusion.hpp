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

#ifndef DIFFRES_RESAMPLE_DIFFUSION_HPP
#define DIFFRES_RESAMPLE_DIFFUSION_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "diffres/numkit/ensemble.hpp"
#include "diffres/numkit/gaussian.hpp"
#include "diffres/numkit/softmax.hpp"
#include "diffres/numkit/spd.hpp"
#include "diffres/randkit/rng.hpp"

namespace diffres {

enum class Integrator { euler_maruyama, lord_rougemont, jentzen_kloeden, tweedie };
enum class Flow { sde, ode };

/// Diffusion coefficient: matched sets b^2 = Sigma (so b^2 Sigma^{-1} = I); otherwise scalar b.
struct BMode {
  bool matched = true;
  double b = 1.0;
};

struct DiffusionConfig {
  double T = 3.0;
  std::size_t K = 128;
  Integrator integrator = Integrator::jentzen_kloeden;
  Flow flow = Flow::sde;
  BMode b_mode;
  /// Negative selects the default jitter.
  double jitter = -1.0;
  KernelPrecision precision = KernelPrecision::f64;
  /// Return a single particle unchanged instead of integrating.
  bool single_particle_shortcut = false;

  void validate() const {
    if (!(T > 0.0))
      throw Error(ErrorCode::InvalidConfig, "diffusion T must be positive");
    if (K < 1)
      throw Error(ErrorCode::InvalidConfig, "diffusion K must be at least 1");
    if (integrator == Integrator::tweedie && flow == Flow::ode)
      throw Error(ErrorCode::InvalidConfig, "the tweedie integrator requires the sde flow");
    if (!b_mode.matched && !(b_mode.b > 0.0))
      throw Error(ErrorCode::InvalidConfig, "diffusion coefficient b must be positive");
  }
};

/// Either a scalar multiple of the identity or a dense matrix.
template <class S> struct LinOp {
  bool is_scalar = true;
  S s{1.0};
  Matrix<S> m;

  std::vector<S> apply(std::span<const S> x) const {
    if (is_scalar) {
      std::vector<S> y(x.size());
      for (std::size_t k = 0; k < x.size(); ++k)
        y[k] = s * x[k];
      return y;
    }
    return matvec(m, x);
  }
  template <class V> std::vector<S> apply_plain(const std::vector<V> &x) const {
    std::vector<S> y(x.size());
    if (is_scalar) {
      for (std::size_t k = 0; k < x.size(); ++k)
        y[k] = s * x[k];
    } else {
      for (std::size_t r = 0; r < x.size(); ++r) {
        S acc(0.0);
        for (std::size_t c = 0; c < x.size(); ++c)
          acc += m(r, c) * x[c];
        y[r] = acc;
      }
    }
    return y;
  }
  Matrix<S> dense(std::size_t d) const {
    if (!is_scalar)
      return m;
    Matrix<S> out(d, d);
    for (std::size_t i = 0; i < d; ++i)
      out(i, i) = s;
    return out;
  }
};

/// Moment-matched Gaussian reference N(mu, Sigma) of the forward OU process.
template <class S> struct GaussianReference {
  std::vector<S> mu;
  SpdFactor<S> sigma;
  BMode b_mode;

  std::size_t dim() const { return mu.size(); }

  /// h(A) for the drift matrix A = b^2 Sigma^{-1}; h is evaluated on eigenvalues of A.
  template <class H> LinOp<S> a_fn(H &&h) const {
    LinOp<S> op;
    if (b_mode.matched) {
      op.s = S(value_of(h(1.0)));
      return op;
    }
    const double b2 = b_mode.b * b_mode.b;
    op.is_scalar = false;
    op.m = spd_fn(sigma, [&](auto l) { return h(b2 / l); });
    return op;
  }

  /// b^2 as an operator in original coordinates (Sigma when matched).
  LinOp<S> b2_op() const {
    LinOp<S> op;
    if (b_mode.matched) {
      op.is_scalar = false;
      op.m = sigma.matrix();
    } else {
      op.s = S(b_mode.b * b_mode.b);
    }
    return op;
  }
};

template <class S>
GaussianReference<S> fit_gaussian_reference(const WeightedEnsemble<S> &e, BMode b_mode, double jitter = -1.0) {
  auto [mu, cov] = weighted_mean_cov(e);
  GaussianReference<S> ref;
  ref.mu = std::move(mu);
  ref.sigma = jitter < 0.0 ? spd_eigh(cov) : spd_eigh(cov, jitter);
  ref.b_mode = b_mode;
  return ref;
}

template <class S> struct ForwardMoments {
  std::vector<S> mean;
  SpdFactor<S> cov;
};

namespace detail {

inline void require_positive_time(double t) {
  if (!(t > 0.0))
    throw Error(ErrorCode::NonPositiveTime, "time must be positive");
}

/// Sigma (1 - e^{-2 A t}) as a factor sharing Sigma's eigenbasis.
template <class S> SpdFactor<S> forward_cov(const GaussianReference<S> &ref, double t) {
  if (ref.b_mode.matched) {
    const double v = -std::expm1(-2.0 * t);
    return ref.sigma.mapped([&](auto l) { return l * v; });
  }
  const double b2 = ref.b_mode.b * ref.b_mode.b;
  return ref.sigma.mapped([&](auto l) { return -l * expm1(-2.0 * b2 / l * t); });
}

} // namespace detail

/// Mean e^{-At} x0 + (I - e^{-At}) mu and covariance Sigma (I - e^{-2At}) of the forward transition.
template <class S>
ForwardMoments<S> forward_moments(const GaussianReference<S> &ref, const std::vector<S> &x0, double t) {
  detail::require_positive_time(t);
  const std::size_t d = ref.dim();
  if (x0.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "forward_moments dimensions differ");
  auto e = ref.a_fn([&](auto a) { return exp(-a * t); });
  std::vector<S> c(d);
  for (std::size_t k = 0; k < d; ++k)
    c[k] = x0[k] - ref.mu[k];
  auto m = e.apply(std::span<const S>(c));
  for (std::size_t k = 0; k < d; ++k)
    m[k] += ref.mu[k];
  return {std::move(m), detail::forward_cov(ref, t)};
}

/// Ensemble score s_N(x, t) = -sum_i alpha_i V_t^{-1} (x - m_t(X_i)).
template <class S>
std::vector<S> ensemble_score(const std::vector<S> &x, double t, const WeightedEnsemble<S> &e,
                              const GaussianReference<S> &ref) {
  detail::require_positive_time(t);
  const std::size_t n = e.size(), d = e.dim();
  auto v = detail::forward_cov(ref, t);
  std::vector<std::vector<S>> means(n);
  std::vector<S> logit(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<S> xi(e.particles.row(i).begin(), e.particles.row(i).end());
    means[i] = forward_moments(ref, xi, t).mean;
    logit[i] = value_of(e.log_weights[i]) == -std::numeric_limits<double>::infinity()
                   ? e.log_weights[i]
                   : e.log_weights[i] + gaussian_logpdf(x, means[i], v);
  }
  S lse = logsumexp(logit);
  std::vector<S> resid(d, S(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (value_of(logit[i]) == -std::numeric_limits<double>::infinity())
      continue;
    S alpha = exp(logit[i] - lse);
    for (std::size_t k = 0; k < d; ++k)
      resid[k] += alpha * (x[k] - means[i][k]);
  }
  auto s = matvec(v.inverse(), resid);
  for (auto &c : s)
    c = -c;
  return s;
}

/// Reverse-time drift b^2 [Sigma^{-1}(u - mu) + kappa s_N(u, T - t)], kappa = 2 (sde) or 1 (ode).
template <class S>
std::vector<S> reverse_drift(const std::vector<S> &u, double t, double T, const WeightedEnsemble<S> &e,
                             const GaussianReference<S> &ref, Flow flow) {
  if (!(t >= 0.0 && t < T))
    throw Error(ErrorCode::NonPositiveTime, "reverse time must lie in [0, T)");
  const std::size_t d = ref.dim();
  const double kappa = flow == Flow::sde ? 2.0 : 1.0;
  auto s = ensemble_score(u, T - t, e, ref);
  std::vector<S> c(d);
  for (std::size_t k = 0; k < d; ++k)
    c[k] = u[k] - ref.mu[k];
  auto lin = matvec(ref.sigma.inverse(), c);
  for (std::size_t k = 0; k < d; ++k)
    lin[k] += kappa * s[k];
  return ref.b2_op().apply(std::span<const S>(lin));
}

/**
 * Tweedie denoiser x0_hat = E_s^{-1}[u + V_s s_N(u, s) - (I - E_s) mu] with
 * E_s = e^{-As}; entries of E_s^{-1} are capped at e^30.
 */
template <class S>
std::vector<S> tweedie_denoise(const std::vector<S> &u, double s, const WeightedEnsemble<S> &e,
                               const GaussianReference<S> &ref) {
  detail::require_positive_time(s);
  const std::size_t d = ref.dim();
  auto score = ensemble_score(u, s, e, ref);
  auto v = detail::forward_cov(ref, s);
  auto vs = matvec(v.matrix(), score);
  auto one_minus_e = ref.a_fn([&](auto a) { return -expm1(-a * s); });
  auto shift = one_minus_e.apply(std::span<const S>(ref.mu));
  std::vector<S> r(d);
  for (std::size_t k = 0; k < d; ++k)
    r[k] = u[k] + vs[k] - shift[k];
  auto e_inv = ref.a_fn([&](auto a) {
    using T = decltype(a * s);
    return exp(min(a * s, T(30.0)));
  });
  return e_inv.apply(std::span<const S>(r));
}

/**
 * Diffusion resampling with a fitted Gaussian reference: integrate the
 * reverse-time SDE (or probability-flow ODE) driven by the ensemble score
 * from N(mu, Sigma) over [0, T] in K even steps; outputs carry uniform weights.
 */
template <class S>
WeightedEnsemble<S> diffusion_resample(const WeightedEnsemble<S> &e, const GaussianReference<S> &ref,
                                       const DiffusionConfig &cfg, RngStream &rng);

template <class S>
WeightedEnsemble<S> diffusion_resample(const WeightedEnsemble<S> &e, const DiffusionConfig &cfg, RngStream &rng) {
  cfg.validate();
  if (cfg.single_particle_shortcut && e.size() == 1)
    return WeightedEnsemble<S>::uniform(e.particles);
  return diffusion_resample(e, fit_gaussian_reference(e, cfg.b_mode, cfg.jitter), cfg, rng);
}

/// Variance of the noise injected by the final reverse step, per unit eigen-direction of A.
double final_step_variance(const DiffusionConfig &cfg, double a = 1.0);

} // namespace diffres

#include "diffres/resample/diffusion_impl.hpp"

#endif // DIFFRES_RESAMPLE_DIFFUSION_HPP
