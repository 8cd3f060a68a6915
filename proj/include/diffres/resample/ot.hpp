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

#ifndef DIFFRES_RESAMPLE_OT_HPP
#define DIFFRES_RESAMPLE_OT_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "diffres/numkit/ensemble.hpp"
#include "diffres/numkit/softmax.hpp"

namespace diffres {

struct OtConfig {
  double epsilon = 0.8;
  std::size_t max_iters = 1000;
  /// Marginal tolerance in units of 1/N; zero runs exactly max_iters iterations.
  double tol = 1e-3;
  /// Interpret epsilon as a multiple of the mean pairwise squared distance.
  bool relative_epsilon = false;
  /// Throw NotConverged instead of reporting it.
  bool strict = false;
};

struct SinkhornReport {
  bool converged = false;
  std::size_t iterations = 0;
  /// N * max_j |column sum_j - w_j| of the returned coupling (rows are exact).
  double marginal_error = 0.0;
  double epsilon = 0.0;
};

/**
 * Log-domain Sinkhorn potentials for the coupling between uniform output
 * marginal 1/N (rows) and the ensemble weights (columns) under squared
 * Euclidean cost:
 *   P_ij = (1/N) w_j exp((f_i + g_j - C_ij) / eps).
 */
template <class S> struct SinkhornSolution {
  std::vector<S> f, g;
  Matrix<S> centred; // particles minus their (constant) unweighted mean
  std::vector<double> centre;
  SinkhornReport report;
};

template <class S> double mean_pairwise_cost(const Matrix<S> &x) {
  const std::size_t n = x.rows(), d = x.cols();
  double total = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      m += value_of(x(i, a));
    m /= double(n);
    for (std::size_t i = 0; i < n; ++i) {
      double c = value_of(x(i, a)) - m;
      total += c * c;
    }
  }
  return 2.0 * total / double(n);
}

namespace detail {

/// One half-step: out_i = -eps * LSE_j(log m_j + (pot_j - C_ij) / eps).
template <class S>
void sinkhorn_half(const Matrix<S> &xq, const std::vector<S> &sq_q, const Matrix<S> &xk, const std::vector<S> &sq_k,
                   const std::vector<S> &log_m, const std::vector<S> &pot, double eps, std::vector<S> &out,
                   Matrix<S> *mean) {
  const std::size_t nk = xk.rows();
  std::vector<S> c(nk);
  for (std::size_t j = 0; j < nk; ++j)
    c[j] = log_m[j] + (pot[j] - sq_k[j]) / eps;
  std::vector<S> lse;
  softmax_rows(xq, xk, c, 2.0 / eps, lse, mean);
  out.resize(xq.rows());
  for (std::size_t i = 0; i < xq.rows(); ++i)
    out[i] = sq_q[i] - eps * lse[i];
}

} // namespace detail

template <class S> SinkhornSolution<S> sinkhorn(const WeightedEnsemble<S> &e, const OtConfig &cfg, Matrix<S> *output = nullptr) {
  const std::size_t n = e.size(), d = e.dim();
  if (n == 0)
    throw Error(ErrorCode::EmptyInput, "empty ensemble");
  double eps = cfg.epsilon;
  if (cfg.relative_epsilon)
    eps *= mean_pairwise_cost(e.particles);
  if (!(eps > 0.0))
    throw Error(ErrorCode::InvalidConfig, "Sinkhorn epsilon must be positive");

  SinkhornSolution<S> sol;
  sol.report.epsilon = eps;
  sol.centre.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a)
      sol.centre[a] += value_of(e.particles(i, a));
  for (auto &m : sol.centre)
    m /= double(n);
  sol.centred = e.particles;
  std::vector<S> sq(n, S(0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) {
      sol.centred(i, a) -= sol.centre[a];
      sq[i] += sol.centred(i, a) * sol.centred(i, a);
    }
  const std::vector<S> log_a(n, S(-std::log(double(n))));
  const auto &log_b = e.log_weights;

  auto &f = sol.f, &g = sol.g;
  f.assign(n, S(0.0));
  g.assign(n, S(0.0));
  std::vector<S> g_new;
  double err = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (it < cfg.max_iters) {
    ++it;
    detail::sinkhorn_half(sol.centred, sq, sol.centred, sq, log_b, g, eps, f, static_cast<Matrix<S> *>(nullptr));
    detail::sinkhorn_half(sol.centred, sq, sol.centred, sq, log_a, f, eps, g_new, static_cast<Matrix<S> *>(nullptr));
    err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double bj = std::exp(value_of(log_b[j]));
      double col = bj * std::exp((value_of(g[j]) - value_of(g_new[j])) / eps);
      err = std::max(err, std::abs(col - bj));
    }
    err *= double(n);
    if (cfg.tol > 0.0 && err <= cfg.tol) {
      sol.report.converged = true;
      break;
    }
    g.swap(g_new);
  }
  if (!sol.report.converged)
    err = std::numeric_limits<double>::quiet_NaN();
  // rows made exact against the returned g; the output map needs this pass anyway
  detail::sinkhorn_half(sol.centred, sq, sol.centred, sq, log_b, g, eps, f, output);
  if (!sol.report.converged) {
    // column error of the final (f, g)
    std::vector<S> g_chk;
    detail::sinkhorn_half(sol.centred, sq, sol.centred, sq, log_a, f, eps, g_chk, static_cast<Matrix<S> *>(nullptr));
    err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double bj = std::exp(value_of(log_b[j]));
      err = std::max(err, std::abs(bj * std::exp((value_of(g[j]) - value_of(g_chk[j])) / eps) - bj));
    }
    err *= double(n);
    sol.report.converged = cfg.tol > 0.0 ? err <= cfg.tol : true;
  }
  sol.report.iterations = it;
  sol.report.marginal_error = err;
  if (cfg.strict && !sol.report.converged)
    throw Error(ErrorCode::NotConverged, "Sinkhorn did not reach tolerance; marginal error " + std::to_string(err));
  if (output)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < d; ++a)
        (*output)(i, a) += sol.centre[a];
  return sol;
}

/// Dense N x N entropic coupling with row sums 1/N and column sums w.
template <class S> Matrix<S> sinkhorn_plan(const WeightedEnsemble<S> &e, const OtConfig &cfg, SinkhornReport *report = nullptr) {
  auto sol = sinkhorn(e, cfg);
  const std::size_t n = e.size(), d = e.dim();
  const double eps = sol.report.epsilon;
  Matrix<S> plan(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (value_of(e.log_weights[j]) == -std::numeric_limits<double>::infinity())
        continue;
      S c(0.0);
      for (std::size_t a = 0; a < d; ++a) {
        S diff = sol.centred(i, a) - sol.centred(j, a);
        c += diff * diff;
      }
      plan(i, j) = exp(e.log_weights[j] - std::log(double(n)) + (sol.f[i] + sol.g[j] - c) / eps);
    }
  if (report)
    *report = sol.report;
  return plan;
}

/// Entropic OT ensemble transform X*_i = N sum_j P_ij X_j, uniform output weights.
template <class S>
WeightedEnsemble<S> ot_resample(const WeightedEnsemble<S> &e, const OtConfig &cfg, SinkhornReport *report = nullptr) {
  Matrix<S> out;
  auto sol = sinkhorn(e, cfg, &out);
  if (report)
    *report = sol.report;
  return WeightedEnsemble<S>::uniform(std::move(out));
}

} // namespace diffres

#endif // DIFFRES_RESAMPLE_OT_HPP
