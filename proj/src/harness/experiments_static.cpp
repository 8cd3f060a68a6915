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


#include <chrono>
#include <utility>
#include <map>

#include "diffres/harness/experiments.hpp"
#include "diffres/harness/metrics.hpp"
#include "diffres/numkit/distance.hpp"
#include "diffres/numkit/gaussian.hpp"

namespace diffres {

namespace {

std::vector<double> resampled_mean(const WeightedEnsemble<double> &e) {
  auto [mu, cov] = weighted_mean_cov(e);
  return mu;
}

double distance(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

std::vector<double> linear_weights(const WeightedEnsemble<double> &e) {
  std::vector<double> w(e.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    w[i] = std::exp(e.log_weights[i]);
  return w;
}

MetricRow row(std::size_t run, std::uint64_t seed, std::string resampler, std::string metric, double value) {
  MetricRow r;
  r.run = run;
  r.seed = seed;
  r.resampler = std::move(resampler);
  r.metric = std::move(metric);
  r.value = value;
  return r;
}

void attach(MetricRow &r, const ResampleInfo &info) {
  if (!std::isnan(info.marginal_error)) {
    r.iterations = double(info.iterations);
    r.marginal_error = info.marginal_error;
  }
}

} // namespace

WeightedEnsemble<double> gm_importance_ensemble(const GmFixture &fx, std::size_t n, RngStream &rng) {
  Matrix<double> x = gm_sample(fx.prior, n, rng);
  std::vector<double> lw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hx = dot(std::span<const double>(fx.obs.h), std::as_const(x).row(i));
    lw[i] = -0.5 * (fx.obs.y - hx) * (fx.obs.y - hx) / fx.obs.xi;
  }
  return normalise(WeightedEnsemble<double>(std::move(x), std::move(lw)));
}

GmFixture gaussian_fixture(std::size_t d, RngStream &rng) {
  GmFixture fx;
  fx.prior.weights = {1.0};
  fx.prior.means = Matrix<double>(1, d);
  fx.prior.covs = {spd_eigh(Matrix<double>::identity(d), 0.0)};
  fx.obs.h.assign(d, 1.0);
  fx.obs.xi = 1.0;
  double hx = 0.0;
  for (std::size_t k = 0; k < d; ++k)
    hx += rng.normal();
  fx.obs.y = hx + rng.normal();
  fx.posterior = gm_posterior(fx.prior, fx.obs);
  return fx;
}

WeightedEnsemble<double> weighted_gaussian_target(const GaussianTarget &t, std::size_t n, std::size_t d,
                                                  RngStream &rng) {
  Matrix<double> x(n, d);
  std::vector<double> lw(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double v = rng.normal();
      x(i, k) = v;
      lw[i] += -0.5 * (v - t.m) * (v - t.m) / t.s2 + 0.5 * v * v;
    }
  return normalise(WeightedEnsemble<double>(std::move(x), std::move(lw)));
}

Matrix<double> exact_gaussian_target(const GaussianTarget &t, std::size_t n, std::size_t d, RngStream &rng) {
  Matrix<double> x(n, d);
  const double s = std::sqrt(t.s2);
  for (auto &v : x.data())
    v = t.m + s * rng.normal();
  return x;
}

ExperimentResult exp_gm(const ExperimentConfig &cfg) {
  const std::size_t d = cfg.count("dim"), c = cfg.count("components"), n = cfg.count("particles");
  const std::size_t n_proj = cfg.count("projections");
  const std::uint64_t seed = cfg.u64("seed");
  const auto specs = cfg.resamplers();
  ExperimentResult res;
  res.meta.emplace_back("resampling_variance", "squared distance between re-sampled mean and posterior mean");
  res.rows = for_each_run(cfg.count("runs"), cfg.count("threads"), [&](std::size_t run) {
    RngStream root = RngStream(seed).split(run);
    RngStream r0 = root.split(0), r1 = root.split(1), r2 = root.split(2);
    GmFixture fx = gm_fixture(d, c, r0);
    auto e = gm_importance_ensemble(fx, n, r1);
    Matrix<double> truth = gm_sample(fx.posterior, n, r2);
    const auto post_mean = gm_moments(fx.posterior).first;
    const std::uint64_t proj_seed = root.split(4).next_u64();
    std::vector<MetricRow> rows;
    rows.push_back(row(run, seed, "none", "ess", value_of(ess(e))));
    rows.push_back(row(run, seed, "none", "swd_weighted", sliced_w1(e.particles, truth, n_proj, proj_seed,
                                                                     linear_weights(e))));
    for (const auto &spec : specs) {
      RngStream r = root.split(3);
      ResampleInfo info;
      auto out = resample(e, spec, r, &info);
      const std::string label = format_resampler(spec);
      auto w = linear_weights(out);
      MetricRow swd = row(run, seed, label, "swd", sliced_w1(out.particles, truth, n_proj, proj_seed, w));
      attach(swd, info);
      rows.push_back(swd);
      const double dist = distance(resampled_mean(out), post_mean);
      rows.push_back(row(run, seed, label, "resampling_variance", dist * dist));
    }
    return rows;
  });
  return res;
}

ExperimentResult exp_timing(const ExperimentConfig &cfg) {
  const std::size_t d = cfg.count("dim");
  const auto sizes = cfg.nums("sizes"), ks = cfg.nums("k_list"), epss = cfg.nums("eps_list");
  const double dt = cfg.num("dt");
  const std::uint64_t seed = cfg.u64("seed");
  const std::size_t timing_size = cfg.count("timing_size");
  std::vector<ResamplerSpec> specs;
  for (double k : ks) {
    DiffusionConfig dc;
    dc.K = std::size_t(k);
    dc.T = dt * (k + 1.0);
    specs.push_back(DiffusionSpec{dc});
  }
  for (double eps : epss) {
    OtConfig oc;
    oc.epsilon = eps;
    oc.relative_epsilon = cfg.count("ot_relative") != 0;
    oc.tol = cfg.num("ot_tol");
    oc.max_iters = cfg.count("ot_iters");
    specs.push_back(OtSpec{oc});
  }
  ExperimentResult res;
  // wall times are measured, so this experiment always runs sequentially
  res.rows = for_each_run(cfg.count("runs"), 1, [&](std::size_t run) {
    std::vector<MetricRow> rows;
    RngStream root = RngStream(seed).split(run);
    for (double nd : sizes) {
      const std::size_t n = std::size_t(nd);
      RngStream rf = root.split(n).split(0), re = root.split(n).split(1);
      GmFixture fx = gaussian_fixture(d, rf);
      auto e = gm_importance_ensemble(fx, n, re);
      const auto post_mean = fx.posterior.means.row(0);
      for (const auto &spec : specs) {
        RngStream r = root.split(n).split(2);
        ResampleInfo info;
        auto t0 = std::chrono::steady_clock::now();
        auto out = resample(e, spec, r, &info);
        auto t1 = std::chrono::steady_clock::now();
        MetricRow m = row(run, seed, format_resampler(spec), "resampling_error",
                          distance(resampled_mean(out), std::vector<double>(post_mean.begin(), post_mean.end())));
        m.wall_ns = double(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
        attach(m, info);
        MetricRow nrow = row(run, seed, m.resampler, "particles", nd);
        rows.push_back(nrow);
        rows.push_back(m);
      }
    }
    return rows;
  });
  // linear fits at the timing size
  std::vector<double> kx, ky, ix, iy;
  for (std::size_t i = 0; i + 1 < res.rows.size(); i += 2) {
    const auto &nrow = res.rows[i], &m = res.rows[i + 1];
    if (std::size_t(nrow.value) != timing_size)
      continue;
    auto spec = parse_resampler(m.resampler);
    if (auto *dspec = std::get_if<DiffusionSpec>(&spec)) {
      kx.push_back(double(dspec->config.K));
      ky.push_back(m.wall_ns * 1e-9);
    } else {
      ix.push_back(m.iterations);
      iy.push_back(m.wall_ns * 1e-9);
    }
  }
  if (kx.size() >= 2) {
    auto f = linear_fit(kx, ky);
    res.meta.emplace_back("fit.diffusion_seconds_vs_K.slope", format_value(f.slope));
    res.meta.emplace_back("fit.diffusion_seconds_vs_K.r2", format_value(f.r2));
  }
  if (ix.size() >= 2) {
    auto f = linear_fit(ix, iy);
    res.meta.emplace_back("fit.ot_seconds_vs_iterations.slope", format_value(f.slope));
    res.meta.emplace_back("fit.ot_seconds_vs_iterations.r2", format_value(f.r2));
  }
  return res;
}

ExperimentResult exp_convergence(const ExperimentConfig &cfg) {
  const std::size_t d = cfg.count("dim"), n_proj = cfg.count("projections");
  const auto sizes = cfg.nums("sizes"), ks = cfg.nums("k_list"), horizons = cfg.nums("horizons");
  const std::uint64_t seed = cfg.u64("seed");
  auto base = std::get<DiffusionSpec>(
      parse_resampler("diffusion:integrator=" + cfg.str("integrator") + ",flow=" + cfg.str("flow")));
  GaussianTarget target;
  ExperimentResult res;
  res.rows = for_each_run(cfg.count("runs"), cfg.count("threads"), [&](std::size_t run) {
    std::vector<MetricRow> rows;
    RngStream root = RngStream(seed).split(run);
    for (double nd : sizes) {
      const std::size_t n = std::size_t(nd);
      RngStream r0 = root.split(n).split(0), r1 = root.split(n).split(1);
      auto e = weighted_gaussian_target(target, n, d, r0);
      auto truth = exact_gaussian_target(target, n, d, r1);
      const std::uint64_t proj_seed = root.split(n).split(3).next_u64();
      for (double T : horizons)
        for (double k : ks) {
          DiffusionSpec spec = base;
          spec.config.T = T;
          spec.config.K = std::size_t(k);
          RngStream r = root.split(n).split(2);
          auto out = resample(e, ResamplerSpec{spec}, r);
          rows.push_back(row(run, seed, format_resampler(spec), "particles", nd));
          rows.push_back(row(run, seed, format_resampler(spec), "swd", sliced_w1(out.particles, truth, n_proj, proj_seed)));
        }
    }
    return rows;
  });
  // slope of log mean SWD against log N per (T, K)
  std::map<std::string, std::map<double, std::vector<double>>> by;
  for (std::size_t i = 0; i + 1 < res.rows.size(); i += 2)
    by[res.rows[i].resampler][res.rows[i].value].push_back(res.rows[i + 1].value);
  for (const auto &[label, per_n] : by) {
    std::vector<double> x, y;
    for (const auto &[n, v] : per_n) {
      x.push_back(std::log(n));
      y.push_back(std::log(mean(v)));
    }
    if (x.size() >= 2)
      res.meta.emplace_back("fit." + label + ".log_swd_vs_log_n.slope", format_value(linear_fit(x, y).slope));
  }
  return res;
}

} // namespace diffres
