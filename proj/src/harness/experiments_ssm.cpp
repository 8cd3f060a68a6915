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


#include "diffres/harness/experiments.hpp"
#include "diffres/harness/metrics.hpp"
#include "diffres/harness/optimise.hpp"
#include "diffres/models/lotka_volterra.hpp"

namespace diffres {

namespace {

MetricRow row(std::size_t run, std::uint64_t seed, std::string resampler, std::string metric, double value) {
  MetricRow r;
  r.run = run;
  r.seed = seed;
  r.resampler = std::move(resampler);
  r.metric = std::move(metric);
  r.value = value;
  return r;
}

template <class S> LgssmParams<S> lgssm_params(const ExperimentConfig &cfg) {
  LgssmParams<S> p;
  p.theta1 = S(cfg.num("theta1"));
  p.theta2 = S(cfg.num("theta2"));
  p.dim = cfg.count("dim");
  return p;
}

SmcConfig smc_config(const ExperimentConfig &cfg, const ResamplerSpec &spec) {
  SmcConfig c;
  c.n_particles = cfg.count("particles");
  c.ess_threshold = cfg.num("ess_threshold");
  c.resampler = spec;
  return c;
}

void attach(MetricRow &r, const SmcOutput<double> &out) {
  if (!std::isnan(out.max_marginal_error)) {
    r.iterations = double(out.resample_iterations);
    r.marginal_error = out.max_marginal_error;
  }
}

} // namespace

SurfaceGrid kalman_surface(const LgssmParams<double> &p, const Matrix<double> &obs, std::size_t grid,
                           double half_width) {
  if (grid < 2)
    throw Error(ErrorCode::InvalidConfig, "surface grid needs at least two points per axis");
  SurfaceGrid g;
  for (std::size_t a = 0; a < grid; ++a) {
    const double u = -half_width + 2.0 * half_width * double(a) / double(grid - 1);
    g.theta1.push_back(p.theta1 + u);
    g.theta2.push_back(p.theta2 + u);
  }
  for (double t1 : g.theta1)
    for (double t2 : g.theta2) {
      LgssmParams<double> q = p;
      q.theta1 = t1;
      q.theta2 = t2;
      g.kalman.push_back(kalman_filter(q, obs).log_lik);
    }
  return g;
}

ExperimentResult exp_lgssm_filter(const ExperimentConfig &cfg) {
  const auto p = lgssm_params<double>(cfg);
  const std::size_t steps = cfg.count("steps");
  const std::uint64_t seed = cfg.u64("seed");
  const auto dir = parse_kl_direction(cfg.str("kl_direction"));
  const auto specs = cfg.resamplers();
  ExperimentResult res;
  res.meta.emplace_back("kl_direction", to_string(dir));
  res.rows = for_each_run(cfg.count("runs"), cfg.count("threads"), [&](std::size_t run) {
    RngStream root = RngStream(seed).split(run);
    RngStream r0 = root.split(0);
    auto data = lgssm_simulate(p, steps, r0);
    auto kf = kalman_filter(p, data.obs);
    LgssmModel<double> model(p, data.obs);
    std::vector<MetricRow> rows;
    rows.push_back(row(run, seed, "kalman", "log_lik", kf.log_lik));
    for (const auto &spec : specs) {
      const std::string label = format_resampler(spec);
      try {
        auto out = run_smc(model, smc_config(cfg, spec), root.split(1));
        MetricRow kl = row(run, seed, label, "filtering_kl", filtering_kl(out, kf, dir));
        attach(kl, out);
        rows.push_back(kl);
        rows.push_back(row(run, seed, label, "log_lik", out.log_lik));
        rows.push_back(row(run, seed, label, "log_lik_rel_error", std::abs(out.log_lik - kf.log_lik) / std::abs(kf.log_lik)));
      } catch (const Error &err) {
        rows.push_back(row(run, seed, label, "filtering_kl", std::nan("")));
        rows.push_back(row(run, seed, label, std::string("failed:") + to_string(err.code()), 1.0));
      }
    }
    return rows;
  });
  return res;
}

ExperimentResult exp_lgssm_surface(const ExperimentConfig &cfg) {
  const auto p = lgssm_params<double>(cfg);
  const std::size_t steps = cfg.count("steps"), grid = cfg.count("grid");
  const double hw = cfg.num("half_width");
  const std::uint64_t seed = cfg.u64("seed");
  const auto specs = cfg.resamplers();
  ExperimentResult res;
  res.meta.emplace_back("surface_error", "sqrt of the trapezoid integral of (L - L_hat)^2 over the grid");
  res.meta.emplace_back("grid_axes", "theta1 and theta2 offsets evenly spaced in [-half_width, half_width]");
  res.rows = for_each_run(cfg.count("runs"), cfg.count("threads"), [&](std::size_t run) {
    RngStream root = RngStream(seed).split(run);
    RngStream r0 = root.split(0);
    auto data = lgssm_simulate(p, steps, r0);
    auto g = kalman_surface(p, data.obs, grid, hw);
    const double h = 2.0 * hw / double(grid - 1);
    std::vector<MetricRow> rows;
    std::size_t best = 0;
    for (std::size_t k = 1; k < g.kalman.size(); ++k)
      if (g.kalman[k] > g.kalman[best])
        best = k;
    rows.push_back(row(run, seed, "kalman", "argmax_theta1", g.theta1[best / grid]));
    rows.push_back(row(run, seed, "kalman", "argmax_theta2", g.theta2[best % grid]));
    for (std::size_t k = 0; k < g.kalman.size(); ++k)
      rows.push_back(row(run, seed, "kalman", "grid_log_lik:" + std::to_string(k / grid) + ":" + std::to_string(k % grid),
                         g.kalman[k]));
    for (const auto &spec : specs) {
      const std::string label = format_resampler(spec);
      std::vector<double> sq(g.kalman.size());
      std::vector<MetricRow> grid_rows;
      bool failed = false;
      for (std::size_t k = 0; k < g.kalman.size() && !failed; ++k) {
        LgssmParams<double> q = p;
        q.theta1 = g.theta1[k / grid];
        q.theta2 = g.theta2[k % grid];
        LgssmModel<double> model(q, data.obs);
        try {
          // common random numbers across the grid
          const double ll = run_smc(model, smc_config(cfg, spec), root.split(1)).log_lik;
          sq[k] = (ll - g.kalman[k]) * (ll - g.kalman[k]);
          grid_rows.push_back(
              row(run, seed, label, "grid_log_lik:" + std::to_string(k / grid) + ":" + std::to_string(k % grid), ll));
        } catch (const Error &) {
          failed = true;
        }
      }
      rows.push_back(row(run, seed, label, "surface_error", failed ? std::nan("") : std::sqrt(trapezoid_2d(sq, grid, grid, h, h))));
      rows.insert(rows.end(), grid_rows.begin(), grid_rows.end());
    }
    return rows;
  });
  return res;
}

ExperimentResult exp_lgssm_estimate(const ExperimentConfig &cfg) {
  const auto truth = lgssm_params<double>(cfg);
  const std::size_t steps = cfg.count("steps"), gd_steps = cfg.count("gd_steps");
  const double step_size = cfg.num("step_size"), offset = cfg.num("offset");
  const bool per_step = cfg.count("per_step_objective") != 0;
  const double bound = cfg.num("divergence_factor") * std::hypot(truth.theta1, truth.theta2);
  const std::uint64_t seed = cfg.u64("seed");
  const auto specs = cfg.resamplers();
  ExperimentResult res;
  res.meta.emplace_back("objective", per_step ? "-log_lik / (steps + 1)" : "-log_lik");
  res.meta.emplace_back("optimiser", "fixed-step gradient descent, fresh SMC randomness per iteration");
  res.rows = for_each_run(cfg.count("runs"), cfg.count("threads"), [&](std::size_t run) {
    RngStream root = RngStream(seed).split(run);
    RngStream r0 = root.split(0);
    auto data = lgssm_simulate(truth, steps, r0);
    const double scale = per_step ? 1.0 / double(steps + 1) : 1.0;
    std::vector<MetricRow> rows;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      const auto &spec = specs[s];
      const std::string label = format_resampler(spec);
      auto objective = [&](const std::vector<double> &theta, std::size_t it) {
        LgssmParams<Dual<2>> p;
        p.theta1 = Dual<2>::seed(theta[0], 0);
        p.theta2 = Dual<2>::seed(theta[1], 1);
        p.dim = truth.dim;
        LgssmModel<Dual<2>> model(p, data.obs);
        Objective f;
        try {
          auto out = run_smc(model, smc_config(cfg, spec), root.split(2).split(it));
          f.value = -scale * out.log_lik.value();
          f.gradient = {-scale * out.log_lik.tangent(0), -scale * out.log_lik.tangent(1)};
        } catch (const Error &) {
          f.value = std::nan("");
          f.gradient = {std::nan(""), std::nan("")};
        }
        return f;
      };
      auto trace = gradient_descent(objective, {truth.theta1 + offset, truth.theta2 + offset}, gd_steps, step_size,
                                    bound);
      const double err = std::hypot(trace.final_theta[0] - truth.theta1, trace.final_theta[1] - truth.theta2);
      rows.push_back(row(run, seed, label, "final_error", trace.diverged ? std::nan("") : err));
      rows.push_back(row(run, seed, label, "diverged", trace.diverged ? 1.0 : 0.0));
      rows.push_back(row(run, seed, label, "theta1_hat", trace.final_theta[0]));
      rows.push_back(row(run, seed, label, "theta2_hat", trace.final_theta[1]));
      for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const auto &st = trace.steps[k];
        for (auto [name, v] : {std::pair<const char *, double>{"trace_theta1", st.theta[0]},
                               {"trace_theta2", st.theta[1]},
                               {"trace_value", st.value},
                               {"trace_grad_norm", st.grad_norm}}) {
          MetricRow r = row(run, seed, label, name, v);
          r.iterations = double(k);
          rows.push_back(r);
        }
      }
    }
    return rows;
  });
  return res;
}

ExperimentResult exp_lv_filter(const ExperimentConfig &cfg) {
  LvParams<double> p;
  p.alpha = cfg.num("alpha");
  p.beta = cfg.num("beta");
  p.zeta = cfg.num("zeta");
  p.gamma = cfg.num("gamma");
  p.sigma = cfg.num("sigma");
  p.steps = cfg.count("steps");
  p.dt = cfg.num("t_end") / double(p.steps);
  p.c0 = cfg.num("c0");
  p.r0 = cfg.num("r0");
  const std::uint64_t seed = cfg.u64("seed");
  const auto specs = cfg.resamplers();
  ExperimentResult res;
  res.rows = for_each_run(cfg.count("runs"), cfg.count("threads"), [&](std::size_t run) {
    RngStream root = RngStream(seed).split(run);
    RngStream r0 = root.split(0);
    auto data = lv_simulate_milstein(p, r0);
    LvModel<double> model(p, data.obs);
    std::vector<MetricRow> rows;
    for (const auto &spec : specs) {
      const std::string label = format_resampler(spec);
      try {
        auto out = run_smc(model, smc_config(cfg, spec), root.split(1));
        double se = 0.0, ess_sum = 0.0;
        for (std::size_t j = 0; j <= p.steps; ++j) {
          for (std::size_t k = 0; k < 2; ++k)
            se += std::pow(out.filter_means(j, k) - data.states(j, k), 2);
          ess_sum += out.ess_trace[j];
        }
        MetricRow ll = row(run, seed, label, "log_lik", out.log_lik);
        attach(ll, out);
        rows.push_back(ll);
        rows.push_back(row(run, seed, label, "state_rmse", std::sqrt(se / double(2 * (p.steps + 1)))));
        rows.push_back(row(run, seed, label, "mean_ess", ess_sum / double(p.steps + 1)));
      } catch (const Error &err) {
        rows.push_back(row(run, seed, label, std::string("failed:") + to_string(err.code()), 1.0));
      }
    }
    return rows;
  });
  return res;
}

} // namespace diffres
