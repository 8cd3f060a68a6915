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

// Acceptance suite: one PASS/FAIL line per criterion, raw statistics above it.
// Usage: acceptance [--only N]

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "diffres/harness/config.hpp"
#include "diffres/harness/experiments.hpp"
#include "diffres/harness/metrics.hpp"
#include "diffres/models/lgssm.hpp"
#include "diffres/numkit/distance.hpp"
#include "diffres/resample/resampler.hpp"
#include "diffres/smc/smc.hpp"

using namespace diffres;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

template <class... A> std::string fmt(const char *f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

template <class... A> void note(const char *f, A... a) {
  std::printf("    %s\n", fmt(f, a...).c_str());
  std::fflush(stdout);
}

std::string label(const std::string &spec) { return format_resampler(parse_resampler(spec)); }

double finite_mean(const std::vector<double> &v) {
  double s = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      s += x;
      ++n;
    }
  return n ? s / double(n) : std::nan("");
}

std::vector<double> weighted_mean(const WeightedEnsemble<double> &e) {
  const std::size_t n = e.size(), d = e.dim();
  double lse = logsumexp(e.log_weights);
  std::vector<double> m(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(e.log_weights[i] - lse);
    for (std::size_t a = 0; a < d; ++a)
      m[a] += w * e.particles(i, a);
  }
  return m;
}

// 1. multinomial and soft resampling preserve the weighted mean
Outcome unbiasedness() {
  const std::size_t n = 1024, seeds = 500, ensembles = 50;
  const std::array<std::string, 2> specs{"multinomial", "soft:alpha=0.9"};
  std::array<double, 2> worst{0.0, 0.0};
  std::array<std::size_t, 2> violations{0, 0};
  std::size_t checks = 0;
  for (std::size_t k = 0; k < ensembles; ++k) {
    RngStream root = RngStream(101).split(k);
    const std::size_t d = 1 + k % 4;
    RngStream r0 = root.split(0);
    Matrix<double> x(n, d);
    auto z = draw_normal(r0, n * d);
    std::copy(z.begin(), z.end(), x.data().begin());
    auto lw = draw_normal(r0, n);
    WeightedEnsemble<double> e(x, lw);
    e = normalise(e);
    const auto m = weighted_mean(e);
    std::vector<double> sd(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < d; ++a)
        sd[a] += std::exp(e.log_weights[i]) * (x(i, a) - m[a]) * (x(i, a) - m[a]);
    for (auto &s : sd)
      s = std::sqrt(s);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      const auto spec = parse_resampler(specs[s]);
      std::vector<double> avg(d, 0.0);
      for (std::size_t seed = 0; seed < seeds; ++seed) {
        RngStream r = root.split(1 + s).split(seed);
        auto mm = weighted_mean(resample(e, spec, r));
        for (std::size_t a = 0; a < d; ++a)
          avg[a] += mm[a] / double(seeds);
      }
      for (std::size_t a = 0; a < d; ++a) {
        const double z_score = std::abs(avg[a] - m[a]) / (sd[a] / std::sqrt(double(seeds * n)));
        worst[s] = std::max(worst[s], z_score);
        violations[s] += z_score > 4.0;
        checks += s == 0;
      }
    }
  }
  for (std::size_t s = 0; s < specs.size(); ++s)
    note("%s: max |deviation| / (sd/sqrt(500 N)) = %.3f over %zu coordinates, %zu above 4", specs[s].c_str(),
         worst[s], checks, violations[s]);
  return {violations[0] == 0 && violations[1] == 0,
          fmt("max standardised deviation %.2f (multinomial), %.2f (soft), bound 4", worst[0], worst[1])};
}

// 2. diffusion resampling error shrinks with N
Outcome diffusion_consistency() {
  auto cfg = ExperimentConfig::defaults("convergence");
  cfg.set("runs", "5");
  cfg.set("sizes", "100;1000;10000");
  cfg.set("k_list", "128");
  cfg.set("horizons", "3");
  auto res = exp_convergence(cfg);
  const std::string lab = label("diffusion:T=3,K=128");
  std::vector<double> xs, ys;
  const auto vals = res.values(lab, "swd"), ns = res.values(lab, "particles");
  for (double n : {100.0, 1000.0, 10000.0}) {
    std::vector<double> v;
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (ns[i] == n)
        v.push_back(vals[i]);
    note("N=%-6.0f mean SWD %.5f (sd %.5f, %zu runs)", n, mean(v), stddev(v), v.size());
    xs.push_back(std::log(n));
    ys.push_back(std::log(mean(v)));
  }
  const bool monotone = ys[1] < ys[0] && ys[2] < ys[1];
  const double slope = linear_fit(xs, ys).slope;
  note("log-log slope %.4f, band [-0.7, -0.3]", slope);
  return {monotone && slope >= -0.7 && slope <= -0.3,
          fmt("monotone=%s, slope %.3f in [-0.7, -0.3]", monotone ? "yes" : "no", slope)};
}

// 3. Gaussian mixture table at desk scale
Outcome gaussian_mixture_table() {
  auto cfg = ExperimentConfig::defaults("gm");
  cfg.set("runs", "20");
  cfg.set("resamplers", "multinomial; diffusion:T=3,K=128; diffusion:T=1,K=8");
  auto res = exp_gm(cfg);
  auto mult = res.values("multinomial", "swd");
  auto d128 = res.values(label("diffusion:T=3,K=128"), "swd");
  auto d8 = res.values(label("diffusion:T=1,K=8"), "swd");
  note("multinomial            SWD %.4f +- %.4f", mean(mult), stddev(mult));
  note("diffusion(T=3,K=128)   SWD %.4f +- %.4f", mean(d128), stddev(d128));
  note("diffusion(T=1,K=8)     SWD %.4f +- %.4f", mean(d8), stddev(d8));
  const double pooled = std::sqrt(0.5 * (stddev(mult) * stddev(mult) + stddev(d128) * stddev(d128)));
  const bool a = std::abs(mean(mult) - 0.082) <= 2 * 0.025;
  const bool b = mean(d128) <= mean(mult) + pooled;
  const bool c = mean(d8) > mean(d128);
  note("multinomial in 0.082 +- 0.05: %s; diffusion(3,128) <= multinomial + pooled sd (%.4f): %s; "
       "diffusion(1,8) > diffusion(3,128): %s",
       a ? "yes" : "no", pooled, b ? "yes" : "no", c ? "yes" : "no");
  return {a && b && c, fmt("SWD multinomial %.4f, diffusion(3,128) %.4f, diffusion(1,8) %.4f", mean(mult),
                           mean(d128), mean(d8))};
}

// 4. bootstrap filter log-likelihood against the Kalman filter
Outcome kalman_equivalence() {
  LgssmParams<double> p;
  SmcConfig sc;
  sc.n_particles = 4096;
  double worst = 0.0;
  std::vector<double> errs;
  for (std::uint64_t s = 0; s < 20; ++s) {
    RngStream root = RngStream(404).split(s), r0 = root.split(0);
    auto data = lgssm_simulate(p, 128, r0);
    const double kf = kalman_filter(p, data.obs).log_lik;
    LgssmModel<double> model(p, data.obs);
    const double pf = run_smc(model, sc, root.split(1)).log_lik;
    errs.push_back(std::abs(pf - kf) / std::abs(kf));
    worst = std::max(worst, errs.back());
  }
  note("relative log-likelihood error: mean %.2e, max %.2e over 20 seeds", mean(errs), worst);
  return {worst < 0.02, fmt("max relative error %.2e < 0.02", worst)};
}

// 5. dual-mode gradients against central differences of the same program
// Smooth resamplers are compared at a fine step; multinomial at a coarse step, where its
// ancestor jumps register (below the jump spacing a difference quotient only sees fixed ancestry).
Outcome gradient_correctness() {
  LgssmParams<double> p;
  RngStream data_rng(505);
  const auto data = lgssm_simulate(p, 128, data_rng);
  const double h_fine = 1e-6, h_coarse = 1e-3;
  const std::size_t seeds = 10;
  OtConfig oc;
  oc.epsilon = 0.8;
  oc.tol = 0.0; // fixed iteration count keeps the program smooth in theta
  oc.max_iters = 100;
  const std::vector<std::pair<std::string, ResamplerSpec>> specs{
      {"diffusion:T=3,K=8", parse_resampler("diffusion:T=3,K=8")},
      {"ot:eps=0.8 (100 iterations)", OtSpec{oc}},
      {"gumbel:tau=0.1", parse_resampler("gumbel:tau=0.1")},
      {"multinomial", MultinomialSpec{}}};
  bool pass = true;
  std::string summary;
  for (const auto &[name, spec] : specs) {
    SmcConfig sc;
    sc.n_particles = 64;
    sc.resampler = spec;
    std::vector<double> fine, coarse;
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const RngStream rng = RngStream(506).split(s);
      LgssmParams<Dual<2>> pd;
      pd.theta1 = Dual<2>::seed(p.theta1, 0);
      pd.theta2 = Dual<2>::seed(p.theta2, 1);
      const auto ll = run_smc(LgssmModel<Dual<2>>(pd, data.obs), sc, rng).log_lik;
      auto at = [&](double t1, double t2) {
        LgssmParams<double> q = p;
        q.theta1 = t1;
        q.theta2 = t2;
        return run_smc(LgssmModel<double>(q, data.obs), sc, rng).log_lik;
      };
      for (double h : {h_fine, h_coarse}) {
        const double f0 = (at(p.theta1 + h, p.theta2) - at(p.theta1 - h, p.theta2)) / (2 * h);
        const double f1 = (at(p.theta1, p.theta2 + h) - at(p.theta1, p.theta2 - h)) / (2 * h);
        (h == h_fine ? fine : coarse)
            .push_back(std::hypot(ll.tangent(0) - f0, ll.tangent(1) - f1) / std::hypot(f0, f1));
        if (s == 0)
          note("%-28s seed 0: dual (%.5f, %.5f), FD h=%.0e (%.5f, %.5f)", name.c_str(), ll.tangent(0),
               ll.tangent(1), h, f0, f1);
      }
    }
    auto beyond = [](const std::vector<double> &v) {
      return std::size_t(std::count_if(v.begin(), v.end(), [](double r) { return r > 1e-3; }));
    };
    const double worst = *std::max_element(fine.begin(), fine.end());
    note("%-28s relative |dual - FD|: max %.2e at h=1e-6 (%zu/%zu beyond 1e-3), max %.2e at h=1e-3 (%zu/%zu beyond)",
         name.c_str(), worst, beyond(fine), seeds, *std::max_element(coarse.begin(), coarse.end()), beyond(coarse),
         seeds);
    if (name == "multinomial") {
      pass = pass && double(beyond(coarse)) >= 0.8 * double(seeds);
      summary += fmt("multinomial differs on %zu/%zu seeds", beyond(coarse), seeds);
    } else {
      pass = pass && worst <= 1e-3;
      summary += fmt("%s max %.1e; ", name.substr(0, name.find(':')).c_str(), worst);
    }
  }
  return {pass, summary};
}

// 6. filtering KL and surface orderings
Outcome lgssm_orderings() {
  auto cfg = ExperimentConfig::defaults("lgssm-filter");
  cfg.set("runs", "20");
  cfg.set("resamplers", "multinomial; soft:alpha=0.9; ot:eps=0.8; ot:eps=0.8,relative=1; diffusion:T=3,K=8");
  const std::string diff = label("diffusion:T=3,K=8");
  const std::vector<std::string> rivals{"multinomial", label("soft:alpha=0.9"), label("ot:eps=0.8"),
                                        label("ot:eps=0.8,relative=1")};
  bool kl_ok = true;
  double kd = 0.0;
  for (const char *dir : {"true_to_empirical", "empirical_to_true"}) {
    cfg.set("kl_direction", dir);
    auto res = exp_lgssm_filter(cfg);
    const double d = mean(res.values(diff, "filtering_kl"));
    note("KL %s: diffusion(T=3,K=8) %.4f +- %.4f", dir, d, stddev(res.values(diff, "filtering_kl")));
    bool all = true;
    for (const auto &r : rivals) {
      const auto v = res.values(r, "filtering_kl");
      note("KL %s: %-40s %.4f +- %.4f", dir, r.substr(0, 40).c_str(), mean(v), stddev(v));
      all = all && d <= mean(v);
    }
    // the default direction decides; the other is reported only
    if (std::string(dir) == ExperimentConfig::defaults("lgssm-filter").str("kl_direction")) {
      kl_ok = all;
      kd = d;
    }
  }
  auto scfg = ExperimentConfig::defaults("lgssm-surface");
  scfg.set("runs", "20");
  scfg.set("resamplers", "multinomial; diffusion:T=3,K=8");
  auto sres = exp_lgssm_surface(scfg);
  const auto sm = sres.values("multinomial", "surface_error"), sd = sres.values(diff, "surface_error");
  note("surface error: multinomial %.4f +- %.4f, diffusion %.4f +- %.4f", mean(sm), stddev(sm), mean(sd), stddev(sd));
  const bool surf_ok = mean(sd) <= mean(sm);
  return {kl_ok && surf_ok, fmt("diffusion KL %.4f lowest: %s; surface error %.4f vs multinomial %.4f", kd,
                                kl_ok ? "yes" : "no", mean(sd), mean(sm))};
}

// 7. parameter estimation by gradient descent
Outcome parameter_estimation() {
  auto cfg = ExperimentConfig::defaults("lgssm-estimate");
  cfg.set("runs", "10");
  cfg.set("resamplers", "multinomial; diffusion:T=3,K=8");
  auto res = exp_lgssm_estimate(cfg);
  auto summarise = [&](const std::string &lab, const char *name) {
    const auto err = res.values(lab, "final_error"), div = res.values(lab, "diverged");
    const double n_div = std::accumulate(div.begin(), div.end(), 0.0);
    note("%-12s final error %.4f (mean over converged runs), %.0f of %zu diverged", name, finite_mean(err), n_div,
         div.size());
    return std::pair<double, double>{finite_mean(err), n_div};
  };
  const auto [de, dd] = summarise(label("diffusion:T=3,K=8"), "diffusion");
  const auto [me, md] = summarise("multinomial", "multinomial");
  const bool diff_ok = de <= 0.25 && dd <= 2;
  const bool mult_worse = (std::isfinite(me) && me >= 2 * de) || md > 5;
  note("diffusion error <= 0.25 with <= 2 divergent: %s; multinomial >= 2x error or majority divergent: %s",
       diff_ok ? "yes" : "no", mult_worse ? "yes" : "no");
  return {diff_ok && mult_worse, fmt("diffusion error %.4f (%.0f divergent), multinomial %.4f (%.0f divergent)", de,
                                     dd, me, md)};
}

// 8. wall time scaling and resampling error levels
Outcome timing_scaling() {
  auto cfg = ExperimentConfig::defaults("timing");
  cfg.set("runs", "20");
  cfg.set("sizes", "128;8192");
  auto res = exp_timing(cfg);
  const double r2k = std::stod(res.meta_value("fit.diffusion_seconds_vs_K.r2"));
  const double r2i = std::stod(res.meta_value("fit.ot_seconds_vs_iterations.r2"));
  note("R^2 time vs K (diffusion) %.5f, time vs Sinkhorn iterations (OT) %.5f", r2k, r2i);
  std::vector<std::string> labels;
  for (const auto &r : res.rows)
    if (std::find(labels.begin(), labels.end(), r.resampler) == labels.end())
      labels.push_back(r.resampler);
  bool err_ok = true;
  for (const auto &lab : labels) {
    const auto e = res.values(lab, "resampling_error"), n = res.values(lab, "particles");
    std::vector<double> small, large;
    for (std::size_t i = 0; i < e.size(); ++i)
      (n[i] == 128 ? small : large).push_back(e[i]);
    const bool ok = std::abs(mean(small) - 0.29) <= 0.5 * 0.29 && std::abs(mean(large) - 0.04) <= 0.5 * 0.04;
    err_ok = err_ok && ok;
    note("%-45s error N=128 %.4f +- %.4f, N=8192 %.4f +- %.4f %s", lab.substr(0, lab.find(",integrator")).c_str(),
         mean(small), stddev(small), mean(large), stddev(large), ok ? "" : "(outside +-50%)");
  }
  return {r2k > 0.9 && r2i > 0.9 && err_ok,
          fmt("R^2 %.3f (K), %.3f (iterations); errors within +-50%% of 0.29/0.04: %s", r2k, r2i,
              err_ok ? "yes" : "no")};
}

// 9. a single particle is recovered by the reverse diffusion
Outcome single_particle() {
  const std::size_t d = 2, seeds = 400;
  bool pass = true;
  std::string summary;
  for (std::size_t c = 0; c < 3; ++c) {
    RngStream root = RngStream(909).split(c), r0 = root.split(0);
    auto xv = draw_normal(r0, d), mu = draw_normal(r0, d);
    for (auto &v : xv)
      v *= 2.0;
    WeightedEnsemble<double> e(Matrix<double>(1, d), {0.0});
    std::copy(xv.begin(), xv.end(), e.particles.data().begin());
    // a fixed N(mu, I) reference; fitting one to a single particle would collapse onto it
    GaussianReference<double> ref{mu, spd_eigh(Matrix<double>::identity(d), 0.0), {}};
    const double gap = std::hypot(xv[0] - mu[0], xv[1] - mu[1]);
    double prev = INFINITY;
    for (std::size_t k : {32, 128}) {
      DiffusionConfig cfg;
      cfg.T = 3.0;
      cfg.K = k;
      double avg = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) {
        RngStream r = root.split(k).split(s);
        auto out = diffusion_resample(e, ref, cfg, r);
        avg += std::hypot(out.particles(0, 0) - xv[0], out.particles(0, 1) - xv[1]) / double(seeds);
      }
      const double bound = 0.1 * gap + 3.0 * std::sqrt(double(d) * final_step_variance(cfg));
      note("case %zu K=%-3zu mean |U_T - X_1| %.5f, bound %.5f (|X_1 - mu| = %.3f)", c, k, avg, bound, gap);
      pass = pass && avg < bound && avg < prev;
      if (c == 0)
        summary += fmt("K=%zu %.4f < %.4f; ", k, avg, bound);
      prev = avg;
    }
  }
  return {pass, summary + "decreasing in K"};
}

// exact OT between N=3 points by enumerating basic feasible plans
Matrix<double> brute_force_ot(const Matrix<double> &x, const std::vector<double> &w) {
  const std::size_t n = 3;
  std::vector<double> a(n, 1.0 / n);
  double best = INFINITY;
  Matrix<double> best_plan(n, n);
  for (unsigned mask = 0; mask < (1u << 9); ++mask) {
    if (__builtin_popcount(mask) != 5)
      continue;
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < 9; ++c)
      if (mask >> c & 1u)
        cells.push_back(c);
    // rows 0..2 and columns 0..1; the last column follows from the totals
    double m[5][6] = {};
    for (std::size_t r = 0; r < 5; ++r) {
      for (std::size_t v = 0; v < 5; ++v) {
        const std::size_t i = cells[v] / n, j = cells[v] % n;
        m[r][v] = r < 3 ? double(i == r) : double(j == r - 3);
      }
      m[r][5] = r < 3 ? a[r] : w[r - 3];
    }
    bool singular = false;
    for (std::size_t col = 0; col < 5 && !singular; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < 5; ++r)
        if (std::abs(m[r][col]) > std::abs(m[piv][col]))
          piv = r;
      if (std::abs(m[piv][col]) < 1e-12) {
        singular = true;
        break;
      }
      std::swap(m[piv], m[col]);
      for (std::size_t r = 0; r < 5; ++r)
        if (r != col) {
          const double f = m[r][col] / m[col][col];
          for (std::size_t q = col; q < 6; ++q)
            m[r][q] -= f * m[col][q];
        }
    }
    if (singular)
      continue;
    Matrix<double> plan(n, n);
    bool feasible = true;
    for (std::size_t v = 0; v < 5; ++v) {
      const double val = m[v][5] / m[v][v];
      feasible = feasible && val >= -1e-12;
      plan(cells[v] / n, cells[v] % n) = std::max(val, 0.0);
    }
    if (!feasible || std::abs(plan(0, 2) + plan(1, 2) + plan(2, 2) - w[2]) > 1e-9)
      continue;
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double c = 0.0;
        for (std::size_t q = 0; q < x.cols(); ++q)
          c += (x(i, q) - x(j, q)) * (x(i, q) - x(j, q));
        cost += plan(i, j) * c;
      }
    if (cost < best) {
      best = cost;
      best_plan = plan;
    }
  }
  return best_plan;
}

// 10. Sinkhorn marginals and the small-epsilon limit
Outcome sinkhorn_correctness() {
  std::size_t converged = 0, runs = 0;
  double worst_marg = 0.0;
  bool marg_ok = true;
  for (std::size_t k = 0; k < 36; ++k) {
    RngStream r = RngStream(1010).split(k);
    const std::size_t n = std::array<std::size_t, 3>{16, 64, 256}[k % 3], d = 1 + k % 4;
    Matrix<double> x(n, d);
    auto z = draw_normal(r, n * d);
    std::copy(z.begin(), z.end(), x.data().begin());
    auto lw = draw_normal(r, n);
    auto e = normalise(WeightedEnsemble<double>(x, lw));
    OtConfig oc;
    oc.epsilon = std::array<double, 3>{0.8, 0.2, 0.05}[(k / 3) % 3];
    oc.relative_epsilon = (k / 9) % 2 == 0;
    oc.tol = 1e-3;
    oc.max_iters = 2000;
    SinkhornReport rep;
    auto plan = sinkhorn_plan(e, oc, &rep);
    ++runs;
    if (!rep.converged)
      continue;
    ++converged;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0, col = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row += plan(i, j);
        col += plan(j, i);
      }
      err = std::max({err, std::abs(row - 1.0 / n), std::abs(col - std::exp(e.log_weights[i]))});
    }
    err *= double(n); // tolerance is in units of 1/N
    worst_marg = std::max(worst_marg, err);
    marg_ok = marg_ok && err <= oc.tol;
  }
  note("marginals: %zu of %zu runs converged, worst N * sup marginal error %.2e (tol 1e-3)", converged, runs,
       worst_marg);
  double worst_plan = 0.0;
  for (std::size_t k = 0; k < 20; ++k) {
    RngStream r = RngStream(1011).split(k);
    Matrix<double> x(3, 2);
    auto z = draw_normal(r, 6);
    std::copy(z.begin(), z.end(), x.data().begin());
    auto e = normalise(WeightedEnsemble<double>(x, draw_normal(r, 3)));
    std::vector<double> w(3);
    for (std::size_t j = 0; j < 3; ++j)
      w[j] = std::exp(e.log_weights[j]);
    OtConfig oc;
    oc.epsilon = 1e-3;
    oc.relative_epsilon = true;
    oc.tol = 1e-10;
    oc.max_iters = 2000000;
    auto plan = sinkhorn_plan(e, oc);
    auto exact = brute_force_ot(x, w);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        worst_plan = std::max(worst_plan, std::abs(plan(i, j) - exact(i, j)));
  }
  note("N=3, eps = 1e-3 mean cost: max |P_eps - P_exact| %.2e over 20 instances", worst_plan);
  return {marg_ok && converged > 0 && worst_plan <= 1e-3,
          fmt("marginal error %.1e <= 1e-3 on %zu converged runs; N=3 plan error %.1e", worst_marg, converged,
              worst_plan)};
}

struct Criterion {
  int id;
  const char *name;
  std::function<Outcome()> run;
};

} // namespace

int main(int argc, char **argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]\n");
      return 2;
    }
  }
  const std::vector<Criterion> all{{1, "unbiasedness", unbiasedness},
                                   {2, "diffusion_consistency", diffusion_consistency},
                                   {3, "gaussian_mixture_table", gaussian_mixture_table},
                                   {4, "kalman_equivalence", kalman_equivalence},
                                   {5, "gradient_correctness", gradient_correctness},
                                   {6, "lgssm_orderings", lgssm_orderings},
                                   {7, "parameter_estimation", parameter_estimation},
                                   {8, "timing_scaling", timing_scaling},
                                   {9, "single_particle", single_particle},
                                   {10, "sinkhorn_correctness", sinkhorn_correctness}};
  int failures = 0;
  for (const auto &c : all) {
    if (only && c.id != only)
      continue;
    std::printf("criterion %d (%s)\n", c.id, c.name);
    std::fflush(stdout);
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.summary.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
