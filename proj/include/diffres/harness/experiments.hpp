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


#ifndef DIFFRES_HARNESS_EXPERIMENTS_HPP
#define DIFFRES_HARNESS_EXPERIMENTS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "diffres/harness/config.hpp"
#include "diffres/models/gaussian_mixture.hpp"
#include "diffres/models/lgssm.hpp"
#include "diffres/numkit/ensemble.hpp"

namespace diffres {

struct MetricRow {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::string resampler;
  std::string metric;
  double value = std::numeric_limits<double>::quiet_NaN();
  double iterations = std::numeric_limits<double>::quiet_NaN();
  double wall_ns = std::numeric_limits<double>::quiet_NaN();
  double marginal_error = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<MetricRow> rows;

  /// Values of one (resampler, metric) pair in run order.
  std::vector<double> values(const std::string &resampler, const std::string &metric) const;
  std::string meta_value(const std::string &key) const;
};

ExperimentResult exp_gm(const ExperimentConfig &cfg);
ExperimentResult exp_lgssm_filter(const ExperimentConfig &cfg);
ExperimentResult exp_lgssm_surface(const ExperimentConfig &cfg);
ExperimentResult exp_lgssm_estimate(const ExperimentConfig &cfg);
ExperimentResult exp_lv_filter(const ExperimentConfig &cfg);
ExperimentResult exp_timing(const ExperimentConfig &cfg);
ExperimentResult exp_convergence(const ExperimentConfig &cfg);
ExperimentResult run_experiment(const ExperimentConfig &cfg);

void write_csv(std::ostream &out, const ExperimentConfig &cfg, const ExperimentResult &result);
std::string format_value(double v);
std::string build_revision();

/// Runs fn(run) for run = 0..runs-1 on up to `threads` workers; rows come back in run order.
std::vector<MetricRow> for_each_run(std::size_t runs, std::size_t threads,
                                    const std::function<std::vector<MetricRow>(std::size_t)> &fn);

/// Prior draws weighted by the observation likelihood of a mixture problem.
WeightedEnsemble<double> gm_importance_ensemble(const GmFixture &fx, std::size_t n, RngStream &rng);

/// Conjugate Gaussian problem: prior N(0, I_d), y = 1'x + N(0, 1) drawn from the prior predictive.
GmFixture gaussian_fixture(std::size_t d, RngStream &rng);

/**
 * Gaussian target N(m 1, s2 I) represented by proposal N(0, I) draws with
 * importance weights; exact_gaussian_target draws from the target itself.
 */
struct GaussianTarget {
  double m = 0.5;
  double s2 = 0.6;
};
WeightedEnsemble<double> weighted_gaussian_target(const GaussianTarget &t, std::size_t n, std::size_t d,
                                                  RngStream &rng);
Matrix<double> exact_gaussian_target(const GaussianTarget &t, std::size_t n, std::size_t d, RngStream &rng);

/// Kalman and particle log-likelihood surfaces over a square grid around (theta1, theta2).
struct SurfaceGrid {
  std::vector<double> theta1, theta2;
  std::vector<double> kalman; // row-major over (theta1, theta2)
};
SurfaceGrid kalman_surface(const LgssmParams<double> &p, const Matrix<double> &obs, std::size_t grid,
                           double half_width);

} // namespace diffres

#endif // DIFFRES_HARNESS_EXPERIMENTS_HPP
