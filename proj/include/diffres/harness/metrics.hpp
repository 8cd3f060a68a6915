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


#ifndef DIFFRES_HARNESS_METRICS_HPP
#define DIFFRES_HARNESS_METRICS_HPP

#include <string>
#include <vector>

#include "diffres/models/lgssm.hpp"
#include "diffres/smc/smc.hpp"

namespace diffres {

enum class KlDirection { true_to_empirical, empirical_to_true };

KlDirection parse_kl_direction(const std::string &s);
std::string to_string(KlDirection d);

/// Mean over steps of the KL between the Kalman filter and the moment-matched particle filter.
double filtering_kl(const SmcOutput<double> &pf, const KalmanResult<double> &kf,
                    KlDirection dir = KlDirection::true_to_empirical);

/// Two-dimensional trapezoid rule on a uniform grid (values row-major, nx x ny).
double trapezoid_2d(const std::vector<double> &values, std::size_t nx, std::size_t ny, double hx, double hy);

/// Ordinary least squares y = a + b x; returns {a, b, r2}.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double> &x, const std::vector<double> &y);

double mean(const std::vector<double> &v);
double stddev(const std::vector<double> &v);

} // namespace diffres

#endif // DIFFRES_HARNESS_METRICS_HPP
