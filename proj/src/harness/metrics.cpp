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


#include "diffres/harness/metrics.hpp"

#include <cmath>
#include <numeric>

#include "diffres/numkit/gaussian.hpp"

namespace diffres {

KlDirection parse_kl_direction(const std::string &s) {
  if (s == "true_to_empirical")
    return KlDirection::true_to_empirical;
  if (s == "empirical_to_true")
    return KlDirection::empirical_to_true;
  throw Error(ErrorCode::InvalidConfig, "unknown KL direction '" + s + "'");
}

std::string to_string(KlDirection d) {
  return d == KlDirection::true_to_empirical ? "true_to_empirical" : "empirical_to_true";
}

double filtering_kl(const SmcOutput<double> &pf, const KalmanResult<double> &kf, KlDirection dir) {
  const std::size_t steps = kf.means.rows(), d = kf.means.cols();
  if (pf.filter_means.rows() != steps || pf.filter_means.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "filter outputs have different shapes");
  double acc = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    std::vector<double> mt(d), me(d);
    Matrix<double> vt(d, d);
    for (std::size_t k = 0; k < d; ++k) {
      mt[k] = kf.means(j, k);
      me[k] = pf.filter_means(j, k);
      vt(k, k) = kf.variances[j];
    }
    auto ft = spd_eigh(vt, 0.0);
    auto fe = spd_eigh(pf.filter_covs[j]);
    acc += dir == KlDirection::true_to_empirical ? gaussian_kl(mt, ft, me, fe) : gaussian_kl(me, fe, mt, ft);
  }
  return acc / double(steps);
}

double trapezoid_2d(const std::vector<double> &values, std::size_t nx, std::size_t ny, double hx, double hy) {
  if (values.size() != nx * ny || nx < 2 || ny < 2)
    throw Error(ErrorCode::DimensionMismatch, "trapezoid grid shape");
  double acc = 0.0;
  for (std::size_t a = 0; a < nx; ++a)
    for (std::size_t b = 0; b < ny; ++b) {
      const double wa = (a == 0 || a == nx - 1) ? 0.5 : 1.0;
      const double wb = (b == 0 || b == ny - 1) ? 0.5 : 1.0;
      acc += wa * wb * values[a * ny + b];
    }
  return acc * hx * hy;
}

LinearFit linear_fit(const std::vector<double> &x, const std::vector<double> &y) {
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

double mean(const std::vector<double> &v) {
  return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double stddev(const std::vector<double> &v) {
  if (v.size() < 2)
    return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v)
    s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

} // namespace diffres
