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


#include "diffres/harness/optimise.hpp"

#include <cmath>

#include "diffres/error.hpp"

namespace diffres {

GdTrace gradient_descent(const std::function<Objective(const std::vector<double> &, std::size_t)> &objective,
                         std::vector<double> theta0, std::size_t steps, double step_size, double max_norm) {
  if (!(step_size > 0.0))
    throw Error(ErrorCode::InvalidConfig, "step size must be positive");
  GdTrace trace;
  std::vector<double> theta = std::move(theta0);
  for (std::size_t k = 0; k < steps; ++k) {
    Objective f = objective(theta, k);
    if (f.gradient.size() != theta.size())
      throw Error(ErrorCode::DimensionMismatch, "gradient has the wrong length");
    double g2 = 0.0;
    for (double g : f.gradient)
      g2 += g * g;
    trace.steps.push_back({theta, f.value, std::sqrt(g2)});
    if (!std::isfinite(f.value) || !std::isfinite(g2)) {
      trace.diverged = true;
      trace.reason = "NonFiniteGradient at iteration " + std::to_string(k);
      break;
    }
    double n2 = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] -= step_size * f.gradient[i];
      n2 += theta[i] * theta[i];
    }
    if (std::sqrt(n2) > max_norm) {
      trace.diverged = true;
      trace.reason = "parameter norm exceeded bound at iteration " + std::to_string(k);
      break;
    }
  }
  trace.final_theta = theta;
  return trace;
}

} // namespace diffres
