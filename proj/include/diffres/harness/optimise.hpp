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


#ifndef DIFFRES_HARNESS_OPTIMISE_HPP
#define DIFFRES_HARNESS_OPTIMISE_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace diffres {

struct Objective {
  double value = 0.0;
  std::vector<double> gradient;
};

struct GdStep {
  std::vector<double> theta;
  double value = 0.0;
  double grad_norm = 0.0;
};

struct GdTrace {
  std::vector<GdStep> steps;
  std::vector<double> final_theta;
  bool diverged = false;
  std::string reason;
};

/**
 * Fixed-step gradient descent theta <- theta - step * g. The objective gets
 * the iteration index so callers can refresh their randomness. Stops and
 * flags divergence on a non-finite value or gradient, or when |theta|
 * exceeds max_norm.
 */
GdTrace gradient_descent(const std::function<Objective(const std::vector<double> &, std::size_t)> &objective,
                         std::vector<double> theta0, std::size_t steps, double step_size,
                         double max_norm = std::numeric_limits<double>::infinity());

} // namespace diffres

#endif // DIFFRES_HARNESS_OPTIMISE_HPP
