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

#include "diffres/resample/diffusion.hpp"

namespace diffres {

double final_step_variance(const DiffusionConfig &cfg, double a) {
  if (cfg.flow == Flow::ode)
    return 0.0;
  const double dt = cfg.T / double(cfg.K);
  switch (cfg.integrator) {
  case Integrator::euler_maruyama:
    return 2.0 * a * dt;
  case Integrator::jentzen_kloeden:
    return std::expm1(2.0 * a * dt);
  case Integrator::lord_rougemont:
    return 2.0 * a * dt * std::exp(2.0 * a * dt);
  case Integrator::tweedie:
    return 0.0;
  }
  return 0.0;
}

} // namespace diffres
