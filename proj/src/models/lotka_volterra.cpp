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


#include "diffres/models/lotka_volterra.hpp"

namespace diffres {

LvData lv_simulate_milstein(const LvParams<double> &p, RngStream &rng) {
  p.validate();
  LvData data{Matrix<double>(p.steps + 1, 2), Matrix<double>(p.steps + 1, 2)};
  double c = p.c0, r = p.r0;
  const double sq = std::sqrt(p.dt);
  for (std::size_t j = 0; j <= p.steps; ++j) {
    if (j > 0) {
      const double dw1 = sq * rng.normal();
      const double dw2 = sq * rng.normal();
      auto z = lv_milstein_step(p, c, r, dw1, dw2, p.dt, j);
      c = z[0];
      r = z[1];
    }
    data.states(j, 0) = c;
    data.states(j, 1) = r;
    auto lam = lv_rate(c, r);
    data.obs(j, 0) = double(draw_poisson(rng, lam[0]));
    data.obs(j, 1) = double(draw_poisson(rng, lam[1]));
  }
  return data;
}

} // namespace diffres
