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


#include "diffres/models/lgssm.hpp"

namespace diffres {

LgssmData lgssm_simulate(const LgssmParams<double> &p, std::size_t J, RngStream &rng) {
  p.validate();
  if (J < 1)
    throw Error(ErrorCode::InvalidConfig, "need at least one transition");
  const std::size_t d = p.dim;
  LgssmData data{Matrix<double>(J + 1, d), Matrix<double>(J + 1, d)};
  const double sq = std::sqrt(p.q), sr = std::sqrt(p.r);
  for (std::size_t j = 0; j <= J; ++j)
    for (std::size_t k = 0; k < d; ++k) {
      data.states(j, k) = j == 0 ? rng.normal() : p.theta1 * data.states(j - 1, k) + sq * rng.normal();
      data.obs(j, k) = p.theta2 * data.states(j, k) + sr * rng.normal();
    }
  return data;
}

} // namespace diffres
