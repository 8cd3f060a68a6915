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

#ifndef DIFFRES_NUMKIT_DISTANCE_HPP
#define DIFFRES_NUMKIT_DISTANCE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "diffres/numkit/matrix.hpp"

namespace diffres {

/// 1-d Wasserstein-1 between two weighted point sets (weights sum to one).
double w1_1d(std::span<const double> a, std::span<const double> wa, std::span<const double> b,
             std::span<const double> wb);

/// 1-d Wasserstein-1 between two uniformly weighted point sets.
double w1_1d(std::span<const double> a, std::span<const double> b);

/// Unit directions from normalised standard Gaussians, one per row.
Matrix<double> random_directions(std::size_t d, std::size_t n_proj, std::uint64_t seed);

/**
 * Sliced W1 with Gaussian-normalised projections drawn from `seed`.
 * Empty weight vectors mean uniform weights; otherwise the weights are
 * normalised probabilities (not logs).
 */
double sliced_w1(const Matrix<double> &a, const Matrix<double> &b, std::size_t n_proj, std::uint64_t seed,
                 std::span<const double> wa = {}, std::span<const double> wb = {});

} // namespace diffres

#endif // DIFFRES_NUMKIT_DISTANCE_HPP
