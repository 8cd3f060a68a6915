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

#ifndef DIFFRES_RESAMPLE_RESAMPLER_HPP
#define DIFFRES_RESAMPLE_RESAMPLER_HPP

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "diffres/resample/basic.hpp"
#include "diffres/resample/diffusion.hpp"
#include "diffres/resample/ot.hpp"

namespace diffres {

struct MultinomialSpec {};
struct SoftSpec {
  double alpha = 0.9;
};
struct GumbelSpec {
  double tau = 0.1;
};
struct OtSpec {
  OtConfig config;
};
struct DiffusionSpec {
  DiffusionConfig config;
};

using ResamplerSpec = std::variant<MultinomialSpec, SoftSpec, GumbelSpec, OtSpec, DiffusionSpec>;

/// Auxiliary outcome of a resampling call (Sinkhorn iterations and marginal error).
struct ResampleInfo {
  std::size_t iterations = 0;
  double marginal_error = std::numeric_limits<double>::quiet_NaN();
  bool converged = true;
};

/**
 * Parses "multinomial", "soft:alpha=0.9", "gumbel:tau=0.1",
 * "ot:eps=0.8,iters=1000,tol=1e-3,relative=0,strict=0" or
 * "diffusion:T=3,K=128,integrator=jentzen_kloeden,flow=sde,b=matched".
 * Omitted parameters keep their defaults.
 */
ResamplerSpec parse_resampler(std::string_view text);

/// Semicolon-separated list of resampler specs.
std::vector<ResamplerSpec> parse_resampler_list(std::string_view text);

/// Canonical text form; parse_resampler(format_resampler(s)) reproduces s.
std::string format_resampler(const ResamplerSpec &spec);

/// Short label for reports, e.g. "diffusion(T=3,K=128)".
std::string resampler_label(const ResamplerSpec &spec);

std::string to_string(Integrator integrator);
std::string to_string(Flow flow);

/// Soft resampling returns non-uniform weights that SMC keeps.
inline bool keeps_weights(const ResamplerSpec &spec) { return std::holds_alternative<SoftSpec>(spec); }

template <class S>
WeightedEnsemble<S> resample(const WeightedEnsemble<S> &e, const ResamplerSpec &spec, RngStream &rng,
                             ResampleInfo *info = nullptr) {
  return std::visit(
      [&](const auto &s) -> WeightedEnsemble<S> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MultinomialSpec>) {
          return multinomial_resample(e, rng);
        } else if constexpr (std::is_same_v<T, SoftSpec>) {
          return soft_resample(e, s.alpha, rng);
        } else if constexpr (std::is_same_v<T, GumbelSpec>) {
          return gumbel_softmax_resample(e, s.tau, rng);
        } else if constexpr (std::is_same_v<T, OtSpec>) {
          SinkhornReport report;
          auto out = ot_resample(e, s.config, &report);
          if (info) {
            info->iterations = report.iterations;
            info->marginal_error = report.marginal_error;
            info->converged = report.converged;
          }
          return out;
        } else {
          return diffusion_resample(e, s.config, rng);
        }
      },
      spec);
}

} // namespace diffres

#endif // DIFFRES_RESAMPLE_RESAMPLER_HPP
