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

#include "diffres/resample/resampler.hpp"

#include <charconv>
#include <map>

namespace diffres {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(const std::string &what) { throw Error(ErrorCode::InvalidConfig, what); }

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    bad("resampler parameter '" + std::string(key) + "' is not a finite number: '" + std::string(v) + "'");
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    bad("resampler parameter '" + std::string(key) + "' is not a count: '" + std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true")
    return true;
  if (v == "0" || v == "false")
    return false;
  bad("resampler parameter '" + std::string(key) + "' is not a boolean: '" + std::string(v) + "'");
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::map<std::string, std::string, std::less<>> parse_params(std::string_view kind, std::string_view body) {
  std::map<std::string, std::string, std::less<>> out;
  while (!body.empty()) {
    auto comma = body.find(',');
    auto item = trim(body.substr(0, comma));
    body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
    if (item.empty())
      continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos)
      bad("resampler parameter without value in '" + std::string(kind) + "': '" + std::string(item) + "'");
    auto key = std::string(trim(item.substr(0, eq)));
    if (!out.emplace(key, std::string(trim(item.substr(eq + 1)))).second)
      bad("duplicate resampler parameter '" + key + "'");
  }
  return out;
}

void reject_unknown(std::string_view kind, const std::map<std::string, std::string, std::less<>> &params,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto &[k, v] : params) {
    bool ok = false;
    for (auto a : allowed)
      ok = ok || a == k;
    if (!ok)
      bad("unknown parameter '" + k + "' for resampler '" + std::string(kind) + "'");
  }
}

} // namespace

std::string to_string(Integrator integrator) {
  switch (integrator) {
  case Integrator::euler_maruyama:
    return "euler_maruyama";
  case Integrator::lord_rougemont:
    return "lord_rougemont";
  case Integrator::jentzen_kloeden:
    return "jentzen_kloeden";
  case Integrator::tweedie:
    return "tweedie";
  }
  return "?";
}

std::string to_string(Flow flow) { return flow == Flow::sde ? "sde" : "ode"; }

ResamplerSpec parse_resampler(std::string_view text) {
  text = trim(text);
  auto colon = text.find(':');
  auto kind = trim(text.substr(0, colon));
  auto params = parse_params(kind, colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1));
  auto get = [&](std::string_view key) -> const std::string * {
    auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
  };

  if (kind == "multinomial") {
    reject_unknown(kind, params, {});
    return MultinomialSpec{};
  }
  if (kind == "soft") {
    reject_unknown(kind, params, {"alpha"});
    SoftSpec s;
    if (auto v = get("alpha"))
      s.alpha = parse_double("alpha", *v);
    if (!(s.alpha >= 0.0 && s.alpha <= 1.0))
      bad("soft alpha must lie in [0, 1]");
    return s;
  }
  if (kind == "gumbel") {
    reject_unknown(kind, params, {"tau"});
    GumbelSpec s;
    if (auto v = get("tau"))
      s.tau = parse_double("tau", *v);
    if (!(s.tau > 0.0))
      bad("gumbel tau must be positive");
    return s;
  }
  if (kind == "ot") {
    reject_unknown(kind, params, {"eps", "iters", "tol", "relative", "strict"});
    OtSpec s;
    if (auto v = get("eps"))
      s.config.epsilon = parse_double("eps", *v);
    if (auto v = get("iters"))
      s.config.max_iters = parse_count("iters", *v);
    if (auto v = get("tol"))
      s.config.tol = parse_double("tol", *v);
    if (auto v = get("relative"))
      s.config.relative_epsilon = parse_bool("relative", *v);
    if (auto v = get("strict"))
      s.config.strict = parse_bool("strict", *v);
    if (!(s.config.epsilon > 0.0) || s.config.max_iters == 0 || s.config.tol < 0.0)
      bad("ot needs eps > 0, iters >= 1 and tol >= 0");
    return s;
  }
  if (kind == "diffusion") {
    reject_unknown(kind, params, {"T", "K", "integrator", "flow", "b", "jitter", "precision", "shortcut"});
    DiffusionSpec s;
    auto &c = s.config;
    if (auto v = get("T"))
      c.T = parse_double("T", *v);
    if (auto v = get("K"))
      c.K = parse_count("K", *v);
    if (auto v = get("integrator")) {
      if (*v == "euler_maruyama" || *v == "em")
        c.integrator = Integrator::euler_maruyama;
      else if (*v == "lord_rougemont" || *v == "lr")
        c.integrator = Integrator::lord_rougemont;
      else if (*v == "jentzen_kloeden" || *v == "jk")
        c.integrator = Integrator::jentzen_kloeden;
      else if (*v == "tweedie")
        c.integrator = Integrator::tweedie;
      else
        bad("unknown diffusion integrator '" + *v + "'");
    }
    if (auto v = get("flow")) {
      if (*v == "sde")
        c.flow = Flow::sde;
      else if (*v == "ode")
        c.flow = Flow::ode;
      else
        bad("unknown diffusion flow '" + *v + "'");
    }
    if (auto v = get("b")) {
      if (*v == "matched") {
        c.b_mode = BMode{};
      } else {
        c.b_mode.matched = false;
        c.b_mode.b = parse_double("b", *v);
      }
    }
    if (auto v = get("jitter"))
      c.jitter = parse_double("jitter", *v);
    if (auto v = get("precision")) {
      if (*v == "f64")
        c.precision = KernelPrecision::f64;
      else if (*v == "f32")
        c.precision = KernelPrecision::f32;
      else
        bad("unknown kernel precision '" + *v + "'");
    }
    if (auto v = get("shortcut"))
      c.single_particle_shortcut = parse_bool("shortcut", *v);
    c.validate();
    return s;
  }
  bad("unknown resampler '" + std::string(kind) + "'");
}

std::vector<ResamplerSpec> parse_resampler_list(std::string_view text) {
  std::vector<ResamplerSpec> out;
  while (!text.empty()) {
    auto semi = text.find(';');
    auto item = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (!item.empty())
      out.push_back(parse_resampler(item));
  }
  if (out.empty())
    bad("empty resampler list");
  return out;
}

std::string format_resampler(const ResamplerSpec &spec) {
  return std::visit(
      [](const auto &s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MultinomialSpec>) {
          return "multinomial";
        } else if constexpr (std::is_same_v<T, SoftSpec>) {
          return "soft:alpha=" + fmt(s.alpha);
        } else if constexpr (std::is_same_v<T, GumbelSpec>) {
          return "gumbel:tau=" + fmt(s.tau);
        } else if constexpr (std::is_same_v<T, OtSpec>) {
          const auto &c = s.config;
          return "ot:eps=" + fmt(c.epsilon) + ",iters=" + std::to_string(c.max_iters) + ",tol=" + fmt(c.tol) +
                 ",relative=" + (c.relative_epsilon ? "1" : "0") + ",strict=" + (c.strict ? "1" : "0");
        } else {
          const auto &c = s.config;
          return "diffusion:T=" + fmt(c.T) + ",K=" + std::to_string(c.K) + ",integrator=" + to_string(c.integrator) +
                 ",flow=" + to_string(c.flow) + ",b=" + (c.b_mode.matched ? std::string("matched") : fmt(c.b_mode.b)) +
                 ",jitter=" + fmt(c.jitter) + ",precision=" + (c.precision == KernelPrecision::f32 ? "f32" : "f64") +
                 ",shortcut=" + (c.single_particle_shortcut ? "1" : "0");
        }
      },
      spec);
}

std::string resampler_label(const ResamplerSpec &spec) {
  return std::visit(
      [](const auto &s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MultinomialSpec>) {
          return "multinomial";
        } else if constexpr (std::is_same_v<T, SoftSpec>) {
          return "soft(" + fmt(s.alpha) + ")";
        } else if constexpr (std::is_same_v<T, GumbelSpec>) {
          return "gumbel(" + fmt(s.tau) + ")";
        } else if constexpr (std::is_same_v<T, OtSpec>) {
          return std::string("ot(") + (s.config.relative_epsilon ? "rel_eps=" : "eps=") + fmt(s.config.epsilon) + ")";
        } else {
          const auto &c = s.config;
          std::string out = "diffusion(T=" + fmt(c.T) + ",K=" + std::to_string(c.K);
          if (c.integrator != Integrator::jentzen_kloeden)
            out += "," + to_string(c.integrator);
          if (c.flow != Flow::sde)
            out += ",ode";
          if (!c.b_mode.matched)
            out += ",b=" + fmt(c.b_mode.b);
          return out + ")";
        }
      },
      spec);
}

} // namespace diffres
