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


#include "diffres/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace diffres {

namespace {

using Schema = std::vector<std::pair<std::string, std::string>>;

const char *kLgssmResamplers = "multinomial; soft:alpha=0.9; gumbel:tau=0.1; ot:eps=0.8; ot:eps=0.8,relative=1; "
                               "diffusion:T=3,K=8";

Schema common(Schema extra) {
  Schema s{{"seed", "0"}, {"runs", "20"}, {"threads", "1"}};
  s.insert(s.end(), extra.begin(), extra.end());
  return s;
}

Schema lgssm_base(const char *resamplers) {
  return {{"theta1", "0.5"},     {"theta2", "1"},        {"dim", "2"},
          {"steps", "128"},      {"particles", "32"},    {"ess_threshold", "1"},
          {"resamplers", resamplers}};
}

const std::map<std::string, Schema> &schemas() {
  static const std::map<std::string, Schema> table = [] {
    std::map<std::string, Schema> t;
    t["gm"] = common({{"dim", "8"},
                      {"components", "5"},
                      {"particles", "10000"},
                      {"projections", "200"},
                      {"resamplers", "multinomial; soft:alpha=0.9; gumbel:tau=0.1; ot:eps=0.8; ot:eps=0.8,relative=1; "
                                     "diffusion:T=3,K=128; diffusion:T=1,K=8"}});
    auto filter = lgssm_base(kLgssmResamplers);
    filter.emplace_back("kl_direction", "true_to_empirical");
    t["lgssm-filter"] = common(filter);
    auto surface = lgssm_base(kLgssmResamplers);
    surface.emplace_back("grid", "21");
    surface.emplace_back("half_width", "0.1");
    t["lgssm-surface"] = common(surface);
    auto estimate = lgssm_base("multinomial; diffusion:T=3,K=8");
    estimate.emplace_back("gd_steps", "300");
    estimate.emplace_back("step_size", "0.005");
    estimate.emplace_back("offset", "0.5");
    estimate.emplace_back("per_step_objective", "1");
    estimate.emplace_back("divergence_factor", "10");
    t["lgssm-estimate"] = common(estimate);
    t["lgssm-estimate"][1].second = "10";
    t["lv-filter"] = common({{"alpha", "6"},
                             {"beta", "2"},
                             {"zeta", "4"},
                             {"gamma", "6"},
                             {"sigma", "0.15"},
                             {"steps", "256"},
                             {"t_end", "3"},
                             {"c0", "1"},
                             {"r0", "1"},
                             {"particles", "32"},
                             {"ess_threshold", "1"},
                             {"resamplers", "multinomial; soft:alpha=0.9; ot:eps=0.8; diffusion:T=3,K=8"}});
    t["timing"] = common({{"dim", "8"},
                          {"sizes", "128;256;512;1024;2048;4096;8192"},
                          {"k_list", "4;8;16;32"},
                          {"eps_list", "0.8;0.4;0.2;0.1"},
                          {"dt", "0.1"},
                          {"ot_relative", "1"},
                          {"ot_tol", "0.001"},
                          {"ot_iters", "5000"},
                          {"timing_size", "8192"}});
    t["convergence"] = common({{"dim", "2"},
                               {"sizes", "100;1000;10000"},
                               {"k_list", "8;128"},
                               {"horizons", "0.5;3"},
                               {"projections", "200"},
                               {"integrator", "jentzen_kloeden"},
                               {"flow", "sde"}});
    t["convergence"][1].second = "5";
    return t;
  }();
  return table;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T> T parse_number(const std::string &key, const std::string &text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::InvalidConfig, "key '" + key + "' expects a number, got '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (auto t = trim(item); !t.empty())
      out.push_back(t);
  return out;
}

} // namespace

const std::vector<std::string> &experiment_ids() {
  static const std::vector<std::string> ids{"gm",        "lgssm-filter", "lgssm-surface", "lgssm-estimate",
                                            "lv-filter", "timing",       "convergence"};
  return ids;
}

const std::vector<std::pair<std::string, std::string>> &config_schema(const std::string &experiment) {
  auto it = schemas().find(experiment);
  if (it == schemas().end())
    throw Error(ErrorCode::InvalidConfig, "unknown experiment '" + experiment + "'");
  return it->second;
}

ExperimentConfig ExperimentConfig::defaults(const std::string &experiment) {
  ExperimentConfig c;
  c.experiment_ = experiment;
  for (const auto &[k, v] : config_schema(experiment))
    c.values_[k] = v;
  return c;
}

void ExperimentConfig::set(const std::string &key, const std::string &value) {
  if (!values_.count(key))
    throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' for experiment '" + experiment_ + "'");
  values_[key] = value;
}

ExperimentConfig ExperimentConfig::parse(const std::string &text, const std::string &experiment) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string name = experiment;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(std::string_view(t).substr(0, eq));
    auto value = trim(std::string_view(t).substr(eq + 1));
    if (key == "experiment") {
      if (!experiment.empty() && value != experiment)
        throw Error(ErrorCode::InvalidConfig, "config is for '" + value + "', not '" + experiment + "'");
      name = value;
    } else {
      entries.emplace_back(key, value);
    }
  }
  if (name.empty())
    throw Error(ErrorCode::InvalidConfig, "config names no experiment");
  auto c = defaults(name);
  for (const auto &[k, v] : entries)
    c.set(k, v);
  // validate eagerly so bad values fail at load time
  c.resamplers();
  for (const auto &[k, v] : c.values_)
    if (k != "resamplers" && k != "kl_direction" && k != "integrator" && k != "flow")
      c.nums(k);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string &path, const std::string &experiment) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::InvalidConfig, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), experiment);
}

std::string ExperimentConfig::serialise() const {
  std::string out = "experiment = " + experiment_ + "\n";
  for (const auto &[k, _] : config_schema(experiment_))
    out += k + " = " + values_.at(k) + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialise()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::string &ExperimentConfig::str(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw Error(ErrorCode::InvalidConfig, "missing key '" + key + "'");
  return it->second;
}

double ExperimentConfig::num(const std::string &key) const { return parse_number<double>(key, str(key)); }

std::size_t ExperimentConfig::count(const std::string &key) const {
  return parse_number<std::size_t>(key, str(key));
}

std::uint64_t ExperimentConfig::u64(const std::string &key) const {
  return parse_number<std::uint64_t>(key, str(key));
}

std::vector<double> ExperimentConfig::nums(const std::string &key) const {
  std::vector<double> out;
  for (const auto &item : split_list(str(key)))
    out.push_back(parse_number<double>(key, item));
  return out;
}

std::vector<ResamplerSpec> ExperimentConfig::resamplers(const std::string &key) const {
  if (!values_.count(key))
    return {};
  return parse_resampler_list(str(key));
}

} // namespace diffres
