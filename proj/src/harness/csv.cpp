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


#include <atomic>
#include <charconv>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "diffres/harness/experiments.hpp"

#ifndef DIFFRES_GIT_REV
#define DIFFRES_GIT_REV "unknown"
#endif

namespace diffres {

std::string build_revision() { return DIFFRES_GIT_REV; }

std::string format_value(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace

std::vector<double> ExperimentResult::values(const std::string &resampler, const std::string &metric) const {
  std::vector<double> out;
  for (const auto &r : rows)
    if (r.resampler == resampler && r.metric == metric)
      out.push_back(r.value);
  return out;
}

std::string ExperimentResult::meta_value(const std::string &key) const {
  for (const auto &[k, v] : meta)
    if (k == key)
      return v;
  return {};
}

void write_csv(std::ostream &out, const ExperimentConfig &cfg, const ExperimentResult &result) {
  std::ostringstream hash;
  hash << std::hex << cfg.hash();
  out << "# experiment=" << cfg.experiment() << "\n";
  out << "# config_hash=" << hash.str() << "\n";
  out << "# git_revision=" << build_revision() << "\n";
  for (const auto &[k, v] : config_schema(cfg.experiment()))
    out << "# config." << k << "=" << cfg.str(k) << "\n";
  for (const auto &[k, v] : result.meta)
    out << "# " << k << "=" << v << "\n";
  out << "run,seed,resampler,metric,value,iterations,wall_ns,marginal_error\n";
  for (const auto &r : result.rows)
    out << r.run << ',' << r.seed << ',' << csv_field(r.resampler) << ',' << csv_field(r.metric) << ','
        << format_value(r.value) << ',' << format_value(r.iterations) << ',' << format_value(r.wall_ns) << ','
        << format_value(r.marginal_error) << '\n';
}

std::vector<MetricRow> for_each_run(std::size_t runs, std::size_t threads,
                                    const std::function<std::vector<MetricRow>(std::size_t)> &fn) {
  std::vector<std::vector<MetricRow>> per(runs);
  std::vector<std::exception_ptr> errors(runs);
  if (threads <= 1 || runs <= 1) {
    for (std::size_t r = 0; r < runs; ++r)
      per[r] = fn(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, runs); ++t)
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < runs; r = next++) {
          try {
            per[r] = fn(r);
          } catch (...) {
            errors[r] = std::current_exception();
          }
        }
      });
    for (auto &th : pool)
      th.join();
    for (auto &e : errors)
      if (e)
        std::rethrow_exception(e);
  }
  std::vector<MetricRow> rows;
  for (auto &p : per)
    rows.insert(rows.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig &cfg) {
  const std::string &id = cfg.experiment();
  if (id == "gm")
    return exp_gm(cfg);
  if (id == "lgssm-filter")
    return exp_lgssm_filter(cfg);
  if (id == "lgssm-surface")
    return exp_lgssm_surface(cfg);
  if (id == "lgssm-estimate")
    return exp_lgssm_estimate(cfg);
  if (id == "lv-filter")
    return exp_lv_filter(cfg);
  if (id == "timing")
    return exp_timing(cfg);
  if (id == "convergence")
    return exp_convergence(cfg);
  throw Error(ErrorCode::InvalidConfig, "unknown experiment '" + id + "'");
}

} // namespace diffres
