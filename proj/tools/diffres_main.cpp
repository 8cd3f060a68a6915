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


#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <iostream>

#include "diffres/harness/experiments.hpp"

int main(int argc, char **argv) {
  CLI::App app{"diffres: differentiable resampling experiments"};
  std::string experiment, config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs, threads;
  std::vector<std::string> overrides;
  bool dump = false;

  std::string ids;
  for (const auto &id : diffres::experiment_ids())
    ids += (ids.empty() ? "" : ", ") + id;
  app.add_option("experiment", experiment, "one of: " + ids)->required();
  app.add_option("--config", config_path, "flat key = value config file; defaults when omitted");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out", out_path, "CSV output path (stdout when omitted)");
  app.add_option("--runs", runs, "number of independent runs");
  app.add_option("--threads", threads, "worker threads across runs");
  app.add_option("--set", overrides, "override a config key: key=value (repeatable)");
  app.add_flag("--dump-config", dump, "print the effective config and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = config_path.empty() ? diffres::ExperimentConfig::defaults(experiment)
                                   : diffres::ExperimentConfig::load(config_path, experiment);
    for (const auto &kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw diffres::Error(diffres::ErrorCode::InvalidConfig, "--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed)
      cfg.set("seed", std::to_string(*seed));
    if (runs)
      cfg.set("runs", std::to_string(*runs));
    if (threads)
      cfg.set("threads", std::to_string(*threads));
    // re-validate after overrides
    cfg = diffres::ExperimentConfig::parse(cfg.serialise());
    if (dump) {
      std::cout << cfg.serialise();
      return 0;
    }
    auto result = diffres::run_experiment(cfg);
    if (out_path.empty()) {
      diffres::write_csv(std::cout, cfg, result);
    } else {
      std::ofstream out(out_path);
      if (!out)
        throw diffres::Error(diffres::ErrorCode::InvalidConfig, "cannot write '" + out_path + "'");
      diffres::write_csv(out, cfg, result);
    }
  } catch (const diffres::Error &e) {
    std::cerr << "diffres: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
