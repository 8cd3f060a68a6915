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


#ifndef DIFFRES_HARNESS_CONFIG_HPP
#define DIFFRES_HARNESS_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diffres/resample/resampler.hpp"

namespace diffres {

/// Experiment ids accepted by the harness.
const std::vector<std::string> &experiment_ids();

/// Keys and defaults accepted by one experiment, in documentation order.
const std::vector<std::pair<std::string, std::string>> &config_schema(const std::string &experiment);

/**
 * Flat `key = value` configuration. Lines starting with '#' are comments.
 * Every key of the experiment's schema is present after parsing; unknown
 * keys are rejected.
 */
class ExperimentConfig {
public:
  static ExperimentConfig defaults(const std::string &experiment);
  static ExperimentConfig parse(const std::string &text, const std::string &experiment = "");
  static ExperimentConfig load(const std::string &path, const std::string &experiment = "");

  const std::string &experiment() const { return experiment_; }
  void set(const std::string &key, const std::string &value);

  std::string serialise() const;
  std::uint64_t hash() const;

  const std::string &str(const std::string &key) const;
  double num(const std::string &key) const;
  std::size_t count(const std::string &key) const;
  std::uint64_t u64(const std::string &key) const;
  std::vector<double> nums(const std::string &key) const;
  std::vector<ResamplerSpec> resamplers(const std::string &key = "resamplers") const;

  bool operator==(const ExperimentConfig &o) const = default;

private:
  std::string experiment_;
  std::map<std::string, std::string> values_;
};

} // namespace diffres

#endif // DIFFRES_HARNESS_CONFIG_HPP
