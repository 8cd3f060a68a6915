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

#ifndef DIFFRES_ERROR_HPP
#define DIFFRES_ERROR_HPP

#include <stdexcept>
#include <string>

namespace diffres {

enum class ErrorCode {
  NonSymmetric,
  NonPositive,
  DimensionMismatch,
  EmptyInput,
  InvalidRate,
  DegenerateWeights,
  DomainError,
  NonPositiveTime,
  InvalidConfig,
  NotConverged,
  AllParticlesDead,
  DegeneratePosterior,
  Blowup,
  NonFiniteGradient,
};

inline const char *to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::NonSymmetric: return "NonSymmetric";
  case ErrorCode::NonPositive: return "NonPositive";
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::EmptyInput: return "EmptyInput";
  case ErrorCode::InvalidRate: return "InvalidRate";
  case ErrorCode::DegenerateWeights: return "DegenerateWeights";
  case ErrorCode::DomainError: return "DomainError";
  case ErrorCode::NonPositiveTime: return "NonPositiveTime";
  case ErrorCode::InvalidConfig: return "InvalidConfig";
  case ErrorCode::NotConverged: return "NotConverged";
  case ErrorCode::AllParticlesDead: return "AllParticlesDead";
  case ErrorCode::DegeneratePosterior: return "DegeneratePosterior";
  case ErrorCode::Blowup: return "Blowup";
  case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace diffres

#endif // DIFFRES_ERROR_HPP
