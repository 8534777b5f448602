//
// Copyright 2026 The dpq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPQ_ACCURACY_H_
#define DPQ_ACCURACY_H_

#include <string>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace dpq {

// Either an (alpha, beta) bound on the worst absolute error of a workload
// response, or a bound alpha^2 on its expected total squared error.
class AccuracyRequirement {
 public:
  enum class Kind { kWorstError, kExpectedSquaredError };

  // Worst error with alpha = 1, beta = 0.05; meant to be overwritten.
  AccuracyRequirement() : AccuracyRequirement(Kind::kWorstError, 1.0, 0.05) {}

  static absl::StatusOr<AccuracyRequirement> WorstError(double alpha,
                                                        double beta);
  static absl::StatusOr<AccuracyRequirement> ExpectedSquaredError(
      double alpha_squared);

  // {"kind":"worst","alpha":..,"beta":..} or
  // {"kind":"squared","alpha_squared":..}.
  static absl::StatusOr<AccuracyRequirement> FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;

  Kind kind() const { return kind_; }
  bool is_worst() const { return kind_ == Kind::kWorstError; }
  // For squared requirements alpha() is sqrt(alpha_squared) and beta() is 0.
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double alpha_squared() const { return alpha_ * alpha_; }

  // True when every response meeting `other` also meets this requirement.
  bool IsLooserOrEqual(const AccuracyRequirement& other) const;

  std::string DebugString() const;

 private:
  AccuracyRequirement(Kind kind, double alpha, double beta)
      : kind_(kind), alpha_(alpha), beta_(beta) {}

  Kind kind_;
  double alpha_;
  double beta_;
};

}  // namespace dpq

#endif  // DPQ_ACCURACY_H_
