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

#include "dpq/accuracy.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpq {

absl::StatusOr<AccuracyRequirement> AccuracyRequirement::WorstError(
    double alpha, double beta) {
  if (!(alpha > 0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError("alpha must be positive");
  }
  if (!(beta > 0 && beta < 1)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1)");
  }
  return AccuracyRequirement(Kind::kWorstError, alpha, beta);
}

absl::StatusOr<AccuracyRequirement> AccuracyRequirement::ExpectedSquaredError(
    double alpha_squared) {
  if (!(alpha_squared > 0) || !std::isfinite(alpha_squared)) {
    return absl::InvalidArgumentError("alpha_squared must be positive");
  }
  return AccuracyRequirement(Kind::kExpectedSquaredError,
                             std::sqrt(alpha_squared), 0.0);
}

absl::StatusOr<AccuracyRequirement> AccuracyRequirement::FromJson(
    const nlohmann::json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("accuracy must be an object");
  }
  std::string kind = j.value("kind", "worst");
  try {
    if (kind == "worst") {
      if (!j.contains("alpha") || !j.contains("beta")) {
        return absl::InvalidArgumentError("worst accuracy needs alpha, beta");
      }
      return WorstError(j["alpha"].get<double>(), j["beta"].get<double>());
    }
    if (kind == "squared") {
      if (j.contains("alpha_squared")) {
        return ExpectedSquaredError(j["alpha_squared"].get<double>());
      }
      if (j.contains("alpha")) {
        double a = j["alpha"].get<double>();
        return ExpectedSquaredError(a * a);
      }
      return absl::InvalidArgumentError("squared accuracy needs alpha_squared");
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad accuracy field: ", e.what()));
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown accuracy kind ", kind));
}

nlohmann::json AccuracyRequirement::ToJson() const {
  if (is_worst()) return {{"kind", "worst"}, {"alpha", alpha_}, {"beta", beta_}};
  return {{"kind", "squared"}, {"alpha_squared", alpha_squared()}};
}

bool AccuracyRequirement::IsLooserOrEqual(
    const AccuracyRequirement& other) const {
  if (kind_ != other.kind_) return false;
  if (is_worst()) return alpha_ >= other.alpha_ && beta_ >= other.beta_;
  return alpha_ >= other.alpha_;
}

std::string AccuracyRequirement::DebugString() const {
  if (is_worst()) return absl::StrCat("worst(alpha=", alpha_, ", beta=", beta_, ")");
  return absl::StrCat("squared(alpha^2=", alpha_squared(), ")");
}

}  // namespace dpq
