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

#include "dpq/api.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace dpq {
namespace {

ApiResponse Error(int status, std::string message) {
  return {status, {{"error", std::move(message)}}};
}

int HttpStatus(const absl::Status& s) {
  switch (s.code()) {
    case absl::StatusCode::kNotFound: return 404;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange: return 400;
    default: return 500;
  }
}

// inf is not representable in JSON.
nlohmann::json Finite(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

absl::StatusOr<std::vector<std::string>> ParseAttrs(const Engine& engine,
                                                    const std::string& attrs) {
  std::vector<std::string> names =
      absl::StrSplit(attrs, ',', absl::SkipWhitespace());
  if (names.empty()) return absl::InvalidArgumentError("attrs is empty");
  for (const std::string& n : names) {
    if (engine.schema().Find(n) == nullptr) {
      return absl::NotFoundError(absl::StrCat("unknown attribute ", n));
    }
  }
  return CanonicalAttributes(names);
}

}  // namespace

nlohmann::json OutcomeJson(const Outcome& outcome) {
  if (const auto* a = std::get_if<Answered>(&outcome)) {
    return {{"id", a->id},
            {"responses", a->responses},
            {"epsilon", a->epsilon},
            {"mechanism", MechanismName(a->mechanism)},
            {"free_rows", a->free_rows},
            {"paid_rows", a->paid_rows},
            {"proactive_rows", a->proactive_rows},
            {"timestamp", a->timestamp},
            {"estimates",
             {{"mmm", Finite(a->estimates.mmm)},
              {"se", Finite(a->estimates.se)},
              {"rp", Finite(a->estimates.rp)},
              {"cacheless", Finite(a->estimates.cacheless)}}}};
  }
  const auto& r = std::get<Rejected>(outcome);
  return {{"id", r.id},
          {"required_epsilon", r.required_epsilon},
          {"remaining_budget", r.remaining_budget},
          {"mechanism", MechanismName(r.mechanism)}};
}

ApiResponse HandleWorkload(Engine& engine, const std::string& body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) return Error(400, "body is not valid JSON");
  absl::StatusOr<WorkloadRequest> req = WorkloadRequest::FromJson(j);
  if (!req.ok()) return Error(400, std::string(req.status().message()));
  for (const std::string& a : req->attributes) {
    if (engine.schema().Find(a) == nullptr) {
      return Error(400, absl::StrCat("unknown attribute ", a));
    }
  }
  absl::StatusOr<Outcome> out = engine.ProcessWorkload(*req);
  if (!out.ok()) {
    int code = HttpStatus(out.status());
    return Error(code == 404 ? 400 : code, std::string(out.status().message()));
  }
  return {std::holds_alternative<Answered>(*out) ? 200 : 409, OutcomeJson(*out)};
}

ApiResponse HandleBudget(const Engine& engine) {
  const BudgetLedger& l = engine.ledger();
  nlohmann::json hist = nlohmann::json::array();
  for (const LedgerEntry& e : l.entries()) {
    if (!e.accepted) continue;
    hist.push_back({{"id", e.id},
                    {"mechanism", MechanismName(e.mechanism)},
                    {"epsilon", e.epsilon}});
  }
  return {200,
          {{"total", l.total()},
           {"consumed", l.consumed()},
           {"remaining", l.remaining()},
           {"history", hist}}};
}

ApiResponse HandleTree(Engine& engine, const std::string& attrs) {
  absl::StatusOr<std::vector<std::string>> names = ParseAttrs(engine, attrs);
  if (!names.ok()) return Error(HttpStatus(names.status()), std::string(names.status().message()));
  absl::StatusOr<std::shared_ptr<const View>> view = engine.GetView(*names);
  if (!view.ok()) return Error(HttpStatus(view.status()), std::string(view.status().message()));
  return {200, (*view)->TreeJson()};
}

ApiResponse HandleCacheStats(Engine& engine, const std::string& attrs) {
  absl::StatusOr<std::vector<std::string>> names = ParseAttrs(engine, attrs);
  if (!names.ok()) return Error(HttpStatus(names.status()), std::string(names.status().message()));
  if (const StrategyCache* c = engine.FindCache(*names)) return {200, c->Stats()};
  absl::StatusOr<std::shared_ptr<const View>> view = engine.GetView(*names);
  if (!view.ok()) return Error(HttpStatus(view.status()), std::string(view.status().message()));
  return {200, StrategyCache((*view)->node_count()).Stats()};
}

ApiResponse HandleReset(Engine& engine, const std::string& body) {
  nlohmann::json j = body.empty() ? nlohmann::json::object()
                                  : nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return Error(400, "body is not a JSON object");
  try {
    const uint64_t seed = j.value("seed", engine.config().seed);
    const double total = j.value("total_budget", engine.config().total_budget);
    if (!(total >= 0)) return Error(400, "total_budget < 0");
    engine.Reset(seed, total);
  } catch (const nlohmann::json::exception& e) {
    return Error(400, e.what());
  }
  return HandleBudget(engine);
}

}  // namespace dpq
