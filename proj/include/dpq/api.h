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

#ifndef DPQ_API_H_
#define DPQ_API_H_

#include <string>

#include "dpq/engine.h"
#include "json.hpp"

namespace dpq {

// Transport-independent HTTP handlers. The caller serializes access to the
// engine; none of these ever put a true count in a body.
struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

nlohmann::json OutcomeJson(const Outcome& outcome);

// POST /workload
ApiResponse HandleWorkload(Engine& engine, const std::string& body);
// GET /budget
ApiResponse HandleBudget(const Engine& engine);
// GET /tree?attrs=a,b
ApiResponse HandleTree(Engine& engine, const std::string& attrs);
// GET /cache/stats?attrs=a,b
ApiResponse HandleCacheStats(Engine& engine, const std::string& attrs);
// POST /reset {"seed":..,"total_budget":..}; both optional.
ApiResponse HandleReset(Engine& engine, const std::string& body);

}  // namespace dpq

#endif  // DPQ_API_H_
