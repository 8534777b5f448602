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

#ifndef DPQ_MMM_H_
#define DPQ_MMM_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "dpq/accuracy.h"
#include "dpq/cache.h"
#include "dpq/calibration.h"
#include "dpq/laplace.h"
#include "dpq/strategy.h"

namespace dpq {

// Split of a strategy into rows reused from the cache and rows perturbed
// afresh at one shared scale.
struct CostPlan {
  std::vector<size_t> free_rows;  // indices into the strategy
  std::vector<size_t> paid_rows;
  Eigen::VectorXd scales;         // per strategy row
  double paid_scale = 0;          // b_P; meaningful only if paid_rows non-empty
  double epsilon = 0;             // ||P||_1 / b_P
  int64_t paid_norm = 0;
  double loose_bound = 0;

  bool is_free() const { return paid_rows.empty(); }
};

struct MmmOptions {
  double phi = 1e-4;  // smallest chargeable budget
  MCConfig mc;
  // Up to this many discrete candidates are scanned linearly from the
  // largest; longer lists are bisected.
  int linear_scan_limit = 16;
};

// Cached scale of every strategy row, nullopt for rows not in the cache.
std::vector<std::optional<double>> CachedScales(const StrategyMatrix& a,
                                                const StrategyCache* cache);

// Discrete search over cached scales for the free set, then a continuous
// search for the paid scale with that free set held fixed.
CostPlan CacheAwareSearch(const PreparedStrategy& s,
                          const std::vector<std::optional<double>>& cached,
                          const AccuracyRequirement& req,
                          const MmmOptions& opts);

// Cheapest plan found by a discrete search over cached scales followed by a
// continuous search for the paid scale with the free set held fixed. Never
// more expensive than CachelessBudget with the same Monte-Carlo seed; pass
// that plan in `cacheless` when it is already known.
CostPlan EstimatePrivacyBudget(const PreparedStrategy& s,
                               const std::vector<std::optional<double>>& cached,
                               const AccuracyRequirement& req,
                               const MmmOptions& opts,
                               const CostPlan* cacheless = nullptr);

// The same search against an empty cache.
CostPlan CachelessBudget(const PreparedStrategy& s,
                         const AccuracyRequirement& req, const MmmOptions& opts);

struct MechanismAnswer {
  Eigen::VectorXd responses;  // one per workload query
  double epsilon = 0;
  uint64_t timestamp = 0;     // write event, 0 when nothing was written
  std::vector<NodeKey> proactive;
};

// Draws fresh noise for the paid rows, writes them to the cache, reuses the
// cached responses of the free rows and reconstructs the workload answer.
// When `pq_view` is given, zero-cost proactive rows are perturbed and cached
// alongside the paid ones but do not enter the response.
absl::StatusOr<MechanismAnswer> AnswerWorkload(const PreparedStrategy& s,
                                               const CostPlan& plan,
                                               const DataVector& x,
                                               StrategyCache& cache, Rng& rng,
                                               const View* pq_view = nullptr);

}  // namespace dpq

#endif  // DPQ_MMM_H_
