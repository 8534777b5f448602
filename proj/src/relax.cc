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

#include "dpq/relax.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpq {

double NoiseDown(double old_noise, double old_scale, double new_scale,
                 Rng& rng) {
  if (new_scale >= old_scale) return old_noise;
  const double e1 = 1.0 / old_scale;
  const double e2 = 1.0 / new_scale;
  const double sign = old_noise < 0 ? -1.0 : 1.0;
  const double w1 = std::abs(old_noise);
  if (OpenUniform(rng) < (e1 / e2) * std::exp(-(e2 - e1) * w1)) return old_noise;

  // Continuous part for w1 >= 0, split at 0 and w1:
  //   w < 0:       exp(-e1 w1) exp((e1+e2) w)
  //   0 <= w <= w1: exp(-e1 w1) exp(-(e2-e1) w)
  //   w > w1:      exp(e1 w1) exp(-(e1+e2) w)
  const double d = e2 - e1;
  const double s = e1 + e2;
  const double left = std::exp(-e1 * w1) / s;
  const double middle = std::exp(-e1 * w1) * (-std::expm1(-d * w1)) / d;
  const double right = std::exp(-e2 * w1) / s;
  const double pick = OpenUniform(rng) * (left + middle + right);
  const double u = OpenUniform(rng);
  double w;
  if (pick < left) {
    w = std::log(u) / s;
  } else if (pick < left + middle) {
    w = -std::log1p(u * std::expm1(-d * w1)) / d;
  } else {
    w = w1 - std::log(u) / s;
  }
  return sign * w;
}

std::optional<RelaxPlan> EstimateRelax(const View& view,
                                       const StrategyMatrix& a,
                                       const StrategyCache& cache,
                                       double target_scale) {
  std::vector<NodeKey> need = a.Keys();
  std::sort(need.begin(), need.end());
  std::optional<RelaxPlan> best;
  for (const CacheGroup& g : cache.GroupByTimestamp()) {
    if (!std::includes(g.keys.begin(), g.keys.end(), need.begin(), need.end())) {
      continue;
    }
    std::vector<IndexSet> regions;
    regions.reserve(g.keys.size());
    for (NodeKey k : g.keys) regions.push_back(view.Row(k).region);
    RelaxPlan p;
    p.timestamp = g.timestamp;
    p.old_scale = g.scale;
    p.target_scale = target_scale;
    p.group_norm = L1Norm(regions);
    p.reuse_only = g.scale <= target_scale;
    p.epsilon = p.reuse_only ? 0.0
                             : p.group_norm * (1.0 / target_scale - 1.0 / g.scale);
    if (!best || p.epsilon < best->epsilon) best = p;
  }
  return best;
}

absl::StatusOr<MechanismAnswer> AnswerRelax(const View& view,
                                            const PreparedStrategy& s,
                                            const RelaxPlan& plan,
                                            const DataVector& x,
                                            StrategyCache& cache, Rng& rng) {
  MechanismAnswer out;
  if (!plan.reuse_only) {
    std::vector<NodeKey> keys;
    std::vector<double> values;
    for (const auto& [k, e] : cache.entries()) {
      if (e.timestamp == plan.timestamp) keys.push_back(k);
    }
    if (keys.empty()) {
      return absl::InternalError(
          absl::StrCat("write event ", plan.timestamp, " is gone"));
    }
    for (NodeKey k : keys) {
      const CacheEntry* e = cache.Find(k);
      const double truth = static_cast<double>(RowSum(view.Row(k).region, x));
      const double noise = NoiseDown(e->response - truth, plan.old_scale,
                                     plan.target_scale, rng);
      values.push_back(truth + noise);
    }
    out.timestamp = cache.NextTimestamp();
    if (absl::Status st =
            cache.Update(keys, plan.target_scale, values, out.timestamp);
        !st.ok()) {
      return st;
    }
  }
  Eigen::VectorXd noisy(s.raw.size());
  for (size_t i = 0; i < s.raw.size(); ++i) {
    const CacheEntry* e = cache.Find(s.raw.rows()[i].key);
    if (e == nullptr) return absl::InternalError("relaxed row missing from cache");
    noisy[i] = e->response;
  }
  out.responses = s.reconstruction * noisy;
  out.epsilon = plan.epsilon;
  return out;
}

}  // namespace dpq
