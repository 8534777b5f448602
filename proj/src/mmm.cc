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

#include "dpq/mmm.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpq/proactive.h"

namespace dpq {

std::vector<std::optional<double>> CachedScales(const StrategyMatrix& a,
                                                const StrategyCache* cache) {
  std::vector<std::optional<double>> out(a.size());
  if (cache == nullptr) return out;
  for (size_t i = 0; i < a.size(); ++i) {
    if (const CacheEntry* e = cache->Find(a.rows()[i].key)) out[i] = e->scale;
  }
  return out;
}

namespace {

Eigen::VectorXd ScalesAt(const std::vector<std::optional<double>>& cached,
                         double b) {
  Eigen::VectorXd s(cached.size());
  for (size_t i = 0; i < cached.size(); ++i) {
    s[i] = (cached[i] && *cached[i] <= b) ? *cached[i] : b;
  }
  return s;
}

Eigen::VectorXd FreeAt(const std::vector<std::optional<double>>& cached,
                       double b) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(cached.size());
  for (size_t i = 0; i < cached.size(); ++i) {
    if (cached[i] && *cached[i] <= b) s[i] = *cached[i];
  }
  return s;
}

CostPlan MakePlan(const PreparedStrategy& s, const Eigen::VectorXd& free,
                  double b, double loose) {
  CostPlan plan;
  plan.loose_bound = loose;
  plan.scales = free;
  std::vector<IndexSet> paid;
  for (Eigen::Index i = 0; i < free.size(); ++i) {
    if (free[i] > 0) {
      plan.free_rows.push_back(i);
    } else {
      plan.paid_rows.push_back(i);
      plan.scales[i] = b;
      paid.push_back(s.raw.rows()[i].region);
    }
  }
  plan.paid_scale = b;
  plan.paid_norm = L1Norm(paid);
  plan.epsilon = plan.paid_rows.empty() ? 0.0 : plan.paid_norm / b;
  return plan;
}

}  // namespace

CostPlan CacheAwareSearch(const PreparedStrategy& s,
                          const std::vector<std::optional<double>>& cached,
                          const AccuracyRequirement& req,
                          const MmmOptions& opts) {
  AccuracyChecker checker(s.reconstruction, req, opts.mc);
  const double loose = LooseBound(s.reconstruction, req);
  const double top = std::max(static_cast<double>(s.l1_norm) / opts.phi, loose);

  std::vector<double> candidates{loose};
  for (const auto& c : cached) {
    if (c && *c > loose && *c <= top) candidates.push_back(*c);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  auto passes = [&](size_t i) {
    return checker.Check(ScalesAt(cached, candidates[i]));
  };
  std::optional<size_t> found;
  if (static_cast<int>(candidates.size()) <= opts.linear_scan_limit) {
    for (size_t i = candidates.size(); i-- > 0;) {
      if (passes(i)) {
        found = i;
        break;
      }
    }
  } else if (passes(0)) {
    size_t lo = 0, hi = candidates.size();  // lo passes, hi is past the end
    while (hi - lo > 1) {
      const size_t mid = lo + (hi - lo) / 2;
      (passes(mid) ? lo : hi) = mid;
    }
    found = lo;
  }
  if (!found) {
    // The loose bound is analytically sufficient; keep it even if the
    // sampled check disagrees.
    return MakePlan(s, FreeAt(cached, loose), loose, loose);
  }

  const double discrete = candidates[*found];
  const Eigen::VectorXd free = FreeAt(cached, discrete);
  const double upper = *found + 1 < candidates.size()
                           ? candidates[*found + 1] * (1 - 1e-12)
                           : top;
  double b = discrete;
  if (upper > discrete) {
    b = checker.LargestPassingScale(free, discrete, upper).value_or(discrete);
  }
  return MakePlan(s, free, b, loose);
}

CostPlan CachelessBudget(const PreparedStrategy& s,
                         const AccuracyRequirement& req,
                         const MmmOptions& opts) {
  return CacheAwareSearch(s, std::vector<std::optional<double>>(s.raw.size()), req, opts);
}

CostPlan EstimatePrivacyBudget(const PreparedStrategy& s,
                               const std::vector<std::optional<double>>& cached,
                               const AccuracyRequirement& req,
                               const MmmOptions& opts,
                               const CostPlan* cacheless) {
  const bool any_cached = std::any_of(cached.begin(), cached.end(),
                                      [](const auto& c) { return c.has_value(); });
  if (!any_cached) {
    return cacheless != nullptr ? *cacheless : CachelessBudget(s, req, opts);
  }
  CostPlan plan = CacheAwareSearch(s, cached, req, opts);
  // The greedy free set can lose to ignoring the cache altogether; fall back
  // so that reuse never costs more than the cacheless mechanism.
  CostPlan fresh = cacheless != nullptr ? *cacheless : CachelessBudget(s, req, opts);
  return fresh.epsilon < plan.epsilon ? fresh : plan;
}

absl::StatusOr<MechanismAnswer> AnswerWorkload(const PreparedStrategy& s,
                                               const CostPlan& plan,
                                               const DataVector& x,
                                               StrategyCache& cache, Rng& rng,
                                               const View* pq_view) {
  const auto& rows = s.raw.rows();
  Eigen::VectorXd noisy(rows.size());
  for (size_t i : plan.free_rows) {
    const CacheEntry* e = cache.Find(rows[i].key);
    if (e == nullptr) {
      return absl::InternalError(
          absl::StrCat("cache entry for free row ", rows[i].key, " vanished"));
    }
    noisy[i] = e->response;
  }
  MechanismAnswer out;
  if (!plan.paid_rows.empty()) {
    std::vector<NodeKey> keys;
    std::vector<double> values;
    for (size_t i : plan.paid_rows) {
      noisy[i] = static_cast<double>(RowSum(rows[i].region, x)) +
                 SampleLaplace(plan.paid_scale, rng);
      keys.push_back(rows[i].key);
      values.push_back(noisy[i]);
    }
    if (pq_view != nullptr) {
      out.proactive = ProactiveRows(*pq_view, s.raw, plan.paid_rows, cache);
    }
    for (NodeKey k : out.proactive) {
      keys.push_back(k);
      values.push_back(static_cast<double>(RowSum(pq_view->Row(k).region, x)) +
                       SampleLaplace(plan.paid_scale, rng));
    }
    out.timestamp = cache.NextTimestamp();
    if (absl::Status st = cache.Update(keys, plan.paid_scale, values, out.timestamp);
        !st.ok()) {
      return st;
    }
  }
  out.responses = s.reconstruction * noisy;
  out.epsilon = plan.epsilon;
  return out;
}

}  // namespace dpq
