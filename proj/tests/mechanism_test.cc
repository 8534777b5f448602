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

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "dpq/expander.h"
#include "dpq/mmm.h"
#include "dpq/proactive.h"
#include "dpq/relax.h"
#include "test_util.h"

namespace dpq {
namespace {

using testing::KeyOf;
using testing::MakeView;

DataVector Counts(std::vector<int64_t> c) { return DataVector{std::move(c)}; }

MmmOptions Opts(uint64_t seed) {
  MmmOptions o;
  o.mc.samples = 4000;
  o.mc.seed = seed;
  return o;
}

TEST(Mmm, RepeatIsFree) {
  auto v = MakeView(8);
  std::vector<RangeQuery> q = {SingleRange(0, 7), SingleRange(2, 5)};
  PreparedStrategy s = Prepare(*GenerateStrategy(*v, q), v->MakeWorkload(q));
  auto req = *AccuracyRequirement::WorstError(20, 0.05);
  StrategyCache cache(v->node_count());
  Rng rng(1);
  DataVector x = Counts({5, 1, 0, 3, 9, 2, 2, 4});
  CostPlan first = EstimatePrivacyBudget(s, CachedScales(s.raw, &cache), req, Opts(3));
  EXPECT_GT(first.epsilon, 0);
  auto a1 = AnswerWorkload(s, first, x, cache, rng);
  ASSERT_TRUE(a1.ok());
  EXPECT_EQ(a1->epsilon, first.epsilon);
  CostPlan again = EstimatePrivacyBudget(s, CachedScales(s.raw, &cache), req, Opts(3));
  EXPECT_TRUE(again.is_free());
  EXPECT_EQ(again.epsilon, 0);
  auto a2 = AnswerWorkload(s, again, x, cache, rng);
  ASSERT_TRUE(a2.ok());
  EXPECT_EQ(a2->responses, a1->responses);
}

TEST(Mmm, CacheNeverCostsMore) {
  auto v = MakeView(16);
  std::mt19937_64 g(4);
  StrategyCache cache(v->node_count());
  Rng rng(2);
  DataVector x = Counts(std::vector<int64_t>(16, 3));
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<RangeQuery> q;
    for (int i = 0; i < 3; ++i) {
      int64_t lo = g() % 16, hi = lo + 1 + g() % (16 - lo);
      q.push_back(SingleRange(lo, hi));
    }
    PreparedStrategy s = Prepare(*GenerateStrategy(*v, q), v->MakeWorkload(q));
    auto req = *AccuracyRequirement::WorstError(5 + g() % 40, 0.05);
    CostPlan cl = CachelessBudget(s, req, Opts(rep));
    CostPlan c = EstimatePrivacyBudget(s, CachedScales(s.raw, &cache), req, Opts(rep));
    EXPECT_LE(c.epsilon, cl.epsilon + 1e-12);
    ASSERT_TRUE(AnswerWorkload(s, c, x, cache, rng).ok());
  }
}

TEST(Mmm, SquaredRequirementIsClosedForm) {
  auto v = MakeView(8);
  std::vector<RangeQuery> q = {SingleRange(0, 7)};
  PreparedStrategy s = Prepare(*GenerateStrategy(*v, q), v->MakeWorkload(q));
  auto req = *AccuracyRequirement::ExpectedSquaredError(300);
  CostPlan p = CachelessBudget(s, req, Opts(0));
  // ||recon diag(b)||^2 = 3 b^2 = 300 -> b = 10, norm 1.
  EXPECT_NEAR(p.paid_scale, 10, 1e-6);
  EXPECT_NEAR(p.epsilon, 0.1, 1e-7);
}

TEST(Proactive, WorkedExample) {
  auto v = MakeView(8);
  std::vector<RangeQuery> q = {SingleRange(2, 6), SingleRange(3, 7)};
  StrategyMatrix a = *GenerateStrategy(*v, q);
  StrategyCache cache(v->node_count());
  std::vector<NodeKey> k = {KeyOf(*v, {7, 8})};
  std::vector<double> val = {1};
  ASSERT_TRUE(cache.Update(k, 3.0, val, cache.NextTimestamp()).ok());
  std::vector<size_t> paid(a.size());
  for (size_t i = 0; i < paid.size(); ++i) paid[i] = i;
  std::vector<NodeKey> got = ProactiveRows(*v, a, paid, cache);
  std::set<Interval> ranges;
  for (NodeKey n : got) ranges.insert(v->Ranges(n)[0]);
  EXPECT_EQ(ranges, (std::set<Interval>{{4, 8}, {0, 2}, {0, 1}, {1, 2}, {2, 3}}));
  std::vector<IndexSet> all = a.Regions();
  for (NodeKey n : got) all.push_back(v->Row(n).region);
  EXPECT_EQ(L1Norm(all), a.L1Norm());
}

TEST(Proactive, AnswerSharesTimestampAndCost) {
  auto v = MakeView(8);
  std::vector<RangeQuery> q = {SingleRange(0, 7)};
  PreparedStrategy s = Prepare(*GenerateStrategy(*v, q), v->MakeWorkload(q));
  StrategyCache cache(v->node_count());
  Rng rng(9);
  auto req = *AccuracyRequirement::WorstError(10, 0.05);
  CostPlan p = EstimatePrivacyBudget(s, CachedScales(s.raw, &cache), req, Opts(1));
  auto ans = AnswerWorkload(s, p, Counts({1, 1, 1, 1, 1, 1, 1, 1}), cache, rng, v.get());
  ASSERT_TRUE(ans.ok());
  EXPECT_FALSE(ans->proactive.empty());
  EXPECT_EQ(ans->epsilon, p.epsilon);
  for (NodeKey n : ans->proactive) {
    ASSERT_NE(cache.Find(n), nullptr);
    EXPECT_EQ(cache.Find(n)->timestamp, ans->timestamp);
    EXPECT_EQ(cache.Find(n)->scale, p.paid_scale);
  }
}

TEST(Expander, AddsMostAccurateOverlappingRows) {
  auto v = MakeView(8);
  std::vector<RangeQuery> q = {SingleRange(0, 4)};
  StrategyMatrix a = *GenerateStrategy(*v, q);
  StrategyCache cache(v->node_count());
  auto put = [&](Interval iv, double b) {
    std::vector<NodeKey> k = {KeyOf(*v, iv)};
    std::vector<double> val = {0};
    ASSERT_TRUE(cache.Update(k, b, val, cache.NextTimestamp()).ok());
  };
  put({0, 2}, 3.0);
  put({0, 8}, 1.0);
  put({4, 8}, 0.5);  // disjoint from [0,4)
  put({2, 4}, 9.0);  // too noisy
  std::vector<NodeKey> added;
  StrategyMatrix e = GenerateExpandedStrategy(*v, a, cache, 5.0, 8, &added);
  ASSERT_EQ(added.size(), 2u);
  EXPECT_EQ(v->Ranges(added[0])[0], (Interval{0, 8}));
  EXPECT_EQ(v->Ranges(added[1])[0], (Interval{0, 2}));
  EXPECT_EQ(e.size(), a.size() + 2);
  GenerateExpandedStrategy(*v, a, cache, 5.0, 1, &added);
  EXPECT_EQ(added.size(), 1u);
}

TEST(Relax, AtomMassAndMarginal) {
  Rng rng(5);
  const double bo = 8, bn = 2;
  int kept = 0;
  const int n = 100000;
  double abs_sum = 0;
  for (int i = 0; i < n; ++i) {
    double old = SampleLaplace(bo, rng);
    double nw = NoiseDown(old, bo, bn, rng);
    kept += nw == old;
    abs_sum += std::abs(nw);
  }
  EXPECT_NEAR(static_cast<double>(kept) / n, NoiseDownAtomMass(bo, bn), 0.01);
  EXPECT_NEAR(abs_sum / n, bn, 0.05 * bn);
}

TEST(Relax, TightensWholeGroup) {
  auto v = MakeView(8);
  std::vector<RangeQuery> q = {SingleRange(0, 7)};
  PreparedStrategy s = Prepare(*GenerateStrategy(*v, q), v->MakeWorkload(q));
  StrategyCache cache(v->node_count());
  Rng rng(3);
  DataVector x = Counts({1, 2, 3, 4, 5, 6, 7, 8});
  auto loose = *AccuracyRequirement::WorstError(40, 0.05);
  CostPlan p1 = EstimatePrivacyBudget(s, CachedScales(s.raw, &cache), loose, Opts(2));
  auto a1 = AnswerWorkload(s, p1, x, cache, rng, v.get());
  ASSERT_TRUE(a1.ok());
  const size_t group_size = cache.size();

  const double target = p1.paid_scale / 2;
  auto plan = EstimateRelax(*v, s.raw, cache, target);
  ASSERT_TRUE(plan.has_value());
  EXPECT_NEAR(plan->epsilon, p1.epsilon, 1e-12);  // norm/(b/2) - norm/b
  auto a2 = AnswerRelax(*v, s, *plan, x, cache, rng);
  ASSERT_TRUE(a2.ok());
  EXPECT_EQ(cache.size(), group_size);
  for (const auto& [k, e] : cache.entries()) {
    EXPECT_EQ(e.timestamp, a2->timestamp);
    EXPECT_EQ(e.scale, target);
  }
  auto reuse = EstimateRelax(*v, s.raw, cache, target * 3);
  ASSERT_TRUE(reuse.has_value());
  EXPECT_TRUE(reuse->reuse_only);
  EXPECT_EQ(reuse->epsilon, 0);
  std::vector<RangeQuery> other = {SingleRange(1, 2)};
  EXPECT_FALSE(EstimateRelax(*v, *GenerateStrategy(*v, other), cache, 1.0).has_value());
}

}  // namespace
}  // namespace dpq
