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

#include <gtest/gtest.h>

#include "dpq/harness.h"

namespace dpq {
namespace {

std::unique_ptr<Engine> MakeEngine(Distribution dist, int64_t n = 64, uint64_t seed = 1) {
  SyntheticSpec s;
  s.distribution = dist;
  s.domain = n;
  s.rows = 5000;
  s.seed = seed;
  auto d = std::make_shared<const Dataset>(MakeSynthetic(s));
  EngineConfig c;
  c.total_budget = 1e9;
  c.seed = seed;
  c.mc_samples = 2000;
  return *Engine::Create(c, d->schema, d);
}

TEST(Synthetic, Distributions) {
  SyntheticSpec s;
  s.rows = 20000;
  s.distribution = Distribution::kZipf;
  Dataset z = MakeSynthetic(s);
  auto x = *MaterializeVector(z, {"x"});
  EXPECT_GT(x.counts[0], x.counts[10]);
  EXPECT_EQ(x.Total(), 20000);
  s.distribution = Distribution::kPlanted;
  auto p = *MaterializeVector(MakeSynthetic(s), {"x"});
  int zeros = 0;
  for (int64_t c : p.counts) zeros += c == 0;
  EXPECT_GE(zeros, 16);
  EXPECT_EQ(MakeSynthetic(s).columns, MakeSynthetic(s).columns);
}

TEST(Bfs, ThresholdAboveTotalStopsAtRoot) {
  auto e = MakeEngine(Distribution::kUniform);
  auto t = RunBfs(*e, "x", 1e7, 200, 0.05);
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->size(), 1u);
}

TEST(Bfs, ZeroThresholdWalksWholeTree) {
  auto e = MakeEngine(Distribution::kUniform);
  auto t = RunBfs(*e, "x", -1e9, 500, 0.05);
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->size(), 7u);  // height of the binary tree over 64
  EXPECT_EQ(t->back().request.queries.size(), 64u);
}

TEST(Dfs, StopsOnLowNonZero) {
  auto e = MakeEngine(Distribution::kPlanted);
  auto t = RunDfs(*e, "x", 1e9, 50, 0.05, 3);
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->size(), 1u);  // the first non-zero child qualifies
  auto e2 = MakeEngine(Distribution::kPlanted);
  auto a = RunDfs(*e2, "x", 40, 50, 0.05, 3);
  auto e3 = MakeEngine(Distribution::kPlanted);
  auto b = RunDfs(*e3, "x", 40, 50, 0.05, 3);
  ASSERT_EQ(a->size(), b->size());
  for (size_t i = 0; i < a->size(); ++i) EXPECT_EQ((*a)[i].epsilon, (*b)[i].epsilon);
}

TEST(Rrq, ConcentratedQueries) {
  auto e = MakeEngine(Distribution::kUniform, 1000);
  RrqParams p;
  p.count = 1;
  auto one = RunRrq(*e, "x", p, 1);
  ASSERT_EQ(one->size(), 1u);
  EXPECT_GT((*one)[0].epsilon, 0);
  p.count = 50;
  auto many = RunRrq(*e, "x", p, 2);
  for (const TraceEntry& t : *many) {
    const Interval iv = t.request.queries[0].ranges[0];
    EXPECT_NEAR(iv.lo, 500, 60);
    EXPECT_NEAR(iv.hi, 820, 80);
  }
}

TEST(Baselines, NaiveBetweenAndPartition) {
  TaskConfig cfg;
  cfg.runs = 1;
  cfg.repeats = 2;
  cfg.engine.total_budget = 1e9;
  cfg.engine.mc_samples = 2000;
  cfg.ablation = true;
  auto r = RunOnce(cfg, 0);
  ASSERT_TRUE(r.ok()) << r.status();
  const Trace& cd = r->systems.at("dpq");
  const Trace& cl = r->systems.at("Cacheless");
  const Trace& nv = r->systems.at("NaiveCache");
  ASSERT_EQ(cd.size(), cl.size());
  double c1 = 0, c2 = 0;
  for (size_t i = 0; i < cd.size(); ++i) {
    c1 += cd[i].epsilon;
    c2 += cl[i].epsilon;
    EXPECT_LE(c1, c2 + 1e-9);
  }
  EXPECT_LE(CumulativeEpsilon(nv), CumulativeEpsilon(cl));
  EXPECT_EQ(r->systems.size(), 7u);

  Experiment ex{{*r}};
  std::ostringstream runs, freq;
  ex.WriteRunsCsv(runs);
  ex.WriteFreqCsv(freq);
  EXPECT_EQ(runs.str().rfind("run,workload_idx,system,epsilon,cum_epsilon,mechanism", 0), 0u);
  std::istringstream in(freq.str());
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream f(line);
    std::string name, cell;
    std::getline(f, name, ',');
    double sum = 0;
    while (std::getline(f, cell, ',')) sum += std::stod(cell);
    EXPECT_EQ(sum, static_cast<double>(r->systems.at(name).size())) << name;
  }
}

}  // namespace
}  // namespace dpq
