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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "dpq/calibration.h"
#include "dpq/engine.h"
#include "dpq/harness.h"
#include "dpq/mmm.h"
#include "dpq/proactive.h"
#include "dpq/relax.h"
#include "dpq/strategy.h"

namespace dpq {
namespace {

using Clock = std::chrono::steady_clock;

struct Check {
  bool ok = true;
  std::string why;
  void Expect(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why = msg;
    }
  }
};

int failures = 0;

void Report(const std::string& name, double limit_s, const std::function<Check()>& body) {
  const auto t0 = Clock::now();
  Check c = body();
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  c.Expect(secs < limit_s, "runtime " + std::to_string(secs) + "s over limit");
  std::printf("%s %s (%.1fs)%s%s\n", c.ok ? "PASS" : "FAIL", name.c_str(), secs,
              c.why.empty() ? "" : ": ", c.why.c_str());
  std::fflush(stdout);
  if (!c.ok) ++failures;
}

std::shared_ptr<const View> View1(int64_t n, int k) {
  auto t = std::make_shared<const StrategyTree>(*StrategyTree::Build(n, k));
  return std::make_shared<const View>(std::vector<std::string>{"x"},
                                      std::vector<std::shared_ptr<const StrategyTree>>{t});
}

std::shared_ptr<const View> View2(int64_t n1, int64_t n2, int k) {
  auto a = std::make_shared<const StrategyTree>(*StrategyTree::Build(n1, k));
  auto b = std::make_shared<const StrategyTree>(*StrategyTree::Build(n2, k));
  return std::make_shared<const View>(std::vector<std::string>{"a", "b"},
                                      std::vector<std::shared_ptr<const StrategyTree>>{a, b});
}

std::vector<Interval> Ranges1(const View& v, const StrategyMatrix& a) {
  std::vector<Interval> out;
  for (const StrategyRow& r : a.rows()) out.push_back(v.Ranges(r.key)[0]);
  return out;
}

Interval RandomInterval(std::mt19937_64& g, int64_t n) {
  std::uniform_int_distribution<int64_t> lo_d(0, n - 1);
  const int64_t lo = lo_d(g);
  std::uniform_int_distribution<int64_t> hi_d(lo + 1, n);
  return {lo, hi_d(g)};
}

std::vector<RangeQuery> RandomQueries(std::mt19937_64& g, const View& v, int count) {
  std::vector<RangeQuery> q;
  for (int i = 0; i < count; ++i) {
    RangeQuery r;
    for (int d = 0; d < v.dims(); ++d) r.ranges.push_back(RandomInterval(g, v.tree(d).domain_size()));
    q.push_back(std::move(r));
  }
  return q;
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------- goldens

Check Goldens() {
  Check c;
  auto v = View1(8, 2);
  std::vector<RangeQuery> w1 = {SingleRange(0, 7)};
  std::vector<RangeQuery> w2 = {SingleRange(2, 6), SingleRange(3, 7)};
  StrategyMatrix a1 = *GenerateStrategy(*v, w1);
  StrategyMatrix a2 = *GenerateStrategy(*v, w2);
  c.Expect(Ranges1(*v, a1) == std::vector<Interval>{{0, 4}, {4, 6}, {6, 7}}, "decomposition of [0,7)");
  c.Expect(a2.size() == 4, "strategy for two ranges has " + std::to_string(a2.size()) + " rows");
  c.Expect(a1.L1Norm() == 1 && a2.L1Norm() == 2, "strategy norms");

  StrategyCache cache(v->node_count());
  std::vector<NodeKey> k = {static_cast<NodeKey>(v->tree(0).Find({7, 8}))};
  std::vector<double> val = {0};
  (void)cache.Update(k, 1.0, val, cache.NextTimestamp());
  std::vector<size_t> paid = {0, 1, 2, 3};
  std::set<Interval> pq;
  for (NodeKey n : ProactiveRows(*v, a2, paid, cache)) pq.insert(v->Ranges(n)[0]);
  c.Expect(pq == std::set<Interval>{{4, 8}, {0, 2}, {0, 1}, {1, 2}, {2, 3}}, "proactive rows");

  PreparedStrategy s1 = Prepare(a1, v->MakeWorkload(w1));
  const double err = ExpectedTotalSquaredError(s1.reconstruction, Eigen::Vector3d(10, 10, 10));
  c.Expect(std::abs(err - 300) < 1e-9, "cacheless error " + Fmt(err));
  auto req = *AccuracyRequirement::ExpectedSquaredError(300);
  auto bp = TightCachedBound(s1.reconstruction, Eigen::Vector3d(15, 0, 0), req);
  c.Expect(bp.ok() && std::abs(*bp - 6.12) <= 0.01, "paid scale with cached row");

  Eigen::MatrixXd w(3, 3), id = Eigen::MatrixXd::Identity(3, 3), ae(4, 3);
  w << 1, 0, 0, 1, 1, 0, 0, 0, 1;
  ae << 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1;
  const double se[] = {
      ExpectedTotalSquaredError(w, id, Eigen::Vector3d(1, 1, 5)),
      ExpectedTotalSquaredError(w, ae, Eigen::Vector4d(1, 1, 5, 4)),
      ExpectedTotalSquaredError(w, ae, Eigen::Vector4d(1, 1, 5, 3)),
      ExpectedTotalSquaredError(w, id, Eigen::Vector3d(1, 2, 5)),
      ExpectedTotalSquaredError(w, ae, Eigen::Vector4d(1, 2, 5, 4))};
  const double want[] = {28, 29.1, 26.5, 31.0, 30.2};
  for (int i = 0; i < 5; ++i) {
    c.Expect(std::abs(se[i] - want[i]) <= 0.05, "expansion error " + Fmt(se[i]) + " vs " + Fmt(want[i]));
  }
  return c;
}

// ---------------------------------------------------------------- properties

Check FrtProperties() {
  Check c;
  std::mt19937_64 g(101);
  for (int inst = 0; inst < 500 && c.ok; ++inst) {
    const bool two = inst % 3 == 0;
    const int k = 2 + static_cast<int>(g() % 3);
    auto v = two ? View2(2 + g() % 7, 2 + g() % 7, k) : View1(2 + g() % 63, k);
    auto q = RandomQueries(g, *v, 1 + static_cast<int>(g() % 5));
    StrategyMatrix a = *GenerateStrategy(*v, q);
    std::vector<IndexSet> rows = a.Regions();
    TransformationMatrix t = GetTransformationMatrix(rows);
    Eigen::MatrixXd mapped = MapRows(rows, t);
    // Full column rank needs laminar rows, which only a single tree gives.
    // Cross-product rows can split into more buckets than rows; there the
    // mapping must still lose no rank.
    const int rank = NumericalRank(mapped);
    const bool rank_ok = two ? rank == NumericalRank(DenseRows(rows))
                             : rank == static_cast<int>(t.size());
    if (!rank_ok) {
      std::string rows_text;
      for (const StrategyRow& r : a.rows()) {
        for (const Interval& iv : v->Ranges(r.key)) rows_text += ToString(iv);
        rows_text += " ";
      }
      c.Expect(false, "mapped strategy lost rank at instance " +
                          std::to_string(inst) + ": " + rows_text);
    }
    IndexSet rows_union(rows[0].size()), bucket_union(rows[0].size());
    for (const IndexSet& r : rows) rows_union |= r;
    for (size_t i = 0; i < t.size(); ++i) {
      c.Expect(t.buckets[i].any(), "empty bucket");
      for (size_t j = i + 1; j < t.size(); ++j) {
        c.Expect(!t.buckets[i].intersects(t.buckets[j]), "overlapping buckets");
      }
      bucket_union |= t.buckets[i];
    }
    c.Expect(rows_union == bucket_union, "bucket support differs from strategy support");
    Eigen::MatrixXd back = mapped * t.Dense();
    c.Expect((back - DenseRows(rows)).norm() == 0, "A'T != A at instance " + std::to_string(inst));
  }
  return c;
}

Check GrowthProperty() {
  Check c;
  std::mt19937_64 g(202);
  for (int inst = 0; inst < 500 && c.ok; ++inst) {
    auto v = View1(2 + g() % 127, 2 + static_cast<int>(g() % 3));
    const StrategyTree& tree = v->tree(0);
    std::vector<IndexSet> rows;
    const int m = 1 + static_cast<int>(g() % 20);
    for (int i = 0; i < m; ++i) rows.push_back(v->Row(g() % tree.size()).region);
    std::vector<int> growth;
    GetTransformationMatrix(rows, &growth);
    for (int x : growth) c.Expect(x <= 1, "a row added " + std::to_string(x) + " buckets");
  }
  return c;
}

Check PqProperty() {
  Check c;
  std::mt19937_64 g(303);
  int added_total = 0;
  for (int inst = 0; inst < 500 && c.ok; ++inst) {
    const bool two = inst % 3 == 0;
    const int k = 2 + static_cast<int>(g() % 3);
    auto v = two ? View2(2 + g() % 9, 2 + g() % 9, k) : View1(2 + g() % 63, k);
    auto q = RandomQueries(g, *v, 1 + static_cast<int>(g() % 4));
    StrategyMatrix a = *GenerateStrategy(*v, q);
    StrategyCache cache(v->node_count());
    const int cached = static_cast<int>(g() % 12);
    for (int i = 0; i < cached; ++i) {
      std::vector<NodeKey> key = {g() % v->node_count()};
      std::vector<double> val = {0};
      (void)cache.Update(key, 1.0 + g() % 5, val, cache.NextTimestamp());
    }
    std::vector<size_t> paid;
    for (size_t i = 0; i < a.size(); ++i) {
      if (g() % 4 != 0) paid.push_back(i);
    }
    if (paid.empty()) paid.push_back(0);
    std::vector<IndexSet> paid_rows;
    for (size_t i : paid) paid_rows.push_back(a.rows()[i].region);
    const int64_t before = L1Norm(paid_rows);
    std::vector<NodeKey> extra = ProactiveRows(*v, a, paid, cache);
    for (NodeKey n : extra) {
      c.Expect(cache.Find(n) == nullptr && !a.Contains(n), "proactive row already known");
      paid_rows.push_back(v->Row(n).region);
    }
    added_total += static_cast<int>(extra.size());
    c.Expect(L1Norm(paid_rows) == before, "norm changed at instance " + std::to_string(inst));
  }
  c.Expect(added_total > 0, "no proactive rows were ever added");
  return c;
}

Check DominanceProperty() {
  Check c;
  std::mt19937_64 g(404);
  int raw_worse = 0;
  for (int inst = 0; inst < 500 && c.ok; ++inst) {
    auto v = View1(8 + g() % 57, 2 + static_cast<int>(g() % 2));
    const bool squared = inst % 2 == 1;
    auto req_for = [&](double scale) {
      return squared ? *AccuracyRequirement::ExpectedSquaredError(scale * scale * 4)
                     : *AccuracyRequirement::WorstError(scale, 0.05);
    };
    StrategyCache cache(v->node_count());
    Rng rng(inst);
    DataVector x{std::vector<int64_t>(v->layout().size(), 2)};
    MmmOptions opts;
    opts.mc.samples = 2000;
    const int history = static_cast<int>(g() % 4);
    for (int h = 0; h < history; ++h) {
      auto q = RandomQueries(g, *v, 1 + static_cast<int>(g() % 3));
      PreparedStrategy s = Prepare(*GenerateStrategy(*v, q), v->MakeWorkload(q));
      opts.mc.seed = g();
      auto req = req_for(5 + g() % 60);
      CostPlan p = EstimatePrivacyBudget(s, CachedScales(s.raw, &cache), req, opts);
      (void)AnswerWorkload(s, p, x, cache, rng, v.get());
    }
    auto q = RandomQueries(g, *v, 1 + static_cast<int>(g() % 3));
    PreparedStrategy s = Prepare(*GenerateStrategy(*v, q), v->MakeWorkload(q));
    opts.mc.seed = g();
    auto req = req_for(5 + g() % 60);
    auto cached = CachedScales(s.raw, &cache);
    CostPlan cl = CachelessBudget(s, req, opts);
    CostPlan ca = EstimatePrivacyBudget(s, cached, req, opts);
    c.Expect(ca.epsilon <= cl.epsilon * (1 + 1e-12) && ca.epsilon >= 0,
             "cache-aware " + Fmt(ca.epsilon) + " > cacheless " + Fmt(cl.epsilon));
    // The chosen plan has to meet the requirement on the same draws.
    AccuracyChecker chk(s.reconstruction, req, opts.mc);
    if (!chk.Check(ca.scales)) {
      std::ostringstream os;
      os << "chosen plan fails its accuracy check at instance " << inst << " eps "
         << ca.epsilon << " cacheless " << cl.epsilon << " free " << ca.free_rows.size()
         << " paid " << ca.paid_rows.size() << " bP " << ca.paid_scale << " scales "
         << ca.scales.transpose() << " cl scales " << cl.scales.transpose()
         << " cl check " << chk.Check(cl.scales);
      c.Expect(false, os.str());
    }
    CostPlan raw = CacheAwareSearch(s, cached, req, opts);
    if (raw.epsilon > cl.epsilon * (1 + 1e-12)) {
      ++raw_worse;
      c.Expect(!squared, "search alone beaten by cacheless on a squared-error instance");
    }
  }
  if (c.ok) c.why = "cache search alone lost to cacheless on " + std::to_string(raw_worse) + "/250 worst-error instances";
  return c;
}

Check LedgerProperty() {
  Check c;
  std::mt19937_64 g(505);
  SyntheticSpec spec;
  spec.domain = 16;
  spec.rows = 1000;
  auto data = std::make_shared<const Dataset>(MakeSynthetic(spec));
  int rejected = 0;
  for (int inst = 0; inst < 500 && c.ok; ++inst) {
    EngineConfig cfg;
    cfg.seed = g();
    cfg.total_budget = std::uniform_real_distribution<double>(0, 1.5)(g);
    cfg.mc_samples = 1000;
    auto e = *Engine::Create(cfg, data->schema, data);
    double sum = 0;
    for (int r = 0; r < 8; ++r) {
      WorkloadRequest req;
      req.attributes = {"x"};
      for (int i = 0, n = 1 + static_cast<int>(g() % 3); i < n; ++i) {
        Interval iv = RandomInterval(g, 16);
        req.queries.push_back(SingleRange(iv.lo, iv.hi));
      }
      req.accuracy = g() % 4 == 0 ? *AccuracyRequirement::ExpectedSquaredError(100.0 + g() % 5000)
                                  : *AccuracyRequirement::WorstError(5 + g() % 100, 0.05);
      auto o = e->ProcessWorkload(req);
      c.Expect(o.ok(), "engine error");
      if (!o.ok()) break;
      if (const auto* a = std::get_if<Answered>(&*o)) {
        c.Expect(a->epsilon >= 0, "negative charge");
        sum += a->epsilon;
      } else {
        ++rejected;
      }
      c.Expect(e->ledger().consumed() <= e->ledger().total(), "consumed above total");
      c.Expect(std::abs(e->ledger().consumed() - sum) <= 1e-12, "ledger differs from charges");
    }
  }
  if (c.ok) c.why = std::to_string(rejected) + " rejections observed";
  return c;
}

// ---------------------------------------------------------------- numerics

Check MonteCarloVsClosedForm() {
  Check c;
  std::mt19937_64 g(606);
  std::uniform_real_distribution<double> u(-1, 1), bs(0.5, 5);
  double worst = 0;
  for (int inst = 0; inst < 20; ++inst) {
    Eigen::MatrixXd w(5, 5), a(5, 5);
    for (int i = 0; i < 25; ++i) {
      w.data()[i] = u(g);
      a.data()[i] = u(g);
    }
    Eigen::VectorXd b(5);
    for (int i = 0; i < 5; ++i) b[i] = bs(g);
    Eigen::MatrixXd recon = w * PseudoInverse(a);
    const double closed = ExpectedTotalSquaredError(recon, b);
    // Laplace(b) has variance 2b^2; the closed form counts b^2 per row.
    const double mc = MonteCarloSquaredError(recon, b, 200000, g()) / 2;
    worst = std::max(worst, std::abs(mc / closed - 1));
  }
  c.Expect(worst <= 0.03, "relative gap " + Fmt(worst));
  if (c.ok) c.why = "largest relative gap " + Fmt(worst);
  return c;
}

Check SingleQueryCalibration() {
  Check c;
  auto v = View1(8, 2);
  std::vector<RangeQuery> q = {SingleRange(0, 8)};
  PreparedStrategy s = Prepare(*GenerateStrategy(*v, q), v->MakeWorkload(q));
  auto req = *AccuracyRequirement::WorstError(100, 0.05);
  const double analytic = std::log(20.0) / 100;
  double worst = 0;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    MmmOptions opts;
    opts.mc.samples = 100000;
    opts.mc.seed = seed;
    const double eps = CachelessBudget(s, req, opts).epsilon;
    worst = std::max(worst, std::abs(eps / analytic - 1));
  }
  c.Expect(worst <= 0.05, "relative gap " + Fmt(worst));
  if (c.ok) c.why = "largest relative gap " + Fmt(worst);
  return c;
}

// ---------------------------------------------------------------- relax

// Two-sided one-sample Kolmogorov-Smirnov p-value, asymptotic form.
double KsPValue(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0;
  for (int k = 1; k <= 100; ++k) {
    p += 2 * ((k % 2) ? 1 : -1) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return std::clamp(p, 0.0, 1.0);
}

Check RelaxStatistics() {
  Check c;
  const std::pair<double, double> pairs[] = {{20, 10}, {8, 2}, {5, 4.9}};
  std::string detail;
  uint64_t seed = 707;
  for (auto [bo, bn] : pairs) {
    Rng rng(seed++);
    std::vector<double> xs(100000);
    for (double& x : xs) x = NoiseDown(SampleLaplace(bo, rng), bo, bn, rng);
    const double p = KsPValue(xs, [bn = bn](double x) { return LaplaceCdf(x, bn); });
    c.Expect(p > 0.01, "KS rejects (" + Fmt(bo) + "," + Fmt(bn) + ") p=" + Fmt(p));
    detail += "p(" + Fmt(bo) + "," + Fmt(bn) + ")=" + Fmt(p) + " ";
  }

  SyntheticSpec spec;
  spec.domain = 32;
  spec.rows = 3000;
  auto data = std::make_shared<const Dataset>(MakeSynthetic(spec));
  std::mt19937_64 g(808);
  double worst = 0;
  int relaxed = 0;
  for (int inst = 0; inst < 20; ++inst) {
    EngineConfig cfg;
    cfg.seed = g();
    cfg.total_budget = 1e6;
    cfg.mc_samples = 4000;
    WorkloadRequest loose, tight;
    loose.attributes = {"x"};
    for (int i = 0, n = 1 + static_cast<int>(g() % 3); i < n; ++i) {
      Interval iv = RandomInterval(g, 32);
      loose.queries.push_back(SingleRange(iv.lo, iv.hi));
    }
    tight = loose;
    const double alpha = 20 + g() % 200;
    loose.accuracy = *AccuracyRequirement::WorstError(2 * alpha, 0.05);
    tight.accuracy = *AccuracyRequirement::WorstError(alpha, 0.05);

    auto repeated = *Engine::Create(cfg, data->schema, data);
    auto first = std::get<Answered>(*repeated->ProcessWorkload(loose));
    auto second = std::get<Answered>(*repeated->ProcessWorkload(tight));
    relaxed += second.mechanism == Mechanism::kRp;
    auto single = *Engine::Create(cfg, data->schema, data);
    auto direct = std::get<Answered>(*single->ProcessWorkload(tight));
    worst = std::max(worst, std::abs(first.epsilon + second.epsilon - direct.epsilon));
  }
  c.Expect(worst <= 1e-4, "ledger gap " + Fmt(worst));
  c.Expect(relaxed == 20, "relax chosen on " + std::to_string(relaxed) + "/20");
  if (c.ok) c.why = detail + "ledger gap " + Fmt(worst);
  return c;
}

// ---------------------------------------------------------------- harness

TaskConfig BfsTask() {
  TaskConfig t;
  t.kind = TaskKind::kBfs;
  t.clients = 5;
  t.runs = 20;
  t.seed = 2026;
  t.data.distribution = Distribution::kZipf;
  t.data.domain = 64;
  t.data.rows = 10000;
  t.engine.total_budget = 1e9;
  return t;
}

Check BfsAndRrq() {
  Check c;
  TaskConfig t = BfsTask();
  auto ex = RunExperiment(t);
  c.Expect(ex.ok(), "BFS experiment failed");
  if (!ex.ok()) return c;
  double ratio_sum = 0;
  for (size_t r = 0; r < ex->runs.size(); ++r) {
    const Trace& cd = ex->runs[r].systems.at("dpq");
    const Trace& cl = ex->runs[r].systems.at("Cacheless");
    double a = 0, b = 0;
    for (size_t i = 0; i < cd.size(); ++i) {
      a += cd[i].epsilon;
      b += cl[i].epsilon;
      c.Expect(a <= b * (1 + 1e-12), "run " + std::to_string(r) + " index " + std::to_string(i));
    }
    ratio_sum += a / b;
  }
  const double ratio = ratio_sum / ex->runs.size();
  c.Expect(ratio <= 0.9, "mean final ratio " + Fmt(ratio));

  TaskConfig rrq;
  rrq.kind = TaskKind::kRrq;
  rrq.runs = 1;
  rrq.seed = 2026;
  rrq.rrq.count = 2000;
  rrq.rrq.domain = 1000;
  rrq.engine.total_budget = 1e9;
  auto rr = RunOnce(rrq, 0);
  c.Expect(rr.ok(), "RRQ experiment failed");
  if (!rr.ok()) return c;
  const double cd = CumulativeEpsilon(rr->systems.at("dpq"));
  const double nv = CumulativeEpsilon(rr->systems.at("NaiveCache"));
  c.Expect(cd < nv, "RRQ dpq " + Fmt(cd) + " vs NaiveCache " + Fmt(nv));
  if (c.ok) {
    c.why = "BFS mean ratio " + Fmt(ratio) + "; RRQ dpq " + Fmt(cd) + " vs NaiveCache " +
            Fmt(nv) + " vs Cacheless " + Fmt(CumulativeEpsilon(rr->systems.at("Cacheless")));
  }
  return c;
}

Check Ablation() {
  Check c;
  TaskConfig t = BfsTask();
  t.baselines = false;
  t.ablation = true;
  auto ex = RunExperiment(t);
  c.Expect(ex.ok(), "ablation experiment failed");
  if (!ex.ok()) return c;
  std::string detail;
  for (const char* off : {"noMMM", "noSE", "noPQ", "noRP"}) {
    int wins = 0;
    double mean_on = 0, mean_off = 0;
    for (const RunResult& r : ex->runs) {
      const double on = CumulativeEpsilon(r.systems.at("dpq"));
      const double other = CumulativeEpsilon(r.systems.at(off));
      wins += on <= other * (1 + 1e-12);
      mean_on += on / ex->runs.size();
      mean_off += other / ex->runs.size();
    }
    c.Expect(wins >= 16, std::string(off) + " beaten in only " + std::to_string(wins) + "/20");
    c.Expect(mean_on <= mean_off * (1 + 1e-12), std::string(off) + " has lower mean");
    detail += std::string(off) + " " + std::to_string(wins) + "/20 ";
  }

  TaskConfig rep = BfsTask();
  rep.repeats = 2;
  rep.baselines = false;
  auto rx = RunExperiment(rep);
  c.Expect(rx.ok(), "repeated-client experiment failed");
  if (!rx.ok()) return c;
  int free_count = 0, total = 0;
  for (const RunResult& r : rx->runs) {
    for (const TraceEntry& e : r.systems.at("dpq")) {
      free_count += !e.rejected && e.epsilon == 0;
      ++total;
    }
  }
  c.Expect(2 * free_count > total, "free workloads " + std::to_string(free_count) + "/" + std::to_string(total));
  if (c.ok) detail += "; free " + std::to_string(free_count) + "/" + std::to_string(total);
  c.why = c.ok ? detail : c.why + " [" + detail + "]";
  return c;
}

}  // namespace
}  // namespace dpq

int main() {
  using namespace dpq;
  Report("worked-example goldens", 5, Goldens);
  Report("property: full-rank transform and support", 40, FrtProperties);
  Report("property: bucket growth per row", 40, GrowthProperty);
  Report("property: proactive rows keep the paid norm", 40, PqProperty);
  Report("property: cache-aware budget never above cacheless", 120, DominanceProperty);
  Report("property: ledger bound and non-negative charges", 120, LedgerProperty);
  Report("numerics: Monte-Carlo squared error vs closed form", 90, MonteCarloVsClosedForm);
  Report("numerics: single-query calibration", 90, SingleQueryCalibration);
  Report("relax: KS marginal and ledger identity", 120, RelaxStatistics);
  Report("harness: BFS vs cacheless, RRQ vs naive cache", 600, BfsAndRrq);
  Report("harness: ablation and free workloads", 600, Ablation);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
