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

#include "dpq/harness.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <boost/container_hash/hash.hpp>

#include "absl/strings/str_cat.h"

namespace dpq {

// ---------------------------------------------------------------- data

Dataset MakeSynthetic(const SyntheticSpec& spec) {
  Attribute attr;
  attr.name = spec.attribute;
  attr.type = AttributeType::kIntRange;
  attr.lo = 0;
  attr.hi = static_cast<double>(spec.domain);

  Rng rng(spec.seed);
  std::vector<double> weights(spec.domain, 1.0);
  switch (spec.distribution) {
    case Distribution::kUniform:
      break;
    case Distribution::kZipf:
      for (int64_t i = 0; i < spec.domain; ++i) {
        weights[i] = std::pow(static_cast<double>(i + 1), -spec.zipf_exponent);
      }
      break;
    case Distribution::kPlanted: {
      const int64_t width = std::clamp<int64_t>(
          std::llround(spec.sparse_fraction * spec.domain), 0, spec.domain - 1);
      std::uniform_int_distribution<int64_t> at(0, spec.domain - width);
      const int64_t start = at(rng);
      for (int64_t i = start; i < start + width; ++i) weights[i] = 0;
      break;
    }
  }
  std::discrete_distribution<int64_t> draw(weights.begin(), weights.end());
  std::vector<int64_t> column(spec.rows);
  for (int64_t& v : column) v = draw(rng);

  Dataset d;
  d.schema = DomainSchema({attr});
  d.columns.push_back(std::move(column));
  d.row_count = spec.rows;
  return d;
}

// ---------------------------------------------------------------- clients

namespace {

WorkloadRequest NodesRequest(const View& view, std::span<const int> nodes,
                             const AccuracyRequirement& acc) {
  WorkloadRequest r;
  r.attributes = view.attributes();
  r.accuracy = acc;
  for (int id : nodes) {
    r.queries.push_back({{view.tree(0).node(id).range}});
  }
  return r;
}

// Runs a fresh explorer from `make` `times` times back to back.
class Repeating : public Explorer {
 public:
  Repeating(std::function<std::unique_ptr<Explorer>()> make, int times)
      : make_(std::move(make)), left_(times) {}

  std::optional<WorkloadRequest> Next() override {
    while (!done_) {
      if (!current_) {
        if (left_-- <= 0) {
          done_ = true;
          break;
        }
        current_ = make_();
      }
      if (std::optional<WorkloadRequest> r = current_->Next()) return r;
      current_.reset();
    }
    return std::nullopt;
  }
  void Observe(const Answered& a) override { current_->Observe(a); }
  void Refused() override {
    done_ = true;
    current_.reset();
  }

 private:
  std::function<std::unique_ptr<Explorer>()> make_;
  int left_;
  std::unique_ptr<Explorer> current_;
};

}  // namespace

BfsExplorer::BfsExplorer(std::shared_ptr<const View> view, double threshold,
                         AccuracyRequirement accuracy)
    : view_(std::move(view)), threshold_(threshold), accuracy_(accuracy), frontier_{0} {}

std::optional<WorkloadRequest> BfsExplorer::Next() {
  if (done_ || frontier_.empty()) return std::nullopt;
  return NodesRequest(*view_, frontier_, accuracy_);
}

void BfsExplorer::Observe(const Answered& answer) {
  const StrategyTree& tree = view_->tree(0);
  std::vector<int> next;
  for (size_t i = 0; i < frontier_.size(); ++i) {
    if (answer.responses[i] < threshold_) continue;
    for (int c : tree.children(frontier_[i])) next.push_back(c);
  }
  frontier_ = std::move(next);
}

DfsExplorer::DfsExplorer(std::shared_ptr<const View> view, double threshold,
                         AccuracyRequirement accuracy, uint64_t seed, int max_steps)
    : view_(std::move(view)),
      threshold_(threshold),
      accuracy_(accuracy),
      rng_(seed),
      steps_left_(max_steps) {}

std::optional<WorkloadRequest> DfsExplorer::Next() {
  if (done_ || steps_left_-- <= 0) return std::nullopt;
  return NodesRequest(*view_, view_->tree(0).children(expand_), accuracy_);
}

void DfsExplorer::Observe(const Answered& answer) {
  const StrategyTree& tree = view_->tree(0);
  std::span<const int> kids = tree.children(expand_);
  Level level;
  level.order.assign(kids.begin(), kids.end());
  std::vector<double> noisy(answer.responses.begin(), answer.responses.end());
  std::vector<size_t> idx(kids.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return noisy[a] < noisy[b]; });
  for (size_t i = 0; i < idx.size(); ++i) level.order[i] = kids[idx[i]];
  for (size_t i : idx) {
    // Non-zero after rounding and no larger than the threshold.
    if (noisy[i] >= 0.5 && noisy[i] <= threshold_) {
      found_ = true;
      done_ = true;
      return;
    }
  }
  stack_.push_back(std::move(level));
  if (!tree.node(stack_.back().order[0]).is_leaf()) {
    expand_ = stack_.back().order[0];
    return;
  }
  // Dead end: back up 1..depth levels, then take the next-smallest sibling
  // that can still be expanded, backing up further if a level runs out.
  std::uniform_int_distribution<size_t> up(1, stack_.size());
  size_t steps = up(rng_);
  while (steps-- > 1) stack_.pop_back();
  while (!stack_.empty()) {
    Level& top = stack_.back();
    while (++top.next < top.order.size()) {
      if (!tree.node(top.order[top.next]).is_leaf()) {
        expand_ = top.order[top.next];
        return;
      }
    }
    stack_.pop_back();
  }
  done_ = true;
}

RrqExplorer::RrqExplorer(std::string attribute, RrqParams params, uint64_t seed)
    : attribute_(std::move(attribute)), params_(params), rng_(seed) {}

std::optional<WorkloadRequest> RrqExplorer::Next() {
  if (done_ || issued_ >= params_.count) return std::nullopt;
  ++issued_;
  std::normal_distribution<double> start(params_.start_mean, params_.start_sd);
  std::normal_distribution<double> length(params_.length_mean, params_.length_sd);
  std::normal_distribution<double> acc(params_.accuracy_mean, params_.accuracy_sd);
  const int64_t n = params_.domain;
  const int64_t s = std::clamp<int64_t>(std::llround(start(rng_)), 0, n - 1);
  const int64_t l = std::max<int64_t>(std::llround(length(rng_)), 1);
  const double a2 = std::max(acc(rng_), 1.0);
  WorkloadRequest r;
  r.attributes = {attribute_};
  r.queries.push_back(SingleRange(s, std::min(s + l, n)));
  r.accuracy = *AccuracyRequirement::ExpectedSquaredError(a2);
  return r;
}

// ---------------------------------------------------------------- traces

absl::StatusOr<Trace> RunClients(Engine& engine,
                                 std::vector<std::unique_ptr<Explorer>>& clients,
                                 uint64_t seed) {
  Rng rng(seed);
  std::vector<int> active(clients.size());
  for (size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);
  Trace trace;
  while (!active.empty()) {
    std::uniform_int_distribution<size_t> pick(0, active.size() - 1);
    const size_t slot = pick(rng);
    Explorer& client = *clients[active[slot]];
    std::optional<WorkloadRequest> req = client.Next();
    if (!req) {
      active.erase(active.begin() + slot);
      continue;
    }
    absl::StatusOr<Outcome> out = engine.ProcessWorkload(*req);
    if (!out.ok()) return out.status();
    TraceEntry e;
    e.client = active[slot];
    e.request = *std::move(req);
    if (const auto* a = std::get_if<Answered>(&*out)) {
      e.epsilon = a->epsilon;
      e.mechanism = a->mechanism;
      client.Observe(*a);
    } else {
      e.rejected = true;
      e.mechanism = std::get<Rejected>(*out).mechanism;
      client.Refused();
    }
    trace.push_back(std::move(e));
  }
  return trace;
}

namespace {

absl::StatusOr<Trace> RunSingle(Engine& engine, std::unique_ptr<Explorer> client,
                                uint64_t seed) {
  std::vector<std::unique_ptr<Explorer>> clients;
  clients.push_back(std::move(client));
  return RunClients(engine, clients, seed);
}

}  // namespace

absl::StatusOr<Trace> RunBfs(Engine& engine, const std::string& attribute,
                             double threshold, double alpha, double beta) {
  absl::StatusOr<std::shared_ptr<const View>> view = engine.GetView({attribute});
  if (!view.ok()) return view.status();
  absl::StatusOr<AccuracyRequirement> acc = AccuracyRequirement::WorstError(alpha, beta);
  if (!acc.ok()) return acc.status();
  return RunSingle(engine, std::make_unique<BfsExplorer>(*view, threshold, *acc), 0);
}

absl::StatusOr<Trace> RunDfs(Engine& engine, const std::string& attribute,
                             double threshold, double alpha, double beta,
                             uint64_t seed) {
  absl::StatusOr<std::shared_ptr<const View>> view = engine.GetView({attribute});
  if (!view.ok()) return view.status();
  absl::StatusOr<AccuracyRequirement> acc = AccuracyRequirement::WorstError(alpha, beta);
  if (!acc.ok()) return acc.status();
  return RunSingle(engine,
                   std::make_unique<DfsExplorer>(*view, threshold, *acc, seed), seed);
}

absl::StatusOr<Trace> RunRrq(Engine& engine, const std::string& attribute,
                             const RrqParams& params, uint64_t seed) {
  return RunSingle(engine, std::make_unique<RrqExplorer>(attribute, params, seed), seed);
}

absl::StatusOr<Trace> ReplayCacheless(Engine& engine, const Trace& trace) {
  Trace out;
  for (const TraceEntry& t : trace) {
    absl::StatusOr<double> eps = engine.CachelessEpsilon(t.request);
    if (!eps.ok()) return eps.status();
    TraceEntry e{t.client, t.request, *eps, Mechanism::kMmm, false};
    if (*eps == 0) e.mechanism = Mechanism::kFree;
    out.push_back(std::move(e));
  }
  return out;
}

absl::StatusOr<Trace> ReplayNaiveCache(Engine& engine, const Trace& trace) {
  Trace out;
  std::vector<const WorkloadRequest*> seen;
  for (const TraceEntry& t : trace) {
    bool repeat = false;
    for (const WorkloadRequest* p : seen) {
      if (p->attributes == t.request.attributes && p->queries == t.request.queries &&
          t.request.accuracy.IsLooserOrEqual(p->accuracy)) {
        repeat = true;
        break;
      }
    }
    TraceEntry e{t.client, t.request, 0, Mechanism::kFree, false};
    if (!repeat) {
      absl::StatusOr<double> eps = engine.CachelessEpsilon(t.request);
      if (!eps.ok()) return eps.status();
      e.epsilon = *eps;
      if (*eps > 0) e.mechanism = Mechanism::kMmm;
      seen.push_back(&t.request);
    }
    out.push_back(std::move(e));
  }
  return out;
}

absl::StatusOr<Trace> Replay(Engine& engine, const Trace& trace) {
  Trace out;
  for (const TraceEntry& t : trace) {
    absl::StatusOr<Outcome> o = engine.ProcessWorkload(t.request);
    if (!o.ok()) return o.status();
    TraceEntry e{t.client, t.request, 0, Mechanism::kMmm, false};
    if (const auto* a = std::get_if<Answered>(&*o)) {
      e.epsilon = a->epsilon;
      e.mechanism = a->mechanism;
    } else {
      e.rejected = true;
      e.mechanism = std::get<Rejected>(*o).mechanism;
    }
    out.push_back(std::move(e));
  }
  return out;
}

double CumulativeEpsilon(const Trace& trace) {
  double sum = 0;
  for (const TraceEntry& e : trace) {
    if (!e.rejected) sum += e.epsilon;
  }
  return sum;
}

// ---------------------------------------------------------------- experiments

namespace {

uint64_t RunSeed(uint64_t seed, int run) {
  size_t h = 0;
  boost::hash_combine(h, seed);
  boost::hash_combine(h, run);
  return h;
}

}  // namespace

absl::StatusOr<RunResult> RunOnce(const TaskConfig& config, int run) {
  const uint64_t seed = RunSeed(config.seed, run);
  SyntheticSpec spec = config.data;
  spec.seed = seed;
  if (config.kind == TaskKind::kRrq) {
    spec.domain = config.rrq.domain;
    spec.distribution = Distribution::kUniform;
  }
  auto data = std::make_shared<const Dataset>(MakeSynthetic(spec));

  EngineConfig ec = config.engine;
  ec.seed = seed;
  ec.enable_mmm = ec.enable_se = ec.enable_pq = ec.enable_rp = true;
  absl::StatusOr<std::unique_ptr<Engine>> engine = Engine::Create(ec, data->schema, data);
  if (!engine.ok()) return engine.status();

  Rng rng(seed ^ 0x5DEECE66DULL);
  std::vector<std::unique_ptr<Explorer>> clients;
  if (config.kind == TaskKind::kRrq) {
    clients.push_back(std::make_unique<RrqExplorer>(spec.attribute, config.rrq, rng()));
  } else {
    absl::StatusOr<std::shared_ptr<const View>> view = (*engine)->GetView({spec.attribute});
    if (!view.ok()) return view.status();
    const double rows = static_cast<double>(spec.rows);
    std::uniform_int_distribution<size_t> pick_alpha(0, config.alpha_fractions.size() - 1);
    std::uniform_real_distribution<double> pick_threshold(config.threshold_lo,
                                                          config.threshold_hi);
    for (int c = 0; c < config.clients; ++c) {
      const double alpha = config.alpha_fractions[pick_alpha(rng)] * rows;
      const double threshold = pick_threshold(rng) * rows;
      absl::StatusOr<AccuracyRequirement> acc =
          AccuracyRequirement::WorstError(alpha, config.beta);
      if (!acc.ok()) return acc.status();
      const uint64_t client_seed = rng();
      std::function<std::unique_ptr<Explorer>()> make;
      if (config.kind == TaskKind::kBfs) {
        make = [v = *view, threshold, a = *acc] {
          return std::make_unique<BfsExplorer>(v, threshold, a);
        };
      } else {
        auto counter = std::make_shared<uint64_t>(client_seed);
        make = [v = *view, threshold, a = *acc, counter] {
          return std::make_unique<DfsExplorer>(v, threshold, a, (*counter)++);
        };
      }
      clients.push_back(std::make_unique<Repeating>(std::move(make), config.repeats));
    }
  }

  RunResult result;
  absl::StatusOr<Trace> trace = RunClients(**engine, clients, rng());
  if (!trace.ok()) return trace.status();
  if (config.baselines) {
    absl::StatusOr<Trace> cl = ReplayCacheless(**engine, *trace);
    if (!cl.ok()) return cl.status();
    absl::StatusOr<Trace> naive = ReplayNaiveCache(**engine, *trace);
    if (!naive.ok()) return naive.status();
    result.systems["Cacheless"] = *std::move(cl);
    result.systems["NaiveCache"] = *std::move(naive);
  }
  if (config.ablation) {
    for (const char* off : {"MMM", "SE", "PQ", "RP"}) {
      EngineConfig ac = ec;
      const std::string name = off;
      ac.enable_mmm = name != "MMM";
      ac.enable_se = name != "SE";
      ac.enable_pq = name != "PQ";
      ac.enable_rp = name != "RP";
      absl::StatusOr<std::unique_ptr<Engine>> e = Engine::Create(ac, data->schema, data);
      if (!e.ok()) return e.status();
      absl::StatusOr<Trace> t = Replay(**e, *trace);
      if (!t.ok()) return t.status();
      result.systems[absl::StrCat("no", name)] = *std::move(t);
    }
  }
  result.systems["dpq"] = *std::move(trace);
  return result;
}

absl::StatusOr<Experiment> RunExperiment(const TaskConfig& config) {
  Experiment ex;
  for (int r = 0; r < config.runs; ++r) {
    absl::StatusOr<RunResult> one = RunOnce(config, r);
    if (!one.ok()) return one.status();
    ex.runs.push_back(*std::move(one));
  }
  return ex;
}

void Experiment::WriteRunsCsv(std::ostream& out) const {
  out << "run,workload_idx,system,epsilon,cum_epsilon,mechanism\n";
  for (size_t r = 0; r < runs.size(); ++r) {
    for (const auto& [name, trace] : runs[r].systems) {
      double cum = 0;
      for (size_t i = 0; i < trace.size(); ++i) {
        const TraceEntry& e = trace[i];
        if (!e.rejected) cum += e.epsilon;
        out << r << ',' << i << ',' << name << ',' << (e.rejected ? 0.0 : e.epsilon)
            << ',' << cum << ','
            << (e.rejected ? std::string("Rejected") : std::string(MechanismName(e.mechanism)))
            << '\n';
      }
    }
  }
}

void Experiment::WriteFreqCsv(std::ostream& out) const {
  std::map<std::string, std::map<Mechanism, double>> freq;
  for (const RunResult& run : runs) {
    for (const auto& [name, trace] : run.systems) {
      auto& f = freq[name];
      for (const TraceEntry& e : trace) {
        if (!e.rejected) f[e.mechanism] += 1.0;
      }
    }
  }
  const double n = runs.empty() ? 1.0 : static_cast<double>(runs.size());
  out << "system,Free,MMM,RP,SE\n";
  for (auto& [name, f] : freq) {
    out << name << ',' << f[Mechanism::kFree] / n << ',' << f[Mechanism::kMmm] / n << ','
        << f[Mechanism::kRp] / n << ',' << f[Mechanism::kSe] / n << '\n';
  }
}

}  // namespace dpq
