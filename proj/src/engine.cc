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

#include "dpq/engine.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <boost/container_hash/hash.hpp>

#include "absl/strings/str_cat.h"
#include "dpq/expander.h"
#include "dpq/mmm.h"
#include "dpq/relax.h"

namespace dpq {

// ---------------------------------------------------------------- config

absl::StatusOr<EngineConfig> EngineConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("config must be an object");
  EngineConfig c;
  try {
    c.total_budget = j.value("total_budget", c.total_budget);
    c.seed = j.value("seed", c.seed);
    c.k_arity = j.value("k_arity", c.k_arity);
    c.mc_samples = j.value("mc_samples", c.mc_samples);
    c.phi = j.value("phi", c.phi);
    c.se_limit = j.value("se_limit", c.se_limit);
    c.enable_mmm = j.value("enable_mmm", c.enable_mmm);
    c.enable_se = j.value("enable_se", c.enable_se);
    c.enable_pq = j.value("enable_pq", c.enable_pq);
    c.enable_rp = j.value("enable_rp", c.enable_rp);
    c.dataset_path = j.value("dataset_path", c.dataset_path);
    c.schema_path = j.value("schema_path", c.schema_path);
    c.snapshot_path = j.value("snapshot_path", c.snapshot_path);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad config: ", e.what()));
  }
  if (absl::Status s = c.Validate(); !s.ok()) return s;
  return c;
}

absl::StatusOr<EngineConfig> EngineConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat("bad JSON in ", path));
  }
  absl::StatusOr<EngineConfig> c = FromJson(j);
  if (!c.ok()) return c;
  // Relative data paths are resolved against the config file's directory.
  const std::string dir =
      path.find('/') == std::string::npos ? "" : path.substr(0, path.rfind('/') + 1);
  for (std::string* p : {&c->dataset_path, &c->schema_path, &c->snapshot_path}) {
    if (!p->empty() && (*p)[0] != '/') *p = dir + *p;
  }
  return c;
}

nlohmann::json EngineConfig::ToJson() const {
  return {{"total_budget", total_budget}, {"seed", seed},
          {"k_arity", k_arity},           {"mc_samples", mc_samples},
          {"phi", phi},                   {"se_limit", se_limit},
          {"enable_mmm", enable_mmm},     {"enable_se", enable_se},
          {"enable_pq", enable_pq},       {"enable_rp", enable_rp},
          {"dataset_path", dataset_path}, {"schema_path", schema_path},
          {"snapshot_path", snapshot_path}};
}

absl::Status EngineConfig::Validate() const {
  if (!(total_budget >= 0)) return absl::InvalidArgumentError("total_budget < 0");
  if (k_arity < 2) return absl::InvalidArgumentError("k_arity must be >= 2");
  if (mc_samples < 1000) return absl::InvalidArgumentError("mc_samples must be >= 1000");
  if (!(phi > 0)) return absl::InvalidArgumentError("phi must be positive");
  if (se_limit < 0) return absl::InvalidArgumentError("se_limit must be >= 0");
  return absl::OkStatus();
}

std::string_view MechanismName(Mechanism m) {
  switch (m) {
    case Mechanism::kFree: return "Free";
    case Mechanism::kMmm: return "MMM";
    case Mechanism::kSe: return "SE";
    case Mechanism::kRp: return "RP";
  }
  return "?";
}

namespace {

absl::StatusOr<Mechanism> ParseMechanism(std::string_view s) {
  for (Mechanism m : {Mechanism::kFree, Mechanism::kMmm, Mechanism::kSe,
                      Mechanism::kRp}) {
    if (MechanismName(m) == s) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown mechanism ", std::string(s)));
}

}  // namespace

// ---------------------------------------------------------------- ledger

size_t BudgetLedger::answered() const {
  return std::count_if(entries_.begin(), entries_.end(),
                       [](const LedgerEntry& e) { return e.accepted; });
}

void BudgetLedger::RecordAnswer(uint64_t id, Mechanism m, double epsilon) {
  consumed_ += epsilon;
  entries_.push_back({id, m, epsilon, true});
}

void BudgetLedger::RecordRejection(uint64_t id, Mechanism m, double epsilon) {
  entries_.push_back({id, m, epsilon, false});
}

nlohmann::json BudgetLedger::ToJson() const {
  nlohmann::json hist = nlohmann::json::array();
  for (const LedgerEntry& e : entries_) {
    hist.push_back({{"id", e.id},
                    {"mechanism", MechanismName(e.mechanism)},
                    {"epsilon", e.epsilon},
                    {"accepted", e.accepted}});
  }
  return {{"total", total_}, {"consumed", consumed_}, {"history", hist}};
}

absl::StatusOr<BudgetLedger> BudgetLedger::FromJson(const nlohmann::json& j) {
  try {
    BudgetLedger l(j.at("total").get<double>());
    l.consumed_ = j.at("consumed").get<double>();
    for (const auto& e : j.at("history")) {
      absl::StatusOr<Mechanism> m = ParseMechanism(e.at("mechanism").get<std::string>());
      if (!m.ok()) return m.status();
      l.entries_.push_back({e.at("id").get<uint64_t>(), *m,
                            e.at("epsilon").get<double>(),
                            e.at("accepted").get<bool>()});
    }
    return l;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad ledger: ", e.what()));
  }
}

// ---------------------------------------------------------------- requests

absl::StatusOr<WorkloadRequest> WorkloadRequest::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("request must be an object");
  WorkloadRequest r;
  try {
    if (!j.contains("attributes") || !j["attributes"].is_array() ||
        j["attributes"].empty()) {
      return absl::InvalidArgumentError("request needs a non-empty 'attributes' list");
    }
    std::vector<std::string> given = j["attributes"].get<std::vector<std::string>>();
    r.attributes = CanonicalAttributes(given);
    if (r.attributes.size() != given.size()) {
      return absl::InvalidArgumentError("duplicate attribute in request");
    }
    if (!j.contains("queries") || !j["queries"].is_array() || j["queries"].empty()) {
      return absl::InvalidArgumentError("request needs a non-empty 'queries' list");
    }
    auto parse_interval = [](const nlohmann::json& v) -> absl::StatusOr<Interval> {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
          !v[1].is_number_integer()) {
        return absl::InvalidArgumentError("interval must be [lo, hi] integers");
      }
      Interval iv{v[0].get<int64_t>(), v[1].get<int64_t>()};
      if (iv.lo >= iv.hi) {
        return absl::InvalidArgumentError(absl::StrCat("empty interval ", ToString(iv)));
      }
      return iv;
    };
    const auto& qs = j["queries"];
    for (size_t qi = 0; qi < qs.size(); ++qi) {
      const auto& q = qs[qi];
      RangeQuery rq;
      rq.ranges.resize(r.attributes.size());
      absl::Status bad;
      if (q.is_object()) {
        for (size_t d = 0; d < r.attributes.size() && bad.ok(); ++d) {
          if (!q.contains(r.attributes[d])) {
            bad = absl::InvalidArgumentError(
                absl::StrCat("no range for attribute ", r.attributes[d]));
            break;
          }
          absl::StatusOr<Interval> iv = parse_interval(q[r.attributes[d]]);
          if (!iv.ok()) bad = iv.status(); else rq.ranges[d] = *iv;
        }
      } else if (q.is_array() && given.size() == 1 && q.size() == 2 &&
                 q[0].is_number()) {
        absl::StatusOr<Interval> iv = parse_interval(q);
        if (!iv.ok()) bad = iv.status(); else rq.ranges[0] = *iv;
      } else if (q.is_array() && q.size() == given.size()) {
        for (size_t g = 0; g < given.size() && bad.ok(); ++g) {
          absl::StatusOr<Interval> iv = parse_interval(q[g]);
          if (!iv.ok()) { bad = iv.status(); break; }
          size_t d = std::find(r.attributes.begin(), r.attributes.end(), given[g]) -
                     r.attributes.begin();
          rq.ranges[d] = *iv;
        }
      } else {
        bad = absl::InvalidArgumentError("query must be an object or a list of ranges");
      }
      if (!bad.ok()) {
        return absl::InvalidArgumentError(absl::StrCat("query ", qi, ": ", bad.message()));
      }
      r.queries.push_back(std::move(rq));
    }
    if (!j.contains("accuracy")) return absl::InvalidArgumentError("request needs 'accuracy'");
    absl::StatusOr<AccuracyRequirement> acc = AccuracyRequirement::FromJson(j["accuracy"]);
    if (!acc.ok()) return acc.status();
    r.accuracy = *acc;
    r.client = j.value("client", "");
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad request: ", e.what()));
  }
  return r;
}

nlohmann::json WorkloadRequest::ToJson() const {
  nlohmann::json qs = nlohmann::json::array();
  for (const RangeQuery& q : queries) {
    nlohmann::json o = nlohmann::json::object();
    for (size_t d = 0; d < attributes.size(); ++d) {
      o[attributes[d]] = {q.ranges[d].lo, q.ranges[d].hi};
    }
    qs.push_back(std::move(o));
  }
  nlohmann::json j = {{"attributes", attributes}, {"queries", qs},
                      {"accuracy", accuracy.ToJson()}};
  if (!client.empty()) j["client"] = client;
  return j;
}

// ---------------------------------------------------------------- engine

Engine::Engine(EngineConfig config, DomainSchema schema,
               std::shared_ptr<const Dataset> dataset)
    : config_(std::move(config)),
      schema_(std::move(schema)),
      vectors_(std::move(dataset)),
      ledger_(config_.total_budget),
      rng_(config_.seed) {}

absl::StatusOr<std::unique_ptr<Engine>> Engine::Create(
    EngineConfig config, DomainSchema schema,
    std::shared_ptr<const Dataset> dataset) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (dataset == nullptr) return absl::InvalidArgumentError("no dataset");
  return std::unique_ptr<Engine>(
      new Engine(std::move(config), std::move(schema), std::move(dataset)));
}

absl::StatusOr<std::unique_ptr<Engine>> Engine::FromConfig(const EngineConfig& config) {
  absl::StatusOr<DomainSchema> schema = DomainSchema::Load(config.schema_path);
  if (!schema.ok()) return schema.status();
  absl::StatusOr<Dataset> data = IngestCsv(config.dataset_path, *schema);
  if (!data.ok()) return data.status();
  absl::StatusOr<std::unique_ptr<Engine>> engine =
      Create(config, *schema, std::make_shared<const Dataset>(*std::move(data)));
  if (!engine.ok()) return engine;
  if (!config.snapshot_path.empty()) {
    std::ifstream in(config.snapshot_path);
    if (in) {
      nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
      if (j.is_discarded()) return absl::InvalidArgumentError("bad snapshot JSON");
      if (absl::Status s = (*engine)->RestoreSnapshot(j); !s.ok()) return s;
    }
  }
  return engine;
}

void Engine::Reset(uint64_t seed, double total_budget) {
  config_.seed = seed;
  config_.total_budget = total_budget;
  caches_.Clear();
  ledger_ = BudgetLedger(total_budget);
  rng_.seed(seed);
  next_id_ = 1;
}

absl::StatusOr<std::shared_ptr<const View>> Engine::GetView(
    const std::vector<std::string>& attrs) {
  std::vector<std::string> names = CanonicalAttributes(attrs);
  if (names.empty()) return absl::InvalidArgumentError("empty attribute set");
  const std::string key = AttributeSetKey(names);
  if (auto it = views_.find(key); it != views_.end()) return it->second;
  std::vector<std::shared_ptr<const StrategyTree>> trees;
  for (const std::string& n : names) {
    auto it = trees_.find(n);
    if (it == trees_.end()) {
      absl::StatusOr<StrategyTree> t = BuildGlobalTree(schema_, n, config_.k_arity);
      if (!t.ok()) return t.status();
      it = trees_.emplace(n, std::make_shared<const StrategyTree>(*std::move(t))).first;
    }
    trees.push_back(it->second);
  }
  auto view = std::make_shared<const View>(names, std::move(trees));
  views_.emplace(key, view);
  return view;
}

const StrategyCache* Engine::FindCache(const std::vector<std::string>& attrs) const {
  return caches_.Find(AttributeSetKey(CanonicalAttributes(attrs)));
}

uint64_t Engine::EstimateSeed(const WorkloadRequest& req) const {
  // Content-derived so that the same workload under the same requirement is
  // always calibrated against the same Monte-Carlo draws.
  size_t h = 0;
  boost::hash_combine(h, config_.seed);
  for (const std::string& a : req.attributes) boost::hash_combine(h, a);
  for (const RangeQuery& q : req.queries) {
    for (const Interval& iv : q.ranges) {
      boost::hash_combine(h, iv.lo);
      boost::hash_combine(h, iv.hi);
    }
  }
  boost::hash_combine(h, static_cast<int>(req.accuracy.kind()));
  boost::hash_combine(h, req.accuracy.alpha());
  boost::hash_combine(h, req.accuracy.beta());
  return h;
}

namespace {

struct PreparedRequest {
  std::shared_ptr<const View> view;
  Workload workload;
  PreparedStrategy strategy;
  MmmOptions opts;
};

}  // namespace

absl::StatusOr<double> Engine::CachelessEpsilon(const WorkloadRequest& req) {
  absl::StatusOr<std::shared_ptr<const View>> view = GetView(req.attributes);
  if (!view.ok()) return view.status();
  for (size_t i = 0; i < req.queries.size(); ++i) {
    if (absl::Status s = (*view)->Validate(req.queries[i]); !s.ok()) {
      return absl::InvalidArgumentError(absl::StrCat("query ", i, ": ", s.message()));
    }
  }
  absl::StatusOr<StrategyMatrix> a = GenerateStrategy(**view, req.queries);
  if (!a.ok()) return a.status();
  Workload w = (*view)->MakeWorkload(req.queries);
  PreparedStrategy s = Prepare(*std::move(a), w);
  MmmOptions opts;
  opts.phi = config_.phi;
  opts.mc.samples = config_.mc_samples;
  opts.mc.seed = EstimateSeed(req);
  return CachelessBudget(s, req.accuracy, opts).epsilon;
}

absl::StatusOr<Outcome> Engine::ProcessWorkload(const WorkloadRequest& req) {
  if (req.queries.empty()) return absl::InvalidArgumentError("empty workload");
  absl::StatusOr<std::shared_ptr<const View>> view_or = GetView(req.attributes);
  if (!view_or.ok()) return view_or.status();
  const View& view = **view_or;
  for (size_t i = 0; i < req.queries.size(); ++i) {
    if (absl::Status s = view.Validate(req.queries[i]); !s.ok()) {
      return absl::InvalidArgumentError(absl::StrCat("query ", i, ": ", s.message()));
    }
  }
  absl::StatusOr<std::shared_ptr<const DataVector>> x = vectors_.Get(view.attributes());
  if (!x.ok()) return x.status();
  absl::StatusOr<StrategyMatrix> a = GenerateStrategy(view, req.queries);
  if (!a.ok()) return a.status();

  const uint64_t id = next_id_++;
  Workload w = view.MakeWorkload(req.queries);
  PreparedStrategy base = Prepare(*std::move(a), w);
  StrategyCache& cache =
      caches_.GetOrCreate(AttributeSetKey(view.attributes()), view.node_count());

  MmmOptions opts;
  opts.phi = config_.phi;
  opts.mc.samples = config_.mc_samples;
  opts.mc.seed = EstimateSeed(req);

  Estimates est;
  const CostPlan cacheless = CachelessBudget(base, req.accuracy, opts);
  est.cacheless = cacheless.epsilon;
  const CostPlan mmm =
      config_.enable_mmm
          ? EstimatePrivacyBudget(base, CachedScales(base.raw, &cache),
                                  req.accuracy, opts, &cacheless)
          : cacheless;
  est.mmm = mmm.epsilon;

  const View* pq_view = config_.enable_pq ? &view : nullptr;
  auto finish = [&](absl::StatusOr<MechanismAnswer> ans, Mechanism m,
                    size_t free_rows, size_t paid_rows) -> absl::StatusOr<Outcome> {
    if (!ans.ok()) return ans.status();
    if (ans->epsilon == 0) m = Mechanism::kFree;
    ledger_.RecordAnswer(id, m, ans->epsilon);
    Answered out;
    out.id = id;
    out.responses.assign(ans->responses.data(),
                         ans->responses.data() + ans->responses.size());
    out.epsilon = ans->epsilon;
    out.mechanism = m;
    out.free_rows = free_rows;
    out.paid_rows = paid_rows;
    out.proactive_rows = ans->proactive.size();
    out.timestamp = ans->timestamp;
    out.estimates = est;
    return Outcome(std::move(out));
  };

  if (mmm.is_free()) {
    return finish(AnswerWorkload(base, mmm, **x, cache, rng_, nullptr),
                  Mechanism::kFree, mmm.free_rows.size(), 0);
  }

  std::optional<RelaxPlan> rp;
  if (config_.enable_rp) {
    rp = EstimateRelax(view, base.raw, cache, cacheless.paid_scale);
    if (rp) est.rp = rp->epsilon;
  }

  std::optional<PreparedStrategy> expanded;
  CostPlan se_plan;
  if (config_.enable_se) {
    std::vector<NodeKey> added;
    StrategyMatrix ae = GenerateExpandedStrategy(view, base.raw, cache, mmm.paid_scale,
                                                 config_.se_limit, &added);
    if (!added.empty()) {
      expanded = Prepare(std::move(ae), w);
      MmmOptions se_opts = opts;
      size_t h = opts.mc.seed;
      boost::hash_combine(h, std::string_view("expanded"));
      se_opts.mc.seed = h;
      se_plan = CacheAwareSearch(*expanded, CachedScales(expanded->raw, &cache),
                                 req.accuracy, se_opts);
      est.se = se_plan.epsilon;
    }
  }

  Mechanism choice = Mechanism::kMmm;
  double eps = est.mmm;
  if (est.se < eps) {
    choice = Mechanism::kSe;
    eps = est.se;
  }
  if (est.rp < eps) {
    choice = Mechanism::kRp;
    eps = est.rp;
  }

  if (ledger_.WouldReject(eps)) {
    ledger_.RecordRejection(id, choice, eps);
    Rejected r;
    r.id = id;
    r.required_epsilon = eps;
    r.remaining_budget = ledger_.remaining();
    r.mechanism = choice;
    r.estimates = est;
    return Outcome(r);
  }

  switch (choice) {
    case Mechanism::kSe:
      return finish(AnswerWorkload(*expanded, se_plan, **x, cache, rng_, pq_view),
                    Mechanism::kSe, se_plan.free_rows.size(), se_plan.paid_rows.size());
    case Mechanism::kRp:
      return finish(AnswerRelax(view, base, *rp, **x, cache, rng_), Mechanism::kRp, 0,
                    base.raw.size());
    default:
      return finish(AnswerWorkload(base, mmm, **x, cache, rng_, pq_view),
                    Mechanism::kMmm, mmm.free_rows.size(), mmm.paid_rows.size());
  }
}

nlohmann::json Engine::SnapshotJson() const {
  nlohmann::json j = caches_.ToJson();
  j["ledger"] = ledger_.ToJson();
  j["next_id"] = next_id_;
  j["seed"] = config_.seed;
  return j;
}

absl::Status Engine::RestoreSnapshot(const nlohmann::json& j) {
  absl::StatusOr<CacheRegistry> caches = CacheRegistry::FromJson(j);
  if (!caches.ok()) return caches.status();
  if (!j.contains("ledger")) return absl::InvalidArgumentError("snapshot lacks ledger");
  absl::StatusOr<BudgetLedger> ledger = BudgetLedger::FromJson(j["ledger"]);
  if (!ledger.ok()) return ledger.status();
  caches_ = *std::move(caches);
  ledger_ = *std::move(ledger);
  config_.total_budget = ledger_.total();
  next_id_ = j.value("next_id", next_id_);
  // Continue the noise stream deterministically from the restored state.
  rng_.seed(config_.seed ^ (next_id_ * 0x9E3779B97F4A7C15ULL));
  return absl::OkStatus();
}

absl::Status Engine::SaveSnapshot(const std::string& path) const {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << SnapshotJson().dump(1) << "\n";
  return absl::OkStatus();
}

}  // namespace dpq
