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

#include "dpq/cache.h"

#include <algorithm>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dpq {

absl::StatusOr<StrategyCache::LookupResult> StrategyCache::Lookup(
    const StrategyMatrix& a) const {
  LookupResult out;
  for (size_t i = 0; i < a.size(); ++i) {
    NodeKey k = a.rows()[i].key;
    if (node_count_ != 0 && k >= node_count_) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", k, " is not a node of this strategy"));
    }
    (entries_.count(k) ? out.hits : out.misses).push_back(i);
  }
  return out;
}

const CacheEntry* StrategyCache::Find(NodeKey key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

absl::Status StrategyCache::Update(std::span<const NodeKey> keys, double scale,
                                   std::span<const double> responses,
                                   uint64_t t) {
  if (keys.size() != responses.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        keys.size(), " rows but ", responses.size(), " responses"));
  }
  if (!(scale > 0)) return absl::InvalidArgumentError("scale must be positive");
  if (t == 0) return absl::InvalidArgumentError("timestamp 0 is reserved");
  for (NodeKey k : keys) {
    if (node_count_ != 0 && k >= node_count_) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", k, " is not a node of this strategy"));
    }
  }
  for (size_t i = 0; i < keys.size(); ++i) {
    entries_[keys[i]] = CacheEntry{scale, responses[i], t};
  }
  clock_ = std::max(clock_, t);
  return absl::OkStatus();
}

std::vector<CacheGroup> StrategyCache::GroupByTimestamp() const {
  std::map<uint64_t, CacheGroup> groups;
  for (const auto& [key, e] : entries_) {
    CacheGroup& g = groups[e.timestamp];
    g.timestamp = e.timestamp;
    g.scale = e.scale;
    g.keys.push_back(key);
    g.responses.push_back(e.response);
  }
  std::vector<CacheGroup> out;
  out.reserve(groups.size());
  for (auto& [t, g] : groups) out.push_back(std::move(g));
  return out;
}

nlohmann::json StrategyCache::Stats() const {
  nlohmann::json groups = nlohmann::json::array();
  for (const CacheGroup& g : GroupByTimestamp()) {
    groups.push_back(
        {{"timestamp", g.timestamp}, {"rows", g.keys.size()}, {"scale", g.scale}});
  }
  nlohmann::json out = {{"entries", entries_.size()},
                        {"node_count", node_count_},
                        {"by_timestamp", groups}};
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [k, e] : entries_) best = std::min(best, e.scale);
  out["best_scale"] = entries_.empty() ? nlohmann::json() : nlohmann::json(best);
  return out;
}

nlohmann::json StrategyCache::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [k, e] : entries_) {
    rows.push_back({k, e.scale, e.response, e.timestamp});
  }
  return {{"node_count", node_count_}, {"clock", clock_}, {"rows", rows}};
}

absl::StatusOr<StrategyCache> StrategyCache::FromJson(const nlohmann::json& j) {
  try {
    StrategyCache c(j.at("node_count").get<uint64_t>());
    c.clock_ = j.at("clock").get<uint64_t>();
    for (const auto& r : j.at("rows")) {
      c.entries_[r.at(0).get<NodeKey>()] = CacheEntry{
          r.at(1).get<double>(), r.at(2).get<double>(), r.at(3).get<uint64_t>()};
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("bad cache snapshot: ", e.what()));
  }
}

StrategyCache& CacheRegistry::GetOrCreate(const std::string& key,
                                          uint64_t node_count) {
  auto it = caches_.find(key);
  if (it == caches_.end()) {
    it = caches_.emplace(key, StrategyCache(node_count)).first;
  }
  return it->second;
}

const StrategyCache* CacheRegistry::Find(const std::string& key) const {
  auto it = caches_.find(key);
  return it == caches_.end() ? nullptr : &it->second;
}

nlohmann::json CacheRegistry::ToJson() const {
  nlohmann::json caches = nlohmann::json::object();
  for (const auto& [k, c] : caches_) caches[k] = c.ToJson();
  return {{"schema_version", kSnapshotVersion}, {"caches", caches}};
}

absl::StatusOr<CacheRegistry> CacheRegistry::FromJson(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema_version", 0) != kSnapshotVersion) {
    return absl::InvalidArgumentError("unsupported cache snapshot version");
  }
  CacheRegistry r;
  if (!j.contains("caches")) return r;
  for (const auto& [k, v] : j["caches"].items()) {
    absl::StatusOr<StrategyCache> c = StrategyCache::FromJson(v);
    if (!c.ok()) return c.status();
    r.caches_.emplace(k, *std::move(c));
  }
  return r;
}

}  // namespace dpq
