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

#ifndef DPQ_CACHE_H_
#define DPQ_CACHE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpq/matrix.h"
#include "json.hpp"

namespace dpq {

// Latest noisy answer for one global-strategy row. Rows that were never
// answered have no entry at all; timestamp 0 means never.
struct CacheEntry {
  double scale = 0;     // Laplace scale b
  double response = 0;  // noisy answer
  uint64_t timestamp = 0;
};

// All entries that still carry the timestamp of one write event.
struct CacheGroup {
  uint64_t timestamp = 0;
  double scale = 0;
  std::vector<NodeKey> keys;  // ascending
  std::vector<double> responses;
};

class StrategyCache {
 public:
  explicit StrategyCache(uint64_t node_count = 0) : node_count_(node_count) {}

  struct LookupResult {
    std::vector<size_t> hits;    // row indices of A with a valid entry
    std::vector<size_t> misses;  // the rest
  };
  absl::StatusOr<LookupResult> Lookup(const StrategyMatrix& a) const;
  const CacheEntry* Find(NodeKey key) const;

  // Timestamp for a new write event.
  uint64_t NextTimestamp() { return ++clock_; }
  uint64_t clock() const { return clock_; }

  // Overwrites each row with (scale, response, t); the latest write wins.
  absl::Status Update(std::span<const NodeKey> keys, double scale,
                      std::span<const double> responses, uint64_t t);

  std::vector<CacheGroup> GroupByTimestamp() const;

  size_t size() const { return entries_.size(); }
  uint64_t node_count() const { return node_count_; }
  const std::map<NodeKey, CacheEntry>& entries() const { return entries_; }

  // {entries, node_count, by_timestamp:[{timestamp, rows, scale}], best_scale}
  nlohmann::json Stats() const;
  nlohmann::json ToJson() const;
  static absl::StatusOr<StrategyCache> FromJson(const nlohmann::json& j);

 private:
  uint64_t node_count_;
  uint64_t clock_ = 0;
  std::map<NodeKey, CacheEntry> entries_;
};

// One cache per canonical attribute set, keyed by AttributeSetKey().
class CacheRegistry {
 public:
  StrategyCache& GetOrCreate(const std::string& key, uint64_t node_count);
  const StrategyCache* Find(const std::string& key) const;
  const std::map<std::string, StrategyCache>& caches() const { return caches_; }
  void Clear() { caches_.clear(); }

  static constexpr int kSnapshotVersion = 1;
  nlohmann::json ToJson() const;
  static absl::StatusOr<CacheRegistry> FromJson(const nlohmann::json& j);

 private:
  std::map<std::string, StrategyCache> caches_;
};

}  // namespace dpq

#endif  // DPQ_CACHE_H_
