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

#ifndef DPQ_ENGINE_H_
#define DPQ_ENGINE_H_

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpq/accuracy.h"
#include "dpq/cache.h"
#include "dpq/dataset.h"
#include "dpq/domain.h"
#include "dpq/laplace.h"
#include "dpq/strategy.h"
#include "dpq/strategy_tree.h"
#include "json.hpp"

namespace dpq {

struct EngineConfig {
  double total_budget = 1.0;
  uint64_t seed = 0;
  int k_arity = 2;
  int mc_samples = 10000;
  double phi = 1e-4;
  int se_limit = 16;
  // When false the MMM path ignores the cache and plans as if it were empty.
  bool enable_mmm = true;
  bool enable_se = true;
  bool enable_pq = true;
  bool enable_rp = true;
  std::string dataset_path;
  std::string schema_path;
  std::string snapshot_path;  // optional

  static absl::StatusOr<EngineConfig> FromJson(const nlohmann::json& j);
  static absl::StatusOr<EngineConfig> Load(const std::string& path);
  nlohmann::json ToJson() const;
  absl::Status Validate() const;
};

enum class Mechanism { kFree, kMmm, kSe, kRp };
std::string_view MechanismName(Mechanism m);

struct LedgerEntry {
  uint64_t id = 0;
  Mechanism mechanism = Mechanism::kFree;
  double epsilon = 0;
  bool accepted = false;
};

class BudgetLedger {
 public:
  explicit BudgetLedger(double total = 0) : total_(total) {}

  double total() const { return total_; }
  double consumed() const { return consumed_; }
  double remaining() const { return total_ - consumed_; }
  const std::vector<LedgerEntry>& entries() const { return entries_; }
  size_t answered() const;

  // Paid workloads are refused once consumed + epsilon reaches the total.
  bool WouldReject(double epsilon) const {
    return epsilon > 0 && consumed_ + epsilon >= total_;
  }
  void RecordAnswer(uint64_t id, Mechanism m, double epsilon);
  void RecordRejection(uint64_t id, Mechanism m, double epsilon);

  nlohmann::json ToJson() const;
  static absl::StatusOr<BudgetLedger> FromJson(const nlohmann::json& j);

 private:
  double total_;
  double consumed_ = 0;
  std::vector<LedgerEntry> entries_;
};

struct WorkloadRequest {
  std::vector<std::string> attributes;  // canonical (sorted)
  std::vector<RangeQuery> queries;      // ranges in attribute order
  AccuracyRequirement accuracy;
  std::string client;

  // {"attributes":[..], "queries":[{"attr":[lo,hi]},..] | [[lo,hi],..],
  //  "accuracy":{..}, "client":".."}. Bounds are domain positions.
  static absl::StatusOr<WorkloadRequest> FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

// Per-mechanism estimates considered for one workload; +inf when a
// mechanism was skipped or not applicable.
struct Estimates {
  static constexpr double kNone = std::numeric_limits<double>::infinity();
  double mmm = kNone;
  double se = kNone;
  double rp = kNone;
  double cacheless = kNone;
};

struct Answered {
  uint64_t id = 0;
  std::vector<double> responses;
  double epsilon = 0;
  Mechanism mechanism = Mechanism::kFree;
  size_t free_rows = 0;
  size_t paid_rows = 0;
  size_t proactive_rows = 0;
  uint64_t timestamp = 0;
  Estimates estimates;
};

struct Rejected {
  uint64_t id = 0;
  double required_epsilon = 0;
  double remaining_budget = 0;
  Mechanism mechanism = Mechanism::kMmm;
  Estimates estimates;
};

using Outcome = std::variant<Answered, Rejected>;

// Serialized query engine: one ledger and one cache per attribute set.
class Engine {
 public:
  static absl::StatusOr<std::unique_ptr<Engine>> Create(
      EngineConfig config, DomainSchema schema,
      std::shared_ptr<const Dataset> dataset);
  // Loads schema, dataset and (if present) the snapshot named in `config`.
  static absl::StatusOr<std::unique_ptr<Engine>> FromConfig(
      const EngineConfig& config);

  absl::StatusOr<Outcome> ProcessWorkload(const WorkloadRequest& req);

  // Budget the cacheless matrix mechanism would charge; no state changes.
  absl::StatusOr<double> CachelessEpsilon(const WorkloadRequest& req);

  void Reset(uint64_t seed, double total_budget);

  const EngineConfig& config() const { return config_; }
  const DomainSchema& schema() const { return schema_; }
  const BudgetLedger& ledger() const { return ledger_; }
  const CacheRegistry& caches() const { return caches_; }
  int64_t row_count() const { return vectors_.dataset().row_count; }

  absl::StatusOr<std::shared_ptr<const View>> GetView(
      const std::vector<std::string>& attrs);
  const StrategyCache* FindCache(const std::vector<std::string>& attrs) const;

  nlohmann::json SnapshotJson() const;
  absl::Status RestoreSnapshot(const nlohmann::json& j);
  absl::Status SaveSnapshot(const std::string& path) const;

 private:
  Engine(EngineConfig config, DomainSchema schema,
         std::shared_ptr<const Dataset> dataset);

  uint64_t EstimateSeed(const WorkloadRequest& req) const;

  EngineConfig config_;
  DomainSchema schema_;
  VectorRegistry vectors_;
  std::map<std::string, std::shared_ptr<const StrategyTree>> trees_;
  std::map<std::string, std::shared_ptr<const View>> views_;
  CacheRegistry caches_;
  BudgetLedger ledger_;
  Rng rng_;
  uint64_t next_id_ = 1;
};

}  // namespace dpq

#endif  // DPQ_ENGINE_H_
