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

#ifndef DPQ_DATASET_H_
#define DPQ_DATASET_H_

#include <istream>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpq/domain.h"
#include "dpq/matrix.h"

namespace dpq {

// Records stored column-wise as encoded domain positions, one column per
// schema attribute in schema order.
struct Dataset {
  DomainSchema schema;
  std::vector<std::vector<int64_t>> columns;
  int64_t row_count = 0;
  int64_t dropped_rows = 0;  // lenient mode only

  const std::vector<int64_t>* Column(std::string_view name) const;
};

enum class IngestMode { kStrict, kLenient };

// RFC-4180 CSV with a header row. Extra columns are ignored.
absl::StatusOr<Dataset> IngestCsv(const std::string& path,
                                  const DomainSchema& schema,
                                  IngestMode mode = IngestMode::kStrict);
absl::StatusOr<Dataset> IngestCsv(std::istream& in, const DomainSchema& schema,
                                  IngestMode mode = IngestMode::kStrict);

// Splits one CSV record, consuming continuation lines for quoted newlines.
// Returns false at end of input.
bool ReadCsvRecord(std::istream& in, std::vector<std::string>& fields);

// Canonical (sorted, deduplicated) form of an attribute set.
std::vector<std::string> CanonicalAttributes(std::vector<std::string> attrs);
std::string AttributeSetKey(const std::vector<std::string>& canonical);

// Joint counts over `attrs` in row-major order of the sorted attribute list.
absl::StatusOr<DataVector> MaterializeVector(
    const Dataset& d, const std::vector<std::string>& attrs);

// Lazily materialized data vectors keyed by canonical attribute set.
class VectorRegistry {
 public:
  explicit VectorRegistry(std::shared_ptr<const Dataset> dataset)
      : dataset_(std::move(dataset)) {}

  absl::StatusOr<std::shared_ptr<const DataVector>> Get(
      const std::vector<std::string>& attrs);
  const Dataset& dataset() const { return *dataset_; }

 private:
  std::shared_ptr<const Dataset> dataset_;
  std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<const DataVector>> vectors_;
};

}  // namespace dpq

#endif  // DPQ_DATASET_H_
