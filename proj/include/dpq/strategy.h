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

#ifndef DPQ_STRATEGY_H_
#define DPQ_STRATEGY_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpq/domain.h"
#include "dpq/matrix.h"
#include "dpq/strategy_tree.h"
#include "json.hpp"

namespace dpq {

// The global strategy of one (canonical, sorted) attribute set: the cross
// product of the per-attribute trees. A row key packs one node id per
// attribute in mixed radix, first attribute most significant.
class View {
 public:
  View(std::vector<std::string> attributes,
       std::vector<std::shared_ptr<const StrategyTree>> trees);

  const std::vector<std::string>& attributes() const { return attributes_; }
  int dims() const { return static_cast<int>(trees_.size()); }
  const StrategyTree& tree(int d) const { return *trees_[d]; }
  const DomainLayout& layout() const { return layout_; }
  // Number of rows in the global strategy.
  uint64_t node_count() const { return node_count_; }

  NodeKey Key(std::span<const int> ids) const;
  std::vector<int> Ids(NodeKey key) const;
  std::vector<Interval> Ranges(NodeKey key) const;
  int Depth(NodeKey key) const;
  StrategyRow Row(NodeKey key) const;
  bool IsValidKey(NodeKey key) const { return key < node_count_; }

  absl::Status Validate(const RangeQuery& q) const;
  Workload MakeWorkload(std::vector<RangeQuery> queries) const;

  nlohmann::json TreeJson() const;

 private:
  std::vector<std::string> attributes_;
  std::vector<std::shared_ptr<const StrategyTree>> trees_;
  std::vector<uint64_t> radix_;
  DomainLayout layout_;
  uint64_t node_count_ = 1;
};

// Cross product of per-attribute greedy decompositions, unioned over the
// marginals with duplicates removed (first occurrence order).
absl::StatusOr<StrategyMatrix> GenerateStrategy(
    const View& view, std::span<const RangeQuery> queries);

// Attribute positions in ascending order of the smallest node width the
// strategy uses on each attribute, ties by position.
std::vector<int> GranularityOrder(const View& view, const StrategyMatrix& a);

// Refines buckets row by row so that every row is a union of buckets.
// `growth`, if given, receives the bucket-count increase caused by each row.
// Buckets come back sorted by their first domain index.
TransformationMatrix GetTransformationMatrix(std::span<const IndexSet> rows,
                                             std::vector<int>* growth = nullptr);

struct TransformedStrategy {
  TransformationMatrix transform;
  Eigen::MatrixXd mapped;  // A'
};
TransformedStrategy TransformStrategy(const StrategyMatrix& a);

// Everything a mechanism needs about one (workload, strategy) pair.
struct PreparedStrategy {
  StrategyMatrix raw;
  TransformationMatrix transform;
  Eigen::MatrixXd strategy;        // A'
  Eigen::MatrixXd workload;        // W'
  Eigen::MatrixXd reconstruction;  // W' A'^+
  int64_t l1_norm = 0;
};
PreparedStrategy Prepare(StrategyMatrix a, const Workload& w);

}  // namespace dpq

#endif  // DPQ_STRATEGY_H_
