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

#ifndef DPQ_STRATEGY_TREE_H_
#define DPQ_STRATEGY_TREE_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "dpq/domain.h"
#include "json.hpp"

namespace dpq {

struct TreeNode {
  Interval range;
  int parent = -1;
  int first_child = -1;  // children are contiguous in id order
  int child_count = 0;
  int depth = 0;

  bool is_leaf() const { return child_count == 0; }
};

// k-ary range tree over [0, n). Node ids follow breadth-first order, root 0.
// A node of size s splits into min(k, s) children of near-equal size, the
// larger ones on the left.
class StrategyTree {
 public:
  static absl::StatusOr<StrategyTree> Build(int64_t domain_size, int arity);

  int arity() const { return arity_; }
  int64_t domain_size() const { return nodes_.front().range.hi; }
  size_t size() const { return nodes_.size(); }
  // Number of levels; equals the L1 norm of the full tree.
  int height() const { return height_; }
  const TreeNode& node(int id) const { return nodes_[id]; }
  std::span<const TreeNode> nodes() const { return nodes_; }
  std::span<const int> children(int id) const;

  // Id of the node covering exactly `range`, or -1.
  int Find(const Interval& range) const;

  // Top-down greedy cover of `w` by tree nodes, in left-to-right order.
  absl::StatusOr<std::vector<int>> Decompose(const Interval& w) const;

  // Node list {id, lo, hi, parent, children, depth}.
  nlohmann::json ToJson() const;

 private:
  void DecomposeInto(int id, const Interval& w, std::vector<int>& out) const;

  int arity_ = 2;
  int height_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<int> child_ids_;  // child_ids_[i] == i, backs children()
  std::unordered_map<uint64_t, int> by_range_;
};

absl::StatusOr<StrategyTree> BuildGlobalTree(const DomainSchema& schema,
                                             std::string_view attribute,
                                             int arity);

}  // namespace dpq

#endif  // DPQ_STRATEGY_TREE_H_
