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

#ifndef DPQ_PROACTIVE_H_
#define DPQ_PROACTIVE_H_

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "dpq/cache.h"
#include "dpq/matrix.h"
#include "dpq/strategy.h"

namespace dpq {

// Tree over the joint domain of a view obtained by hanging the tree of the
// next attribute (in `order`) under every leaf of the previous one. A node
// is a view key whose attributes before the varying one are leaves and
// after it are roots. For a single attribute this is the attribute's tree.
class CombinedTree {
 public:
  CombinedTree(const View& view, std::vector<int> order);

  const View& view() const { return *view_; }
  NodeKey root() const { return root_; }
  std::vector<NodeKey> Children(NodeKey node) const;
  // Deepest combined node whose region contains the given view row.
  NodeKey Anchor(NodeKey row) const;
  // Combined nodes from the root down to Anchor(row), inclusive.
  std::vector<NodeKey> PathTo(NodeKey row) const;

 private:
  // Position in `order_` of the attribute whose children form the node's
  // children, or dims() for a node with no children.
  int VaryingIndex(const std::vector<int>& ids) const;

  const View* view_;
  std::vector<int> order_;
  NodeKey root_ = 0;
};

// Marks count the marked rows anchored at each combined node; the subtree
// norm of a node is its mark plus the largest subtree norm among its
// children. Nodes missing from the maps have mark and norm 0.
struct SubtreeNorms {
  std::unordered_map<NodeKey, int> marks;
  std::unordered_map<NodeKey, int> norms;

  int Mark(NodeKey v) const;
  int Norm(NodeKey v) const;
};

SubtreeNorms ComputeSubtreeNorms(const CombinedTree& tree,
                                 std::span<const NodeKey> marked);

// Top-down search for uncached, unmarked combined nodes that can be added to
// the paid rows without raising their L1 norm above `paid_norm`. `marked` is
// the whole instant strategy (free and paid rows).
std::vector<NodeKey> SearchProactiveNodes(const CombinedTree& tree,
                                          std::span<const NodeKey> marked,
                                          int64_t paid_norm,
                                          const StrategyCache& cache);

// Convenience wrapper building the combined tree in granularity order and
// guaranteeing the norm of paid rows plus the result stays at `paid_norm`.
std::vector<NodeKey> ProactiveRows(const View& view, const StrategyMatrix& a,
                                   std::span<const size_t> paid_rows,
                                   const StrategyCache& cache);

}  // namespace dpq

#endif  // DPQ_PROACTIVE_H_
