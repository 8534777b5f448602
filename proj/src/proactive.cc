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

#include "dpq/proactive.h"

#include <algorithm>
#include <functional>

namespace dpq {
namespace {

// Beyond this many joint cells the combined tree walk is skipped.
constexpr int64_t kMaxJointDomain = int64_t{1} << 20;

}  // namespace

CombinedTree::CombinedTree(const View& view, std::vector<int> order)
    : view_(&view), order_(std::move(order)) {
  std::vector<int> roots(view.dims(), 0);
  root_ = view.Key(roots);
}

int CombinedTree::VaryingIndex(const std::vector<int>& ids) const {
  for (size_t p = 0; p < order_.size(); ++p) {
    const int d = order_[p];
    if (!view_->tree(d).node(ids[d]).is_leaf()) return static_cast<int>(p);
  }
  return static_cast<int>(order_.size());
}

std::vector<NodeKey> CombinedTree::Children(NodeKey node) const {
  std::vector<int> ids = view_->Ids(node);
  const int p = VaryingIndex(ids);
  std::vector<NodeKey> out;
  if (p == static_cast<int>(order_.size())) return out;
  const int d = order_[p];
  for (int c : view_->tree(d).children(ids[d])) {
    ids[d] = c;
    out.push_back(view_->Key(ids));
  }
  return out;
}

std::vector<NodeKey> CombinedTree::PathTo(NodeKey row) const {
  const std::vector<int> row_ids = view_->Ids(row);
  std::vector<int> ids = view_->Ids(root_);
  std::vector<NodeKey> path{root_};
  while (true) {
    const int p = VaryingIndex(ids);
    if (p == static_cast<int>(order_.size())) break;
    const int d = order_[p];
    const Interval target = view_->tree(d).node(row_ids[d]).range;
    int next = -1;
    for (int c : view_->tree(d).children(ids[d])) {
      if (view_->tree(d).node(c).range.Contains(target)) {
        next = c;
        break;
      }
    }
    if (next < 0) break;
    ids[d] = next;
    path.push_back(view_->Key(ids));
  }
  return path;
}

NodeKey CombinedTree::Anchor(NodeKey row) const { return PathTo(row).back(); }

int SubtreeNorms::Mark(NodeKey v) const {
  auto it = marks.find(v);
  return it == marks.end() ? 0 : it->second;
}

int SubtreeNorms::Norm(NodeKey v) const {
  auto it = norms.find(v);
  return it == norms.end() ? 0 : it->second;
}

SubtreeNorms ComputeSubtreeNorms(const CombinedTree& tree,
                                 std::span<const NodeKey> marked) {
  SubtreeNorms out;
  std::unordered_map<NodeKey, size_t> depth;
  for (NodeKey row : marked) {
    std::vector<NodeKey> path = tree.PathTo(row);
    ++out.marks[path.back()];
    for (size_t i = 0; i < path.size(); ++i) depth.emplace(path[i], i);
  }
  std::vector<std::pair<size_t, NodeKey>> order;
  order.reserve(depth.size());
  for (const auto& [v, d] : depth) order.emplace_back(d, v);
  std::sort(order.begin(), order.end(), std::greater<>());
  for (const auto& [d, v] : order) {
    int best = 0;
    for (NodeKey c : tree.Children(v)) best = std::max(best, out.Norm(c));
    out.norms[v] = out.Mark(v) + best;
  }
  return out;
}

std::vector<NodeKey> SearchProactiveNodes(const CombinedTree& tree,
                                          std::span<const NodeKey> marked,
                                          int64_t paid_norm,
                                          const StrategyCache& cache) {
  std::vector<NodeKey> out;
  if (paid_norm <= 0) return out;
  const SubtreeNorms norms = ComputeSubtreeNorms(tree, marked);
  std::function<void(NodeKey, int64_t)> visit = [&](NodeKey v, int64_t r) {
    const int mark = norms.Mark(v);
    if (mark > 0) {
      r -= mark;
    } else if (cache.Find(v) == nullptr && norms.Norm(v) < r) {
      out.push_back(v);
      r -= 1;
    }
    if (r <= 0) return;
    for (NodeKey c : tree.Children(v)) visit(c, r);
  };
  visit(tree.root(), paid_norm);
  return out;
}

std::vector<NodeKey> ProactiveRows(const View& view, const StrategyMatrix& a,
                                   std::span<const size_t> paid_rows,
                                   const StrategyCache& cache) {
  if (paid_rows.empty() || view.layout().size() > kMaxJointDomain) return {};
  std::vector<IndexSet> paid;
  for (size_t i : paid_rows) paid.push_back(a.rows()[i].region);
  const int64_t paid_norm = L1Norm(paid);
  CombinedTree tree(view, GranularityOrder(view, a));
  std::vector<NodeKey> marked = a.Keys();
  std::vector<NodeKey> extra =
      SearchProactiveNodes(tree, marked, paid_norm, cache);
  if (view.dims() > 1) {
    // Anchoring box rows can undercount overlaps; trim until the norm holds.
    std::vector<IndexSet> all = paid;
    for (NodeKey k : extra) all.push_back(view.Row(k).region);
    while (!extra.empty() && L1Norm(all) > paid_norm) {
      extra.pop_back();
      all.pop_back();
    }
  }
  return extra;
}

}  // namespace dpq
