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

#include "dpq/strategy_tree.h"

#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpq {
namespace {

uint64_t RangeKey(const Interval& r) {
  return (static_cast<uint64_t>(r.lo) << 32) ^ static_cast<uint64_t>(r.hi);
}

}  // namespace

absl::StatusOr<StrategyTree> StrategyTree::Build(int64_t domain_size,
                                                 int arity) {
  if (arity < 2) return absl::InvalidArgumentError("tree arity must be >= 2");
  if (domain_size < 1) {
    return absl::InvalidArgumentError("domain size must be >= 1");
  }
  if (domain_size >= (int64_t{1} << 31)) {
    return absl::InvalidArgumentError("domain too large for a strategy tree");
  }
  StrategyTree t;
  t.arity_ = arity;
  t.nodes_.push_back(TreeNode{{0, domain_size}, -1, -1, 0, 0});
  // Breadth-first expansion keeps ids in level order and children contiguous.
  for (size_t id = 0; id < t.nodes_.size(); ++id) {
    const Interval r = t.nodes_[id].range;
    const int depth = t.nodes_[id].depth;
    t.height_ = std::max(t.height_, depth + 1);
    if (r.size() <= 1) continue;
    const int64_t parts = std::min<int64_t>(arity, r.size());
    const int64_t q = r.size() / parts;
    const int64_t rem = r.size() % parts;
    t.nodes_[id].first_child = static_cast<int>(t.nodes_.size());
    t.nodes_[id].child_count = static_cast<int>(parts);
    int64_t lo = r.lo;
    for (int64_t c = 0; c < parts; ++c) {
      int64_t len = q + (c < rem ? 1 : 0);
      t.nodes_.push_back(
          TreeNode{{lo, lo + len}, static_cast<int>(id), -1, 0, depth + 1});
      lo += len;
    }
  }
  t.child_ids_.resize(t.nodes_.size());
  std::iota(t.child_ids_.begin(), t.child_ids_.end(), 0);
  t.by_range_.reserve(t.nodes_.size());
  for (size_t id = 0; id < t.nodes_.size(); ++id) {
    t.by_range_.emplace(RangeKey(t.nodes_[id].range), static_cast<int>(id));
  }
  return t;
}

std::span<const int> StrategyTree::children(int id) const {
  const TreeNode& n = nodes_[id];
  if (n.is_leaf()) return {};
  return std::span<const int>(child_ids_).subspan(n.first_child,
                                                  n.child_count);
}

int StrategyTree::Find(const Interval& range) const {
  auto it = by_range_.find(RangeKey(range));
  return it == by_range_.end() ? -1 : it->second;
}

void StrategyTree::DecomposeInto(int id, const Interval& w,
                                 std::vector<int>& out) const {
  const TreeNode& n = nodes_[id];
  if (n.range == w) {
    out.push_back(id);
    return;
  }
  for (int c : children(id)) {
    Interval part = nodes_[c].range.Intersect(w);
    if (!part.empty()) DecomposeInto(c, part, out);
  }
}

absl::StatusOr<std::vector<int>> StrategyTree::Decompose(
    const Interval& w) const {
  if (w.empty() || !nodes_.front().range.Contains(w)) {
    return absl::OutOfRangeError(absl::StrCat(
        "range ", ToString(w), " outside ", ToString(nodes_.front().range)));
  }
  std::vector<int> out;
  DecomposeInto(0, w, out);
  return out;
}

nlohmann::json StrategyTree::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (size_t id = 0; id < nodes_.size(); ++id) {
    const TreeNode& n = nodes_[id];
    std::vector<int> kids(children(static_cast<int>(id)).begin(),
                          children(static_cast<int>(id)).end());
    out.push_back({{"id", id},
                   {"lo", n.range.lo},
                   {"hi", n.range.hi},
                   {"parent", n.parent},
                   {"children", kids},
                   {"depth", n.depth}});
  }
  return out;
}

absl::StatusOr<StrategyTree> BuildGlobalTree(const DomainSchema& schema,
                                             std::string_view attribute,
                                             int arity) {
  const Attribute* a = schema.Find(attribute);
  if (a == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown attribute ", std::string(attribute)));
  }
  return StrategyTree::Build(a->size(), arity);
}

}  // namespace dpq
