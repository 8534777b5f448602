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

#include "dpq/strategy.h"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "absl/strings/str_cat.h"

namespace dpq {

View::View(std::vector<std::string> attributes,
           std::vector<std::shared_ptr<const StrategyTree>> trees)
    : attributes_(std::move(attributes)), trees_(std::move(trees)) {
  std::vector<int64_t> sizes;
  radix_.assign(trees_.size(), 1);
  for (int d = dims() - 1; d >= 0; --d) {
    radix_[d] = node_count_;
    node_count_ *= trees_[d]->size();
  }
  for (const auto& t : trees_) sizes.push_back(t->domain_size());
  layout_ = DomainLayout(std::move(sizes));
}

NodeKey View::Key(std::span<const int> ids) const {
  NodeKey k = 0;
  for (int d = 0; d < dims(); ++d) k += static_cast<uint64_t>(ids[d]) * radix_[d];
  return k;
}

std::vector<int> View::Ids(NodeKey key) const {
  std::vector<int> ids(dims());
  for (int d = 0; d < dims(); ++d) {
    ids[d] = static_cast<int>(key / radix_[d]);
    key %= radix_[d];
  }
  return ids;
}

std::vector<Interval> View::Ranges(NodeKey key) const {
  std::vector<int> ids = Ids(key);
  std::vector<Interval> out(dims());
  for (int d = 0; d < dims(); ++d) out[d] = trees_[d]->node(ids[d]).range;
  return out;
}

int View::Depth(NodeKey key) const {
  std::vector<int> ids = Ids(key);
  int depth = 0;
  for (int d = 0; d < dims(); ++d) depth += trees_[d]->node(ids[d]).depth;
  return depth;
}

StrategyRow View::Row(NodeKey key) const {
  std::vector<Interval> ranges = Ranges(key);
  return StrategyRow{key, layout_.Box(ranges), Depth(key)};
}

absl::Status View::Validate(const RangeQuery& q) const {
  if (static_cast<int>(q.ranges.size()) != dims()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "query has ", q.ranges.size(), " ranges, expected ", dims()));
  }
  for (int d = 0; d < dims(); ++d) {
    const Interval& r = q.ranges[d];
    if (r.lo >= r.hi) {
      return absl::InvalidArgumentError(
          absl::StrCat(attributes_[d], ": empty range ", ToString(r)));
    }
    if (r.lo < 0 || r.hi > trees_[d]->domain_size()) {
      return absl::OutOfRangeError(absl::StrCat(
          attributes_[d], ": range ", ToString(r), " outside [0,",
          trees_[d]->domain_size(), ")"));
    }
  }
  return absl::OkStatus();
}

Workload View::MakeWorkload(std::vector<RangeQuery> queries) const {
  return Workload(std::move(queries), layout_);
}

nlohmann::json View::TreeJson() const {
  nlohmann::json trees = nlohmann::json::object();
  for (int d = 0; d < dims(); ++d) trees[attributes_[d]] = trees_[d]->ToJson();
  nlohmann::json out = {{"attributes", attributes_}, {"trees", trees}};
  if (dims() == 1) out["nodes"] = trees[attributes_[0]];
  out["node_count"] = node_count_;
  return out;
}

absl::StatusOr<StrategyMatrix> GenerateStrategy(
    const View& view, std::span<const RangeQuery> queries) {
  StrategyMatrix a;
  std::unordered_set<NodeKey> seen;
  std::vector<std::vector<int>> parts(view.dims());
  std::vector<int> ids(view.dims());
  for (const RangeQuery& q : queries) {
    if (absl::Status s = view.Validate(q); !s.ok()) return s;
    for (int d = 0; d < view.dims(); ++d) {
      absl::StatusOr<std::vector<int>> p = view.tree(d).Decompose(q.ranges[d]);
      if (!p.ok()) return p.status();
      parts[d] = *std::move(p);
    }
    std::vector<size_t> pos(view.dims(), 0);
    while (true) {
      for (int d = 0; d < view.dims(); ++d) ids[d] = parts[d][pos[d]];
      NodeKey key = view.Key(ids);
      if (seen.insert(key).second) a.Add(view.Row(key));
      int d = view.dims() - 1;
      while (d >= 0 && ++pos[d] == parts[d].size()) {
        pos[d] = 0;
        --d;
      }
      if (d < 0) break;
    }
  }
  return a;
}

std::vector<int> GranularityOrder(const View& view, const StrategyMatrix& a) {
  std::vector<int64_t> finest(view.dims(), std::numeric_limits<int64_t>::max());
  for (const StrategyRow& r : a.rows()) {
    std::vector<Interval> ranges = view.Ranges(r.key);
    for (int d = 0; d < view.dims(); ++d) {
      finest[d] = std::min(finest[d], ranges[d].size());
    }
  }
  std::vector<int> order(view.dims());
  for (int d = 0; d < view.dims(); ++d) order[d] = d;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return finest[x] < finest[y];
  });
  return order;
}

TransformationMatrix GetTransformationMatrix(std::span<const IndexSet> rows,
                                             std::vector<int>* growth) {
  TransformationMatrix t;
  if (growth) growth->clear();
  for (const IndexSet& row : rows) {
    const size_t before = t.buckets.size();
    std::vector<IndexSet> next;
    next.reserve(before + 2);
    IndexSet covered(row.size());
    for (IndexSet& b : t.buckets) {
      IndexSet inter = b & row;
      if (inter.none()) {
        next.push_back(std::move(b));
        continue;
      }
      covered |= inter;
      if (inter == b) {
        next.push_back(std::move(b));
      } else {
        IndexSet rest = b - inter;
        next.push_back(std::move(inter));
        next.push_back(std::move(rest));
      }
    }
    IndexSet fresh = row - covered;
    if (fresh.any()) next.push_back(std::move(fresh));
    t.buckets = std::move(next);
    if (growth) growth->push_back(static_cast<int>(t.buckets.size() - before));
  }
  std::sort(t.buckets.begin(), t.buckets.end(),
            [](const IndexSet& x, const IndexSet& y) {
              return x.find_first() < y.find_first();
            });
  return t;
}

TransformedStrategy TransformStrategy(const StrategyMatrix& a) {
  std::vector<IndexSet> regions = a.Regions();
  TransformedStrategy out;
  out.transform = GetTransformationMatrix(regions);
  out.mapped = MapRows(regions, out.transform);
  return out;
}

PreparedStrategy Prepare(StrategyMatrix a, const Workload& w) {
  PreparedStrategy p;
  TransformedStrategy ts = TransformStrategy(a);
  p.transform = std::move(ts.transform);
  p.strategy = std::move(ts.mapped);
  p.workload = MapRows(w.rows(), p.transform);
  p.reconstruction = p.workload * PseudoInverse(p.strategy);
  p.l1_norm = a.L1Norm();
  p.raw = std::move(a);
  return p;
}

}  // namespace dpq
