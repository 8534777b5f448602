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

#include "dpq/expander.h"

#include <algorithm>
#include <tuple>

namespace dpq {

StrategyMatrix GenerateExpandedStrategy(const View& view,
                                        const StrategyMatrix& a,
                                        const StrategyCache& cache,
                                        double paid_scale, int limit,
                                        std::vector<NodeKey>* added) {
  if (added) added->clear();
  StrategyMatrix out = a;
  if (limit <= 0) return out;
  struct Candidate {
    double scale;
    int depth;
    NodeKey key;
  };
  std::vector<Candidate> candidates;
  for (const auto& [key, e] : cache.entries()) {
    if (e.scale > paid_scale || a.Contains(key)) continue;
    candidates.push_back({e.scale, view.Depth(key), key});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              return std::tie(x.scale, x.depth, x.key) <
                     std::tie(y.scale, y.depth, y.key);
            });
  int count = 0;
  for (const Candidate& c : candidates) {
    StrategyRow row = view.Row(c.key);
    const bool related =
        std::any_of(out.rows().begin(), out.rows().end(),
                    [&](const StrategyRow& r) { return r.region.intersects(row.region); });
    if (!related) continue;
    out.Add(std::move(row));
    if (added) added->push_back(c.key);
    if (++count == limit) break;
  }
  return out;
}

}  // namespace dpq
