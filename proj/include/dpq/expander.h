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

#ifndef DPQ_EXPANDER_H_
#define DPQ_EXPANDER_H_

#include <vector>

#include "dpq/cache.h"
#include "dpq/matrix.h"
#include "dpq/strategy.h"

namespace dpq {

// Appends to `a` up to `limit` cached rows, most accurate first (shallower
// rows first on equal scales), that overlap a row already in the strategy.
// Stops at the first cached scale above `paid_scale`. `added` receives the
// keys that were appended.
StrategyMatrix GenerateExpandedStrategy(const View& view,
                                        const StrategyMatrix& a,
                                        const StrategyCache& cache,
                                        double paid_scale, int limit,
                                        std::vector<NodeKey>* added = nullptr);

}  // namespace dpq

#endif  // DPQ_EXPANDER_H_
