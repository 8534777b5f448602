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

#ifndef DPQ_RELAX_H_
#define DPQ_RELAX_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "dpq/cache.h"
#include "dpq/laplace.h"
#include "dpq/mmm.h"
#include "dpq/strategy.h"

namespace dpq {

// Gradual-release noise transition. Given noise drawn from Laplace(old_scale), returns noise whose marginal is
// Laplace(new_scale) and such that the pair costs only the difference of
// the two budgets. With eps_i = 1/scale_i the new value equals the old one
// with probability (eps1/eps2) exp(-(eps2-eps1)|old|); otherwise it is drawn
// from the density proportional to exp(-eps2|w| - eps1|old - w|).
double NoiseDown(double old_noise, double old_scale, double new_scale,
                 Rng& rng);

// Unconditional probability that NoiseDown keeps the old value.
inline double NoiseDownAtomMass(double old_scale, double new_scale) {
  const double r = new_scale / old_scale;
  return r * r;
}

struct RelaxPlan {
  uint64_t timestamp = 0;  // write event being relaxed
  double old_scale = 0;
  double target_scale = 0;
  int64_t group_norm = 0;
  double epsilon = 0;
  // The group is already at least as accurate as the target.
  bool reuse_only = false;
};

// Cheapest single write event whose rows contain every row of `a`, to be
// tightened to `target_scale`. nullopt when no event covers `a`.
std::optional<RelaxPlan> EstimateRelax(const View& view,
                                       const StrategyMatrix& a,
                                       const StrategyCache& cache,
                                       double target_scale);

// Tightens the whole write event to the target scale using the true counts
// to recover the old noise, stores it as a new event, and answers from the
// rows of `s.raw` only.
absl::StatusOr<MechanismAnswer> AnswerRelax(const View& view,
                                            const PreparedStrategy& s,
                                            const RelaxPlan& plan,
                                            const DataVector& x,
                                            StrategyCache& cache, Rng& rng);

}  // namespace dpq

#endif  // DPQ_RELAX_H_
