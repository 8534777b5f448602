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

#ifndef DPQ_CALIBRATION_H_
#define DPQ_CALIBRATION_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpq/accuracy.h"

namespace dpq {

// Throughout, `recon` is the reconstruction matrix W'A'^+ and a scale
// vector holds one Laplace scale per strategy row.

// ||recon * diag(scales)||_F^2.
double ExpectedTotalSquaredError(const Eigen::MatrixXd& recon,
                                 const Eigen::VectorXd& scales);
double ExpectedTotalSquaredError(const Eigen::MatrixXd& workload,
                                 const Eigen::MatrixXd& strategy,
                                 const Eigen::VectorXd& scales);

// Largest single scale guaranteed by the Chebyshev-style bound: for worst
// error alpha*sqrt(beta/2)/||recon||_F, for squared error alpha/||recon||_F.
double LooseBound(const Eigen::MatrixXd& recon, const AccuracyRequirement& req);

// Paid scale that spends exactly the error left over by the free rows.
// `free_scales` has the cached scale on free rows and 0 on paid rows.
// Fails with FailedPrecondition when the free rows alone use up the budget.
absl::StatusOr<double> TightCachedBound(const Eigen::MatrixXd& recon,
                                        const Eigen::VectorXd& free_scales,
                                        const AccuracyRequirement& req);

struct MCConfig {
  int samples = 10000;
  uint64_t seed = 0;
  // Confidence parameter p as a fraction of beta.
  double confidence_fraction = 0.01;

  absl::Status Validate() const;
};

// Largest failure count n_f out of `samples` that still passes
// n_f/N + z_{1-p/2} sqrt(b(1-b)/N) + p/2 < beta; -1 if none does.
int MaxAllowedFailures(int samples, double beta, double confidence_fraction);

// Monte-Carlo accuracy test with common random numbers: the standard Laplace
// draws are generated once per checker and reused for every scale vector,
// so repeated checks are a deterministic function of (inputs, seed).
class AccuracyChecker {
 public:
  AccuracyChecker(Eigen::MatrixXd recon, AccuracyRequirement req,
                  MCConfig config);

  // Worst error: empirical failure rate plus correction below beta.
  // Squared error: deterministic comparison against alpha^2.
  bool Check(const Eigen::VectorXd& scales) const;

  // Largest b in [lo, hi] for which Check passes when rows with a positive
  // entry in `free_scales` keep that scale and all other rows use b.
  // Returns nullopt when not even lo passes.
  std::optional<double> LargestPassingScale(const Eigen::VectorXd& free_scales,
                                            double lo, double hi) const;

  const Eigen::MatrixXd& recon() const { return recon_; }
  const AccuracyRequirement& requirement() const { return req_; }
  int max_failures() const { return max_failures_; }

 private:
  const Eigen::MatrixXd& Draws() const;

  Eigen::MatrixXd recon_;
  AccuracyRequirement req_;
  MCConfig config_;
  int max_failures_;
  mutable Eigen::MatrixXd draws_;  // rows x samples, generated on first use
};

// Forms the free set {rows with cached scale <= b_paid} and checks the
// resulting scale vector.
bool CheckAccuracy(double b_paid,
                   const std::vector<std::optional<double>>& cached_scales,
                   const Eigen::MatrixXd& recon,
                   const AccuracyRequirement& req, const MCConfig& config);

// Sample mean of ||recon * Lap(scales)||_2^2.
double MonteCarloSquaredError(const Eigen::MatrixXd& recon,
                              const Eigen::VectorXd& scales, int samples,
                              uint64_t seed);

}  // namespace dpq

#endif  // DPQ_CALIBRATION_H_
