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

#ifndef DPQ_LAPLACE_H_
#define DPQ_LAPLACE_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dpq {

using Rng = std::mt19937_64;

// Uniform on the open interval (0, 1) from the top 53 bits of one draw.
inline double OpenUniform(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Laplace(0, scale) by inversion.
double SampleLaplace(double scale, Rng& rng);
std::vector<double> SampleLaplace(std::span<const double> scales,
                                  uint64_t seed);

// rows x cols matrix of i.i.d. standard Laplace draws, filled column-major.
Eigen::MatrixXd StandardLaplaceMatrix(Eigen::Index rows, Eigen::Index cols,
                                      uint64_t seed);

double LaplaceCdf(double x, double scale);

}  // namespace dpq

#endif  // DPQ_LAPLACE_H_
