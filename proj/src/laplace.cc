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

#include "dpq/laplace.h"

#include <cmath>

namespace dpq {

double SampleLaplace(double scale, Rng& rng) {
  const double u = OpenUniform(rng);
  return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
}

std::vector<double> SampleLaplace(std::span<const double> scales,
                                  uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(scales.size());
  for (double b : scales) out.push_back(SampleLaplace(b, rng));
  return out;
}

Eigen::MatrixXd StandardLaplaceMatrix(Eigen::Index rows, Eigen::Index cols,
                                      uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd u(rows, cols);
  double* p = u.data();
  for (Eigen::Index i = 0; i < rows * cols; ++i) p[i] = SampleLaplace(1.0, rng);
  return u;
}

double LaplaceCdf(double x, double scale) {
  return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

}  // namespace dpq
