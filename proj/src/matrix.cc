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

#include "dpq/matrix.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpq {

DomainLayout::DomainLayout(std::vector<int64_t> sizes)
    : sizes_(std::move(sizes)), strides_(sizes_.size(), 1) {
  size_ = 1;
  for (int d = dims() - 1; d >= 0; --d) {
    strides_[d] = size_;
    size_ *= sizes_[d];
  }
}

IndexSet DomainLayout::Box(std::span<const Interval> box) const {
  IndexSet out(static_cast<size_t>(size_));
  if (static_cast<int>(box.size()) != dims()) return out;
  for (const Interval& iv : box) {
    if (iv.empty()) return out;
  }
  // Walk the box odometer-style over all but the last dimension and set the
  // contiguous run along the last one.
  const int last = dims() - 1;
  std::vector<int64_t> pos(dims());
  for (int d = 0; d < dims(); ++d) pos[d] = box[d].lo;
  while (true) {
    int64_t base = 0;
    for (int d = 0; d < last; ++d) base += pos[d] * strides_[d];
    out.set(static_cast<size_t>(base + box[last].lo),
            static_cast<size_t>(box[last].size()), true);
    int d = last - 1;
    while (d >= 0 && ++pos[d] == box[d].hi) {
      pos[d] = box[d].lo;
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

int64_t DataVector::Total() const {
  int64_t t = 0;
  for (int64_t c : counts) t += c;
  return t;
}

int64_t RowSum(const IndexSet& row, const DataVector& x) {
  int64_t s = 0;
  for (size_t i = row.find_first(); i != IndexSet::npos; i = row.find_next(i)) {
    s += x.counts[i];
  }
  return s;
}

Workload::Workload(std::vector<RangeQuery> queries, const DomainLayout& layout)
    : queries_(std::move(queries)), domain_size_(layout.size()) {
  rows_.reserve(queries_.size());
  for (const RangeQuery& q : queries_) rows_.push_back(layout.Box(q.ranges));
}

absl::StatusOr<std::vector<int64_t>> EvaluateWorkload(const Workload& w,
                                                      const DataVector& x) {
  if (static_cast<int64_t>(x.size()) != w.domain_size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("workload domain ", w.domain_size(),
                     " does not match data vector length ", x.size()));
  }
  std::vector<int64_t> out;
  out.reserve(w.size());
  for (const IndexSet& row : w.rows()) out.push_back(RowSum(row, x));
  return out;
}

StrategyMatrix::StrategyMatrix(std::vector<StrategyRow> rows) {
  for (StrategyRow& r : rows) Add(std::move(r));
}

bool StrategyMatrix::Contains(NodeKey key) const {
  return std::any_of(rows_.begin(), rows_.end(),
                     [key](const StrategyRow& r) { return r.key == key; });
}

bool StrategyMatrix::Add(StrategyRow row) {
  if (Contains(row.key)) return false;
  rows_.push_back(std::move(row));
  return true;
}

std::vector<IndexSet> StrategyMatrix::Regions() const {
  std::vector<IndexSet> out;
  out.reserve(rows_.size());
  for (const StrategyRow& r : rows_) out.push_back(r.region);
  return out;
}

std::vector<NodeKey> StrategyMatrix::Keys() const {
  std::vector<NodeKey> out;
  out.reserve(rows_.size());
  for (const StrategyRow& r : rows_) out.push_back(r.key);
  return out;
}

int64_t StrategyMatrix::L1Norm() const {
  std::vector<IndexSet> regions = Regions();
  return dpq::L1Norm(regions);
}

int64_t L1Norm(std::span<const IndexSet> rows) {
  if (rows.empty()) return 0;
  std::vector<int32_t> cover(rows.front().size(), 0);
  for (const IndexSet& r : rows) {
    for (size_t i = r.find_first(); i != IndexSet::npos; i = r.find_next(i)) {
      ++cover[i];
    }
  }
  return cover.empty() ? 0 : *std::max_element(cover.begin(), cover.end());
}

Eigen::MatrixXd TransformationMatrix::Dense() const {
  const size_t n = buckets.empty() ? 0 : buckets.front().size();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(buckets.size(), n);
  for (size_t j = 0; j < buckets.size(); ++j) {
    for (size_t i = buckets[j].find_first(); i != IndexSet::npos;
         i = buckets[j].find_next(i)) {
      t(j, i) = 1.0;
    }
  }
  return t;
}

Eigen::VectorXd TransformationMatrix::Apply(const DataVector& x) const {
  Eigen::VectorXd out(buckets.size());
  for (size_t j = 0; j < buckets.size(); ++j) {
    out[j] = static_cast<double>(RowSum(buckets[j], x));
  }
  return out;
}

Eigen::MatrixXd MapRows(std::span<const IndexSet> rows,
                        const TransformationMatrix& t) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows.size(), t.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < t.size(); ++j) {
      if (t.buckets[j].is_subset_of(rows[i])) m(i, j) = 1.0;
    }
  }
  return m;
}

Eigen::MatrixXd DenseRows(std::span<const IndexSet> rows) {
  const size_t n = rows.empty() ? 0 : rows.front().size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows.size(), n);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t c = rows[i].find_first(); c != IndexSet::npos;
         c = rows[i].find_next(c)) {
      m(i, c) = 1.0;
    }
  }
  return m;
}

namespace {
constexpr double kRelativeCutoff = 1e-10;
}  // namespace

Eigen::MatrixXd PseudoInverse(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return Eigen::MatrixXd::Zero(a.cols(), a.rows());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = kRelativeCutoff * (s.size() ? s[0] : 0.0);
  Eigen::VectorXd inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    inv[i] = s[i] > cutoff ? 1.0 / s[i] : 0.0;
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

int NumericalRank(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = kRelativeCutoff * s[0];
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s[i] > cutoff;
  return r;
}

absl::StatusOr<Eigen::VectorXd> PseudoinverseSolve(const Eigen::MatrixXd& w,
                                                   const Eigen::MatrixXd& a,
                                                   const Eigen::VectorXd& y) {
  if (w.cols() != a.cols() || a.rows() != y.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "shape mismatch: W' is ", w.rows(), "x", w.cols(), ", A' is ",
        a.rows(), "x", a.cols(), ", y has ", y.size()));
  }
  if (NumericalRank(a) < std::min(a.rows(), a.cols())) {
    return absl::InternalError("strategy matrix is rank deficient");
  }
  return w * (PseudoInverse(a) * y);
}

}  // namespace dpq
