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

// Workloads, strategies and transformation matrices. Rows are stored
// sparsely as index sets over a (possibly multi-attribute) domain; dense
// Eigen matrices are only materialized for the mapped, bucketed forms.

#ifndef DPQ_MATRIX_H_
#define DPQ_MATRIX_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/dynamic_bitset.hpp>

#include "absl/status/statusor.h"
#include "dpq/domain.h"

namespace dpq {

using IndexSet = boost::dynamic_bitset<uint64_t>;

// Identifies a node of the global strategy for one attribute set. For a
// single attribute this is the tree node id; for several attributes it is the
// mixed-radix combination of per-attribute node ids.
using NodeKey = uint64_t;

// Row-major layout of the joint domain of an attribute set (last attribute
// varies fastest).
class DomainLayout {
 public:
  DomainLayout() = default;
  explicit DomainLayout(std::vector<int64_t> sizes);

  int64_t size() const { return size_; }
  int dims() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int64_t>& sizes() const { return sizes_; }
  const std::vector<int64_t>& strides() const { return strides_; }

  // Index set of every joint position inside the box.
  IndexSet Box(std::span<const Interval> box) const;

 private:
  std::vector<int64_t> sizes_;
  std::vector<int64_t> strides_;
  int64_t size_ = 0;
};

// Frequency counts over a domain layout (the raw data vector).
struct DataVector {
  std::vector<int64_t> counts;

  int64_t Total() const;
  size_t size() const { return counts.size(); }
};

// Sum of the data vector over one row.
int64_t RowSum(const IndexSet& row, const DataVector& x);

class Workload {
 public:
  Workload() = default;
  Workload(std::vector<RangeQuery> queries, const DomainLayout& layout);

  const std::vector<RangeQuery>& queries() const { return queries_; }
  const std::vector<IndexSet>& rows() const { return rows_; }
  size_t size() const { return rows_.size(); }
  int64_t domain_size() const { return domain_size_; }

 private:
  std::vector<RangeQuery> queries_;
  std::vector<IndexSet> rows_;
  int64_t domain_size_ = 0;
};

// Returns W·x. Fails when the workload and vector disagree on domain size.
absl::StatusOr<std::vector<int64_t>> EvaluateWorkload(const Workload& w,
                                                      const DataVector& x);

struct StrategyRow {
  NodeKey key = 0;
  IndexSet region;
  int depth = 0;  // depth in the strategy tree, used to break scale ties
};

// Raw strategy: a subset of the global strategy, one row per tree node.
class StrategyMatrix {
 public:
  StrategyMatrix() = default;
  explicit StrategyMatrix(std::vector<StrategyRow> rows);

  const std::vector<StrategyRow>& rows() const { return rows_; }
  size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  bool Contains(NodeKey key) const;
  // Appends a row unless its key is already present.
  bool Add(StrategyRow row);

  std::vector<IndexSet> Regions() const;
  std::vector<NodeKey> Keys() const;
  // Maximum column sum of the 0/1 matrix.
  int64_t L1Norm() const;

 private:
  std::vector<StrategyRow> rows_;
};

// Maximum number of rows covering any single domain position.
int64_t L1Norm(std::span<const IndexSet> rows);

// Disjoint buckets over the domain; T[j, i] = 1 iff position i is in bucket j.
struct TransformationMatrix {
  std::vector<IndexSet> buckets;

  size_t size() const { return buckets.size(); }
  Eigen::MatrixXd Dense() const;
  // x' = T·x.
  Eigen::VectorXd Apply(const DataVector& x) const;
};

// Mapped form of raw rows over buckets: M[i, j] = 1 iff bucket j lies inside
// row i. Rows that do not cover any bucket stay as zero rows.
Eigen::MatrixXd MapRows(std::span<const IndexSet> rows,
                        const TransformationMatrix& t);

// Dense 0/1 matrix of raw rows over the full domain.
Eigen::MatrixXd DenseRows(std::span<const IndexSet> rows);

// Moore-Penrose pseudoinverse via SVD, discarding singular values below
// 1e-10 times the largest one.
Eigen::MatrixXd PseudoInverse(const Eigen::MatrixXd& a);
int NumericalRank(const Eigen::MatrixXd& a);

// W'·A'^+·y.
absl::StatusOr<Eigen::VectorXd> PseudoinverseSolve(const Eigen::MatrixXd& w,
                                                   const Eigen::MatrixXd& a,
                                                   const Eigen::VectorXd& y);

}  // namespace dpq

#endif  // DPQ_MATRIX_H_
