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

#ifndef DPQ_DOMAIN_H_
#define DPQ_DOMAIN_H_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace dpq {

// Half-open interval [lo, hi) over the positions of an ordered domain.
struct Interval {
  int64_t lo = 0;
  int64_t hi = 0;

  int64_t size() const { return hi - lo; }
  bool empty() const { return hi <= lo; }
  bool Contains(const Interval& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
  bool Overlaps(const Interval& other) const {
    return lo < other.hi && other.lo < hi;
  }
  Interval Intersect(const Interval& other) const {
    return {std::max(lo, other.lo), std::min(hi, other.hi)};
  }
  friend bool operator==(const Interval&, const Interval&) = default;
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

std::string ToString(const Interval& interval);

enum class AttributeType { kIntRange, kCategorical };

// One column of the relation. Integer ranges may be declared with a bin
// count, in which case raw values in [lo, hi) are mapped onto `bins`
// equal-width bins and the attribute domain is the bin index.
struct Attribute {
  std::string name;
  AttributeType type = AttributeType::kIntRange;
  double lo = 0;
  double hi = 0;
  std::optional<int64_t> bins;
  std::vector<std::string> values;  // categorical only, in domain order

  int64_t size() const;
  // Maps a raw CSV cell onto a domain position.
  absl::StatusOr<int64_t> Encode(std::string_view cell) const;
};

class DomainSchema {
 public:
  DomainSchema() = default;
  explicit DomainSchema(std::vector<Attribute> attributes);

  static absl::StatusOr<DomainSchema> FromJson(const nlohmann::json& j);
  static absl::StatusOr<DomainSchema> Load(const std::string& path);
  nlohmann::json ToJson() const;

  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute* Find(std::string_view name) const;
  int64_t full_size() const;

 private:
  std::vector<Attribute> attributes_;
};

// A row counting query: one interval per attribute of the attribute set it
// is posed over, in the attribute set's (sorted) order.
struct RangeQuery {
  std::vector<Interval> ranges;

  friend bool operator==(const RangeQuery&, const RangeQuery&) = default;
};

RangeQuery SingleRange(int64_t lo, int64_t hi);

}  // namespace dpq

#endif  // DPQ_DOMAIN_H_
