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

#include "dpq/domain.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/strip.h"
#include "absl/strings/ascii.h"

namespace dpq {

std::string ToString(const Interval& interval) {
  return absl::StrCat("[", interval.lo, ",", interval.hi, ")");
}

int64_t Attribute::size() const {
  if (type == AttributeType::kCategorical) {
    return static_cast<int64_t>(values.size());
  }
  if (bins.has_value()) return *bins;
  return static_cast<int64_t>(hi - lo);
}

absl::StatusOr<int64_t> Attribute::Encode(std::string_view cell) const {
  absl::string_view v =
      absl::StripAsciiWhitespace(absl::string_view(cell.data(), cell.size()));
  if (type == AttributeType::kCategorical) {
    for (size_t i = 0; i < values.size(); ++i) {
      if (values[i] == v) return static_cast<int64_t>(i);
    }
    return absl::OutOfRangeError(
        absl::StrCat("value '", v, "' not in categorical domain of ", name));
  }
  if (bins.has_value()) {
    double d;
    if (!absl::SimpleAtod(v, &d)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cannot parse '", v, "' as a number for ", name));
    }
    if (!(d >= lo && d < hi)) {
      return absl::OutOfRangeError(
          absl::StrCat("value ", v, " outside [", lo, ",", hi, ") for ", name));
    }
    int64_t bin = static_cast<int64_t>(std::floor((d - lo) / (hi - lo) *
                                                  static_cast<double>(*bins)));
    return std::clamp<int64_t>(bin, 0, *bins - 1);
  }
  int64_t i;
  if (!absl::SimpleAtoi(v, &i)) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot parse '", v, "' as an integer for ", name));
  }
  if (i < static_cast<int64_t>(lo) || i >= static_cast<int64_t>(hi)) {
    return absl::OutOfRangeError(
        absl::StrCat("value ", i, " outside [", lo, ",", hi, ") for ", name));
  }
  return i - static_cast<int64_t>(lo);
}

DomainSchema::DomainSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {}

absl::StatusOr<DomainSchema> DomainSchema::FromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("attributes") ||
      !j["attributes"].is_array()) {
    return absl::InvalidArgumentError("schema needs an 'attributes' array");
  }
  std::vector<Attribute> attrs;
  std::set<std::string> seen;
  for (const auto& a : j["attributes"]) {
    Attribute attr;
    if (!a.contains("name") || !a["name"].is_string()) {
      return absl::InvalidArgumentError("attribute without a name");
    }
    attr.name = a["name"].get<std::string>();
    if (!seen.insert(attr.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate attribute ", attr.name));
    }
    std::string type = a.value("type", "int_range");
    if (type == "categorical") {
      attr.type = AttributeType::kCategorical;
      if (!a.contains("values") || !a["values"].is_array()) {
        return absl::InvalidArgumentError(
            absl::StrCat(attr.name, ": categorical attribute needs values"));
      }
      for (const auto& v : a["values"]) {
        attr.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else if (type == "int_range") {
      attr.type = AttributeType::kIntRange;
      if (!a.contains("lo") || !a.contains("hi")) {
        return absl::InvalidArgumentError(
            absl::StrCat(attr.name, ": int_range needs lo and hi"));
      }
      attr.lo = a["lo"].get<double>();
      attr.hi = a["hi"].get<double>();
      if (a.contains("bins")) {
        attr.bins = a["bins"].get<int64_t>();
        if (*attr.bins <= 0) {
          return absl::InvalidArgumentError(
              absl::StrCat(attr.name, ": bins must be positive"));
        }
      } else if (attr.lo != std::floor(attr.lo) ||
                 attr.hi != std::floor(attr.hi)) {
        return absl::InvalidArgumentError(absl::StrCat(
            attr.name, ": non-integer bounds require a bin count"));
      }
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat(attr.name, ": unknown type ", type));
    }
    if (attr.size() <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat(attr.name, ": empty domain"));
    }
    attrs.push_back(std::move(attr));
  }
  if (attrs.empty()) return absl::InvalidArgumentError("schema is empty");
  return DomainSchema(std::move(attrs));
}

absl::StatusOr<DomainSchema> DomainSchema::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat("bad JSON in ", path));
  }
  return FromJson(j);
}

nlohmann::json DomainSchema::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const Attribute& a : attributes_) {
    nlohmann::json j = {{"name", a.name}};
    if (a.type == AttributeType::kCategorical) {
      j["type"] = "categorical";
      j["values"] = a.values;
    } else {
      j["type"] = "int_range";
      j["lo"] = a.lo;
      j["hi"] = a.hi;
      if (a.bins) j["bins"] = *a.bins;
    }
    j["size"] = a.size();
    out.push_back(std::move(j));
  }
  return {{"attributes", out}};
}

const Attribute* DomainSchema::Find(std::string_view name) const {
  for (const Attribute& a : attributes_) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

int64_t DomainSchema::full_size() const {
  int64_t n = 1;
  for (const Attribute& a : attributes_) n *= a.size();
  return n;
}

RangeQuery SingleRange(int64_t lo, int64_t hi) {
  return RangeQuery{{Interval{lo, hi}}};
}

}  // namespace dpq
