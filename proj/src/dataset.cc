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

#include "dpq/dataset.h"

#include <algorithm>
#include <fstream>
#include <mutex>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace dpq {

const std::vector<int64_t>* Dataset::Column(std::string_view name) const {
  const auto& attrs = schema.attributes();
  for (size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name == name) return &columns[i];
  }
  return nullptr;
}

bool ReadCsvRecord(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  while (true) {
    for (size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      any = true;
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\r' && i + 1 == line.size()) {
        // CRLF line ending
      } else {
        field += c;
      }
    }
    if (!quoted) break;
    field += '\n';
    if (!std::getline(in, line)) break;
  }
  if (any || !fields.empty()) fields.push_back(std::move(field));
  return true;
}

absl::StatusOr<Dataset> IngestCsv(std::istream& in, const DomainSchema& schema,
                                  IngestMode mode) {
  std::vector<std::string> header;
  if (!ReadCsvRecord(in, header) || header.empty()) {
    return absl::InvalidArgumentError("empty CSV file");
  }
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    header[0] = header[0].substr(3);
  }
  const auto& attrs = schema.attributes();
  std::vector<size_t> col_of(attrs.size());
  for (size_t a = 0; a < attrs.size(); ++a) {
    auto it = std::find(header.begin(), header.end(), attrs[a].name);
    if (it == header.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing column ", attrs[a].name));
    }
    col_of[a] = static_cast<size_t>(it - header.begin());
  }
  Dataset d;
  d.schema = schema;
  d.columns.assign(attrs.size(), {});
  std::vector<std::string> fields;
  std::vector<int64_t> encoded(attrs.size());
  int64_t line_no = 1;
  while (ReadCsvRecord(in, fields)) {
    ++line_no;
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    bool ok = true;
    for (size_t a = 0; a < attrs.size(); ++a) {
      if (col_of[a] >= fields.size()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "row ", line_no, ": missing value for column ", attrs[a].name));
      }
      absl::StatusOr<int64_t> v = attrs[a].Encode(fields[col_of[a]]);
      if (!v.ok()) {
        if (mode == IngestMode::kLenient &&
            absl::IsOutOfRange(v.status())) {
          ok = false;
          break;
        }
        return absl::Status(v.status().code(),
                            absl::StrCat("row ", line_no, ", column ",
                                         attrs[a].name, ": ",
                                         v.status().message()));
      }
      encoded[a] = *v;
    }
    if (!ok) {
      ++d.dropped_rows;
      continue;
    }
    for (size_t a = 0; a < attrs.size(); ++a) {
      d.columns[a].push_back(encoded[a]);
    }
    ++d.row_count;
  }
  if (d.row_count == 0 && d.dropped_rows == 0) {
    return absl::InvalidArgumentError("CSV file has no data rows");
  }
  return d;
}

absl::StatusOr<Dataset> IngestCsv(const std::string& path,
                                  const DomainSchema& schema, IngestMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return IngestCsv(in, schema, mode);
}

std::vector<std::string> CanonicalAttributes(std::vector<std::string> attrs) {
  std::sort(attrs.begin(), attrs.end());
  attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  return attrs;
}

std::string AttributeSetKey(const std::vector<std::string>& canonical) {
  return absl::StrJoin(canonical, ",");
}

absl::StatusOr<DataVector> MaterializeVector(
    const Dataset& d, const std::vector<std::string>& attrs) {
  std::vector<std::string> names = CanonicalAttributes(attrs);
  if (names.empty()) return absl::InvalidArgumentError("empty attribute set");
  std::vector<const std::vector<int64_t>*> cols;
  std::vector<int64_t> sizes;
  for (const std::string& n : names) {
    const Attribute* a = d.schema.Find(n);
    if (a == nullptr) {
      return absl::NotFoundError(absl::StrCat("unknown attribute ", n));
    }
    cols.push_back(d.Column(n));
    sizes.push_back(a->size());
  }
  DomainLayout layout(sizes);
  DataVector x;
  x.counts.assign(static_cast<size_t>(layout.size()), 0);
  for (int64_t r = 0; r < d.row_count; ++r) {
    int64_t idx = 0;
    for (size_t k = 0; k < cols.size(); ++k) {
      idx += (*cols[k])[r] * layout.strides()[k];
    }
    ++x.counts[idx];
  }
  return x;
}

absl::StatusOr<std::shared_ptr<const DataVector>> VectorRegistry::Get(
    const std::vector<std::string>& attrs) {
  std::string key = AttributeSetKey(CanonicalAttributes(attrs));
  {
    std::shared_lock lock(mu_);
    auto it = vectors_.find(key);
    if (it != vectors_.end()) return it->second;
  }
  absl::StatusOr<DataVector> x = MaterializeVector(*dataset_, attrs);
  if (!x.ok()) return x.status();
  auto ptr = std::make_shared<const DataVector>(*std::move(x));
  std::unique_lock lock(mu_);
  auto [it, inserted] = vectors_.emplace(key, std::move(ptr));
  return it->second;
}

}  // namespace dpq
