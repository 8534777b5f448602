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

#include <sstream>

#include <gtest/gtest.h>

#include "dpq/accuracy.h"
#include "dpq/dataset.h"
#include "dpq/domain.h"

namespace dpq {
namespace {

DomainSchema AgeSex() {
  return *DomainSchema::FromJson(nlohmann::json::parse(R"({"attributes":[
    {"name":"age","type":"int_range","lo":0,"hi":8},
    {"name":"sex","type":"categorical","values":["F","M"]}]})"));
}

TEST(Schema, ParsesAndEncodes) {
  DomainSchema s = AgeSex();
  EXPECT_EQ(s.full_size(), 16);
  EXPECT_EQ(*s.Find("age")->Encode(" 3 "), 3);
  EXPECT_EQ(*s.Find("sex")->Encode("M"), 1);
  EXPECT_FALSE(s.Find("age")->Encode("8").ok());
  EXPECT_FALSE(s.Find("age")->Encode("x").ok());
  EXPECT_FALSE(s.Find("sex")->Encode("X").ok());
}

TEST(Schema, Binned) {
  auto s = DomainSchema::FromJson(nlohmann::json::parse(
      R"({"attributes":[{"name":"w","lo":0.0,"hi":1.0,"bins":4}]})"));
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->full_size(), 4);
  EXPECT_EQ(*s->Find("w")->Encode("0.26"), 1);
  EXPECT_EQ(*s->Find("w")->Encode("0.999"), 3);
}

TEST(Schema, Rejects) {
  EXPECT_FALSE(DomainSchema::FromJson(nlohmann::json::parse(R"({"attributes":[]})")).ok());
  EXPECT_FALSE(DomainSchema::FromJson(nlohmann::json::parse(
      R"({"attributes":[{"name":"a","lo":0,"hi":2},{"name":"a","lo":0,"hi":2}]})")).ok());
  EXPECT_FALSE(DomainSchema::FromJson(nlohmann::json::parse(
      R"({"attributes":[{"name":"a","lo":3,"hi":3}]})")).ok());
}

TEST(Csv, QuotesCrlfAndMultiline) {
  std::istringstream in("a,\"b \"\"q\"\"\",\"c\r\nd\"\r\nx,y,z\r\n");
  std::vector<std::string> f;
  ASSERT_TRUE(ReadCsvRecord(in, f));
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[1], "b \"q\"");
  EXPECT_EQ(f[2], "c\r\nd");
  ASSERT_TRUE(ReadCsvRecord(in, f));
  EXPECT_EQ(f, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_FALSE(ReadCsvRecord(in, f));
}

TEST(Csv, IngestAndMaterialize) {
  std::istringstream in("sex,extra,age\nF,1,0\nM,2,7\nM,3,7\n");
  auto d = IngestCsv(in, AgeSex());
  ASSERT_TRUE(d.ok()) << d.status();
  EXPECT_EQ(d->row_count, 3);
  auto x = MaterializeVector(*d, {"sex", "age"});
  ASSERT_TRUE(x.ok());
  // age is first in canonical order and varies slowest.
  EXPECT_EQ(x->counts[0 * 2 + 0], 1);
  EXPECT_EQ(x->counts[7 * 2 + 1], 2);
  EXPECT_EQ(x->Total(), 3);
}

TEST(Csv, ErrorsNameRowAndColumn) {
  std::istringstream in("age,sex\n1,F\n9,M\n");
  auto d = IngestCsv(in, AgeSex());
  ASSERT_FALSE(d.ok());
  EXPECT_NE(d.status().message().find("row 3"), std::string::npos);
  EXPECT_NE(d.status().message().find("age"), std::string::npos);
  std::istringstream lenient("age,sex\n1,F\n9,M\n");
  auto l = IngestCsv(lenient, AgeSex(), IngestMode::kLenient);
  ASSERT_TRUE(l.ok());
  EXPECT_EQ(l->row_count, 1);
  EXPECT_EQ(l->dropped_rows, 1);
  std::istringstream missing("age\n1\n");
  EXPECT_FALSE(IngestCsv(missing, AgeSex()).ok());
}

TEST(Accuracy, LooserOrEqual) {
  auto tight = *AccuracyRequirement::WorstError(10, 0.05);
  auto loose = *AccuracyRequirement::WorstError(20, 0.05);
  EXPECT_TRUE(loose.IsLooserOrEqual(tight));
  EXPECT_FALSE(tight.IsLooserOrEqual(loose));
  EXPECT_TRUE(tight.IsLooserOrEqual(tight));
  EXPECT_FALSE(AccuracyRequirement::WorstError(-1, 0.05).ok());
  EXPECT_FALSE(AccuracyRequirement::WorstError(1, 1.5).ok());
  auto rt = AccuracyRequirement::FromJson(tight.ToJson());
  ASSERT_TRUE(rt.ok());
  EXPECT_EQ(rt->alpha(), 10);
}

}  // namespace
}  // namespace dpq
