// Copyright 2026 The Evalstab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evalstab/corpus.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "evalstab/scoring.h"
#include "test_util.h"

namespace evalstab {
namespace {

// Two documents, two systems, raters a/b/c on both; doc2 has two segments.
constexpr const char kHeader[] =
    "doc_id\tseg_index\tsystem_id\trater_id\tseverity\tcategory\n";

std::string SmallAnnotated() {
  std::string t = kHeader;
  for (const char* doc : {"doc1", "doc2"}) {
    const int n_seg = std::string(doc) == "doc2" ? 2 : 1;
    for (int g = 0; g < n_seg; ++g) {
      for (const char* sys : {"sysA", "sysB"}) {
        for (const char* r : {"a", "b", "c"}) {
          t += std::string(doc) + "\t" + std::to_string(g) + "\t" + sys + "\t" + r + "\t\t\n";
        }
      }
    }
  }
  return t;
}

RatingDataset IngestString(const std::string& text) {
  return IngestText(text, "test.tsv", ColumnMapping::Canonical(), WeightTable::Default());
}

TEST(IngestTest, ReadsCompleteAnnotatedFile) {
  std::string text = SmallAnnotated();
  text += "doc1\t0\tsysA\ta\tMajor\tAccuracy/Mistranslation\n";
  text += "doc1\t0\tsysA\ta\tminor\tFluency/Punctuation\n";
  const RatingDataset ds = IngestString(text);
  EXPECT_EQ(ds.documents().size(), 2u);
  EXPECT_EQ(ds.total_segments(), 3u);
  EXPECT_EQ(ds.systems(), (std::vector<std::string>{"sysA", "sysB"}));
  EXPECT_EQ(ds.raters(), (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_EQ(ds.buckets().size(), 1u);
  EXPECT_TRUE(ds.has_annotations());
  const auto a = *ds.FindRater("a");
  const auto slot = *ds.RaterSlot(0, a);
  EXPECT_DOUBLE_EQ(ds.Cell(0, 0, 0, slot).score, 5.1);
  EXPECT_EQ(ds.Cell(0, 0, 0, slot).error_count, 2u);
  EXPECT_DOUBLE_EQ(ds.Cell(0, 0, 1, slot).score, 0.0);
  EXPECT_EQ(ds.Annotations(0, 0, 0, slot).size(), 2u);
}

TEST(IngestTest, RowOrderDoesNotMatter) {
  const std::string text = SmallAnnotated() + "doc2\t1\tsysB\tc\tMajor\tAccuracy\n";
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string header, line;
  std::getline(in, header);
  while (std::getline(in, line)) lines.push_back(line);
  std::mt19937 gen(3);
  std::shuffle(lines.begin(), lines.end(), gen);
  std::string shuffled = header + "\n";
  for (const auto& l : lines) shuffled += l + "\n";
  EXPECT_EQ(IngestString(text), IngestString(shuffled));
}

TEST(IngestTest, MissingRatingNamesDocSystemAndRater) {
  std::string text = SmallAnnotated();
  const std::string drop = "doc2\t1\tsysB\tb\t\t\n";
  text.erase(text.find(drop), drop.size());
  try {
    IngestString(text);
    FAIL() << "expected IncompleteRatings";
  } catch (const IngestError& e) {
    ASSERT_FALSE(e.issues().empty());
    EXPECT_EQ(e.issues()[0].code, ErrorCode::kIncompleteRatings);
    const std::string& msg = e.issues()[0].message;
    EXPECT_NE(msg.find("doc2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("sysB"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
  }
}

TEST(IngestTest, BadSeverityReportsLine) {
  std::string text = SmallAnnotated();
  text += "doc1\t0\tsysA\ta\tCritical\tAccuracy\n";
  const int bad_line = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  try {
    IngestString(text);
    FAIL() << "expected a parse error";
  } catch (const IngestError& e) {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].code, ErrorCode::kParseError);
    EXPECT_EQ(e.issues()[0].line, bad_line);
    EXPECT_NE(e.issues()[0].message.find("Critical"), std::string::npos);
  }
}

TEST(IngestTest, MissingColumns) {
  try {
    IngestString("doc_id\tseg_index\tsystem_id\tscore\nd\t0\ts\t1\n");
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingColumn);
  }
  // Severity without category.
  EXPECT_THROW(IngestString("doc_id\tseg_index\tsystem_id\trater_id\tseverity\nd\t0\ts\tr\t\n"),
               IngestError);
  // An explicitly mapped column must exist.
  ColumnMapping m = ColumnMapping::Canonical();
  m.columns[ColumnMapping::kTargetText] = "target";
  m.explicit_column[ColumnMapping::kTargetText] = true;
  EXPECT_THROW(IngestText(SmallAnnotated(), "t", m, WeightTable::Default()), IngestError);
}

TEST(IngestTest, WrongFieldCount) {
  std::string text = SmallAnnotated() + "doc1\t0\tsysA\n";
  EXPECT_THROW(IngestString(text), IngestError);
}

TEST(IngestTest, ConflictingBucketIds) {
  std::string t = "bucket_id\tdoc_id\tseg_index\tsystem_id\trater_id\tscore\n";
  t += "1\td1\t0\ts1\ta\t1\n1\td1\t0\ts2\ta\t1\n";
  t += "2\td1\t0\ts1\tb\t1\n2\td1\t0\ts2\tb\t1\n";
  try {
    IngestString(t);
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInconsistentBuckets);
  }
}

TEST(IngestTest, BucketsSharingRaterSetAreRejected) {
  std::string t = "bucket_id\tdoc_id\tseg_index\tsystem_id\trater_id\tscore\n";
  t += "1\td1\t0\ts1\ta\t1\n1\td1\t0\ts2\ta\t1\n";
  t += "2\td2\t0\ts1\ta\t1\n2\td2\t0\ts2\ta\t1\n";
  EXPECT_THROW(IngestString(t), IngestError);
}

TEST(IngestTest, ScoreColumnMustMatchAnnotations) {
  std::string t = "doc_id\tseg_index\tsystem_id\trater_id\tseverity\tcategory\tscore\n";
  t += "d1\t0\ts1\ta\tMajor\tAccuracy\t5\n";
  t += "d1\t0\ts2\ta\tMinor\tFluency/Punctuation\t0.1\n";
  EXPECT_NO_THROW(IngestString(t));
  t += "d1\t1\ts1\ta\tMinor\tStyle\t3\n";
  t += "d1\t1\ts2\ta\t\t\t0\n";
  try {
    IngestString(t);
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScoreMismatch);
  }
}

TEST(IngestTest, ScoreOnlyData) {
  std::string t = "doc_id\tseg_index\tsystem_id\trater_id\tscore\n";
  t += "d1\t0\ts1\ta\t2.5\nd1\t0\ts2\ta\t0\n";
  const RatingDataset ds = IngestString(t);
  EXPECT_FALSE(ds.has_annotations());
  EXPECT_DOUBLE_EQ(ds.Cell(0, 0, 0, 0).score, 2.5);
}

TEST(IngestTest, MappingRenamesAndRenumbers) {
  std::string t = "doc\tglobalSegId\tsystem\trater\tseverity\tcategory\ttarget\n";
  for (int g : {11, 12}) {
    for (const char* s : {"x", "y"}) {
      t += "D\t" + std::to_string(g) + "\t" + s + "\tr1\tNeutral\t\tout\n";
    }
  }
  const RatingDataset ds = IngestText(t, "m.tsv", ColumnMapping::Load(EVALSTAB_SOURCE_DIR
                                                                      "/configs/mapping_example.ini"),
                                      WeightTable::Default());
  EXPECT_EQ(ds.language_pair(), "en-de");
  EXPECT_EQ(ds.total_segments(), 2u);
}

TEST(IngestTest, UnknownMappingKeyIsAConfigError) {
  const auto f = KeyValueFile::Parse("doc_idd = x\n", "m");
  try {
    ColumnMapping::FromKeyValues(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }
}

TEST(CanonicalTsvTest, RoundTripsAnnotatedAndScoreOnly) {
  std::string text = SmallAnnotated();
  text += "doc1\t0\tsysA\ta\tMajor\tNon-translation\n";
  text += "doc2\t1\tsysB\tc\tMinor\tStyle/Awkward\n";
  const RatingDataset ds = IngestString(text);
  const std::string canonical = CanonicalTsv(ds);
  const RatingDataset again = IngestString(canonical);
  EXPECT_EQ(ds, again);
  EXPECT_EQ(canonical, CanonicalTsv(again));

  const RatingDataset layout = testing::LayoutDataset({{{"a", "b", "c"}, 4}}, 3, 2);
  EXPECT_EQ(layout, IngestString(CanonicalTsv(layout)));
}

TEST(CanonicalTsvTest, EscapesSurviveRoundTrip) {
  std::string t = "doc_id\tseg_index\tsystem_id\trater_id\tscore\ttarget_text\n";
  t += "d1\t0\ts1\ta\t1\tline\\none\\ttab\n";
  t += "d1\t0\ts2\ta\t0\tplain\n";
  const RatingDataset ds = IngestString(t);
  EXPECT_EQ(ds.TargetText(0, 0, 0), "line\none\ttab");
  EXPECT_EQ(ds, IngestString(CanonicalTsv(ds)));
}

TEST(StatsTest, CountsAndLayout) {
  const RatingDataset ds =
      testing::LayoutDataset(testing::EnglishChineseLayout(), 3, 2);
  const DatasetStats st = ComputeStats(ds);
  EXPECT_EQ(st.n_documents, 181u);
  EXPECT_EQ(st.n_segments, 362u);
  EXPECT_EQ(st.n_raters, 6u);
  EXPECT_EQ(st.n_systems, 3u);
  EXPECT_EQ(st.n_item_ratings, 181u * 3 * 3);
  EXPECT_EQ(st.n_segment_ratings, 181u * 2 * 3 * 3);
  const auto layout = BucketLayout(ds);
  ASSERT_EQ(layout.size(), 2u);
  EXPECT_EQ(layout[0].rater_ids, (std::vector<std::string>{"H", "I", "J"}));
  EXPECT_EQ(layout[0].n_documents, 90u);
  EXPECT_EQ(layout[1].n_documents, 91u);
}

TEST(StatsTest, InferredBucketsFollowRaterSets) {
  std::string t = "doc_id\tseg_index\tsystem_id\trater_id\tscore\n";
  for (const char* d : {"d1", "d2", "d3"}) {
    const bool first = std::string(d) != "d2";
    for (const char* r : first ? std::vector<const char*>{"a", "b"} : std::vector<const char*>{"c", "b"}) {
      for (const char* s : {"s1", "s2"}) t += std::string(d) + "\t0\t" + s + "\t" + r + "\t1\n";
    }
  }
  const RatingDataset ds = IngestString(t);
  ASSERT_EQ(ds.buckets().size(), 2u);
  EXPECT_EQ(ds.buckets()[0].documents, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(ds.buckets()[1].documents, (std::vector<std::size_t>{1}));
}

}  // namespace
}  // namespace evalstab
