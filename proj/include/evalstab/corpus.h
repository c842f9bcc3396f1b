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

// Data model for fully annotated multi-rater MQM datasets, plus ingestion
// from (and export to) the canonical TSV format.
//
// A dataset is a set of documents, each split into segments. Every document
// belongs to exactly one bucket, and every (document, system) item of a
// bucket is rated segment by segment by each of the bucket's raters. All
// identifiers are sorted with NaturalLess, so ingestion is independent of
// row order.

#ifndef EVALSTAB_CORPUS_H_
#define EVALSTAB_CORPUS_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evalstab/common.h"

namespace evalstab {

class WeightTable;

enum class Severity { kMajor, kMinor };

std::string_view SeverityName(Severity severity);
// Case-insensitive "major" / "minor".
std::optional<Severity> ParseSeverity(std::string_view text);

// Character range [start, end) within the target segment, in code points.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  auto operator<=>(const CharSpan&) const = default;
};

struct ErrorAnnotation {
  std::string category;  // label path such as "Accuracy/Mistranslation"
  Severity severity = Severity::kMinor;
  std::optional<CharSpan> span;
  auto operator<=>(const ErrorAnnotation&) const = default;
};

// One input row for DatasetBuilder: a single error of one segment rating, or
// (with no annotation) a no-error / score-only marker.
struct RatingRow {
  std::string doc_id;
  std::int64_t seg_index = 0;
  std::string system_id;
  std::string rater_id;
  std::optional<ErrorAnnotation> annotation;
  std::optional<double> score;
  std::optional<std::string> bucket_id;
  std::optional<std::string> target_text;
  int line = 0;
};

struct DocumentInfo {
  std::string id;
  std::size_t n_segments = 0;
  std::size_t bucket = 0;
  std::size_t segment_offset = 0;  // position of segment 0 among all segments
  std::size_t cell_offset = 0;     // start of this document's rating cells
  bool operator==(const DocumentInfo&) const = default;
};

struct Bucket {
  std::string id;
  std::vector<std::size_t> documents;  // ascending dataset indices
  std::vector<std::size_t> raters;     // ascending dataset indices
  bool operator==(const Bucket&) const = default;
};

struct RatingCell {
  double score = 0.0;  // MQM points, lower is better
  std::uint32_t error_count = 0;
  bool operator==(const RatingCell&) const = default;
};

struct ValidationIssue {
  ErrorCode code;
  int line = 0;  // 0 when the issue is not tied to one input line
  std::string message;
};

// Thrown by ingestion with every violation found; code() is the first one's.
class IngestError : public Error {
 public:
  explicit IngestError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

class RatingDataset {
 public:
  const std::string& language_pair() const { return language_pair_; }
  const std::vector<DocumentInfo>& documents() const { return documents_; }
  const std::vector<std::string>& systems() const { return systems_; }
  const std::vector<std::string>& raters() const { return raters_; }
  const std::vector<Bucket>& buckets() const { return buckets_; }
  std::size_t total_segments() const { return total_segments_; }
  // True when scores were derived from error annotations (error counts are
  // meaningful); false for score-only data.
  bool has_annotations() const { return has_annotations_; }
  bool has_target_text() const { return !target_text_.empty(); }

  const std::vector<std::size_t>& BucketRaters(std::size_t doc) const {
    return buckets_[documents_[doc].bucket].raters;
  }
  // Position of `rater` in the document's bucket rater list.
  std::optional<std::size_t> RaterSlot(std::size_t doc, std::size_t rater) const;

  const RatingCell& Cell(std::size_t doc, std::size_t seg, std::size_t system,
                         std::size_t slot) const {
    return cells_[CellIndex(doc, seg, system, slot)];
  }
  std::span<const ErrorAnnotation> Annotations(std::size_t doc, std::size_t seg,
                                               std::size_t system,
                                               std::size_t slot) const;
  // Empty string when the dataset carries no target text.
  const std::string& TargetText(std::size_t doc, std::size_t seg,
                                std::size_t system) const;

  std::optional<std::size_t> FindDocument(std::string_view id) const;
  std::optional<std::size_t> FindSystem(std::string_view id) const;
  std::optional<std::size_t> FindRater(std::string_view id) const;

  bool operator==(const RatingDataset&) const = default;

 private:
  friend class DatasetBuilder;

  std::size_t CellIndex(std::size_t doc, std::size_t seg, std::size_t system,
                        std::size_t slot) const {
    const DocumentInfo& d = documents_[doc];
    const std::size_t arity = buckets_[d.bucket].raters.size();
    return d.cell_offset + (seg * systems_.size() + system) * arity + slot;
  }

  std::string language_pair_;
  std::vector<DocumentInfo> documents_;
  std::vector<std::string> systems_;
  std::vector<std::string> raters_;
  std::vector<Bucket> buckets_;
  std::size_t total_segments_ = 0;
  bool has_annotations_ = false;
  std::vector<RatingCell> cells_;
  std::vector<std::vector<ErrorAnnotation>> annotations_;  // parallel to cells_
  // Indexed by (segment_offset + seg) * n_systems + system.
  std::vector<std::string> target_text_;
};

// Accumulates rows (in any order) and validates them into a dataset.
class DatasetBuilder {
 public:
  DatasetBuilder(std::string language_pair, bool annotated);

  void AddRow(RatingRow row);
  // Throws IngestError listing every structural violation.
  RatingDataset Build(const WeightTable& weights) &&;

 private:
  struct Accumulated {
    std::vector<ErrorAnnotation> annotations;
    std::optional<double> score;
    int line = 0;
    bool conflicting_score = false;
  };

  std::string language_pair_;
  bool annotated_;
  std::vector<RatingRow> rows_;
};

// Maps canonical fields onto the columns of an input file. Fields that are
// not explicitly configured default to the canonical column name and are
// optional; explicitly configured columns must exist.
//
// Config file keys: one per canonical field (lang_pair, bucket_id, doc_id,
// seg_index, system_id, rater_id, severity, category, score, target_text,
// span_start, span_end) naming the source column, plus
//   language_pair     = constant used when no lang_pair column exists
//   seg_index_base    = 0 or 1
//   renumber_segments = true to compact each document's segment ids to 0..n-1
//   no_error_severity = comma-separated severity values meaning "no error"
//   escapes           = whether fields use \t \n \r \\ escapes (default true)
struct ColumnMapping {
  enum Field {
    kLangPair,
    kBucketId,
    kDocId,
    kSegIndex,
    kSystemId,
    kRaterId,
    kSeverity,
    kCategory,
    kScore,
    kTargetText,
    kSpanStart,
    kSpanEnd,
    kFieldCount,
  };

  std::string columns[kFieldCount];
  bool explicit_column[kFieldCount] = {};
  std::string language_pair;
  int seg_index_base = 0;
  bool renumber_segments = false;
  std::vector<std::string> no_error_severity = {"no-error", "none"};
  bool escapes = true;

  static ColumnMapping Canonical();
  static ColumnMapping FromKeyValues(const KeyValueFile& file);
  static ColumnMapping Load(const std::string& path);
  static std::string_view FieldName(Field field);
};

RatingDataset IngestText(std::string_view text, std::string_view origin,
                         const ColumnMapping& mapping, const WeightTable& weights);
RatingDataset Ingest(const std::string& path, const ColumnMapping& mapping,
                     const WeightTable& weights);

// Canonical UTF-8 TSV; rows sorted by document, segment, system, rater.
void WriteCanonicalTsv(const RatingDataset& dataset, std::ostream& out);
std::string CanonicalTsv(const RatingDataset& dataset);

struct DatasetStats {
  std::size_t n_documents = 0;
  std::size_t n_segments = 0;
  std::size_t min_segments_per_doc = 0;
  std::size_t max_segments_per_doc = 0;
  std::size_t n_raters = 0;
  std::size_t n_systems = 0;
  std::size_t n_item_ratings = 0;     // (document, system, rater) triples
  std::size_t n_segment_ratings = 0;
  std::vector<std::pair<std::string, std::size_t>> bucket_doc_counts;
};

DatasetStats ComputeStats(const RatingDataset& dataset);

struct BucketLayoutEntry {
  std::string bucket_id;
  std::vector<std::string> rater_ids;
  std::size_t n_documents = 0;
};

std::vector<BucketLayoutEntry> BucketLayout(const RatingDataset& dataset);

}  // namespace evalstab

#endif  // EVALSTAB_CORPUS_H_
