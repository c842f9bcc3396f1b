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
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "evalstab/scoring.h"

namespace evalstab {

namespace {

constexpr double kScoreTolerance = 1e-9;
constexpr std::size_t kMaxReportedIssues = 200;

std::string Escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char n = s[i + 1];
      if (n == '\\' || n == 't' || n == 'n' || n == 'r') {
        out += n == 't' ? '\t' : n == 'n' ? '\n' : n == 'r' ? '\r' : '\\';
        ++i;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

std::size_t CodePointCount(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string Where(int line) {
  return line > 0 ? "line " + std::to_string(line) + ": " : std::string();
}

// Interns strings to dense ids in first-seen order, then produces the
// NaturalLess-sorted order as a remap.
class Interner {
 public:
  std::uint32_t Id(const std::string& s) {
    auto [it, inserted] = ids_.try_emplace(s, static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.push_back(s);
    return it->second;
  }
  std::size_t size() const { return names_.size(); }

  // sorted_names[rank[id]] == names_[id]
  void Sort(std::vector<std::string>& sorted_names, std::vector<std::uint32_t>& rank) const {
    std::vector<std::uint32_t> order(names_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return NaturalLess(names_[a], names_[b]);
    });
    sorted_names.resize(names_.size());
    rank.resize(names_.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) {
      sorted_names[r] = names_[order[r]];
      rank[order[r]] = r;
    }
  }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> names_;
};

std::string JoinNames(const std::vector<std::size_t>& ids,
                      const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ",";
    out += names[ids[i]];
  }
  return out;
}

}  // namespace

std::string_view SeverityName(Severity severity) {
  return severity == Severity::kMajor ? "Major" : "Minor";
}

std::optional<Severity> ParseSeverity(std::string_view text) {
  const std::string v = ToLower(Trim(text));
  if (v == "major") return Severity::kMajor;
  if (v == "minor") return Severity::kMinor;
  return std::nullopt;
}

IngestError::IngestError(std::vector<ValidationIssue> issues)
    : Error(issues.empty() ? ErrorCode::kParseError : issues.front().code,
            [&] {
              std::string msg = std::to_string(issues.size()) + " issue(s); first: ";
              if (!issues.empty()) msg += Where(issues.front().line) + issues.front().message;
              return msg;
            }()),
      issues_(std::move(issues)) {}

std::optional<std::size_t> RatingDataset::RaterSlot(std::size_t doc, std::size_t rater) const {
  const auto& raters = BucketRaters(doc);
  auto it = std::lower_bound(raters.begin(), raters.end(), rater);
  if (it == raters.end() || *it != rater) return std::nullopt;
  return static_cast<std::size_t>(it - raters.begin());
}

std::span<const ErrorAnnotation> RatingDataset::Annotations(std::size_t doc, std::size_t seg,
                                                            std::size_t system,
                                                            std::size_t slot) const {
  return annotations_[CellIndex(doc, seg, system, slot)];
}

const std::string& RatingDataset::TargetText(std::size_t doc, std::size_t seg,
                                             std::size_t system) const {
  static const std::string kEmpty;
  if (target_text_.empty()) return kEmpty;
  return target_text_[(documents_[doc].segment_offset + seg) * systems_.size() + system];
}

std::optional<std::size_t> RatingDataset::FindDocument(std::string_view id) const {
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (documents_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> RatingDataset::FindSystem(std::string_view id) const {
  auto it = std::find(systems_.begin(), systems_.end(), id);
  if (it == systems_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - systems_.begin());
}

std::optional<std::size_t> RatingDataset::FindRater(std::string_view id) const {
  auto it = std::find(raters_.begin(), raters_.end(), id);
  if (it == raters_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - raters_.begin());
}

DatasetBuilder::DatasetBuilder(std::string language_pair, bool annotated)
    : language_pair_(std::move(language_pair)), annotated_(annotated) {}

void DatasetBuilder::AddRow(RatingRow row) { rows_.push_back(std::move(row)); }

RatingDataset DatasetBuilder::Build(const WeightTable& weights) && {
  std::vector<ValidationIssue> issues;
  auto report = [&](ErrorCode code, int line, std::string message) {
    if (issues.size() < kMaxReportedIssues) issues.push_back({code, line, std::move(message)});
  };

  Interner docs, systems, raters;
  // Key: (doc, seg, system, rater) in interned ids.
  using Key = std::array<std::uint32_t, 4>;
  std::map<Key, Accumulated> ratings;
  std::unordered_map<std::uint32_t, std::pair<std::string, int>> doc_bucket;
  std::map<std::array<std::uint32_t, 3>, std::pair<std::string, int>> targets;
  bool any_target = false;

  for (RatingRow& row : rows_) {
    if (row.seg_index < 0) {
      report(ErrorCode::kParseError, row.line, "negative segment index");
      continue;
    }
    if (row.doc_id.empty() || row.system_id.empty() || row.rater_id.empty()) {
      report(ErrorCode::kParseError, row.line, "empty document, system or rater id");
      continue;
    }
    const Key key = {docs.Id(row.doc_id), static_cast<std::uint32_t>(row.seg_index),
                     systems.Id(row.system_id), raters.Id(row.rater_id)};
    Accumulated& acc = ratings[key];
    if (acc.line == 0) acc.line = row.line;
    if (row.annotation) acc.annotations.push_back(std::move(*row.annotation));
    if (row.score) {
      if (acc.score && std::fabs(*acc.score - *row.score) > kScoreTolerance) {
        acc.conflicting_score = true;
      }
      acc.score = row.score;
    }
    if (row.bucket_id) {
      auto [it, inserted] = doc_bucket.try_emplace(key[0], *row.bucket_id, row.line);
      if (!inserted && it->second.first != *row.bucket_id) {
        report(ErrorCode::kInconsistentBuckets, row.line,
               "document '" + row.doc_id + "' appears in buckets '" + it->second.first +
                   "' and '" + *row.bucket_id + "'");
      }
    }
    if (row.target_text) {
      any_target = true;
      auto [it, inserted] = targets.try_emplace({key[0], key[1], key[2]}, *row.target_text, row.line);
      if (!inserted && it->second.first != *row.target_text) {
        report(ErrorCode::kParseError, row.line,
               "conflicting target_text for document '" + row.doc_id + "' segment " +
                   std::to_string(row.seg_index) + " system '" + row.system_id + "'");
      }
    }
  }
  rows_.clear();
  if (!issues.empty()) throw IngestError(std::move(issues));
  if (ratings.empty()) {
    throw IngestError({{ErrorCode::kParseError, 0, "dataset contains no ratings"}});
  }

  RatingDataset ds;
  ds.language_pair_ = language_pair_;
  ds.has_annotations_ = annotated_;
  std::vector<std::uint32_t> doc_rank, sys_rank, rater_rank;
  std::vector<std::string> doc_names;
  docs.Sort(doc_names, doc_rank);
  systems.Sort(ds.systems_, sys_rank);
  raters.Sort(ds.raters_, rater_rank);
  const std::size_t n_docs = doc_names.size();
  const std::size_t n_sys = ds.systems_.size();

  // Segment counts and rater sets per document (sorted ids).
  std::vector<std::size_t> n_segments(n_docs, 0);
  std::vector<std::set<std::size_t>> doc_raters(n_docs);
  for (const auto& [key, acc] : ratings) {
    const std::size_t d = doc_rank[key[0]];
    n_segments[d] = std::max<std::size_t>(n_segments[d], key[1] + 1);
    doc_raters[d].insert(rater_rank[key[3]]);
  }

  // Buckets: explicit ids when present, otherwise grouped by rater set.
  std::vector<std::size_t> bucket_of(n_docs, 0);
  if (!doc_bucket.empty()) {
    Interner bucket_ids;
    std::vector<std::uint32_t> raw_bucket(n_docs, 0);
    for (std::uint32_t raw_doc = 0; raw_doc < n_docs; ++raw_doc) {
      auto it = doc_bucket.find(raw_doc);
      if (it == doc_bucket.end()) {
        report(ErrorCode::kInconsistentBuckets, 0,
               "document '" + doc_names[doc_rank[raw_doc]] + "' has no bucket id");
        continue;
      }
      raw_bucket[doc_rank[raw_doc]] = bucket_ids.Id(it->second.first);
    }
    std::vector<std::string> bucket_names;
    std::vector<std::uint32_t> bucket_rank;
    bucket_ids.Sort(bucket_names, bucket_rank);
    ds.buckets_.resize(bucket_names.size());
    for (std::size_t b = 0; b < bucket_names.size(); ++b) ds.buckets_[b].id = bucket_names[b];
    for (std::size_t d = 0; d < n_docs; ++d) bucket_of[d] = bucket_rank[raw_bucket[d]];
    std::vector<std::set<std::size_t>> rater_union(ds.buckets_.size());
    for (std::size_t d = 0; d < n_docs; ++d) {
      rater_union[bucket_of[d]].insert(doc_raters[d].begin(), doc_raters[d].end());
    }
    for (std::size_t b = 0; b < ds.buckets_.size(); ++b) {
      ds.buckets_[b].raters.assign(rater_union[b].begin(), rater_union[b].end());
    }
  } else {
    std::map<std::set<std::size_t>, std::size_t> by_raters;
    for (std::size_t d = 0; d < n_docs; ++d) {
      auto [it, inserted] = by_raters.try_emplace(doc_raters[d], ds.buckets_.size());
      if (inserted) {
        Bucket b;
        b.id = std::to_string(ds.buckets_.size() + 1);
        b.raters.assign(doc_raters[d].begin(), doc_raters[d].end());
        ds.buckets_.push_back(std::move(b));
      }
      bucket_of[d] = it->second;
    }
  }
  if (!issues.empty()) throw IngestError(std::move(issues));
  for (std::size_t b = 0; b < ds.buckets_.size(); ++b) {
    for (std::size_t c = b + 1; c < ds.buckets_.size(); ++c) {
      if (ds.buckets_[b].raters == ds.buckets_[c].raters) {
        report(ErrorCode::kInconsistentBuckets, 0,
               "buckets '" + ds.buckets_[b].id + "' and '" + ds.buckets_[c].id +
                   "' share the rater set {" + JoinNames(ds.buckets_[b].raters, ds.raters_) +
                   "}");
      }
    }
  }

  // Layout.
  ds.documents_.resize(n_docs);
  std::size_t seg_offset = 0, cell_offset = 0;
  for (std::size_t d = 0; d < n_docs; ++d) {
    DocumentInfo& info = ds.documents_[d];
    info.id = doc_names[d];
    info.n_segments = n_segments[d];
    info.bucket = bucket_of[d];
    info.segment_offset = seg_offset;
    info.cell_offset = cell_offset;
    ds.buckets_[bucket_of[d]].documents.push_back(d);
    seg_offset += n_segments[d];
    cell_offset += n_segments[d] * n_sys * ds.buckets_[bucket_of[d]].raters.size();
  }
  ds.total_segments_ = seg_offset;
  ds.cells_.resize(cell_offset);
  ds.annotations_.resize(cell_offset);
  std::vector<char> present(cell_offset, 0);
  if (any_target) ds.target_text_.resize(seg_offset * n_sys);
  for (auto& [key, text_line] : targets) {
    const std::size_t d = doc_rank[key[0]];
    ds.target_text_[(ds.documents_[d].segment_offset + key[1]) * n_sys + sys_rank[key[2]]] =
        text_line.first;
  }

  for (auto& [key, acc] : ratings) {
    const std::size_t d = doc_rank[key[0]];
    const std::size_t seg = key[1];
    const std::size_t s = sys_rank[key[2]];
    const std::size_t r = rater_rank[key[3]];
    const auto slot = ds.RaterSlot(d, r);
    if (!slot) {
      report(ErrorCode::kInconsistentBuckets, acc.line,
             "rater '" + ds.raters_[r] + "' is not a rater of the bucket of document '" +
                 doc_names[d] + "'");
      continue;
    }
    const std::size_t idx = ds.CellIndex(d, seg, s, *slot);
    present[idx] = 1;
    std::sort(acc.annotations.begin(), acc.annotations.end());
    const std::string& target = any_target ? ds.TargetText(d, seg, s) : std::string();
    for (const ErrorAnnotation& a : acc.annotations) {
      if (a.span && (a.span->start > a.span->end ||
                     (!target.empty() && a.span->end > CodePointCount(target)))) {
        report(ErrorCode::kParseError, acc.line,
               "error span [" + std::to_string(a.span->start) + "," +
                   std::to_string(a.span->end) + ") outside the target segment");
      }
    }
    if (acc.conflicting_score) {
      report(ErrorCode::kScoreMismatch, acc.line, "rows of one segment rating carry different scores");
    }
    RatingCell& cell = ds.cells_[idx];
    if (annotated_) {
      cell.score = SegmentScore(acc.annotations, weights);
      cell.error_count = static_cast<std::uint32_t>(acc.annotations.size());
      if (acc.score && std::fabs(*acc.score - cell.score) > kScoreTolerance) {
        report(ErrorCode::kScoreMismatch, acc.line,
               "score " + FormatDouble(*acc.score) + " disagrees with annotation total " +
                   FormatDouble(cell.score) + " (document '" + doc_names[d] + "', segment " +
                   std::to_string(seg) + ", system '" + ds.systems_[s] + "', rater '" +
                   ds.raters_[r] + "')");
      }
    } else {
      cell.score = acc.score.value_or(0.0);
    }
    ds.annotations_[idx] = std::move(acc.annotations);
  }

  // Completeness: every item of a bucket rated on every segment by each of
  // the bucket's raters.
  for (std::size_t d = 0; d < n_docs; ++d) {
    const auto& bucket_raters = ds.BucketRaters(d);
    for (std::size_t s = 0; s < n_sys; ++s) {
      for (std::size_t k = 0; k < bucket_raters.size(); ++k) {
        std::vector<std::size_t> missing;
        for (std::size_t seg = 0; seg < n_segments[d]; ++seg) {
          if (!present[ds.CellIndex(d, seg, s, k)]) missing.push_back(seg);
        }
        if (missing.empty()) continue;
        std::string segs;
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
          segs += (i ? "," : "") + std::to_string(missing[i]);
        }
        if (missing.size() > 10) segs += ",...";
        report(ErrorCode::kIncompleteRatings, 0,
               "document '" + doc_names[d] + "', system '" + ds.systems_[s] + "', rater '" +
                   ds.raters_[bucket_raters[k]] + "' lacks ratings for segment(s) " + segs);
      }
    }
  }
  if (!issues.empty()) throw IngestError(std::move(issues));
  return ds;
}

ColumnMapping ColumnMapping::Canonical() {
  ColumnMapping m;
  for (int f = 0; f < kFieldCount; ++f) m.columns[f] = std::string(FieldName(static_cast<Field>(f)));
  return m;
}

std::string_view ColumnMapping::FieldName(Field field) {
  static constexpr std::string_view kNames[kFieldCount] = {
      "lang_pair", "bucket_id", "doc_id", "seg_index", "system_id", "rater_id",
      "severity", "category", "score", "target_text", "span_start", "span_end"};
  return kNames[field];
}

ColumnMapping ColumnMapping::FromKeyValues(const KeyValueFile& file) {
  ColumnMapping m = Canonical();
  for (const KeyValueEntry& e : file.entries()) {
    const std::string where = file.origin() + ":" + std::to_string(e.line) + ": ";
    if (!e.section.empty()) {
      throw Error(ErrorCode::kInvalidConfig, where + "column mapping takes no sections");
    }
    bool matched = false;
    for (int f = 0; f < kFieldCount; ++f) {
      if (e.key == FieldName(static_cast<Field>(f))) {
        m.columns[f] = e.value;
        m.explicit_column[f] = true;
        matched = true;
      }
    }
    if (matched) continue;
    if (e.key == "language_pair") {
      m.language_pair = e.value;
    } else if (e.key == "seg_index_base") {
      const auto base = ParseInt(e.value, where + "seg_index_base");
      if (base != 0 && base != 1) {
        throw Error(ErrorCode::kInvalidConfig, where + "seg_index_base must be 0 or 1");
      }
      m.seg_index_base = static_cast<int>(base);
    } else if (e.key == "renumber_segments") {
      m.renumber_segments = ParseBool(e.value, where + "renumber_segments");
    } else if (e.key == "no_error_severity") {
      m.no_error_severity.clear();
      for (const std::string& v : Split(e.value, ',')) {
        m.no_error_severity.push_back(ToLower(Trim(v)));
      }
    } else if (e.key == "escapes") {
      m.escapes = ParseBool(e.value, where + "escapes");
    } else {
      throw Error(ErrorCode::kInvalidConfig, where + "unknown mapping key '" + e.key + "'");
    }
  }
  return m;
}

ColumnMapping ColumnMapping::Load(const std::string& path) {
  return FromKeyValues(KeyValueFile::Load(path));
}

RatingDataset IngestText(std::string_view text, std::string_view origin,
                         const ColumnMapping& mapping, const WeightTable& weights) {
  using F = ColumnMapping;
  std::vector<std::string> lines = Split(text, '\n');
  for (std::string& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) {
    throw IngestError({{ErrorCode::kMissingColumn, 1, std::string(origin) + ": missing header row"}});
  }

  const std::vector<std::string> header = Split(lines[0], '\t');
  int col[F::kFieldCount];
  std::vector<ValidationIssue> issues;
  for (int f = 0; f < F::kFieldCount; ++f) {
    col[f] = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (Trim(header[c]) == mapping.columns[f]) col[f] = static_cast<int>(c);
    }
    if (col[f] < 0 && mapping.explicit_column[f]) {
      issues.push_back({ErrorCode::kMissingColumn, 1,
                        "column '" + mapping.columns[f] + "' (for " +
                            std::string(F::FieldName(static_cast<F::Field>(f))) +
                            ") not found in header"});
    }
  }
  for (F::Field f : {F::kDocId, F::kSegIndex, F::kSystemId, F::kRaterId}) {
    if (col[f] < 0 && !mapping.explicit_column[f]) {
      issues.push_back({ErrorCode::kMissingColumn, 1,
                        "required column '" + mapping.columns[f] + "' not found in header"});
    }
  }
  const bool annotated = col[F::kSeverity] >= 0;
  if (annotated && col[F::kCategory] < 0) {
    issues.push_back({ErrorCode::kMissingColumn, 1,
                      "severity column present but category column '" +
                          mapping.columns[F::kCategory] + "' missing"});
  }
  if (!annotated && col[F::kScore] < 0) {
    issues.push_back({ErrorCode::kMissingColumn, 1,
                      "need either severity and category columns or a score column"});
  }
  if ((col[F::kSpanStart] < 0) != (col[F::kSpanEnd] < 0)) {
    issues.push_back({ErrorCode::kMissingColumn, 1, "span_start and span_end must appear together"});
  }
  if (!issues.empty()) throw IngestError(std::move(issues));

  std::optional<std::string> language_pair;
  if (!mapping.language_pair.empty()) language_pair = mapping.language_pair;
  std::vector<RatingRow> rows;
  rows.reserve(lines.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    std::vector<std::string> fields = Split(lines[i], '\t');
    if (fields.size() != header.size()) {
      issues.push_back({ErrorCode::kParseError, line_no,
                        "expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size())});
      continue;
    }
    if (mapping.escapes) {
      for (std::string& field : fields) field = Unescape(field);
    }
    auto get = [&](F::Field f) -> std::string_view {
      return col[f] < 0 ? std::string_view() : std::string_view(fields[col[f]]);
    };
    try {
      RatingRow row;
      row.line = line_no;
      row.doc_id = std::string(Trim(get(F::kDocId)));
      row.system_id = std::string(Trim(get(F::kSystemId)));
      row.rater_id = std::string(Trim(get(F::kRaterId)));
      row.seg_index = ParseInt(get(F::kSegIndex), "seg_index") - mapping.seg_index_base;
      if (col[F::kLangPair] >= 0) {
        const std::string lp(Trim(get(F::kLangPair)));
        if (!language_pair) {
          language_pair = lp;
        } else if (*language_pair != lp) {
          throw Error(ErrorCode::kParseError, "language pair '" + lp + "' differs from '" +
                                                  *language_pair + "'");
        }
      }
      if (col[F::kBucketId] >= 0) {
        const std::string b(Trim(get(F::kBucketId)));
        if (!b.empty()) row.bucket_id = b;
      }
      if (annotated) {
        const std::string_view sev_text = Trim(get(F::kSeverity));
        const std::string sev_lower = ToLower(sev_text);
        const bool no_error =
            sev_text.empty() || std::find(mapping.no_error_severity.begin(),
                                          mapping.no_error_severity.end(),
                                          sev_lower) != mapping.no_error_severity.end();
        if (!no_error) {
          auto severity = ParseSeverity(sev_text);
          if (!severity) {
            throw Error(ErrorCode::kParseError,
                        "invalid severity '" + std::string(sev_text) + "' (expected Major or Minor)");
          }
          ErrorAnnotation a;
          a.severity = *severity;
          a.category = std::string(Trim(get(F::kCategory)));
          if (col[F::kSpanStart] >= 0) {
            const auto start_text = Trim(get(F::kSpanStart));
            const auto end_text = Trim(get(F::kSpanEnd));
            if (!start_text.empty() || !end_text.empty()) {
              const auto start = ParseInt(start_text, "span_start");
              const auto end = ParseInt(end_text, "span_end");
              if (start < 0 || end < start) {
                throw Error(ErrorCode::kParseError, "invalid error span");
              }
              a.span = CharSpan{static_cast<std::size_t>(start), static_cast<std::size_t>(end)};
            }
          }
          row.annotation = std::move(a);
        }
      }
      if (col[F::kScore] >= 0) {
        const auto score_text = Trim(get(F::kScore));
        if (!score_text.empty()) {
          const double score = ParseDouble(score_text, "score");
          if (!std::isfinite(score) || score < 0.0) {
            throw Error(ErrorCode::kParseError, "score must be a non-negative number");
          }
          row.score = score;
        }
      }
      if (col[F::kTargetText] >= 0) row.target_text = std::string(get(F::kTargetText));
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      issues.push_back({e.code(), line_no, e.what()});
    }
    if (issues.size() >= kMaxReportedIssues) break;
  }
  if (!issues.empty()) throw IngestError(std::move(issues));

  if (mapping.renumber_segments) {
    std::map<std::string, std::set<std::int64_t>> seen;
    for (const RatingRow& r : rows) seen[r.doc_id].insert(r.seg_index);
    std::map<std::string, std::map<std::int64_t, std::int64_t>> remap;
    for (auto& [doc, segs] : seen) {
      std::int64_t next = 0;
      for (std::int64_t s : segs) remap[doc][s] = next++;
    }
    for (RatingRow& r : rows) r.seg_index = remap[r.doc_id][r.seg_index];
  }

  DatasetBuilder builder(language_pair.value_or(""), annotated);
  for (RatingRow& r : rows) builder.AddRow(std::move(r));
  return std::move(builder).Build(weights);
}

RatingDataset Ingest(const std::string& path, const ColumnMapping& mapping,
                     const WeightTable& weights) {
  return IngestText(ReadFile(path), path, mapping, weights);
}

void WriteCanonicalTsv(const RatingDataset& ds, std::ostream& out) {
  bool any_span = false;
  for (std::size_t d = 0; d < ds.documents().size() && !any_span; ++d) {
    const auto& doc = ds.documents()[d];
    for (std::size_t seg = 0; seg < doc.n_segments && !any_span; ++seg) {
      for (std::size_t s = 0; s < ds.systems().size() && !any_span; ++s) {
        for (std::size_t k = 0; k < ds.BucketRaters(d).size(); ++k) {
          for (const auto& a : ds.Annotations(d, seg, s, k)) any_span |= a.span.has_value();
        }
      }
    }
  }

  out << "lang_pair\tbucket_id\tdoc_id\tseg_index\tsystem_id\trater_id";
  if (ds.has_annotations()) out << "\tseverity\tcategory";
  out << "\tscore";
  if (ds.has_target_text()) out << "\ttarget_text";
  if (any_span) out << "\tspan_start\tspan_end";
  out << '\n';

  const std::string lang = Escape(ds.language_pair());
  for (std::size_t d = 0; d < ds.documents().size(); ++d) {
    const DocumentInfo& doc = ds.documents()[d];
    const std::string bucket = Escape(ds.buckets()[doc.bucket].id);
    const std::string doc_id = Escape(doc.id);
    const auto& raters = ds.BucketRaters(d);
    for (std::size_t seg = 0; seg < doc.n_segments; ++seg) {
      for (std::size_t s = 0; s < ds.systems().size(); ++s) {
        const std::string target = Escape(ds.TargetText(d, seg, s));
        for (std::size_t k = 0; k < raters.size(); ++k) {
          const RatingCell& cell = ds.Cell(d, seg, s, k);
          auto prefix = [&] {
            out << lang << '\t' << bucket << '\t' << doc_id << '\t' << seg << '\t'
                << Escape(ds.systems()[s]) << '\t' << Escape(ds.raters()[raters[k]]);
          };
          auto suffix = [&](const ErrorAnnotation* a) {
            out << '\t' << FormatDouble(cell.score);
            if (ds.has_target_text()) out << '\t' << target;
            if (any_span) {
              if (a && a->span) {
                out << '\t' << a->span->start << '\t' << a->span->end;
              } else {
                out << "\t\t";
              }
            }
            out << '\n';
          };
          const auto annotations = ds.Annotations(d, seg, s, k);
          if (annotations.empty()) {
            prefix();
            if (ds.has_annotations()) out << "\t\t";
            suffix(nullptr);
          }
          for (const ErrorAnnotation& a : annotations) {
            prefix();
            out << '\t' << SeverityName(a.severity) << '\t' << Escape(a.category);
            suffix(&a);
          }
        }
      }
    }
  }
}

std::string CanonicalTsv(const RatingDataset& dataset) {
  std::ostringstream out;
  WriteCanonicalTsv(dataset, out);
  return out.str();
}

DatasetStats ComputeStats(const RatingDataset& ds) {
  DatasetStats st;
  st.n_documents = ds.documents().size();
  st.n_segments = ds.total_segments();
  st.n_raters = ds.raters().size();
  st.n_systems = ds.systems().size();
  if (!ds.documents().empty()) {
    st.min_segments_per_doc = ds.documents().front().n_segments;
    st.max_segments_per_doc = ds.documents().front().n_segments;
  }
  for (std::size_t d = 0; d < ds.documents().size(); ++d) {
    const std::size_t n = ds.documents()[d].n_segments;
    st.min_segments_per_doc = std::min(st.min_segments_per_doc, n);
    st.max_segments_per_doc = std::max(st.max_segments_per_doc, n);
    const std::size_t arity = ds.BucketRaters(d).size();
    st.n_item_ratings += st.n_systems * arity;
    st.n_segment_ratings += n * st.n_systems * arity;
  }
  for (const Bucket& b : ds.buckets()) st.bucket_doc_counts.emplace_back(b.id, b.documents.size());
  return st;
}

std::vector<BucketLayoutEntry> BucketLayout(const RatingDataset& ds) {
  std::vector<BucketLayoutEntry> out;
  for (const Bucket& b : ds.buckets()) {
    BucketLayoutEntry e;
    e.bucket_id = b.id;
    for (std::size_t r : b.raters) e.rater_ids.push_back(ds.raters()[r]);
    e.n_documents = b.documents.size();
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace evalstab
