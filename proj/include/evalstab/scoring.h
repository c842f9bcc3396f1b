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

// MQM scoring: error weights, segment scores, system means and the
// rater-wise normalization schemes.

#ifndef EVALSTAB_SCORING_H_
#define EVALSTAB_SCORING_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evalstab/common.h"
#include "evalstab/corpus.h"

namespace evalstab {

// Severity/category weights. Lookup takes the longest matching category
// prefix (matched on whole "/"-separated components); an override bound to a
// specific severity beats a severity-agnostic one of the same length, and the
// per-severity default applies when nothing matches.
//
// File form (one entry per line):
//   Major = 5
//   Minor = 1
//   Minor:Fluency/Punctuation = 0.1
//   *:Non-translation = 25
class WeightTable {
 public:
  WeightTable(double major_default, double minor_default);

  // Major=5, Minor=1, Minor Fluency/Punctuation=0.1, Non-translation=25.
  static WeightTable Default();
  static WeightTable FromKeyValues(const KeyValueFile& file);
  static WeightTable Load(const std::string& path);

  // `severity` empty means "any severity".
  void SetOverride(std::optional<Severity> severity, std::string_view prefix,
                   double weight);
  double Weight(Severity severity, std::string_view category) const;

 private:
  struct Override {
    std::optional<Severity> severity;
    std::string prefix;
    double weight;
  };

  double defaults_[2];
  std::vector<Override> overrides_;
};

// Sum of weights over the annotations; 0 for none.
double SegmentScore(std::span<const ErrorAnnotation> annotations,
                    const WeightTable& weights);

enum class NormalizationScheme {
  kUnnormalized,
  kMeanNormalized,
  kErrorNormalized,
  kZScoreNormalized,
};

std::string_view NormalizationName(NormalizationScheme scheme);
NormalizationScheme ParseNormalization(std::string_view text);

// Ratings selected for one simulated study.
//
// Cell layout: ((doc_offsets[d] + seg) * n_systems + system) *
// ratings_per_item + k, where k enumerates the item's raters.
struct ScoredStudy {
  std::vector<std::string> systems;
  std::vector<std::string> raters;  // full rater pool of the dataset
  std::vector<std::string> doc_ids;
  std::vector<std::size_t> doc_offsets;  // size n_docs + 1
  int ratings_per_item = 1;
  std::vector<double> scores;
  std::vector<std::uint32_t> rater_of;
  std::vector<std::uint32_t> error_counts;
  bool has_error_counts = false;

  std::size_t n_docs() const { return doc_ids.size(); }
  std::size_t n_segments() const { return doc_offsets.empty() ? 0 : doc_offsets.back(); }
  std::size_t CellIndex(std::size_t doc, std::size_t seg, std::size_t system,
                        std::size_t k) const {
    return ((doc_offsets[doc] + seg) * systems.size() + system) * ratings_per_item + k;
  }
};

struct RaterStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample (n - 1) deviation; 0 when n < 2
  std::uint64_t errors = 0;
};

// Indexed like ScoredStudy::raters; raters without ratings have n == 0.
std::vector<RaterStats> ComputeRaterStats(const ScoredStudy& study);

struct NormalizeOptions {
  // Mean/Error schemes: a rater with zero mean raises DegenerateRater when
  // strict, otherwise keeps a factor of 1.
  bool strict = true;
};

ScoredStudy Normalize(const ScoredStudy& study, NormalizationScheme scheme,
                      const NormalizeOptions& options = {});

// Per-segment score after averaging an item's ratings, laid out
// system-major: result[system * n_segments + segment_offset + seg].
std::vector<double> EffectiveScores(const ScoredStudy& study);

// Unweighted mean over all segments of each system, aligned with
// study.systems. Lower is better.
std::vector<double> SystemMeans(const ScoredStudy& study);
std::map<std::string, double> SystemMeanMap(const ScoredStudy& study);

}  // namespace evalstab

#endif  // EVALSTAB_SCORING_H_
