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

// Statistical primitives: the document-grouped permutation test, pairwise
// significance matrices, Significant Ranking Preservation (SRP), workload
// entropy, Kendall's tau and rater agreement/distribution summaries.

#ifndef EVALSTAB_STATS_H_
#define EVALSTAB_STATS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evalstab/common.h"
#include "evalstab/corpus.h"
#include "evalstab/scoring.h"

namespace evalstab {

// Segment scores of one system, grouped by document: document d owns
// values[doc_offsets[d] .. doc_offsets[d + 1]).
struct GroupedScores {
  std::vector<double> values;
  std::vector<std::size_t> doc_offsets;
};

// Two-sided paired permutation test on the difference of mean segment
// scores. Each permutation swaps the two systems' labels on all segments of
// a document at once, independently per document with probability 1/2.
// Returns the add-one estimate (1 + #{|T_perm| >= |T_obs|}) / (1 + n_perm).
double PermutationTest(const GroupedScores& a, const GroupedScores& b, int n_permutations,
                       Rng& rng);

// Same test from per-document sums of (a - b). The statistic only depends on
// these sums, so callers that test many pairs precompute them.
double PermutationTestFromDocDiffs(std::span<const double> doc_diff_sums, int n_permutations,
                                   Rng& rng);

// sig(i, j): system i significantly better (lower mean) than j.
// better(i, j): mean of i strictly below mean of j, ignoring significance.
class SignificanceMatrix {
 public:
  SignificanceMatrix() = default;
  SignificanceMatrix(std::vector<std::string> systems, double alpha, int n_permutations);

  // Fills `better` from the means and `sig` from the symmetric p-value
  // matrix (row-major, n x n): sig only on the lower-mean side, p <= alpha.
  static SignificanceMatrix FromMeans(std::vector<std::string> systems,
                                      std::span<const double> means,
                                      std::span<const double> p_values, double alpha,
                                      int n_permutations);

  std::size_t size() const { return systems_.size(); }
  const std::vector<std::string>& systems() const { return systems_; }
  double alpha() const { return alpha_; }
  int n_permutations() const { return n_permutations_; }

  bool Significant(std::size_t i, std::size_t j) const { return sig_[i * size() + j] != 0; }
  bool Better(std::size_t i, std::size_t j) const { return better_[i * size() + j] != 0; }
  // Setting sig also sets better, keeping sig a subset of better.
  void SetBetter(std::size_t i, std::size_t j);
  void SetSignificant(std::size_t i, std::size_t j);
  std::size_t SignificantPairCount() const;

  // sig implies better; never sig both ways; empty diagonal.
  bool IsConsistent() const;

  bool operator==(const SignificanceMatrix&) const = default;

 private:
  std::vector<std::string> systems_;
  std::vector<std::uint8_t> sig_;
  std::vector<std::uint8_t> better_;
  double alpha_ = 0.05;
  int n_permutations_ = 500;
};

struct RankingResult {
  std::vector<std::string> systems;
  std::vector<double> means;     // aligned with systems
  std::vector<double> p_values;  // n x n, symmetric, diagonal 1
  SignificanceMatrix matrix;
};

// Tests every system pair of the study (requires >= 2 systems).
RankingResult RankSystems(const ScoredStudy& study, double alpha, int n_permutations, Rng& rng);
SignificanceMatrix BuildSignificanceMatrix(const ScoredStudy& study, double alpha,
                                           int n_permutations, Rng& rng);

// 1 iff every significant pair of e1 is a better pair of e2 (vacuously 1
// when e1 has none). Systems are matched by name.
int SignificantRankingPreserved(const SignificanceMatrix& e1, const SignificanceMatrix& e2);

struct SrpResult {
  double value = 0.0;
  std::size_t n_pairs = 0;
};

// Mean of SignificantRankingPreserved over ordered pairs of distinct
// studies. With `doc_set_ids` non-empty, only pairs sharing an id count.
SrpResult Srp(std::span<const SignificanceMatrix> studies,
              std::span<const std::int64_t> doc_set_ids = {});

// -sum p log p / log(pool_size) over the workload counts; raters of the
// pool missing from `counts` count as zero.
double NormalizedEntropy(std::span<const double> counts, std::size_t pool_size);
using WorkloadDistribution = std::map<std::string, double>;
double NormalizedEntropy(const WorkloadDistribution& workload, std::size_t pool_size);

// Kendall's tau-b. nullopt when undefined (fewer than two values, or one
// side entirely tied).
std::optional<double> KendallTau(std::span<const double> x, std::span<const double> y);
std::optional<double> KendallTau(const std::map<std::string, double>& x,
                                 const std::map<std::string, double>& y);

enum class AgreementGranularity { kSingleDocument, kAllShared };

struct PairAgreement {
  std::string rater_a;
  std::string rater_b;
  std::size_t shared_documents = 0;
  // Documents whose tau was defined (single-document granularity) or the
  // number pooled (all-shared).
  std::size_t documents_used = 0;
  std::optional<double> tau;
};

struct AgreementTable {
  AgreementGranularity granularity;
  std::vector<PairAgreement> pairs;  // pairs sharing at least one document
  std::vector<std::pair<std::string, std::string>> skipped;  // NoSharedDocuments
  std::optional<double> grand_mean;  // mean over pairs with a defined tau
};

AgreementTable RaterAgreement(const RatingDataset& dataset, AgreementGranularity granularity);

struct Histogram {
  std::vector<double> edges;  // bins [edges[i], edges[i+1]); last bin closed
  std::vector<std::size_t> counts;
  std::size_t outside = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
};

// Segment-score histogram of one rater over every segment they rated.
Histogram RaterDistribution(const RatingDataset& dataset, std::string_view rater_id,
                            std::span<const double> bin_edges);
// Edges 0, 1, ..., max_score + 1: one bin per integer score up to max_score.
std::vector<double> UnitBins(int max_score);

}  // namespace evalstab

#endif  // EVALSTAB_STATS_H_
