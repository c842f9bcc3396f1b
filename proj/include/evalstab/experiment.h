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

// Monte Carlo stability sweeps: simulate many studies per configuration and
// document count, rank systems in each, and summarize with SRP. Also the
// synthetic dataset generator used to exercise the sweeps.

#ifndef EVALSTAB_EXPERIMENT_H_
#define EVALSTAB_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evalstab/assignment.h"
#include "evalstab/common.h"
#include "evalstab/corpus.h"
#include "evalstab/scoring.h"
#include "evalstab/stats.h"

namespace evalstab {

enum class DocResampling {
  kPerStudy,          // fresh documents for every study
  kPer50Simulations,  // a document set is shared by 50 consecutive studies
};

inline constexpr int kStudiesPerDocumentSet = 50;

std::string_view DocResamplingName(DocResampling mode);
DocResampling ParseDocResampling(std::string_view text);

struct StudyConfig {
  std::string name;
  ItemGrouping grouping = ItemGrouping::kPseudoSideBySide;
  LoadBalancing balancing;
  NormalizationScheme normalization = NormalizationScheme::kUnnormalized;
  int ratings_per_item = 1;
  // Budget in documents; double-rated studies use half of it.
  std::size_t n_documents = 0;
  DocResampling doc_resampling = DocResampling::kPer50Simulations;
  int n_simulations = 250;
  int n_permutations = 500;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  int max_retries = kDefaultMaxRetries;
  // Sweeps keep going past a zero-mean rater (factor 1) unless set.
  bool strict_normalization = false;

  // Throws kInvalidConfig naming the offending field.
  void Validate() const;
  std::size_t StudyDocuments() const {
    return ratings_per_item == 2 ? n_documents / 2 : n_documents;
  }
};

struct SimulatedStudy {
  std::vector<std::size_t> documents;
  AssignmentPlan plan;
  ScoredStudy scores;  // after normalization
};

struct StudyOutcome {
  SimulatedStudy study;
  RankingResult ranking;
};

// Selects the dataset's ratings named by the plan.
ScoredStudy SelectRatings(const RatingDataset& dataset, const AssignmentPlan& plan);

// Subsample, assign, select, normalize, rank. The document subset is drawn
// from the study seed.
StudyOutcome SimulateStudy(const RatingDataset& dataset, const StudyConfig& config,
                           std::uint64_t study_seed);
// Same on a given document subset (ascending dataset indices).
StudyOutcome SimulateStudyOn(const RatingDataset& dataset, const StudyConfig& config,
                             std::span<const std::size_t> documents, std::uint64_t study_seed);

// Seeds of the sweep. Document sets do not depend on the configuration, so
// configurations with the same study size see the same documents.
std::uint64_t DocumentSetSeed(std::uint64_t master_seed, std::size_t study_documents,
                              std::size_t set_index);
std::uint64_t StudySeed(std::uint64_t master_seed, std::size_t config_index,
                        std::size_t n_documents, std::size_t set_index, std::size_t study_index);

// {10, 20, 40, 60, 90, 120, 150, 181} clipped to the dataset; when a value
// is clipped the dataset size itself is appended.
std::vector<std::size_t> DefaultDocumentGrid(std::size_t n_dataset_documents);

struct StudySummary {
  std::int64_t doc_set_id = 0;
  std::vector<double> means;
  SignificanceMatrix matrix;
};

struct SweepPoint {
  std::size_t config_index = 0;
  std::size_t n_documents = 0;
  std::size_t study_documents = 0;
  std::optional<double> srp;
  std::size_t n_pairs = 0;
  std::string status = "ok";  // or the error code name
  std::string message;
  double wall_seconds = 0.0;  // not part of any deterministic output
  std::vector<StudySummary> studies;
};

struct SweepSeries {
  StudyConfig config;
  std::vector<std::size_t> grid;  // empty means the default grid
};

struct SweepResult {
  std::vector<StudyConfig> configs;
  std::vector<SweepPoint> points;  // config-major, grid order
};

struct SweepOptions {
  int threads = 1;
  bool keep_studies = true;
  // Called after each finished point, from the calling thread's view of
  // completion order; may be empty.
  std::function<void(const SweepPoint&, std::size_t done, std::size_t total)> progress;
};

// Per-point failures (e.g. an unreachable entropy target) are recorded in
// the point's status; other errors propagate.
SweepResult RunSweep(const RatingDataset& dataset, const std::vector<SweepSeries>& series,
                     const SweepOptions& options = {});
SweepResult RunSweep(const RatingDataset& dataset, const std::vector<StudyConfig>& configs,
                     const std::vector<std::size_t>& grid, const SweepOptions& options = {});

// SRP recomputed from the stored study summaries of a point.
SrpResult PointSrp(const SweepPoint& point);

void WriteSweepCsv(const SweepResult& result, std::ostream& out);
std::string SweepJson(const SweepResult& result, bool with_matrices);

// Experiment config: keys before the first section are defaults for every
// section; each section is one configuration named after the section. Keys:
// item_grouping, load_balancing, normalization, ratings_per_item,
// num_documents (comma list), doc_resampling, n_simulations,
// n_permutations, alpha, seed, max_retries, strict_normalization.
std::vector<SweepSeries> ParseExperimentConfig(const KeyValueFile& file);
std::vector<SweepSeries> LoadExperimentConfig(const std::string& path);
// Stable text form of the resolved configuration (used for hashing).
std::string CanonicalExperimentText(const std::vector<SweepSeries>& series);

// Synthetic MQM-like data. The latent score of (doc d, segment g, system s,
// rater r) is
//   h_r * (base_d + seg_dg + quality_s + item_ds + noise_dgsr + style_rd)
// times a mean-one lognormal factor exp(sigma z - sigma^2 / 2), clamped at 0
// and rounded to an error count k, written as k / 5 major and k % 5 minor
// errors so that default weights reproduce k.
struct SyntheticSpec {
  std::string language_pair = "xx-yy";
  std::size_t n_documents = 40;
  std::size_t segments_per_document = 5;
  std::size_t n_systems = 6;
  std::vector<double> quality;  // per system; default evenly spaced 0 .. 1
  std::size_t n_buckets = 2;
  std::size_t raters_per_bucket = 3;
  // One value per rater, or one per bucket position (reused by each bucket).
  std::vector<double> harshness = {1.0};
  double base_mean = 2.0;
  double doc_sd = 1.0;       // base_d
  double segment_sd = 0.5;   // seg_dg
  double item_sd = 0.0;      // item_ds: document-specific system quality
  double noise_sd = 0.5;     // noise_dgsr
  double style_sd = 0.0;     // style_rd
  double lognormal_sigma = 0.0;
  std::uint64_t seed = 1;

  void Validate() const;  // throws kInvalidSpec
};

SyntheticSpec ParseSyntheticSpec(const KeyValueFile& file);
SyntheticSpec LoadSyntheticSpec(const std::string& path);
RatingDataset GenerateSynthetic(const SyntheticSpec& spec);

}  // namespace evalstab

#endif  // EVALSTAB_EXPERIMENT_H_
