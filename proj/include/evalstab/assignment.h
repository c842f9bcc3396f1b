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

// Simulated rater assignment. Given a document subset of a fully rated
// dataset, each procedure picks which of the bucket's raters (or rater
// pairs, for double-rated studies) "rated" each item, so that the study can
// be assembled from real ratings.
//
// The assignment alphabet of a bucket is its raters when single-rated and
// its three rater pairs when double-rated. Workload entropy is measured over
// that alphabet: over raters, or over rater pairs.

#ifndef EVALSTAB_ASSIGNMENT_H_
#define EVALSTAB_ASSIGNMENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evalstab/common.h"
#include "evalstab/corpus.h"

namespace evalstab {

enum class ItemGrouping {
  kPseudoSideBySide,  // all systems of a document go to the same rater(s)
  kSystemBalanced,    // each rater gets a near-equal share of every system
  kNoGrouping,
};

std::string_view ItemGroupingName(ItemGrouping grouping);
ItemGrouping ParseItemGrouping(std::string_view text);

struct LoadBalancing {
  enum class Kind { kFullyBalanced, kEntropyTarget };
  Kind kind = Kind::kFullyBalanced;
  double target = 1.0;
  double tolerance = 0.03;

  static LoadBalancing FullyBalanced() { return {}; }
  static LoadBalancing EntropyTarget(double target, double tolerance = 0.03) {
    return {Kind::kEntropyTarget, target, tolerance};
  }
  bool operator==(const LoadBalancing&) const = default;
};

// "balanced", "entropy:<target>" or "entropy:<target>:<tolerance>".
std::string LoadBalancingName(const LoadBalancing& balancing);
LoadBalancing ParseLoadBalancing(std::string_view text);

inline constexpr int kDefaultMaxRetries = 1000;

struct AssignmentPlan {
  ItemGrouping grouping = ItemGrouping::kPseudoSideBySide;
  LoadBalancing balancing;
  int ratings_per_item = 1;
  std::vector<std::size_t> documents;  // ascending dataset indices
  std::size_t n_systems = 0;
  // Dataset rater indices, ascending within an item, at
  // (local_doc * n_systems + system) * ratings_per_item + k.
  std::vector<std::uint32_t> raters;

  std::span<const std::uint32_t> ItemRaters(std::size_t local_doc, std::size_t system) const {
    return std::span<const std::uint32_t>(raters).subspan(
        (local_doc * n_systems + system) * ratings_per_item, ratings_per_item);
  }
};

struct Workload {
  std::vector<std::vector<std::uint32_t>> symbols;  // rater set of each symbol
  std::vector<double> counts;                       // item ratings per symbol
  std::size_t pool_size = 0;
};

// Workload over the dataset-wide alphabet (all raters, or all bucket rater
// pairs) of the plan's ratings_per_item.
Workload PlanWorkload(const RatingDataset& dataset, const AssignmentPlan& plan);
double PlanEntropy(const RatingDataset& dataset, const AssignmentPlan& plan);

// Equal per-bucket quotas; the remainder goes to distinct buckets chosen
// uniformly among those with a spare document. Result is ascending.
std::vector<std::size_t> SubsampleDocuments(const RatingDataset& dataset, std::size_t n_target,
                                            Rng& rng);

// Per bucket: shuffle documents and raters, then deal documents round-robin.
AssignmentPlan AssignPsxsBalanced(const RatingDataset& dataset,
                                  std::span<const std::size_t> documents, Rng& rng,
                                  int ratings_per_item = 1);

// Random start, one greedy sweep in random order moving each unit to the
// eligible symbol whose choice brings the workload entropy closest to the
// target, rejection when the result is outside the tolerance. Units are
// documents for pSxS and items for no grouping.
AssignmentPlan AssignEntropyTarget(const RatingDataset& dataset,
                                   std::span<const std::size_t> documents, ItemGrouping grouping,
                                   double target, double tolerance, Rng& rng,
                                   int max_retries = kDefaultMaxRetries, int ratings_per_item = 1);

AssignmentPlan AssignNoGrouping(const RatingDataset& dataset,
                                std::span<const std::size_t> documents,
                                const LoadBalancing& balancing, Rng& rng,
                                int max_retries = kDefaultMaxRetries, int ratings_per_item = 1);

// Per (bucket, system): shuffle documents and raters, deal that system's
// items round-robin. Fully balanced only.
AssignmentPlan AssignSystemBalanced(const RatingDataset& dataset,
                                    std::span<const std::size_t> documents, Rng& rng,
                                    int ratings_per_item = 1);

// Dispatches on grouping and balancing.
AssignmentPlan Assign(const RatingDataset& dataset, std::span<const std::size_t> documents,
                      ItemGrouping grouping, const LoadBalancing& balancing,
                      int ratings_per_item, Rng& rng, int max_retries = kDefaultMaxRetries);

// Same procedures with rater pairs as the alphabet; every bucket must have
// exactly three raters.
AssignmentPlan PairAssign(const RatingDataset& dataset, std::span<const std::size_t> documents,
                          ItemGrouping grouping, const LoadBalancing& balancing, Rng& rng,
                          int max_retries = kDefaultMaxRetries);

struct EntropyRange {
  double min = 0.0;
  double max = 0.0;
};

// Lowest and highest workload entropy any assignment of the given documents
// can reach. The minimum puts each bucket's units on one symbol (entropy is
// concave, so an extreme point is optimal; found by enumeration). The
// maximum balances integer unit counts with cost-reducing paths, which is
// optimal for every convex cost of the loads.
EntropyRange InstantiableEntropyRange(const RatingDataset& dataset,
                                      std::span<const std::size_t> documents,
                                      ItemGrouping grouping, int ratings_per_item = 1);

}  // namespace evalstab

#endif  // EVALSTAB_ASSIGNMENT_H_
