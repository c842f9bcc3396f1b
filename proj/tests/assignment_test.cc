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

#include "evalstab/assignment.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "evalstab/stats.h"
#include "test_util.h"

namespace evalstab {
namespace {

using testing::EnglishChineseLayout;
using testing::EnglishGermanLayout;
using testing::LayoutDataset;

std::vector<std::size_t> AllDocs(const RatingDataset& ds) {
  std::vector<std::size_t> docs(ds.documents().size());
  std::iota(docs.begin(), docs.end(), 0);
  return docs;
}

// Item ratings per rater name.
std::map<std::string, int> RaterLoads(const RatingDataset& ds, const AssignmentPlan& plan) {
  std::map<std::string, int> loads;
  for (std::uint32_t r : plan.raters) ++loads[ds.raters()[r]];
  return loads;
}

std::vector<int> SortedLoads(const std::map<std::string, int>& loads, std::size_t pool) {
  std::vector<int> v;
  for (const auto& [name, n] : loads) v.push_back(n);
  v.resize(std::max(v.size(), pool), 0);
  std::sort(v.rbegin(), v.rend());
  return v;
}

// Every rating goes to a rater of the document's bucket, distinct within
// an item.
void ExpectEligible(const RatingDataset& ds, const AssignmentPlan& plan) {
  for (std::size_t d = 0; d < plan.documents.size(); ++d) {
    const auto& pool = ds.BucketRaters(plan.documents[d]);
    for (std::size_t s = 0; s < plan.n_systems; ++s) {
      const auto item = plan.ItemRaters(d, s);
      for (std::size_t k = 0; k < item.size(); ++k) {
        EXPECT_NE(std::find(pool.begin(), pool.end(), item[k]), pool.end());
        if (k) EXPECT_LT(item[k - 1], item[k]);
      }
    }
  }
}

TEST(PsxsBalancedTest, SixDocumentsTwoEach) {
  const RatingDataset ds = LayoutDataset({{{"a", "b", "c"}, 6}}, 3);
  Rng rng(1);
  const auto plan = AssignPsxsBalanced(ds, AllDocs(ds), rng);
  ExpectEligible(ds, plan);
  const auto loads = RaterLoads(ds, plan);
  for (const char* r : {"a", "b", "c"}) EXPECT_EQ(loads.at(r), 2 * 3) << r;
  // Whole documents go to one rater.
  for (std::size_t d = 0; d < 6; ++d) {
    for (std::size_t s = 1; s < 3; ++s) EXPECT_EQ(plan.ItemRaters(d, s)[0], plan.ItemRaters(d, 0)[0]);
  }
  EXPECT_NEAR(PlanEntropy(ds, plan), 1.0, 1e-12);
}

TEST(PsxsBalancedTest, SevenDocumentsThreeTwoTwo) {
  const RatingDataset ds = LayoutDataset({{{"a", "b", "c"}, 7}}, 1);
  Rng rng(2);
  const auto plan = AssignPsxsBalanced(ds, AllDocs(ds), rng);
  EXPECT_EQ(SortedLoads(RaterLoads(ds, plan), 3), (std::vector<int>{3, 2, 2}));
}

TEST(PsxsBalancedTest, EnglishGermanNearUniform) {
  const RatingDataset ds = LayoutDataset(EnglishGermanLayout(), 2);
  const auto docs = AllDocs(ds);
  const EntropyRange range = InstantiableEntropyRange(ds, docs, ItemGrouping::kPseudoSideBySide);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const auto plan = AssignPsxsBalanced(ds, docs, rng);
    ExpectEligible(ds, plan);
    const double h = PlanEntropy(ds, plan);
    EXPECT_GE(h, 0.99);
    EXPECT_GE(h, range.max - 0.01);
    EXPECT_LE(h, range.max + 1e-12);
  }
}

TEST(PsxsBalancedTest, Deterministic) {
  const RatingDataset ds = LayoutDataset(EnglishGermanLayout(), 2);
  Rng a(42), b(42), c(43);
  const auto docs = AllDocs(ds);
  EXPECT_EQ(AssignPsxsBalanced(ds, docs, a).raters, AssignPsxsBalanced(ds, docs, b).raters);
  Rng a2(42);
  EXPECT_NE(AssignPsxsBalanced(ds, docs, a2).raters, AssignPsxsBalanced(ds, docs, c).raters);
}

TEST(EntropyRangeTest, KnownLayouts) {
  const RatingDataset de = LayoutDataset(EnglishGermanLayout(), 2);
  const RatingDataset zh = LayoutDataset(EnglishChineseLayout(), 2);
  const EntropyRange r_de = InstantiableEntropyRange(de, AllDocs(de), ItemGrouping::kPseudoSideBySide);
  const EntropyRange r_zh = InstantiableEntropyRange(zh, AllDocs(zh), ItemGrouping::kPseudoSideBySide);
  EXPECT_NEAR(r_de.min, 0.51, 0.01);
  EXPECT_NEAR(r_zh.min, 0.387, 0.001);
  EXPECT_GT(r_de.max, 0.999);
  EXPECT_GT(r_zh.max, 0.999);
  // 7 raters over loads of 181 documents cannot reach exactly 1.
  EXPECT_LT(r_de.max, 1.0);
}

TEST(EntropyRangeTest, MinimumMatchesBruteForce) {
  // Two overlapping buckets: {a,b} x 3 docs, {b,c} x 2 docs. The oracle
  // tries every per-document rater choice.
  const RatingDataset ds = LayoutDataset({{{"a", "b"}, 3}, {{"b", "c"}, 2}}, 1);
  double lo = 1e9, hi = -1e9;
  for (int mask = 0; mask < 32; ++mask) {
    std::vector<double> counts(3, 0.0);
    for (int d = 0; d < 5; ++d) {
      const bool second = mask >> d & 1;
      const int rater = d < 3 ? (second ? 1 : 0) : (second ? 2 : 1);
      counts[rater] += 1;
    }
    const double h = NormalizedEntropy(counts, 3);
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  const EntropyRange r = InstantiableEntropyRange(ds, AllDocs(ds), ItemGrouping::kPseudoSideBySide);
  EXPECT_NEAR(r.min, lo, 1e-12);
  EXPECT_NEAR(r.max, hi, 1e-12);
  EXPECT_EQ(lo, 0.0);
}

TEST(EntropyTargetTest, FullTargetOnEnglishGerman) {
  const RatingDataset ds = LayoutDataset(EnglishGermanLayout(), 2);
  Rng rng(5);
  const auto plan = AssignEntropyTarget(ds, AllDocs(ds), ItemGrouping::kPseudoSideBySide, 1.0,
                                        0.03, rng);
  ExpectEligible(ds, plan);
  EXPECT_GE(PlanEntropy(ds, plan), 0.97);
}

TEST(EntropyTargetTest, LowTargets) {
  const RatingDataset zh = LayoutDataset(EnglishChineseLayout(), 2);
  const RatingDataset de = LayoutDataset(EnglishGermanLayout(), 2);
  Rng rng(6);
  const auto plan = AssignEntropyTarget(zh, AllDocs(zh), ItemGrouping::kPseudoSideBySide, 0.38,
                                        0.03, rng);
  EXPECT_NEAR(PlanEntropy(zh, plan), 0.38, 0.03);
  const auto plan_de = AssignEntropyTarget(de, AllDocs(de), ItemGrouping::kPseudoSideBySide,
                                           0.51, 0.03, rng);
  EXPECT_NEAR(PlanEntropy(de, plan_de), 0.51, 0.03);
  try {
    AssignEntropyTarget(zh, AllDocs(zh), ItemGrouping::kPseudoSideBySide, 0.30, 0.03, rng, 50);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTargetUnreachable);
  }
}

TEST(EntropyTargetTest, ZeroOnSingleBucket) {
  const RatingDataset ds = LayoutDataset({{{"a", "b", "c"}, 5}}, 2);
  Rng rng(7);
  const auto plan =
      AssignEntropyTarget(ds, AllDocs(ds), ItemGrouping::kPseudoSideBySide, 0.0, 0.03, rng);
  EXPECT_EQ(RaterLoads(ds, plan).size(), 1u);
  EXPECT_EQ(PlanEntropy(ds, plan), 0.0);
}

TEST(EntropyTargetTest, NoGroupingItems) {
  const RatingDataset ds = LayoutDataset(EnglishGermanLayout(), 3);
  Rng rng(8);
  const auto plan = AssignNoGrouping(ds, AllDocs(ds), LoadBalancing::EntropyTarget(0.8, 0.03), rng);
  ExpectEligible(ds, plan);
  EXPECT_NEAR(PlanEntropy(ds, plan), 0.8, 0.03);
}

TEST(NoGroupingTest, OneDocumentFourSystems) {
  const RatingDataset ds = LayoutDataset({{{"a", "b", "c"}, 1}}, 4);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const auto plan = AssignNoGrouping(ds, AllDocs(ds), LoadBalancing::FullyBalanced(), rng);
    ExpectEligible(ds, plan);
    EXPECT_EQ(SortedLoads(RaterLoads(ds, plan), 3), (std::vector<int>{2, 1, 1}));
  }
}

TEST(SystemBalancedTest, PerSystemSpreadAtMostOne) {
  const RatingDataset ds = LayoutDataset({{{"a", "b", "c"}, 7}, {{"d", "e"}, 5}}, 4);
  Rng rng(9);
  const auto plan = AssignSystemBalanced(ds, AllDocs(ds), rng);
  ExpectEligible(ds, plan);
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t b = 0; b < ds.buckets().size(); ++b) {
      const Bucket& bucket = ds.buckets()[b];
      std::map<std::uint32_t, int> loads;
      for (std::size_t r : bucket.raters) loads[static_cast<std::uint32_t>(r)] = 0;
      for (std::size_t d = 0; d < plan.documents.size(); ++d) {
        if (ds.documents()[plan.documents[d]].bucket != b) continue;
        ++loads[plan.ItemRaters(d, s)[0]];
      }
      int lo = 1 << 30, hi = 0;
      for (const auto& [r, n] : loads) {
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      EXPECT_LE(hi - lo, 1) << "system " << s << " bucket " << bucket.id;
    }
  }
  Rng rng2(1);
  EXPECT_THROW(Assign(ds, AllDocs(ds), ItemGrouping::kSystemBalanced,
                      LoadBalancing::EntropyTarget(0.5), 1, rng2),
               Error);
}

TEST(PairAssignTest, SixDocumentsBalanced) {
  const RatingDataset ds = LayoutDataset({{{"a", "b", "c"}, 6}}, 1);
  Rng rng(10);
  const auto plan = PairAssign(ds, AllDocs(ds), ItemGrouping::kPseudoSideBySide,
                               LoadBalancing::FullyBalanced(), rng);
  ASSERT_EQ(plan.ratings_per_item, 2);
  ExpectEligible(ds, plan);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> pairs;
  for (std::size_t d = 0; d < 6; ++d) {
    const auto item = plan.ItemRaters(d, 0);
    ++pairs[{item[0], item[1]}];
  }
  ASSERT_EQ(pairs.size(), 3u);
  for (const auto& [p, n] : pairs) EXPECT_EQ(n, 2);
  for (const auto& [r, n] : RaterLoads(ds, plan)) EXPECT_EQ(n, 4) << r;
  const Workload w = PlanWorkload(ds, plan);
  EXPECT_EQ(w.symbols.size(), 3u);
  EXPECT_NEAR(PlanEntropy(ds, plan), 1.0, 1e-12);
}

TEST(PairAssignTest, BucketArity) {
  const RatingDataset ds = LayoutDataset({{{"a", "b"}, 2}}, 1);
  Rng rng(1);
  try {
    PairAssign(ds, AllDocs(ds), ItemGrouping::kPseudoSideBySide, LoadBalancing::FullyBalanced(),
               rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBucketArityUnsupported);
  }
}

TEST(SubsampleTest, QuotasAndRemainder) {
  const RatingDataset ds = LayoutDataset(EnglishGermanLayout(), 1);
  for (std::size_t n : {14u, 15u, 20u}) {
    Rng rng(n);
    const auto docs = SubsampleDocuments(ds, n, rng);
    ASSERT_EQ(docs.size(), n);
    EXPECT_TRUE(std::is_sorted(docs.begin(), docs.end()));
    EXPECT_EQ(std::set<std::size_t>(docs.begin(), docs.end()).size(), n);
    std::vector<int> per_bucket(7, 0);
    for (std::size_t d : docs) ++per_bucket[ds.documents()[d].bucket];
    const auto [lo, hi] = std::minmax_element(per_bucket.begin(), per_bucket.end());
    EXPECT_EQ(*lo, static_cast<int>(n / 7));
    EXPECT_LE(*hi, static_cast<int>(n / 7) + 1);
  }
  Rng rng(1);
  EXPECT_EQ(SubsampleDocuments(ds, ds.documents().size(), rng), AllDocs(ds));
  EXPECT_THROW(SubsampleDocuments(ds, ds.documents().size() + 1, rng), Error);
}

TEST(SubsampleTest, RemainderAvoidsFullBuckets) {
  // Quota 1 each; the small bucket has no spare document.
  const RatingDataset ds = LayoutDataset({{{"a"}, 1}, {{"b"}, 4}}, 1);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    const auto docs = SubsampleDocuments(ds, 3, rng);
    EXPECT_EQ(docs.front(), 0u);
  }
}

TEST(LoadBalancingTest, Names) {
  EXPECT_EQ(ParseLoadBalancing("balanced"), LoadBalancing::FullyBalanced());
  EXPECT_EQ(ParseLoadBalancing(LoadBalancingName(LoadBalancing::EntropyTarget(0.5, 0.02))),
            LoadBalancing::EntropyTarget(0.5, 0.02));
  EXPECT_THROW(ParseLoadBalancing("entropy:2"), Error);
  for (auto g : {ItemGrouping::kPseudoSideBySide, ItemGrouping::kSystemBalanced,
                 ItemGrouping::kNoGrouping}) {
    EXPECT_EQ(ParseItemGrouping(ItemGroupingName(g)), g);
  }
}

}  // namespace
}  // namespace evalstab
