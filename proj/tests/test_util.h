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

// Fixture builders shared by the unit and acceptance tests.

#ifndef EVALSTAB_TESTS_TEST_UTIL_H_
#define EVALSTAB_TESTS_TEST_UTIL_H_

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "evalstab/corpus.h"
#include "evalstab/scoring.h"

namespace evalstab::testing {

struct BucketSpec {
  std::vector<std::string> raters;
  std::size_t n_documents;
};

// Score of (document, segment, system, position of the rater in its bucket).
using ScoreFn = std::function<double(std::size_t, std::size_t, std::size_t, std::size_t)>;

inline RatingDataset LayoutDataset(const std::vector<BucketSpec>& buckets,
                                   std::size_t n_systems = 2, std::size_t n_segments = 1,
                                   const ScoreFn& score = nullptr) {
  DatasetBuilder builder("xx-yy", false);
  std::size_t doc = 0;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    for (std::size_t i = 0; i < buckets[b].n_documents; ++i, ++doc) {
      for (std::size_t g = 0; g < n_segments; ++g) {
        for (std::size_t s = 0; s < n_systems; ++s) {
          for (std::size_t r = 0; r < buckets[b].raters.size(); ++r) {
            RatingRow row;
            row.doc_id = "d" + std::to_string(doc + 1);
            row.seg_index = static_cast<std::int64_t>(g);
            row.system_id = "s" + std::to_string(s + 1);
            row.rater_id = buckets[b].raters[r];
            row.bucket_id = std::to_string(b + 1);
            row.score = score ? score(doc, g, s, r) : static_cast<double>((doc + s + r) % 4);
            builder.AddRow(row);
          }
        }
      }
    }
  }
  return std::move(builder).Build(WeightTable::Default());
}

// Seven rotating buckets (A,B,C), (B,C,D), ... of 26 documents, one of 25.
inline std::vector<BucketSpec> EnglishGermanLayout() {
  const std::string r = "ABCDEFG";
  std::vector<BucketSpec> out;
  for (std::size_t b = 0; b < 7; ++b) {
    out.push_back({{std::string(1, r[b]), std::string(1, r[(b + 1) % 7]),
                    std::string(1, r[(b + 2) % 7])},
                   b == 6 ? 25u : 26u});
  }
  return out;
}

// Two disjoint buckets of three raters, 90 and 91 documents.
inline std::vector<BucketSpec> EnglishChineseLayout() {
  return {{{"H", "I", "J"}, 90}, {{"K", "L", "M"}, 91}};
}

}  // namespace evalstab::testing

#endif  // EVALSTAB_TESTS_TEST_UTIL_H_
