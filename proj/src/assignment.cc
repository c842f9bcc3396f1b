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
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include "evalstab/stats.h"

namespace evalstab {

std::string_view ItemGroupingName(ItemGrouping grouping) {
  switch (grouping) {
    case ItemGrouping::kPseudoSideBySide: return "psxs";
    case ItemGrouping::kSystemBalanced: return "system_balanced";
    case ItemGrouping::kNoGrouping: return "no_grouping";
  }
  return "unknown";
}

ItemGrouping ParseItemGrouping(std::string_view text) {
  const std::string v = ToLower(Trim(text));
  if (v == "psxs" || v == "pseudo_side_by_side") return ItemGrouping::kPseudoSideBySide;
  if (v == "system_balanced") return ItemGrouping::kSystemBalanced;
  if (v == "no_grouping" || v == "none") return ItemGrouping::kNoGrouping;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown item grouping '" + std::string(text) +
                  "' (expected psxs, system_balanced or no_grouping)");
}

std::string LoadBalancingName(const LoadBalancing& balancing) {
  if (balancing.kind == LoadBalancing::Kind::kFullyBalanced) return "balanced";
  return "entropy:" + FormatDouble(balancing.target) + ":" + FormatDouble(balancing.tolerance);
}

LoadBalancing ParseLoadBalancing(std::string_view text) {
  const std::string v = ToLower(Trim(text));
  if (v == "balanced" || v == "fully_balanced") return LoadBalancing::FullyBalanced();
  const std::vector<std::string> parts = Split(v, ':');
  if (parts.size() >= 2 && parts.size() <= 3 && Trim(parts[0]) == "entropy") {
    LoadBalancing lb = LoadBalancing::EntropyTarget(ParseDouble(parts[1], "entropy target"));
    if (parts.size() == 3) lb.tolerance = ParseDouble(parts[2], "entropy tolerance");
    if (!(lb.target >= 0.0 && lb.target <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "entropy target must lie in [0, 1]");
    }
    if (!(lb.tolerance >= 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "entropy tolerance must be non-negative");
    }
    return lb;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown load balancing '" + std::string(text) +
                  "' (expected balanced or entropy:<target>[:<tolerance>])");
}

namespace {

// Dataset-wide symbol alphabet plus the eligible symbols of each bucket.
struct Alphabet {
  std::vector<std::vector<std::uint32_t>> symbols;
  std::vector<std::vector<std::size_t>> bucket_symbols;
};

Alphabet BuildAlphabet(const RatingDataset& ds, int ratings_per_item) {
  Alphabet a;
  a.bucket_symbols.resize(ds.buckets().size());
  if (ratings_per_item == 1) {
    for (std::size_t r = 0; r < ds.raters().size(); ++r) {
      a.symbols.push_back({static_cast<std::uint32_t>(r)});
    }
    for (std::size_t b = 0; b < ds.buckets().size(); ++b) {
      a.bucket_symbols[b].assign(ds.buckets()[b].raters.begin(), ds.buckets()[b].raters.end());
    }
    return a;
  }
  if (ratings_per_item != 2) {
    throw Error(ErrorCode::kInvalidArgument, "ratings_per_item must be 1 or 2");
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> index;
  for (std::size_t b = 0; b < ds.buckets().size(); ++b) {
    const auto& raters = ds.buckets()[b].raters;
    if (raters.size() != 3) {
      throw Error(ErrorCode::kBucketArityUnsupported,
                  "bucket '" + ds.buckets()[b].id + "' has " + std::to_string(raters.size()) +
                      " raters; double rating needs exactly 3");
    }
    for (std::size_t i = 0; i < raters.size(); ++i) {
      for (std::size_t j = i + 1; j < raters.size(); ++j) {
        const auto key = std::make_pair(static_cast<std::uint32_t>(raters[i]),
                                        static_cast<std::uint32_t>(raters[j]));
        auto [it, inserted] = index.emplace(key, a.symbols.size());
        if (inserted) a.symbols.push_back({key.first, key.second});
        a.bucket_symbols[b].push_back(it->second);
      }
    }
  }
  return a;
}

constexpr std::size_t kWholeDocument = std::numeric_limits<std::size_t>::max();

// A unit of assignment: a whole document (pSxS) or a single item.
struct Unit {
  std::size_t local_doc;
  std::size_t system;  // kWholeDocument for all systems of the document
  std::size_t bucket;
};

void CheckDocuments(const RatingDataset& ds, std::span<const std::size_t> documents) {
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (documents[i] >= ds.documents().size()) {
      throw Error(ErrorCode::kInvalidArgument, "document index out of range");
    }
    if (i > 0 && documents[i] <= documents[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "document indices must be strictly ascending");
    }
  }
  if (ds.systems().empty()) throw Error(ErrorCode::kInvalidArgument, "dataset has no systems");
}

std::vector<Unit> BuildUnits(const RatingDataset& ds, std::span<const std::size_t> documents,
                             bool per_item) {
  std::vector<Unit> units;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    const std::size_t b = ds.documents()[documents[d]].bucket;
    if (per_item) {
      for (std::size_t s = 0; s < ds.systems().size(); ++s) units.push_back({d, s, b});
    } else {
      units.push_back({d, kWholeDocument, b});
    }
  }
  return units;
}

AssignmentPlan EmptyPlan(const RatingDataset& ds, std::span<const std::size_t> documents,
                         ItemGrouping grouping, const LoadBalancing& balancing,
                         int ratings_per_item) {
  AssignmentPlan plan;
  plan.grouping = grouping;
  plan.balancing = balancing;
  plan.ratings_per_item = ratings_per_item;
  plan.documents.assign(documents.begin(), documents.end());
  plan.n_systems = ds.systems().size();
  plan.raters.assign(documents.size() * plan.n_systems * ratings_per_item, 0);
  return plan;
}

void Place(AssignmentPlan& plan, const Alphabet& alphabet, const Unit& unit, std::size_t symbol) {
  const auto& raters = alphabet.symbols[symbol];
  auto put = [&](std::size_t s) {
    const std::size_t base = (unit.local_doc * plan.n_systems + s) * plan.ratings_per_item;
    for (std::size_t k = 0; k < raters.size(); ++k) plan.raters[base + k] = raters[k];
  };
  if (unit.system == kWholeDocument) {
    for (std::size_t s = 0; s < plan.n_systems; ++s) put(s);
  } else {
    put(unit.system);
  }
}

// Shuffles the units and the symbols of each bucket, then deals round-robin.
void DealBalanced(AssignmentPlan& plan, const Alphabet& alphabet, const std::vector<Unit>& units,
                  std::size_t n_buckets, Rng& rng) {
  std::vector<std::vector<std::size_t>> by_bucket(n_buckets);
  for (std::size_t u = 0; u < units.size(); ++u) by_bucket[units[u].bucket].push_back(u);
  for (std::size_t b = 0; b < n_buckets; ++b) {
    if (by_bucket[b].empty()) continue;
    std::vector<std::size_t> syms = alphabet.bucket_symbols[b];
    rng.Shuffle(by_bucket[b]);
    rng.Shuffle(syms);
    for (std::size_t i = 0; i < by_bucket[b].size(); ++i) {
      Place(plan, alphabet, units[by_bucket[b][i]], syms[i % syms.size()]);
    }
  }
}

double XLogX(double c) { return c > 0.0 ? c * std::log(c) : 0.0; }

// Normalized entropy of loads summing to `total` with sum c log c = `s`.
double EntropyFromSum(double total, double s, std::size_t pool) {
  if (total <= 0.0) return 0.0;
  const double h = std::log(total) - s / total;
  return std::max(0.0, h / std::log(static_cast<double>(pool)));
}

AssignmentPlan EntropyPlan(const RatingDataset& ds, std::span<const std::size_t> documents,
                           ItemGrouping grouping, double target, double tolerance, Rng& rng,
                           int max_retries, int ratings_per_item) {
  CheckDocuments(ds, documents);
  const LoadBalancing balancing = LoadBalancing::EntropyTarget(target, tolerance);
  if (grouping == ItemGrouping::kSystemBalanced) {
    throw Error(ErrorCode::kInvalidConfig, "system-balanced grouping is fully balanced only");
  }
  if (!(target >= 0.0 && target <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "entropy target must lie in [0, 1]");
  }
  if (documents.empty()) throw Error(ErrorCode::kEmptyWorkload, "no documents to assign");
  const Alphabet alphabet = BuildAlphabet(ds, ratings_per_item);
  const std::size_t pool = alphabet.symbols.size();
  if (pool < 2) throw Error(ErrorCode::kInvalidArgument, "workload pool needs at least 2 symbols");
  const std::vector<Unit> units =
      BuildUnits(ds, documents, grouping == ItemGrouping::kNoGrouping);
  const double total = static_cast<double>(units.size());

  std::vector<std::size_t> assign(units.size());
  std::vector<double> counts(pool);
  std::vector<std::size_t> order(units.size());
  std::vector<std::size_t> best;
  double last = 0.0;
  for (int attempt = 0; attempt < std::max(1, max_retries); ++attempt) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t u = 0; u < units.size(); ++u) {
      const auto& syms = alphabet.bucket_symbols[units[u].bucket];
      assign[u] = syms[rng.UniformInt(syms.size())];
      counts[assign[u]] += 1.0;
    }
    double s = 0.0;
    for (double c : counts) s += XLogX(c);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.Shuffle(order);
    for (std::size_t u : order) {
      double& from = counts[assign[u]];
      s += XLogX(from - 1.0) - XLogX(from);
      from -= 1.0;
      best.clear();
      double best_gap = std::numeric_limits<double>::infinity();
      for (std::size_t sym : alphabet.bucket_symbols[units[u].bucket]) {
        const double s_new = s - XLogX(counts[sym]) + XLogX(counts[sym] + 1.0);
        const double gap = std::abs(EntropyFromSum(total, s_new, pool) - target);
        if (gap < best_gap - 1e-12) {
          best_gap = gap;
          best.assign(1, sym);
        } else if (gap <= best_gap + 1e-12) {
          best.push_back(sym);
        }
      }
      const std::size_t pick = best[best.size() == 1 ? 0 : rng.UniformInt(best.size())];
      s += XLogX(counts[pick] + 1.0) - XLogX(counts[pick]);
      counts[pick] += 1.0;
      assign[u] = pick;
    }
    last = EntropyFromSum(total, s, pool);
    if (std::abs(last - target) <= tolerance + 1e-12) {
      AssignmentPlan plan = EmptyPlan(ds, documents, grouping, balancing, ratings_per_item);
      for (std::size_t u = 0; u < units.size(); ++u) Place(plan, alphabet, units[u], assign[u]);
      return plan;
    }
  }
  const EntropyRange range = InstantiableEntropyRange(ds, documents, grouping, ratings_per_item);
  throw Error(ErrorCode::kTargetUnreachable,
              "entropy target " + FormatDouble(target) + " +/- " + FormatDouble(tolerance) +
                  " not reached after " + std::to_string(std::max(1, max_retries)) +
                  " attempts (last " + FormatDouble(last) + "; instantiable range [" +
                  FormatDouble(range.min) + ", " + FormatDouble(range.max) + "])");
}

}  // namespace

Workload PlanWorkload(const RatingDataset& dataset, const AssignmentPlan& plan) {
  const Alphabet alphabet = BuildAlphabet(dataset, plan.ratings_per_item);
  std::map<std::vector<std::uint32_t>, std::size_t> index;
  for (std::size_t i = 0; i < alphabet.symbols.size(); ++i) index[alphabet.symbols[i]] = i;
  Workload w;
  w.symbols = alphabet.symbols;
  w.counts.assign(alphabet.symbols.size(), 0.0);
  w.pool_size = alphabet.symbols.size();
  const std::size_t k = static_cast<std::size_t>(plan.ratings_per_item);
  std::vector<std::uint32_t> key(k);
  for (std::size_t i = 0; i + k <= plan.raters.size(); i += k) {
    for (std::size_t j = 0; j < k; ++j) key[j] = plan.raters[i + j];
    auto it = index.find(key);
    if (it == index.end()) {
      throw Error(ErrorCode::kInvalidArgument, "plan uses a rater set outside the alphabet");
    }
    w.counts[it->second] += 1.0;
  }
  return w;
}

double PlanEntropy(const RatingDataset& dataset, const AssignmentPlan& plan) {
  const Workload w = PlanWorkload(dataset, plan);
  return NormalizedEntropy(w.counts, w.pool_size);
}

std::vector<std::size_t> SubsampleDocuments(const RatingDataset& dataset, std::size_t n_target,
                                            Rng& rng) {
  const auto& buckets = dataset.buckets();
  if (buckets.empty()) throw Error(ErrorCode::kInvalidArgument, "dataset has no buckets");
  if (n_target > dataset.documents().size()) {
    throw Error(ErrorCode::kQuotaExceedsBucket,
                "asked for " + std::to_string(n_target) + " documents but the dataset has " +
                    std::to_string(dataset.documents().size()));
  }
  const std::size_t base = n_target / buckets.size();
  const std::size_t rem = n_target % buckets.size();
  std::vector<std::size_t> spare;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    if (buckets[b].documents.size() < base) {
      throw Error(ErrorCode::kQuotaExceedsBucket,
                  "bucket '" + buckets[b].id + "' has " +
                      std::to_string(buckets[b].documents.size()) + " documents, quota is " +
                      std::to_string(base));
    }
    if (buckets[b].documents.size() > base) spare.push_back(b);
  }
  if (spare.size() < rem) {
    throw Error(ErrorCode::kQuotaExceedsBucket,
                "not enough buckets with spare documents for " + std::to_string(n_target));
  }
  std::vector<std::size_t> quota(buckets.size(), base);
  rng.Shuffle(spare);
  for (std::size_t i = 0; i < rem; ++i) ++quota[spare[i]];

  std::vector<std::size_t> out;
  out.reserve(n_target);
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    std::vector<std::size_t> docs = buckets[b].documents;
    // Partial Fisher-Yates: the first quota[b] entries are a uniform sample.
    for (std::size_t i = 0; i < quota[b]; ++i) {
      std::swap(docs[i], docs[i + rng.UniformInt(docs.size() - i)]);
      out.push_back(docs[i]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

AssignmentPlan AssignPsxsBalanced(const RatingDataset& dataset,
                                  std::span<const std::size_t> documents, Rng& rng,
                                  int ratings_per_item) {
  CheckDocuments(dataset, documents);
  const Alphabet alphabet = BuildAlphabet(dataset, ratings_per_item);
  AssignmentPlan plan = EmptyPlan(dataset, documents, ItemGrouping::kPseudoSideBySide,
                                  LoadBalancing::FullyBalanced(), ratings_per_item);
  DealBalanced(plan, alphabet, BuildUnits(dataset, documents, false), dataset.buckets().size(),
               rng);
  return plan;
}

AssignmentPlan AssignEntropyTarget(const RatingDataset& dataset,
                                   std::span<const std::size_t> documents, ItemGrouping grouping,
                                   double target, double tolerance, Rng& rng, int max_retries,
                                   int ratings_per_item) {
  return EntropyPlan(dataset, documents, grouping, target, tolerance, rng, max_retries,
                     ratings_per_item);
}

AssignmentPlan AssignNoGrouping(const RatingDataset& dataset,
                                std::span<const std::size_t> documents,
                                const LoadBalancing& balancing, Rng& rng, int max_retries,
                                int ratings_per_item) {
  if (balancing.kind == LoadBalancing::Kind::kEntropyTarget) {
    return EntropyPlan(dataset, documents, ItemGrouping::kNoGrouping, balancing.target,
                       balancing.tolerance, rng, max_retries, ratings_per_item);
  }
  CheckDocuments(dataset, documents);
  const Alphabet alphabet = BuildAlphabet(dataset, ratings_per_item);
  AssignmentPlan plan = EmptyPlan(dataset, documents, ItemGrouping::kNoGrouping, balancing,
                                  ratings_per_item);
  DealBalanced(plan, alphabet, BuildUnits(dataset, documents, true), dataset.buckets().size(),
               rng);
  return plan;
}

AssignmentPlan AssignSystemBalanced(const RatingDataset& dataset,
                                    std::span<const std::size_t> documents, Rng& rng,
                                    int ratings_per_item) {
  CheckDocuments(dataset, documents);
  const Alphabet alphabet = BuildAlphabet(dataset, ratings_per_item);
  AssignmentPlan plan = EmptyPlan(dataset, documents, ItemGrouping::kSystemBalanced,
                                  LoadBalancing::FullyBalanced(), ratings_per_item);
  const std::vector<Unit> units = BuildUnits(dataset, documents, true);
  const std::size_t n_sys = dataset.systems().size();
  const std::size_t n_buckets = dataset.buckets().size();
  // Items of (bucket, system), each dealt independently.
  std::vector<std::vector<std::size_t>> groups(n_buckets * n_sys);
  for (std::size_t u = 0; u < units.size(); ++u) {
    groups[units[u].bucket * n_sys + units[u].system].push_back(u);
  }
  for (std::size_t b = 0; b < n_buckets; ++b) {
    for (std::size_t s = 0; s < n_sys; ++s) {
      auto& items = groups[b * n_sys + s];
      if (items.empty()) continue;
      std::vector<std::size_t> syms = alphabet.bucket_symbols[b];
      rng.Shuffle(items);
      rng.Shuffle(syms);
      for (std::size_t i = 0; i < items.size(); ++i) {
        Place(plan, alphabet, units[items[i]], syms[i % syms.size()]);
      }
    }
  }
  return plan;
}

AssignmentPlan Assign(const RatingDataset& dataset, std::span<const std::size_t> documents,
                      ItemGrouping grouping, const LoadBalancing& balancing,
                      int ratings_per_item, Rng& rng, int max_retries) {
  const bool balanced = balancing.kind == LoadBalancing::Kind::kFullyBalanced;
  switch (grouping) {
    case ItemGrouping::kPseudoSideBySide:
      if (balanced) return AssignPsxsBalanced(dataset, documents, rng, ratings_per_item);
      return AssignEntropyTarget(dataset, documents, grouping, balancing.target,
                                 balancing.tolerance, rng, max_retries, ratings_per_item);
    case ItemGrouping::kSystemBalanced:
      if (!balanced) {
        throw Error(ErrorCode::kInvalidConfig, "system-balanced grouping is fully balanced only");
      }
      return AssignSystemBalanced(dataset, documents, rng, ratings_per_item);
    case ItemGrouping::kNoGrouping:
      return AssignNoGrouping(dataset, documents, balancing, rng, max_retries, ratings_per_item);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown item grouping");
}

AssignmentPlan PairAssign(const RatingDataset& dataset, std::span<const std::size_t> documents,
                          ItemGrouping grouping, const LoadBalancing& balancing, Rng& rng,
                          int max_retries) {
  return Assign(dataset, documents, grouping, balancing, 2, rng, max_retries);
}

namespace {

double MinEntropy(const std::vector<double>& bucket_units,
                  const std::vector<std::vector<std::size_t>>& bucket_symbols, std::size_t pool) {
  std::vector<std::size_t> active;
  for (std::size_t b = 0; b < bucket_units.size(); ++b) {
    if (bucket_units[b] > 0.0) active.push_back(b);
  }
  double combos = 1.0;
  for (std::size_t b : active) combos *= static_cast<double>(bucket_symbols[b].size());
  if (combos > 2e7) {
    throw Error(ErrorCode::kInvalidArgument, "too many bucket/symbol combinations to enumerate");
  }
  std::vector<double> loads(pool, 0.0);
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](auto&& self, std::size_t i) -> void {
    if (i == active.size()) {
      best = std::min(best, NormalizedEntropy(loads, pool));
      return;
    }
    const std::size_t b = active[i];
    for (std::size_t sym : bucket_symbols[b]) {
      loads[sym] += bucket_units[b];
      self(self, i + 1);
      loads[sym] -= bucket_units[b];
    }
  };
  visit(visit, 0);
  return best;
}

double MaxEntropy(const std::vector<double>& bucket_units,
                  const std::vector<std::vector<std::size_t>>& bucket_symbols, std::size_t pool) {
  const std::size_t n_buckets = bucket_units.size();
  // cnt[b][i]: units of bucket b on its i-th symbol.
  std::vector<std::vector<long>> cnt(n_buckets);
  std::vector<long> load(pool, 0);
  for (std::size_t b = 0; b < n_buckets; ++b) {
    const std::size_t m = bucket_symbols[b].size();
    const long units = static_cast<long>(bucket_units[b]);
    cnt[b].assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      cnt[b][i] = units / static_cast<long>(m) + (static_cast<long>(i) < units % static_cast<long>(m));
      load[bucket_symbols[b][i]] += cnt[b][i];
    }
  }
  // symbol -> (bucket, position) incidences
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> incid(pool);
  for (std::size_t b = 0; b < n_buckets; ++b) {
    for (std::size_t i = 0; i < bucket_symbols[b].size(); ++i) {
      incid[bucket_symbols[b][i]].push_back({b, i});
    }
  }
  bool improved = true;
  while (improved) {
    improved = false;
    std::vector<std::size_t> by_load(pool);
    std::iota(by_load.begin(), by_load.end(), std::size_t{0});
    std::sort(by_load.begin(), by_load.end(),
              [&](std::size_t a, std::size_t b) { return load[a] > load[b]; });
    for (std::size_t x : by_load) {
      // BFS over symbols; an edge u -> v moves one unit of a shared bucket.
      struct Parent {
        std::size_t from;
        std::size_t bucket;
        std::size_t from_pos;
        std::size_t to_pos;
      };
      std::vector<int> seen(pool, 0);
      std::vector<Parent> parent(pool);
      std::deque<std::size_t> queue{x};
      seen[x] = 1;
      std::size_t found = pool;
      while (!queue.empty() && found == pool) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (auto [b, pos] : incid[u]) {
          if (cnt[b][pos] == 0) continue;
          for (std::size_t j = 0; j < bucket_symbols[b].size(); ++j) {
            const std::size_t v = bucket_symbols[b][j];
            if (seen[v]) continue;
            seen[v] = 1;
            parent[v] = {u, b, pos, j};
            if (load[v] <= load[x] - 2) {
              found = v;
              break;
            }
            queue.push_back(v);
          }
          if (found != pool) break;
        }
      }
      if (found == pool) continue;
      for (std::size_t v = found; v != x; v = parent[v].from) {
        const Parent& p = parent[v];
        --cnt[p.bucket][p.from_pos];
        ++cnt[p.bucket][p.to_pos];
      }
      --load[x];
      ++load[found];
      improved = true;
      break;
    }
  }
  std::vector<double> loads(load.begin(), load.end());
  return NormalizedEntropy(loads, pool);
}

}  // namespace

EntropyRange InstantiableEntropyRange(const RatingDataset& dataset,
                                      std::span<const std::size_t> documents,
                                      ItemGrouping grouping, int ratings_per_item) {
  CheckDocuments(dataset, documents);
  if (documents.empty()) throw Error(ErrorCode::kEmptyWorkload, "no documents to assign");
  const Alphabet alphabet = BuildAlphabet(dataset, ratings_per_item);
  const std::size_t pool = alphabet.symbols.size();
  std::vector<double> units(dataset.buckets().size(), 0.0);
  // Document units for pSxS; every other grouping can move single items.
  const double per_doc =
      grouping == ItemGrouping::kPseudoSideBySide ? 1.0 : static_cast<double>(dataset.systems().size());
  for (std::size_t d : documents) units[dataset.documents()[d].bucket] += per_doc;
  return {MinEntropy(units, alphabet.bucket_symbols, pool),
          MaxEntropy(units, alphabet.bucket_symbols, pool)};
}

}  // namespace evalstab
