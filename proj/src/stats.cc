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

#include "evalstab/stats.h"

#include <algorithm>
#include <cmath>

namespace evalstab {

double PermutationTestFromDocDiffs(std::span<const double> doc_diff_sums, int n_permutations,
                                   Rng& rng) {
  if (n_permutations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_permutations must be >= 1");
  }
  double observed = 0.0, scale = 0.0;
  for (double d : doc_diff_sums) {
    observed += d;
    scale += std::fabs(d);
  }
  observed = std::fabs(observed);
  // Tolerance for sums that are equal up to rounding order.
  const double threshold = observed - 1e-12 * scale;

  const std::size_t n_docs = doc_diff_sums.size();
  int count = 0;
  for (int p = 0; p < n_permutations; ++p) {
    double sum = 0.0;
    for (std::size_t base = 0; base < n_docs; base += 64) {
      std::uint64_t bits = rng();
      const std::size_t end = std::min(n_docs, base + 64);
      for (std::size_t d = base; d < end; ++d, bits >>= 1) {
        sum += (bits & 1) ? -doc_diff_sums[d] : doc_diff_sums[d];
      }
    }
    if (std::fabs(sum) >= threshold) ++count;
  }
  return (1.0 + count) / (1.0 + n_permutations);
}

double PermutationTest(const GroupedScores& a, const GroupedScores& b, int n_permutations,
                       Rng& rng) {
  if (a.doc_offsets != b.doc_offsets || a.values.size() != b.values.size() ||
      a.doc_offsets.empty() || a.doc_offsets.back() != a.values.size()) {
    throw Error(ErrorCode::kMismatchedDocuments,
                "both systems need the same documents and per-document segment counts");
  }
  std::vector<double> diffs(a.doc_offsets.size() - 1, 0.0);
  for (std::size_t d = 0; d + 1 < a.doc_offsets.size(); ++d) {
    for (std::size_t i = a.doc_offsets[d]; i < a.doc_offsets[d + 1]; ++i) {
      diffs[d] += a.values[i] - b.values[i];
    }
  }
  return PermutationTestFromDocDiffs(diffs, n_permutations, rng);
}

SignificanceMatrix::SignificanceMatrix(std::vector<std::string> systems, double alpha,
                                       int n_permutations)
    : systems_(std::move(systems)),
      sig_(systems_.size() * systems_.size(), 0),
      better_(systems_.size() * systems_.size(), 0),
      alpha_(alpha),
      n_permutations_(n_permutations) {}

SignificanceMatrix SignificanceMatrix::FromMeans(std::vector<std::string> systems,
                                                 std::span<const double> means,
                                                 std::span<const double> p_values, double alpha,
                                                 int n_permutations) {
  const std::size_t n = systems.size();
  if (means.size() != n || p_values.size() != n * n) {
    throw Error(ErrorCode::kInvalidArgument, "means/p-values do not match the system list");
  }
  SignificanceMatrix m(std::move(systems), alpha, n_permutations);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (means[i] < means[j]) {
        m.SetBetter(i, j);
        if (p_values[i * n + j] <= alpha) m.SetSignificant(i, j);
      }
    }
  }
  return m;
}

void SignificanceMatrix::SetBetter(std::size_t i, std::size_t j) { better_[i * size() + j] = 1; }

void SignificanceMatrix::SetSignificant(std::size_t i, std::size_t j) {
  sig_[i * size() + j] = 1;
  better_[i * size() + j] = 1;
}

std::size_t SignificanceMatrix::SignificantPairCount() const {
  return static_cast<std::size_t>(std::count(sig_.begin(), sig_.end(), 1));
}

bool SignificanceMatrix::IsConsistent() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if (Significant(i, i) || Better(i, i)) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (Significant(i, j) && !Better(i, j)) return false;
      if (Significant(i, j) && Significant(j, i)) return false;
      if (Better(i, j) && Better(j, i)) return false;
    }
  }
  return true;
}

RankingResult RankSystems(const ScoredStudy& study, double alpha, int n_permutations, Rng& rng) {
  const std::size_t n = study.systems.size();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two systems to rank");
  const std::size_t n_docs = study.n_docs();
  const std::size_t n_seg = study.n_segments();
  const std::vector<double> eff = EffectiveScores(study);

  // Per-system, per-document segment sums.
  std::vector<double> doc_sums(n * n_docs, 0.0);
  RankingResult result;
  result.systems = study.systems;
  result.means.assign(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double total = 0.0;
    for (std::size_t d = 0; d < n_docs; ++d) {
      double sum = 0.0;
      for (std::size_t g = study.doc_offsets[d]; g < study.doc_offsets[d + 1]; ++g) {
        sum += eff[s * n_seg + g];
      }
      doc_sums[s * n_docs + d] = sum;
      total += sum;
    }
    result.means[s] = n_seg ? total / static_cast<double>(n_seg) : 0.0;
  }

  result.p_values.assign(n * n, 1.0);
  std::vector<double> diffs(n_docs);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t d = 0; d < n_docs; ++d) {
        diffs[d] = doc_sums[i * n_docs + d] - doc_sums[j * n_docs + d];
      }
      const double p = PermutationTestFromDocDiffs(diffs, n_permutations, rng);
      result.p_values[i * n + j] = p;
      result.p_values[j * n + i] = p;
    }
  }
  result.matrix = SignificanceMatrix::FromMeans(study.systems, result.means, result.p_values,
                                                alpha, n_permutations);
  return result;
}

SignificanceMatrix BuildSignificanceMatrix(const ScoredStudy& study, double alpha,
                                           int n_permutations, Rng& rng) {
  return RankSystems(study, alpha, n_permutations, rng).matrix;
}

namespace {

// index_in_target[i] = position in `target` of reference system i.
std::vector<std::size_t> AlignSystems(const SignificanceMatrix& reference,
                                      const SignificanceMatrix& target) {
  const std::size_t n = reference.size();
  if (target.size() != n) {
    throw Error(ErrorCode::kSystemSetMismatch, "studies rank different numbers of systems");
  }
  std::vector<std::size_t> index(n);
  if (reference.systems() == target.systems()) {
    for (std::size_t i = 0; i < n; ++i) index[i] = i;
    return index;
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::find(target.systems().begin(), target.systems().end(), reference.systems()[i]);
    if (it == target.systems().end()) {
      throw Error(ErrorCode::kSystemSetMismatch,
                  "system '" + reference.systems()[i] + "' missing from the other study");
    }
    index[i] = static_cast<std::size_t>(it - target.systems().begin());
  }
  return index;
}

}  // namespace

int SignificantRankingPreserved(const SignificanceMatrix& e1, const SignificanceMatrix& e2) {
  const auto index = AlignSystems(e1, e2);
  for (std::size_t i = 0; i < e1.size(); ++i) {
    for (std::size_t j = 0; j < e1.size(); ++j) {
      if (e1.Significant(i, j) && !e2.Better(index[i], index[j])) return 0;
    }
  }
  return 1;
}

SrpResult Srp(std::span<const SignificanceMatrix> studies,
              std::span<const std::int64_t> doc_set_ids) {
  if (!doc_set_ids.empty() && doc_set_ids.size() != studies.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one document-set id per study required");
  }
  const std::size_t n = studies.size();
  if (n < 2) throw Error(ErrorCode::kNoAdmissiblePairs, "SRP needs at least two studies");

  // Significant pairs of each study in the first study's system order, and
  // each study's alignment to that order.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> sig_pairs(n);
  std::vector<std::vector<std::size_t>> index(n);
  for (std::size_t k = 0; k < n; ++k) {
    index[k] = AlignSystems(studies[0], studies[k]);
    for (std::size_t i = 0; i < studies[0].size(); ++i) {
      for (std::size_t j = 0; j < studies[0].size(); ++j) {
        if (studies[k].Significant(index[k][i], index[k][j])) sig_pairs[k].emplace_back(i, j);
      }
    }
  }

  std::size_t pairs = 0, preserved = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (!doc_set_ids.empty() && doc_set_ids[a] != doc_set_ids[b]) continue;
      ++pairs;
      bool ok = true;
      for (const auto& [i, j] : sig_pairs[a]) {
        if (!studies[b].Better(index[b][i], index[b][j])) {
          ok = false;
          break;
        }
      }
      preserved += ok ? 1 : 0;
    }
  }
  if (pairs == 0) {
    throw Error(ErrorCode::kNoAdmissiblePairs, "no ordered study pair shares a document set");
  }
  return {static_cast<double>(preserved) / static_cast<double>(pairs), pairs};
}

double NormalizedEntropy(std::span<const double> counts, std::size_t pool_size) {
  if (pool_size < 2) throw Error(ErrorCode::kInvalidArgument, "rater pool needs at least 2 raters");
  if (counts.size() > pool_size) {
    throw Error(ErrorCode::kInvalidArgument, "more workload entries than raters in the pool");
  }
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative workload count");
    total += c;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kEmptyWorkload, "workload is empty");
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log(p);
    }
  }
  return std::clamp(h / std::log(static_cast<double>(pool_size)), 0.0, 1.0);
}

double NormalizedEntropy(const WorkloadDistribution& workload, std::size_t pool_size) {
  std::vector<double> counts;
  counts.reserve(workload.size());
  for (const auto& [rater, count] : workload) counts.push_back(count);
  return NormalizedEntropy(counts, pool_size);
}

std::optional<double> KendallTau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kSystemSetMismatch, "rankings have different lengths");
  }
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) ++tied_x;
      if (dy == 0.0) ++tied_y;
      if (dx == 0.0 || dy == 0.0) continue;
      ((dx > 0) == (dy > 0) ? concordant : discordant)++;
    }
  }
  const long long n0 = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
  const double denom = std::sqrt(static_cast<double>(n0 - tied_x) * static_cast<double>(n0 - tied_y));
  if (denom == 0.0) return std::nullopt;
  return static_cast<double>(concordant - discordant) / denom;
}

std::optional<double> KendallTau(const std::map<std::string, double>& x,
                                 const std::map<std::string, double>& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kSystemSetMismatch, "rankings cover different systems");
  }
  std::vector<double> xs, ys;
  for (const auto& [system, value] : x) {
    auto it = y.find(system);
    if (it == y.end()) {
      throw Error(ErrorCode::kSystemSetMismatch, "system '" + system + "' missing from a ranking");
    }
    xs.push_back(value);
    ys.push_back(it->second);
  }
  return KendallTau(xs, ys);
}

namespace {

// Per-system segment-score sums of one rater on one document.
void AccumulateDocMeans(const RatingDataset& ds, std::size_t doc, std::size_t slot,
                        std::vector<double>& sums) {
  const auto& info = ds.documents()[doc];
  for (std::size_t s = 0; s < ds.systems().size(); ++s) {
    for (std::size_t seg = 0; seg < info.n_segments; ++seg) {
      sums[s] += ds.Cell(doc, seg, s, slot).score;
    }
  }
}

}  // namespace

AgreementTable RaterAgreement(const RatingDataset& ds, AgreementGranularity granularity) {
  AgreementTable table;
  table.granularity = granularity;
  const std::size_t n_raters = ds.raters().size();
  const std::size_t n_sys = ds.systems().size();
  double tau_sum = 0.0;
  std::size_t tau_count = 0;

  for (std::size_t a = 0; a < n_raters; ++a) {
    for (std::size_t b = a + 1; b < n_raters; ++b) {
      std::vector<std::size_t> shared;
      for (std::size_t d = 0; d < ds.documents().size(); ++d) {
        if (ds.RaterSlot(d, a) && ds.RaterSlot(d, b)) shared.push_back(d);
      }
      if (shared.empty()) {
        table.skipped.emplace_back(ds.raters()[a], ds.raters()[b]);
        continue;
      }
      PairAgreement pair;
      pair.rater_a = ds.raters()[a];
      pair.rater_b = ds.raters()[b];
      pair.shared_documents = shared.size();
      if (granularity == AgreementGranularity::kSingleDocument) {
        double sum = 0.0;
        for (std::size_t d : shared) {
          std::vector<double> ma(n_sys, 0.0), mb(n_sys, 0.0);
          AccumulateDocMeans(ds, d, *ds.RaterSlot(d, a), ma);
          AccumulateDocMeans(ds, d, *ds.RaterSlot(d, b), mb);
          // Sums over the same segment count rank like means.
          if (auto tau = KendallTau(ma, mb)) {
            sum += *tau;
            ++pair.documents_used;
          }
        }
        if (pair.documents_used) pair.tau = sum / static_cast<double>(pair.documents_used);
      } else {
        std::vector<double> ma(n_sys, 0.0), mb(n_sys, 0.0);
        for (std::size_t d : shared) {
          AccumulateDocMeans(ds, d, *ds.RaterSlot(d, a), ma);
          AccumulateDocMeans(ds, d, *ds.RaterSlot(d, b), mb);
        }
        pair.documents_used = shared.size();
        pair.tau = KendallTau(ma, mb);
      }
      if (pair.tau) {
        tau_sum += *pair.tau;
        ++tau_count;
      }
      table.pairs.push_back(std::move(pair));
    }
  }
  if (tau_count) table.grand_mean = tau_sum / static_cast<double>(tau_count);
  return table;
}

Histogram RaterDistribution(const RatingDataset& ds, std::string_view rater_id,
                            std::span<const double> bin_edges) {
  const auto rater = ds.FindRater(rater_id);
  if (!rater) throw Error(ErrorCode::kUnknownRater, "unknown rater '" + std::string(rater_id) + "'");
  if (bin_edges.size() < 2 || !std::is_sorted(bin_edges.begin(), bin_edges.end()) ||
      std::adjacent_find(bin_edges.begin(), bin_edges.end()) != bin_edges.end()) {
    throw Error(ErrorCode::kInvalidArgument, "bin edges must be strictly increasing, at least 2");
  }
  Histogram h;
  h.edges.assign(bin_edges.begin(), bin_edges.end());
  h.counts.assign(bin_edges.size() - 1, 0);
  std::vector<double> values;
  for (std::size_t d = 0; d < ds.documents().size(); ++d) {
    const auto slot = ds.RaterSlot(d, *rater);
    if (!slot) continue;
    for (std::size_t seg = 0; seg < ds.documents()[d].n_segments; ++seg) {
      for (std::size_t s = 0; s < ds.systems().size(); ++s) {
        values.push_back(ds.Cell(d, seg, s, *slot).score);
      }
    }
  }
  for (double v : values) {
    if (v < h.edges.front() || v > h.edges.back()) {
      ++h.outside;
      continue;
    }
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
    std::size_t bin = static_cast<std::size_t>(it - h.edges.begin());
    bin = bin == 0 ? 0 : bin - 1;
    if (bin >= h.counts.size()) bin = h.counts.size() - 1;
    ++h.counts[bin];
  }
  h.n = values.size();
  if (!values.empty()) {
    double sum = 0.0;
    for (double v : values) sum += v;
    h.mean = sum / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    h.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  }
  return h;
}

std::vector<double> UnitBins(int max_score) {
  std::vector<double> edges;
  for (int i = 0; i <= max_score + 1; ++i) edges.push_back(static_cast<double>(i));
  return edges;
}

}  // namespace evalstab
