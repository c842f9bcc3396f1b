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

#include "evalstab/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace evalstab {

std::string_view DocResamplingName(DocResampling mode) {
  return mode == DocResampling::kPerStudy ? "per_study" : "per_50_simulations";
}

DocResampling ParseDocResampling(std::string_view text) {
  const std::string v = ToLower(Trim(text));
  if (v == "per_study") return DocResampling::kPerStudy;
  if (v == "per_50_simulations" || v == "per50" || v == "per_50") {
    return DocResampling::kPer50Simulations;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown doc_resampling '" + std::string(text) +
                                             "' (expected per_study or per_50_simulations)");
}

void StudyConfig::Validate() const {
  auto fail = [&](const std::string& field, const std::string& why) {
    const std::string where = name.empty() ? "" : "config '" + name + "': ";
    throw Error(ErrorCode::kInvalidConfig, where + field + " " + why);
  };
  if (ratings_per_item != 1 && ratings_per_item != 2) fail("ratings_per_item", "must be 1 or 2");
  if (n_documents < 1) fail("num_documents", "must be >= 1");
  if (StudyDocuments() < 1) fail("num_documents", "leaves no documents for double rating");
  if (n_simulations < 2) fail("n_simulations", "must be >= 2");
  if (n_permutations < 1) fail("n_permutations", "must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha", "must lie in (0, 1)");
  if (max_retries < 1) fail("max_retries", "must be >= 1");
  if (balancing.kind == LoadBalancing::Kind::kEntropyTarget) {
    if (!(balancing.target >= 0.0 && balancing.target <= 1.0)) {
      fail("load_balancing", "target must lie in [0, 1]");
    }
    if (!(balancing.tolerance >= 0.0)) fail("load_balancing", "tolerance must be >= 0");
    if (grouping == ItemGrouping::kSystemBalanced) {
      fail("load_balancing", "must be balanced with system_balanced grouping");
    }
  }
}

ScoredStudy SelectRatings(const RatingDataset& dataset, const AssignmentPlan& plan) {
  ScoredStudy st;
  st.systems = dataset.systems();
  st.raters = dataset.raters();
  st.ratings_per_item = plan.ratings_per_item;
  st.has_error_counts = dataset.has_annotations();
  st.doc_offsets.push_back(0);
  for (std::size_t doc : plan.documents) {
    st.doc_ids.push_back(dataset.documents()[doc].id);
    st.doc_offsets.push_back(st.doc_offsets.back() + dataset.documents()[doc].n_segments);
  }
  const std::size_t n_sys = st.systems.size();
  const std::size_t k = static_cast<std::size_t>(plan.ratings_per_item);
  const std::size_t n_cells = st.n_segments() * n_sys * k;
  st.scores.reserve(n_cells);
  st.rater_of.reserve(n_cells);
  if (st.has_error_counts) st.error_counts.reserve(n_cells);
  for (std::size_t d = 0; d < plan.documents.size(); ++d) {
    const std::size_t doc = plan.documents[d];
    // Slots of each system's raters, resolved once per document.
    std::vector<std::size_t> slots(n_sys * k);
    for (std::size_t s = 0; s < n_sys; ++s) {
      const auto raters = plan.ItemRaters(d, s);
      for (std::size_t j = 0; j < k; ++j) {
        const auto slot = dataset.RaterSlot(doc, raters[j]);
        if (!slot) {
          throw Error(ErrorCode::kInvalidArgument,
                      "rater '" + dataset.raters()[raters[j]] + "' did not rate document '" +
                          dataset.documents()[doc].id + "'");
        }
        slots[s * k + j] = *slot;
      }
    }
    for (std::size_t g = 0; g < dataset.documents()[doc].n_segments; ++g) {
      for (std::size_t s = 0; s < n_sys; ++s) {
        const auto raters = plan.ItemRaters(d, s);
        for (std::size_t j = 0; j < k; ++j) {
          const RatingCell& cell = dataset.Cell(doc, g, s, slots[s * k + j]);
          st.scores.push_back(cell.score);
          st.rater_of.push_back(raters[j]);
          if (st.has_error_counts) st.error_counts.push_back(cell.error_count);
        }
      }
    }
  }
  return st;
}

StudyOutcome SimulateStudyOn(const RatingDataset& dataset, const StudyConfig& config,
                             std::span<const std::size_t> documents, std::uint64_t study_seed) {
  config.Validate();
  Rng rng(study_seed);
  StudyOutcome out;
  out.study.documents.assign(documents.begin(), documents.end());
  out.study.plan = Assign(dataset, documents, config.grouping, config.balancing,
                          config.ratings_per_item, rng, config.max_retries);
  out.study.scores = Normalize(SelectRatings(dataset, out.study.plan), config.normalization,
                               NormalizeOptions{config.strict_normalization});
  out.ranking = RankSystems(out.study.scores, config.alpha, config.n_permutations, rng);
  return out;
}

StudyOutcome SimulateStudy(const RatingDataset& dataset, const StudyConfig& config,
                           std::uint64_t study_seed) {
  config.Validate();
  Rng doc_rng(DeriveSeed(study_seed, {0}));
  const auto docs = SubsampleDocuments(dataset, config.StudyDocuments(), doc_rng);
  return SimulateStudyOn(dataset, config, docs, DeriveSeed(study_seed, {1}));
}

namespace {
constexpr std::uint64_t kDocumentSetTag = 0x646f6373ULL;  // "docs"
}  // namespace

std::uint64_t DocumentSetSeed(std::uint64_t master_seed, std::size_t study_documents,
                              std::size_t set_index) {
  return DeriveSeed(master_seed, {kDocumentSetTag, study_documents, set_index});
}

std::uint64_t StudySeed(std::uint64_t master_seed, std::size_t config_index,
                        std::size_t n_documents, std::size_t set_index, std::size_t study_index) {
  return DeriveSeed(master_seed, {config_index, n_documents, set_index, study_index});
}

std::vector<std::size_t> DefaultDocumentGrid(std::size_t n_dataset_documents) {
  static constexpr std::size_t kGrid[] = {10, 20, 40, 60, 90, 120, 150, 181};
  std::vector<std::size_t> grid;
  bool clipped = false;
  for (std::size_t n : kGrid) {
    if (n <= n_dataset_documents) {
      grid.push_back(n);
    } else {
      clipped = true;
    }
  }
  if (clipped && n_dataset_documents > 0 &&
      (grid.empty() || grid.back() != n_dataset_documents)) {
    grid.push_back(n_dataset_documents);
  }
  return grid;
}

SrpResult PointSrp(const SweepPoint& point) {
  std::vector<SignificanceMatrix> matrices;
  std::vector<std::int64_t> ids;
  for (const StudySummary& s : point.studies) {
    matrices.push_back(s.matrix);
    ids.push_back(s.doc_set_id);
  }
  return Srp(matrices, ids);
}

namespace {

struct PointWork {
  StudyConfig config;  // with n_documents set
  std::size_t config_index = 0;
  std::vector<std::vector<std::size_t>> doc_sets;
  std::vector<std::int64_t> set_ids;  // content-based, per doc set
  std::vector<std::size_t> study_set;  // doc set of each study
  std::vector<StudySummary> summaries;
  std::vector<std::optional<Error>> errors;
  std::atomic<std::size_t> remaining{0};
  std::atomic<long long> nanos{0};
};

void FinishPoint(PointWork& w, SweepPoint& point, bool keep_studies) {
  for (const auto& e : w.errors) {
    if (e) {
      point.status = std::string(ErrorCodeName(e->code()));
      point.message = e->what();
      return;
    }
  }
  std::vector<SignificanceMatrix> matrices;
  std::vector<std::int64_t> ids;
  for (const StudySummary& s : w.summaries) {
    matrices.push_back(s.matrix);
    ids.push_back(s.doc_set_id);
  }
  // Per-study resampling compares every ordered pair.
  if (w.config.doc_resampling == DocResampling::kPerStudy) ids.clear();
  try {
    const SrpResult r = Srp(matrices, ids);
    point.srp = r.value;
    point.n_pairs = r.n_pairs;
  } catch (const Error& e) {
    point.status = std::string(ErrorCodeName(e.code()));
    point.message = e.what();
  }
  if (keep_studies) {
    point.studies = std::move(w.summaries);
    if (w.config.doc_resampling == DocResampling::kPerStudy) {
      // Stored ids reproduce the unrestricted pair rule through PointSrp.
      for (StudySummary& s : point.studies) s.doc_set_id = 0;
    }
  }
}

}  // namespace

SweepResult RunSweep(const RatingDataset& dataset, const std::vector<SweepSeries>& series,
                     const SweepOptions& options) {
  SweepResult result;
  std::vector<std::unique_ptr<PointWork>> work;
  for (std::size_t c = 0; c < series.size(); ++c) {
    const StudyConfig& base = series[c].config;
    result.configs.push_back(base);
    const std::vector<std::size_t> grid =
        series[c].grid.empty() ? DefaultDocumentGrid(dataset.documents().size()) : series[c].grid;
    for (std::size_t n : grid) {
      auto w = std::make_unique<PointWork>();
      w->config = base;
      w->config.n_documents = n;
      w->config_index = c;
      SweepPoint point;
      point.config_index = c;
      point.n_documents = n;
      point.study_documents = w->config.StudyDocuments();
      try {
        w->config.Validate();
        const std::size_t n_sim = static_cast<std::size_t>(w->config.n_simulations);
        const std::size_t per_set = w->config.doc_resampling == DocResampling::kPerStudy
                                        ? 1
                                        : static_cast<std::size_t>(kStudiesPerDocumentSet);
        const std::size_t n_sets = (n_sim + per_set - 1) / per_set;
        std::map<std::vector<std::size_t>, std::int64_t> ids;
        for (std::size_t j = 0; j < n_sets; ++j) {
          Rng rng(DocumentSetSeed(w->config.master_seed, point.study_documents, j));
          w->doc_sets.push_back(SubsampleDocuments(dataset, point.study_documents, rng));
          auto [it, inserted] =
              ids.emplace(w->doc_sets.back(), static_cast<std::int64_t>(ids.size()));
          w->set_ids.push_back(it->second);
        }
        for (std::size_t i = 0; i < n_sim; ++i) w->study_set.push_back(i / per_set);
      } catch (const Error& e) {
        point.status = std::string(ErrorCodeName(e.code()));
        point.message = e.what();
        w->study_set.clear();
      }
      w->summaries.resize(w->study_set.size());
      w->errors.resize(w->study_set.size());
      w->remaining = w->study_set.size();
      result.points.push_back(std::move(point));
      work.push_back(std::move(w));
    }
  }

  struct Task {
    std::size_t point;
    std::size_t study;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < work.size(); ++p) {
    for (std::size_t i = 0; i < work[p]->study_set.size(); ++i) tasks.push_back({p, i});
  }

  std::mutex mu;
  std::size_t done = 0;
  const std::size_t total = work.size();
  auto report = [&](std::size_t p) {
    std::lock_guard<std::mutex> lock(mu);
    ++done;
    if (options.progress) options.progress(result.points[p], done, total);
  };
  // Points without studies (setup failures) are already final.
  for (std::size_t p = 0; p < work.size(); ++p) {
    if (work[p]->study_set.empty()) report(p);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      PointWork& w = *work[tasks[t].point];
      const std::size_t i = tasks[t].study;
      const std::size_t set = w.study_set[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        StudyOutcome o = SimulateStudyOn(
            dataset, w.config, w.doc_sets[set],
            StudySeed(w.config.master_seed, w.config_index, w.config.n_documents, set, i));
        w.summaries[i] = {w.set_ids[set], std::move(o.ranking.means), std::move(o.ranking.matrix)};
      } catch (const Error& e) {
        w.errors[i] = e;
      }
      w.nanos += std::chrono::duration_cast<std::chrono::nanoseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
      if (w.remaining.fetch_sub(1) == 1) {
        SweepPoint& point = result.points[tasks[t].point];
        FinishPoint(w, point, options.keep_studies);
        point.wall_seconds = static_cast<double>(w.nanos.load()) * 1e-9;
        report(tasks[t].point);
      }
    }
  };
  int threads = options.threads;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::size_t>(threads, std::max<std::size_t>(1, tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  return result;
}

SweepResult RunSweep(const RatingDataset& dataset, const std::vector<StudyConfig>& configs,
                     const std::vector<std::size_t>& grid, const SweepOptions& options) {
  std::vector<SweepSeries> series;
  for (const StudyConfig& c : configs) series.push_back({c, grid});
  return RunSweep(dataset, series, options);
}

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string Fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void WriteSweepCsv(const SweepResult& result, std::ostream& out) {
  out << "config,item_grouping,load_balancing,normalization,ratings_per_item,doc_resampling,"
         "n_simulations,n_permutations,alpha,seed,num_documents,study_documents,srp,n_pairs,"
         "status\n";
  for (const SweepPoint& p : result.points) {
    const StudyConfig& c = result.configs[p.config_index];
    out << CsvField(c.name) << ',' << ItemGroupingName(c.grouping) << ','
        << LoadBalancingName(c.balancing) << ',' << NormalizationName(c.normalization) << ','
        << c.ratings_per_item << ',' << DocResamplingName(c.doc_resampling) << ','
        << c.n_simulations << ',' << c.n_permutations << ',' << FormatDouble(c.alpha) << ','
        << c.master_seed << ',' << p.n_documents << ',' << p.study_documents << ','
        << (p.srp ? Fixed6(*p.srp) : std::string()) << ',' << p.n_pairs << ','
        << p.status << '\n';
  }
}

std::string SweepJson(const SweepResult& result, bool with_matrices) {
  using nlohmann::ordered_json;
  ordered_json root;
  ordered_json configs = ordered_json::array();
  for (const StudyConfig& c : result.configs) {
    configs.push_back({{"name", c.name},
                       {"item_grouping", ItemGroupingName(c.grouping)},
                       {"load_balancing", LoadBalancingName(c.balancing)},
                       {"normalization", NormalizationName(c.normalization)},
                       {"ratings_per_item", c.ratings_per_item},
                       {"doc_resampling", DocResamplingName(c.doc_resampling)},
                       {"n_simulations", c.n_simulations},
                       {"n_permutations", c.n_permutations},
                       {"alpha", c.alpha},
                       {"seed", c.master_seed}});
  }
  root["configs"] = configs;
  ordered_json points = ordered_json::array();
  for (const SweepPoint& p : result.points) {
    ordered_json jp;
    jp["config"] = result.configs[p.config_index].name;
    jp["num_documents"] = p.n_documents;
    jp["study_documents"] = p.study_documents;
    jp["srp"] = p.srp ? ordered_json(*p.srp) : ordered_json(nullptr);
    jp["n_pairs"] = p.n_pairs;
    jp["status"] = p.status;
    if (!p.message.empty()) jp["message"] = p.message;
    ordered_json studies = ordered_json::array();
    for (const StudySummary& s : p.studies) {
      ordered_json js;
      js["doc_set"] = s.doc_set_id;
      js["means"] = s.means;
      if (with_matrices) {
        ordered_json sig = ordered_json::array();
        for (std::size_t i = 0; i < s.matrix.size(); ++i) {
          for (std::size_t j = 0; j < s.matrix.size(); ++j) {
            if (s.matrix.Significant(i, j)) {
              sig.push_back({s.matrix.systems()[i], s.matrix.systems()[j]});
            }
          }
        }
        js["significant"] = sig;
      }
      studies.push_back(js);
    }
    jp["studies"] = studies;
    points.push_back(jp);
  }
  root["points"] = points;
  return root.dump(2) + "\n";
}

namespace {

std::vector<std::size_t> ParseSizeList(const std::string& text, const std::string& where) {
  std::vector<std::size_t> out;
  if (ToLower(Trim(text)) == "default") return out;
  for (const std::string& part : Split(text, ',')) {
    const auto v = ParseInt(Trim(part), where);
    if (v < 1) throw Error(ErrorCode::kInvalidConfig, where + ": values must be >= 1");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void ApplyKey(SweepSeries& s, const KeyValueEntry& e, const std::string& origin) {
  const std::string where = origin + ":" + std::to_string(e.line) + ": " + e.key;
  StudyConfig& c = s.config;
  try {
    if (e.key == "item_grouping") {
      c.grouping = ParseItemGrouping(e.value);
    } else if (e.key == "load_balancing") {
      c.balancing = ParseLoadBalancing(e.value);
    } else if (e.key == "normalization") {
      c.normalization = ParseNormalization(e.value);
    } else if (e.key == "ratings_per_item") {
      c.ratings_per_item = static_cast<int>(ParseInt(e.value, where));
    } else if (e.key == "num_documents") {
      s.grid = ParseSizeList(e.value, where);
    } else if (e.key == "doc_resampling") {
      c.doc_resampling = ParseDocResampling(e.value);
    } else if (e.key == "n_simulations") {
      c.n_simulations = static_cast<int>(ParseInt(e.value, where));
    } else if (e.key == "n_permutations") {
      c.n_permutations = static_cast<int>(ParseInt(e.value, where));
    } else if (e.key == "alpha") {
      c.alpha = ParseDouble(e.value, where);
    } else if (e.key == "seed") {
      const auto v = ParseInt(e.value, where);
      if (v < 0) throw Error(ErrorCode::kInvalidConfig, "seed must be non-negative");
      c.master_seed = static_cast<std::uint64_t>(v);
    } else if (e.key == "max_retries") {
      c.max_retries = static_cast<int>(ParseInt(e.value, where));
    } else if (e.key == "strict_normalization") {
      c.strict_normalization = ParseBool(e.value, where);
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown key");
    }
  } catch (const Error& err) {
    const std::string msg = err.what();
    // Drop the code prefix already carried by the rethrown error.
    const std::size_t colon = msg.find(": ");
    throw Error(ErrorCode::kInvalidConfig,
                where + ": " + (colon == std::string::npos ? msg : msg.substr(colon + 2)));
  }
}

}  // namespace

std::vector<SweepSeries> ParseExperimentConfig(const KeyValueFile& file) {
  SweepSeries defaults;
  for (const KeyValueEntry& e : file.entries()) {
    if (e.section.empty()) ApplyKey(defaults, e, file.origin());
  }
  std::vector<SweepSeries> out;
  const auto& sections = file.Sections();
  if (sections.empty()) {
    defaults.config.name = "default";
    out.push_back(defaults);
  }
  for (const std::string& section : sections) {
    SweepSeries s = defaults;
    s.config.name = section;
    for (const KeyValueEntry& e : file.SectionEntries(section)) ApplyKey(s, e, file.origin());
    out.push_back(s);
  }
  for (const SweepSeries& s : out) {
    StudyConfig probe = s.config;
    probe.n_documents = s.grid.empty() ? 2 : s.grid.front();
    for (std::size_t n : s.grid) {
      probe.n_documents = n;
      probe.Validate();
    }
    if (s.grid.empty()) probe.Validate();
  }
  return out;
}

std::vector<SweepSeries> LoadExperimentConfig(const std::string& path) {
  return ParseExperimentConfig(KeyValueFile::Load(path));
}

std::string CanonicalExperimentText(const std::vector<SweepSeries>& series) {
  std::ostringstream out;
  for (const SweepSeries& s : series) {
    const StudyConfig& c = s.config;
    out << '[' << c.name << "]\n"
        << "item_grouping=" << ItemGroupingName(c.grouping) << '\n'
        << "load_balancing=" << LoadBalancingName(c.balancing) << '\n'
        << "normalization=" << NormalizationName(c.normalization) << '\n'
        << "ratings_per_item=" << c.ratings_per_item << '\n'
        << "num_documents=";
    if (s.grid.empty()) out << "default";
    for (std::size_t i = 0; i < s.grid.size(); ++i) out << (i ? "," : "") << s.grid[i];
    out << '\n'
        << "doc_resampling=" << DocResamplingName(c.doc_resampling) << '\n'
        << "n_simulations=" << c.n_simulations << '\n'
        << "n_permutations=" << c.n_permutations << '\n'
        << "alpha=" << FormatDouble(c.alpha) << '\n'
        << "seed=" << c.master_seed << '\n'
        << "max_retries=" << c.max_retries << '\n'
        << "strict_normalization=" << (c.strict_normalization ? "true" : "false") << '\n';
  }
  return out.str();
}

void SyntheticSpec::Validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidSpec, why); };
  if (n_documents < 1) fail("n_documents must be >= 1");
  if (segments_per_document < 1) fail("segments_per_document must be >= 1");
  if (n_systems < 2) fail("n_systems must be >= 2");
  if (n_buckets < 1) fail("n_buckets must be >= 1");
  if (raters_per_bucket < 1) fail("raters_per_bucket must be >= 1");
  if (n_documents < n_buckets) fail("n_documents must be >= n_buckets");
  if (!quality.empty() && quality.size() != n_systems) {
    fail("quality needs one value per system");
  }
  const std::size_t n_raters = n_buckets * raters_per_bucket;
  if (harshness.size() != 1 && harshness.size() != raters_per_bucket &&
      harshness.size() != n_raters) {
    fail("harshness needs 1, raters_per_bucket or n_buckets * raters_per_bucket values");
  }
  for (double h : harshness) {
    if (!(h >= 0.0) || !std::isfinite(h)) fail("harshness values must be finite and >= 0");
  }
  for (double v : {doc_sd, segment_sd, item_sd, noise_sd, style_sd, lognormal_sigma}) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail("standard deviations must be finite and >= 0");
  }
  if (!std::isfinite(base_mean)) fail("base_mean must be finite");
}

SyntheticSpec ParseSyntheticSpec(const KeyValueFile& file) {
  SyntheticSpec spec;
  auto count = [](const std::string& v, const std::string& where) {
    const auto n = ParseInt(v, where);
    if (n < 0) throw Error(ErrorCode::kInvalidSpec, where + " must be non-negative");
    return static_cast<std::size_t>(n);
  };
  auto list = [](const std::string& v, const std::string& where) {
    std::vector<double> out;
    for (const std::string& part : Split(v, ',')) out.push_back(ParseDouble(Trim(part), where));
    return out;
  };
  for (const KeyValueEntry& e : file.entries()) {
    const std::string where = file.origin() + ":" + std::to_string(e.line) + ": " + e.key;
    if (!e.section.empty()) throw Error(ErrorCode::kInvalidSpec, where + ": sections not allowed");
    try {
      if (e.key == "language_pair") spec.language_pair = e.value;
      else if (e.key == "n_documents") spec.n_documents = count(e.value, where);
      else if (e.key == "segments_per_document") spec.segments_per_document = count(e.value, where);
      else if (e.key == "n_systems") spec.n_systems = count(e.value, where);
      else if (e.key == "quality") spec.quality = list(e.value, where);
      else if (e.key == "n_buckets") spec.n_buckets = count(e.value, where);
      else if (e.key == "raters_per_bucket") spec.raters_per_bucket = count(e.value, where);
      else if (e.key == "harshness") spec.harshness = list(e.value, where);
      else if (e.key == "base_mean") spec.base_mean = ParseDouble(e.value, where);
      else if (e.key == "doc_sd") spec.doc_sd = ParseDouble(e.value, where);
      else if (e.key == "segment_sd") spec.segment_sd = ParseDouble(e.value, where);
      else if (e.key == "item_sd") spec.item_sd = ParseDouble(e.value, where);
      else if (e.key == "noise_sd") spec.noise_sd = ParseDouble(e.value, where);
      else if (e.key == "style_sd") spec.style_sd = ParseDouble(e.value, where);
      else if (e.key == "lognormal_sigma") spec.lognormal_sigma = ParseDouble(e.value, where);
      else if (e.key == "seed") spec.seed = count(e.value, where);
      else throw Error(ErrorCode::kInvalidSpec, where + ": unknown key");
    } catch (const Error& err) {
      if (err.code() == ErrorCode::kInvalidSpec) throw;
      throw Error(ErrorCode::kInvalidSpec, err.what());
    }
  }
  spec.Validate();
  return spec;
}

SyntheticSpec LoadSyntheticSpec(const std::string& path) {
  return ParseSyntheticSpec(KeyValueFile::Load(path));
}

RatingDataset GenerateSynthetic(const SyntheticSpec& spec) {
  spec.Validate();
  Rng rng(spec.seed);
  const std::size_t n_raters = spec.n_buckets * spec.raters_per_bucket;
  std::vector<double> quality = spec.quality;
  if (quality.empty()) {
    for (std::size_t s = 0; s < spec.n_systems; ++s) {
      quality.push_back(static_cast<double>(s) / static_cast<double>(spec.n_systems - 1));
    }
  }
  auto harshness = [&](std::size_t bucket, std::size_t pos) {
    if (spec.harshness.size() == 1) return spec.harshness[0];
    if (spec.harshness.size() == n_raters) {
      return spec.harshness[bucket * spec.raters_per_bucket + pos];
    }
    return spec.harshness[pos];
  };
  const double sigma = spec.lognormal_sigma;

  DatasetBuilder builder(spec.language_pair, true);
  for (std::size_t d = 0; d < spec.n_documents; ++d) {
    const std::size_t bucket = d * spec.n_buckets / spec.n_documents;
    const std::string doc_id = "doc" + std::to_string(d + 1);
    const std::string bucket_id = "b" + std::to_string(bucket + 1);
    const double base = spec.base_mean + spec.doc_sd * rng.Normal();
    std::vector<double> seg(spec.segments_per_document);
    for (double& v : seg) v = spec.segment_sd * rng.Normal();
    std::vector<double> item(spec.n_systems);
    for (double& v : item) v = spec.item_sd * rng.Normal();
    std::vector<double> style(spec.raters_per_bucket);
    for (double& v : style) v = spec.style_sd * rng.Normal();
    for (std::size_t g = 0; g < spec.segments_per_document; ++g) {
      for (std::size_t s = 0; s < spec.n_systems; ++s) {
        const double latent = base + seg[g] + quality[s] + item[s];
        for (std::size_t p = 0; p < spec.raters_per_bucket; ++p) {
          const double noise = spec.noise_sd * rng.Normal();
          const double z = rng.Normal();
          double v = harshness(bucket, p) * (latent + noise + style[p]);
          if (sigma > 0.0) v *= std::exp(sigma * z - 0.5 * sigma * sigma);
          const long k = std::lround(std::max(0.0, v));
          RatingRow row;
          row.doc_id = doc_id;
          row.seg_index = static_cast<std::int64_t>(g);
          row.system_id = "sys" + std::to_string(s + 1);
          row.rater_id = "r" + std::to_string(bucket * spec.raters_per_bucket + p + 1);
          row.bucket_id = bucket_id;
          if (k == 0) {
            builder.AddRow(row);
            continue;
          }
          for (long i = 0; i < k / 5; ++i) {
            row.annotation = ErrorAnnotation{"Accuracy/Mistranslation", Severity::kMajor, {}};
            builder.AddRow(row);
          }
          for (long i = 0; i < k % 5; ++i) {
            row.annotation = ErrorAnnotation{"Fluency/Grammar", Severity::kMinor, {}};
            builder.AddRow(row);
          }
        }
      }
    }
  }
  return std::move(builder).Build(WeightTable::Default());
}

}  // namespace evalstab
