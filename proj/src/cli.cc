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

#include "evalstab/cli.h"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evalstab/assignment.h"
#include "evalstab/experiment.h"
#include "evalstab/scoring.h"
#include "evalstab/stats.h"

namespace evalstab {

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string DatasetFingerprint(const RatingDataset& dataset) {
  return Sha256Hex(CanonicalTsv(dataset));
}

namespace {

struct CommonInputs {
  std::string dataset;
  std::string mapping;
  std::string weights;
};

void AddInputs(CLI::App* cmd, CommonInputs& in, bool dataset_required = true) {
  auto* opt = cmd->add_option("--dataset", in.dataset, "Ratings TSV");
  if (dataset_required) opt->required();
  cmd->add_option("--mapping", in.mapping, "Column mapping file");
  cmd->add_option("--weights", in.weights, "Error weight table");
}

WeightTable LoadWeights(const CommonInputs& in) {
  return in.weights.empty() ? WeightTable::Default() : WeightTable::Load(in.weights);
}

RatingDataset LoadDataset(const CommonInputs& in) {
  const ColumnMapping mapping =
      in.mapping.empty() ? ColumnMapping::Canonical() : ColumnMapping::Load(in.mapping);
  return Ingest(in.dataset, mapping, LoadWeights(in));
}

std::string Fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void PrintStats(const RatingDataset& ds, std::ostream& out) {
  const DatasetStats st = ComputeStats(ds);
  out << "language_pair\t" << ds.language_pair() << "\n"
      << "documents\t" << st.n_documents << "\n"
      << "segments\t" << st.n_segments << "\n"
      << "segments_per_document\t" << st.min_segments_per_doc << ".."
      << st.max_segments_per_doc << "\n"
      << "raters\t" << st.n_raters << "\n"
      << "systems\t" << st.n_systems << "\n"
      << "item_ratings\t" << st.n_item_ratings << "\n"
      << "segment_ratings\t" << st.n_segment_ratings << "\n";
}

std::filesystem::path PrepareOutDir(const std::string& out) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + out + "': " + ec.message());
  return dir;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
}

std::string UtcNow() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int CmdValidate(const CommonInputs& in, std::ostream& out) {
  const RatingDataset ds = LoadDataset(in);
  out << "OK " << in.dataset << "\n";
  PrintStats(ds, out);
  return kExitOk;
}

int CmdStats(const CommonInputs& in, std::ostream& out) {
  const RatingDataset ds = LoadDataset(in);
  PrintStats(ds, out);
  out << "\nbucket\traters\tdocuments\n";
  for (const BucketLayoutEntry& b : BucketLayout(ds)) {
    out << b.bucket_id << '\t';
    for (std::size_t i = 0; i < b.rater_ids.size(); ++i) out << (i ? "," : "") << b.rater_ids[i];
    out << '\t' << b.n_documents << '\n';
  }
  std::vector<std::size_t> all(ds.documents().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (ds.raters().size() >= 2 && !all.empty()) {
    const EntropyRange r =
        InstantiableEntropyRange(ds, all, ItemGrouping::kPseudoSideBySide, 1);
    out << "\nworkload_entropy_min\t" << Fixed(r.min, 4) << "\n"
        << "workload_entropy_max\t" << Fixed(r.max, 4) << "\n";
  }
  out << "\nsystem\tmean_score\n";
  // Dataset-wide means over every rating of each system.
  std::vector<double> sum(ds.systems().size(), 0.0);
  std::vector<std::size_t> n(ds.systems().size(), 0);
  for (std::size_t d = 0; d < ds.documents().size(); ++d) {
    const std::size_t arity = ds.BucketRaters(d).size();
    for (std::size_t g = 0; g < ds.documents()[d].n_segments; ++g) {
      for (std::size_t s = 0; s < ds.systems().size(); ++s) {
        for (std::size_t k = 0; k < arity; ++k) {
          sum[s] += ds.Cell(d, g, s, k).score;
          ++n[s];
        }
      }
    }
  }
  for (std::size_t s = 0; s < ds.systems().size(); ++s) {
    out << ds.systems()[s] << '\t'
        << Fixed(n[s] ? sum[s] / static_cast<double>(n[s]) : 0.0, 4) << '\n';
  }
  return kExitOk;
}

int CmdAgreement(const CommonInputs& in, const std::string& out_dir, int max_score,
                 std::ostream& out) {
  const RatingDataset ds = LoadDataset(in);
  const auto dir = PrepareOutDir(out_dir);
  std::ostringstream csv;
  csv << "granularity,rater_a,rater_b,shared_documents,documents_used,tau\n";
  std::optional<double> grand[2];
  const AgreementGranularity kinds[2] = {AgreementGranularity::kSingleDocument,
                                         AgreementGranularity::kAllShared};
  const char* names[2] = {"single_document", "all_shared"};
  for (int i = 0; i < 2; ++i) {
    const AgreementTable t = RaterAgreement(ds, kinds[i]);
    grand[i] = t.grand_mean;
    for (const PairAgreement& p : t.pairs) {
      csv << names[i] << ',' << p.rater_a << ',' << p.rater_b << ',' << p.shared_documents
          << ',' << p.documents_used << ',' << (p.tau ? Fixed(*p.tau, 6) : "") << '\n';
    }
  }
  for (int i = 0; i < 2; ++i) {
    csv << names[i] << ",*,*,,," << (grand[i] ? Fixed(*grand[i], 6) : "") << '\n';
  }
  WriteText(dir / "agreement.csv", csv.str());

  std::ostringstream hist;
  hist << "rater,bin_low,bin_high,count\n";
  const std::vector<double> edges = UnitBins(max_score);
  std::ostringstream summary;
  summary << "rater,n,mean,median,outside\n";
  for (const std::string& r : ds.raters()) {
    const Histogram h = RaterDistribution(ds, r, edges);
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      hist << r << ',' << FormatDouble(h.edges[b]) << ',' << FormatDouble(h.edges[b + 1]) << ','
           << h.counts[b] << '\n';
    }
    summary << r << ',' << h.n << ',' << Fixed(h.mean, 6) << ',' << Fixed(h.median, 6) << ','
            << h.outside << '\n';
  }
  WriteText(dir / "histograms.csv", hist.str());
  WriteText(dir / "rater_summary.csv", summary.str());
  out << "grand_mean_tau\tsingle_document\t" << (grand[0] ? Fixed(*grand[0], 4) : "n/a")
      << "\tall_shared\t" << (grand[1] ? Fixed(*grand[1], 4) : "n/a") << "\n";
  return kExitOk;
}

int CmdGen(const std::string& spec_path, std::optional<std::uint64_t> seed,
           const std::string& out_path, std::ostream& out) {
  SyntheticSpec spec = spec_path.empty() ? SyntheticSpec{} : LoadSyntheticSpec(spec_path);
  if (seed) spec.seed = *seed;
  const RatingDataset ds = GenerateSynthetic(spec);
  const std::filesystem::path p(out_path);
  if (p.has_parent_path()) PrepareOutDir(p.parent_path().string());
  WriteText(p, CanonicalTsv(ds));
  out << "wrote " << out_path << " (" << ds.documents().size() << " documents, "
      << ds.systems().size() << " systems, " << ds.raters().size() << " raters)\n";
  return kExitOk;
}

StudyConfig ResolveStudyConfig(const std::string& config_path, const std::string& name) {
  if (config_path.empty()) return StudyConfig{};
  const auto series = LoadExperimentConfig(config_path);
  for (const SweepSeries& s : series) {
    if (name.empty() || s.config.name == name) return s.config;
  }
  throw Error(ErrorCode::kInvalidConfig, "no configuration named '" + name + "'");
}

int CmdSimulate(const CommonInputs& in, const std::string& config_path, const std::string& name,
                std::optional<std::size_t> n_docs, std::optional<std::uint64_t> seed,
                std::ostream& out) {
  const RatingDataset ds = LoadDataset(in);
  StudyConfig config = ResolveStudyConfig(config_path, name);
  config.n_documents = n_docs ? *n_docs : ds.documents().size();
  if (seed) config.master_seed = *seed;
  const StudyOutcome o = SimulateStudy(ds, config, config.master_seed);
  const RankingResult& r = o.ranking;
  out << "documents\t" << o.study.documents.size() << "\n"
      << "workload_entropy\t" << Fixed(PlanEntropy(ds, o.study.plan), 4) << "\n\n";
  std::vector<std::size_t> order(r.systems.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r.means[a] < r.means[b]; });
  out << "rank\tsystem\tmean\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    out << i + 1 << '\t' << r.systems[order[i]] << '\t' << Fixed(r.means[order[i]], 6) << '\n';
  }
  out << "\nsignificance (row significantly better than column, alpha "
      << FormatDouble(config.alpha) << ")\n";
  for (std::size_t i : order) out << '\t' << r.systems[i];
  out << '\n';
  for (std::size_t i : order) {
    out << r.systems[i];
    for (std::size_t j : order) out << '\t' << (r.matrix.Significant(i, j) ? '*' : '.');
    out << '\n';
  }
  return kExitOk;
}

int CmdSweep(const CommonInputs& in, const std::string& config_path, const std::string& out_dir,
             std::optional<std::uint64_t> seed, int threads, bool with_matrices,
             std::ostream& out, std::ostream& err) {
  const std::string started = UtcNow();
  const RatingDataset ds = LoadDataset(in);
  std::vector<SweepSeries> series = LoadExperimentConfig(config_path);
  if (seed) {
    for (SweepSeries& s : series) s.config.master_seed = *seed;
  }
  const auto dir = PrepareOutDir(out_dir);
  SweepOptions options;
  options.threads = threads;
  options.keep_studies = true;
  options.progress = [&](const SweepPoint& p, std::size_t done, std::size_t total) {
    err << "[" << done << "/" << total << "] " << series[p.config_index].config.name
        << " n=" << p.n_documents << " "
        << (p.srp ? "srp=" + Fixed(*p.srp, 4) : p.status) << "\n";
  };
  const SweepResult result = RunSweep(ds, series, options);

  std::ostringstream csv;
  WriteSweepCsv(result, csv);
  WriteText(dir / "sweep.csv", csv.str());
  WriteText(dir / "sweep.json", SweepJson(result, with_matrices));

  nlohmann::ordered_json manifest;
  manifest["tool"] = "evalstab";
  manifest["version"] = std::string(kVersion);
  manifest["config_hash"] = Sha256Hex(CanonicalExperimentText(series));
  nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
  for (const SweepSeries& s : series) seeds.push_back(s.config.master_seed);
  manifest["master_seeds"] = seeds;
  manifest["dataset"] = in.dataset;
  manifest["dataset_fingerprint"] = DatasetFingerprint(ds);
  manifest["started_at"] = started;
  manifest["finished_at"] = UtcNow();
  WriteText(dir / "manifest.json", manifest.dump(2) + "\n");

  int failed = 0;
  for (const SweepPoint& p : result.points) {
    if (p.status != "ok") {
      ++failed;
      err << series[p.config_index].config.name << " n=" << p.n_documents << ": " << p.message
          << "\n";
    }
  }
  out << "wrote " << (dir / "sweep.csv").string() << " (" << result.points.size() << " points";
  if (failed) out << ", " << failed << " failed";
  out << ")\n";
  return failed ? kExitRuntime : kExitOk;
}

bool IsValidationCode(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kParseError:
    case ErrorCode::kMissingColumn:
    case ErrorCode::kIncompleteRatings:
    case ErrorCode::kInconsistentBuckets:
    case ErrorCode::kScoreMismatch:
    case ErrorCode::kInvalidSpec:
    case ErrorCode::kInvalidConfig:
      return true;
    default:
      return false;
  }
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"MQM human evaluation stability toolkit", "evalstab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonInputs in;
  std::string config_path, out_path, spec_path, name;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_docs;
  int threads = 1;
  int max_score = 25;
  bool with_matrices = false;

  auto* validate = app.add_subcommand("validate", "Check a ratings file");
  AddInputs(validate, in);
  auto* stats = app.add_subcommand("stats", "Dataset counts, bucket layout, system means");
  AddInputs(stats, in);
  auto* agreement = app.add_subcommand("agreement", "Rater agreement and score histograms");
  AddInputs(agreement, in);
  agreement->add_option("--out", out_path, "Output directory")->required();
  agreement->add_option("--max-score", max_score, "Highest histogram bin")->check(CLI::NonNegativeNumber);
  auto* gen = app.add_subcommand("gen", "Write a synthetic ratings file");
  gen->add_option("--spec", spec_path, "Generator spec (defaults when omitted)");
  gen->add_option("--out", out_path, "Output TSV")->required();
  gen->add_option("--seed", seed, "Overrides the generator seed");
  auto* simulate = app.add_subcommand("simulate", "Simulate one study and print its ranking");
  AddInputs(simulate, in);
  simulate->add_option("--config", config_path, "Experiment config");
  simulate->add_option("--name", name, "Configuration (section) to use; first by default");
  simulate->add_option("--num-documents", n_docs, "Document budget (default: all)");
  simulate->add_option("--seed", seed, "Study seed");
  auto* sweep = app.add_subcommand("sweep", "Run an SRP sweep");
  AddInputs(sweep, in);
  sweep->add_option("--config", config_path, "Experiment config")->required();
  sweep->add_option("--out", out_path, "Output directory")->required();
  sweep->add_option("--seed", seed, "Overrides every configuration's seed");
  sweep->add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  sweep->add_flag("--with-matrices", with_matrices, "Store significant pairs per study in JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (const auto subs = app.get_subcommands(); !subs.empty()) {
      err << subs.front()->help();
    } else {
      err << app.help();
    }
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return CmdValidate(in, out);
    if (stats->parsed()) return CmdStats(in, out);
    if (agreement->parsed()) return CmdAgreement(in, out_path, max_score, out);
    if (gen->parsed()) return CmdGen(spec_path, seed, out_path, out);
    if (simulate->parsed()) return CmdSimulate(in, config_path, name, n_docs, seed, out);
    if (sweep->parsed()) {
      return CmdSweep(in, config_path, out_path, seed, threads, with_matrices, out, err);
    }
  } catch (const IngestError& e) {
    err << "invalid dataset " << in.dataset << ":\n";
    for (const ValidationIssue& issue : e.issues()) {
      err << "  ";
      if (issue.line > 0) err << "line " << issue.line << ": ";
      err << ErrorCodeName(issue.code) << ": " << issue.message << "\n";
    }
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return IsValidationCode(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace evalstab
