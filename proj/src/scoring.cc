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

#include "evalstab/scoring.h"

#include <cmath>

namespace evalstab {

namespace {

int SeverityIndex(Severity s) { return s == Severity::kMajor ? 0 : 1; }

// True when `prefix` equals `category` or is a leading run of its
// "/"-separated components.
bool IsComponentPrefix(std::string_view prefix, std::string_view category) {
  if (prefix.size() > category.size()) return false;
  if (category.substr(0, prefix.size()) != prefix) return false;
  return prefix.size() == category.size() || prefix.empty() || category[prefix.size()] == '/';
}

}  // namespace

WeightTable::WeightTable(double major_default, double minor_default)
    : defaults_{major_default, minor_default} {
  if (!(major_default >= 0.0) || !(minor_default >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "weights must be non-negative");
  }
}

WeightTable WeightTable::Default() {
  WeightTable t(5.0, 1.0);
  t.SetOverride(Severity::kMinor, "Fluency/Punctuation", 0.1);
  t.SetOverride(std::nullopt, "Non-translation", 25.0);
  return t;
}

void WeightTable::SetOverride(std::optional<Severity> severity, std::string_view prefix,
                              double weight) {
  if (!(weight >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "weights must be non-negative");
  for (Override& o : overrides_) {
    if (o.severity == severity && o.prefix == prefix) {
      o.weight = weight;
      return;
    }
  }
  overrides_.push_back({severity, std::string(prefix), weight});
}

double WeightTable::Weight(Severity severity, std::string_view category) const {
  const Override* best = nullptr;
  for (const Override& o : overrides_) {
    if (o.severity && *o.severity != severity) continue;
    if (!IsComponentPrefix(o.prefix, category)) continue;
    if (!best || o.prefix.size() > best->prefix.size() ||
        (o.prefix.size() == best->prefix.size() && o.severity && !best->severity)) {
      best = &o;
    }
  }
  return best ? best->weight : defaults_[SeverityIndex(severity)];
}

WeightTable WeightTable::FromKeyValues(const KeyValueFile& file) {
  std::optional<double> major, minor;
  struct Pending {
    std::optional<Severity> severity;
    std::string prefix;
    double weight;
  };
  std::vector<Pending> pending;
  for (const KeyValueEntry& e : file.entries()) {
    const std::string where = file.origin() + ":" + std::to_string(e.line) + ": ";
    if (!e.section.empty()) throw Error(ErrorCode::kInvalidConfig, where + "weights take no sections");
    const double w = ParseDouble(e.value, where + "weight");
    if (!(w >= 0.0)) throw Error(ErrorCode::kInvalidConfig, where + "weights must be non-negative");
    const std::size_t colon = e.key.find(':');
    const std::string sev_text(Trim(std::string_view(e.key).substr(0, colon)));
    std::optional<Severity> severity;
    if (sev_text != "*") {
      severity = ParseSeverity(sev_text);
      if (!severity) {
        throw Error(ErrorCode::kInvalidConfig, where + "unknown severity '" + sev_text + "'");
      }
    }
    if (colon == std::string::npos) {
      if (!severity) throw Error(ErrorCode::kInvalidConfig, where + "'*' needs a category prefix");
      (*severity == Severity::kMajor ? major : minor) = w;
    } else {
      pending.push_back({severity, std::string(Trim(std::string_view(e.key).substr(colon + 1))), w});
    }
  }
  if (!major || !minor) {
    throw Error(ErrorCode::kInvalidConfig,
                file.origin() + ": weight table needs defaults for both Major and Minor");
  }
  WeightTable t(*major, *minor);
  for (const Pending& p : pending) t.SetOverride(p.severity, p.prefix, p.weight);
  return t;
}

WeightTable WeightTable::Load(const std::string& path) {
  return FromKeyValues(KeyValueFile::Load(path));
}

double SegmentScore(std::span<const ErrorAnnotation> annotations, const WeightTable& weights) {
  double total = 0.0;
  for (const ErrorAnnotation& a : annotations) total += weights.Weight(a.severity, a.category);
  return total;
}

std::string_view NormalizationName(NormalizationScheme scheme) {
  switch (scheme) {
    case NormalizationScheme::kUnnormalized: return "unnormalized";
    case NormalizationScheme::kMeanNormalized: return "mean";
    case NormalizationScheme::kErrorNormalized: return "error";
    case NormalizationScheme::kZScoreNormalized: return "z_score";
  }
  return "unknown";
}

NormalizationScheme ParseNormalization(std::string_view text) {
  const std::string v = ToLower(Trim(text));
  if (v == "unnormalized" || v == "none") return NormalizationScheme::kUnnormalized;
  if (v == "mean" || v == "mean_normalized") return NormalizationScheme::kMeanNormalized;
  if (v == "error" || v == "error_normalized") return NormalizationScheme::kErrorNormalized;
  if (v == "z_score" || v == "zscore" || v == "z_score_normalized") {
    return NormalizationScheme::kZScoreNormalized;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown normalization '" + std::string(text) +
                  "' (expected unnormalized, mean, error or z_score)");
}

std::vector<RaterStats> ComputeRaterStats(const ScoredStudy& study) {
  std::vector<RaterStats> stats(study.raters.size());
  std::vector<double> sum(study.raters.size(), 0.0);
  for (std::size_t i = 0; i < study.scores.size(); ++i) {
    const std::uint32_t r = study.rater_of[i];
    ++stats[r].n;
    sum[r] += study.scores[i];
    if (study.has_error_counts) stats[r].errors += study.error_counts[i];
  }
  std::vector<double> sq(study.raters.size(), 0.0);
  for (std::size_t r = 0; r < stats.size(); ++r) {
    if (stats[r].n) stats[r].mean = sum[r] / static_cast<double>(stats[r].n);
  }
  for (std::size_t i = 0; i < study.scores.size(); ++i) {
    const std::uint32_t r = study.rater_of[i];
    const double dev = study.scores[i] - stats[r].mean;
    sq[r] += dev * dev;
  }
  for (std::size_t r = 0; r < stats.size(); ++r) {
    if (stats[r].n > 1) stats[r].sd = std::sqrt(sq[r] / static_cast<double>(stats[r].n - 1));
  }
  return stats;
}

namespace {

double StudyMean(const ScoredStudy& study) {
  if (study.scores.empty()) return 0.0;
  double sum = 0.0;
  for (double x : study.scores) sum += x;
  return sum / static_cast<double>(study.scores.size());
}

// Factors f_r = M / m_r that give every rater the study-wide mean M.
std::vector<double> MeanFactors(const ScoredStudy& study, const std::vector<RaterStats>& stats,
                                const NormalizeOptions& options) {
  const double overall = StudyMean(study);
  std::vector<double> factor(stats.size(), 1.0);
  for (std::size_t r = 0; r < stats.size(); ++r) {
    if (stats[r].n == 0) continue;
    if (stats[r].mean == 0.0) {
      if (options.strict) {
        throw Error(ErrorCode::kDegenerateRater,
                    "rater '" + study.raters[r] + "' has a zero mean score in this study");
      }
      continue;
    }
    factor[r] = overall / stats[r].mean;
  }
  return factor;
}

}  // namespace

ScoredStudy Normalize(const ScoredStudy& study, NormalizationScheme scheme,
                      const NormalizeOptions& options) {
  ScoredStudy out = study;
  if (scheme == NormalizationScheme::kUnnormalized) return out;
  const std::vector<RaterStats> stats = ComputeRaterStats(study);

  switch (scheme) {
    case NormalizationScheme::kUnnormalized:
      break;
    case NormalizationScheme::kMeanNormalized: {
      const auto factor = MeanFactors(study, stats, options);
      for (std::size_t i = 0; i < out.scores.size(); ++i) out.scores[i] *= factor[out.rater_of[i]];
      break;
    }
    case NormalizationScheme::kErrorNormalized: {
      if (!study.has_error_counts) {
        throw Error(ErrorCode::kInvalidArgument,
                    "error normalization needs annotation-derived error counts");
      }
      const auto factor = MeanFactors(study, stats, options);
      // c = N_total / sum_r N_r E_r keeps the study mean after scaling by c E_r.
      double weighted = 0.0;
      for (const RaterStats& s : stats) weighted += static_cast<double>(s.n) * static_cast<double>(s.errors);
      if (weighted == 0.0) {
        if (options.strict) {
          throw Error(ErrorCode::kDegenerateRater, "no errors annotated in this study");
        }
        for (std::size_t i = 0; i < out.scores.size(); ++i) out.scores[i] *= factor[out.rater_of[i]];
        break;
      }
      const double c = static_cast<double>(study.scores.size()) / weighted;
      for (std::size_t i = 0; i < out.scores.size(); ++i) {
        const std::uint32_t r = out.rater_of[i];
        out.scores[i] *= factor[r] * c * static_cast<double>(stats[r].errors);
      }
      break;
    }
    case NormalizationScheme::kZScoreNormalized: {
      for (std::size_t i = 0; i < out.scores.size(); ++i) {
        const RaterStats& s = stats[out.rater_of[i]];
        // A constant rater maps to 0.
        out.scores[i] = s.sd > 0.0 ? (out.scores[i] - s.mean) / s.sd : 0.0;
      }
      break;
    }
  }
  return out;
}

std::vector<double> EffectiveScores(const ScoredStudy& study) {
  const std::size_t n_sys = study.systems.size();
  const std::size_t n_seg = study.n_segments();
  const std::size_t k = static_cast<std::size_t>(study.ratings_per_item);
  std::vector<double> out(n_sys * n_seg, 0.0);
  for (std::size_t g = 0; g < n_seg; ++g) {
    for (std::size_t s = 0; s < n_sys; ++s) {
      const std::size_t base = (g * n_sys + s) * k;
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) sum += study.scores[base + j];
      out[s * n_seg + g] = sum / static_cast<double>(k);
    }
  }
  return out;
}

std::vector<double> SystemMeans(const ScoredStudy& study) {
  const std::vector<double> eff = EffectiveScores(study);
  const std::size_t n_seg = study.n_segments();
  std::vector<double> means(study.systems.size(), 0.0);
  if (n_seg == 0) return means;
  for (std::size_t s = 0; s < means.size(); ++s) {
    double sum = 0.0;
    for (std::size_t g = 0; g < n_seg; ++g) sum += eff[s * n_seg + g];
    means[s] = sum / static_cast<double>(n_seg);
  }
  return means;
}

std::map<std::string, double> SystemMeanMap(const ScoredStudy& study) {
  const auto means = SystemMeans(study);
  std::map<std::string, double> out;
  for (std::size_t s = 0; s < means.size(); ++s) out[study.systems[s]] = means[s];
  return out;
}

}  // namespace evalstab
