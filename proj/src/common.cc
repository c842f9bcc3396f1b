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

#include "evalstab/common.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace evalstab {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kIncompleteRatings: return "IncompleteRatings";
    case ErrorCode::kInconsistentBuckets: return "InconsistentBuckets";
    case ErrorCode::kScoreMismatch: return "ScoreMismatch";
    case ErrorCode::kDegenerateRater: return "DegenerateRater";
    case ErrorCode::kMismatchedDocuments: return "MismatchedDocuments";
    case ErrorCode::kSystemSetMismatch: return "SystemSetMismatch";
    case ErrorCode::kNoAdmissiblePairs: return "NoAdmissiblePairs";
    case ErrorCode::kEmptyWorkload: return "EmptyWorkload";
    case ErrorCode::kNoSharedDocuments: return "NoSharedDocuments";
    case ErrorCode::kUnknownRater: return "UnknownRater";
    case ErrorCode::kTargetUnreachable: return "TargetUnreachable";
    case ErrorCode::kBucketArityUnsupported: return "BucketArityUnsupported";
    case ErrorCode::kQuotaExceedsBucket: return "QuotaExceedsBucket";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

std::uint64_t Rng::UniformInt(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "UniformInt(0)");
  // Lemire's multiply-shift with rejection; unbiased.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::UniformDouble() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - UniformDouble();
  const double u2 = UniformDouble();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t root,
                         std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = SplitMix(root);
  for (std::uint64_t k : keys) h = SplitMix(h ^ SplitMix(k + 0x632be59bd9b4e019ULL));
  return h;
}

bool NaturalLess(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      std::string_view na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> Split(std::string_view s, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

double ParseDouble(std::string_view text, std::string_view what) {
  text = Trim(text);
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError, std::string(what) + ": expected a number, got '" +
                                            std::string(text) + "'");
  }
  return value;
}

std::int64_t ParseInt(std::string_view text, std::string_view what) {
  text = Trim(text);
  std::int64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError, std::string(what) + ": expected an integer, got '" +
                                            std::string(text) + "'");
  }
  return value;
}

bool ParseBool(std::string_view text, std::string_view what) {
  const std::string v = ToLower(Trim(text));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::kParseError,
              std::string(what) + ": expected a boolean, got '" + std::string(text) + "'");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KeyValueFile KeyValueFile::Parse(std::string_view text, std::string_view origin) {
  KeyValueFile file;
  file.origin_ = std::string(origin);
  std::string section;
  int line_no = 0;
  for (const std::string& raw : Split(text, '\n')) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw Error(ErrorCode::kParseError, file.origin_ + ":" + std::to_string(line_no) +
                                                ": unterminated section header");
      }
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      if (section.empty()) {
        throw Error(ErrorCode::kParseError,
                    file.origin_ + ":" + std::to_string(line_no) + ": empty section name");
      }
      if (std::find(file.sections_.begin(), file.sections_.end(), section) !=
          file.sections_.end()) {
        throw Error(ErrorCode::kParseError, file.origin_ + ":" + std::to_string(line_no) +
                                                ": duplicate section [" + section + "]");
      }
      file.sections_.push_back(section);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError, file.origin_ + ":" + std::to_string(line_no) +
                                              ": expected 'key = value'");
    }
    KeyValueEntry entry;
    entry.section = section;
    entry.key = std::string(Trim(line.substr(0, eq)));
    entry.value = std::string(Trim(line.substr(eq + 1)));
    entry.line = line_no;
    if (entry.key.empty()) {
      throw Error(ErrorCode::kParseError,
                  file.origin_ + ":" + std::to_string(line_no) + ": empty key");
    }
    file.entries_.push_back(std::move(entry));
  }
  return file;
}

KeyValueFile KeyValueFile::Load(const std::string& path) {
  return Parse(ReadFile(path), path);
}

std::vector<KeyValueEntry> KeyValueFile::SectionEntries(std::string_view section) const {
  std::vector<KeyValueEntry> out;
  for (const auto& e : entries_) {
    if (e.section == section) out.push_back(e);
  }
  return out;
}

}  // namespace evalstab
