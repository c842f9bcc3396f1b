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

// Shared plumbing: error type, seeded RNG, id ordering and the flat
// key-value file format used by every config file in the toolkit.

#ifndef EVALSTAB_COMMON_H_
#define EVALSTAB_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evalstab {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParseError,
  kMissingColumn,
  kIncompleteRatings,
  kInconsistentBuckets,
  kScoreMismatch,
  kDegenerateRater,
  kMismatchedDocuments,
  kSystemSetMismatch,
  kNoAdmissiblePairs,
  kEmptyWorkload,
  kNoSharedDocuments,
  kUnknownRater,
  kTargetUnreachable,
  kBucketArityUnsupported,
  kQuotaExceedsBucket,
  kInvalidSpec,
  kInvalidConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Seeded generator. The engine is mt19937_64 (bit-exact across standard
// libraries); the derived draws below are implemented here rather than via
// <random> distributions so that outputs do not depend on the standard
// library vendor.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return engine_(); }

  // Uniform on [0, n). n must be > 0.
  std::uint64_t UniformInt(std::uint64_t n);
  // Uniform on [0, 1) with 53 bits of precision.
  double UniformDouble();
  double Normal();
  bool Bernoulli() { return (engine_() >> 63) != 0; }

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[UniformInt(i)]);
    }
  }
  template <typename T>
  void Shuffle(std::vector<T>& values) {
    Shuffle(std::span<T>(values));
  }

 private:
  std::mt19937_64 engine_;
};

// Counter-based seed split: mixes a root seed with a sequence of keys via
// SplitMix64 finalization. Distinct key sequences give independent streams.
std::uint64_t DeriveSeed(std::uint64_t root,
                         std::initializer_list<std::uint64_t> keys);

// Ordering for identifiers: digit runs compare numerically, so "doc2" sorts
// before "doc10". Falls back to plain comparison to stay a strict order.
bool NaturalLess(std::string_view a, std::string_view b);

struct NaturalLessFn {
  bool operator()(std::string_view a, std::string_view b) const {
    return NaturalLess(a, b);
  }
};

std::string_view Trim(std::string_view s);
std::vector<std::string> Split(std::string_view s, char delimiter);
std::string ToLower(std::string_view s);

// Shortest representation that parses back to the identical double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view text, std::string_view what);
std::int64_t ParseInt(std::string_view text, std::string_view what);
bool ParseBool(std::string_view text, std::string_view what);

std::string ReadFile(const std::string& path);

// Flat, optionally sectioned key-value text:
//
//   # comment
//   key = value
//   [section name]
//   key = value
//
// Entries keep file order. Keys before the first section header belong to
// the unnamed section "".
struct KeyValueEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

class KeyValueFile {
 public:
  static KeyValueFile Parse(std::string_view text, std::string_view origin);
  static KeyValueFile Load(const std::string& path);

  const std::vector<KeyValueEntry>& entries() const { return entries_; }
  // Section names in order of first appearance, excluding "".
  const std::vector<std::string>& Sections() const { return sections_; }
  std::vector<KeyValueEntry> SectionEntries(std::string_view section) const;
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::vector<std::string> sections_;
  std::vector<KeyValueEntry> entries_;
};

}  // namespace evalstab

#endif  // EVALSTAB_COMMON_H_
