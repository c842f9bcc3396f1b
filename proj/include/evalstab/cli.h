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

#ifndef EVALSTAB_CLI_H_
#define EVALSTAB_CLI_H_

#include <iosfwd>
#include <string>
#include <string_view>

#include "evalstab/corpus.h"

namespace evalstab {

inline constexpr std::string_view kVersion = "0.1.0";

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

std::string Sha256Hex(std::string_view data);
// Hash of the canonical TSV form; changes iff a rating changes.
std::string DatasetFingerprint(const RatingDataset& dataset);

// Runs one subcommand (validate, stats, agreement, gen, simulate, sweep).
// Reports go to `out`, diagnostics and progress to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace evalstab

#endif  // EVALSTAB_CLI_H_
