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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "evalstab/common.h"
#include "evalstab/scoring.h"

namespace evalstab {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "evalstab");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void Spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("evalstab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    data_ = (dir_ / "data.tsv").string();
    const RunResult g = Invoke({"gen", "--out", data_, "--seed", "4"});
    ASSERT_EQ(g.code, kExitOk) << g.err;
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  std::string data_;
};

TEST_F(CliTest, GenThenValidate) {
  const RunResult r = Invoke({"validate", "--dataset", data_});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("OK " + data_), std::string::npos);
  EXPECT_NE(r.out.find("documents\t40"), std::string::npos);
}

TEST_F(CliTest, MissingRatingFailsValidation) {
  // Drop every row of the first (document, segment, system, rater).
  const std::vector<std::string> lines = Split(Slurp(data_), '\n');
  const std::vector<std::string> first = Split(lines[1], '\t');
  const std::string key = first[0] + '\t' + first[1] + '\t' + first[2] + '\t' + first[3] + '\t';
  std::string text;
  for (const std::string& line : lines) {
    if (line.empty() || line.rfind(key, 0) == 0) continue;
    text += line + "\n";
  }
  Spit(dir_ / "bad.tsv", text);
  const RunResult r = Invoke({"validate", "--dataset", (dir_ / "bad.tsv").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("IncompleteRatings"), std::string::npos) << r.err;
}

TEST_F(CliTest, BadSeverityFailsValidation) {
  std::string text = Slurp(data_);
  const std::size_t at = text.find("\tMajor\t");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 7, "\tFatal\t");
  Spit(dir_ / "bad.tsv", text);
  const RunResult r = Invoke({"validate", "--dataset", (dir_ / "bad.tsv").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("line "), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("Fatal"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"validate"}).code, kExitUsage);
  EXPECT_EQ(Invoke({"sweep", "--dataset", data_, "--out", dir_.string()}).code, kExitUsage);
  EXPECT_EQ(Invoke({"validate", "--dataset", (dir_ / "nope.tsv").string()}).code, kExitValidation);
  const RunResult v = Invoke({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_EQ(v.out, std::string(kVersion) + "\n");
}

TEST_F(CliTest, StatsAndSimulate) {
  const RunResult s = Invoke({"stats", "--dataset", data_});
  EXPECT_EQ(s.code, kExitOk) << s.err;
  EXPECT_NE(s.out.find("workload_entropy_min"), std::string::npos);
  const RunResult sim = Invoke({"simulate", "--dataset", data_, "--num-documents", "10", "--seed", "3"});
  EXPECT_EQ(sim.code, kExitOk) << sim.err;
  EXPECT_NE(sim.out.find("rank\tsystem\tmean"), std::string::npos);
  EXPECT_EQ(sim.out, Invoke({"simulate", "--dataset", data_, "--num-documents", "10", "--seed", "3"}).out);
}

TEST_F(CliTest, AgreementWritesTables) {
  const RunResult r = Invoke({"agreement", "--dataset", data_, "--out", (dir_ / "agr").string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"agreement.csv", "histograms.csv", "rater_summary.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "agr" / f)) << f;
  }
}

TEST_F(CliTest, SweepIsIndependentOfThreads) {
  Spit(dir_ / "exp.ini",
       "num_documents = 10,20\nn_simulations = 50\nn_permutations = 50\nseed = 5\n"
       "[psxs]\nitem_grouping = psxs\n[ng]\nitem_grouping = no_grouping\nnormalization = z_score\n");
  const std::string cfg = (dir_ / "exp.ini").string();
  const RunResult a = Invoke({"sweep", "--dataset", data_, "--config", cfg, "--out",
                           (dir_ / "t1").string(), "--threads", "1", "--with-matrices"});
  const RunResult b = Invoke({"sweep", "--dataset", data_, "--config", cfg, "--out",
                           (dir_ / "t4").string(), "--threads", "4", "--with-matrices"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(Slurp(dir_ / "t1" / "sweep.csv"), Slurp(dir_ / "t4" / "sweep.csv"));
  EXPECT_EQ(Slurp(dir_ / "t1" / "sweep.json"), Slurp(dir_ / "t4" / "sweep.json"));
  const std::string manifest = Slurp(dir_ / "t1" / "manifest.json");
  EXPECT_NE(manifest.find("dataset_fingerprint"), std::string::npos);
  EXPECT_NE(manifest.find("config_hash"), std::string::npos);
  const std::vector<std::string> rows = Split(Slurp(dir_ / "t1" / "sweep.csv"), '\n');
  EXPECT_EQ(rows[0].rfind("config,item_grouping,", 0), 0u);
  EXPECT_EQ(rows.size(), 1u + 4u + 1u);  // header, 4 points, trailing newline
}

TEST_F(CliTest, UnreachableTargetExitsRuntime) {
  Spit(dir_ / "exp.ini",
       "num_documents = 10\nn_simulations = 4\nn_permutations = 10\n"
       "load_balancing = entropy:0.0:0.01\nmax_retries = 3\n");
  const RunResult r = Invoke({"sweep", "--dataset", data_, "--config", (dir_ / "exp.ini").string(),
                           "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(Slurp(dir_ / "o" / "sweep.csv").find("TargetUnreachable"), std::string::npos);
}

TEST(FingerprintTest, ChangesWithRatingsOnly) {
  const std::string header = "doc_id\tseg_index\tsystem_id\trater_id\tscore\n";
  std::string rows;
  for (const char* d : {"d1", "d2"}) {
    for (const char* s : {"s1", "s2"}) rows += std::string(d) + "\t0\t" + s + "\tr\t1\n";
  }
  const auto fp = [&](const std::string& body) {
    return DatasetFingerprint(
        IngestText(header + body, "x", ColumnMapping::Canonical(), WeightTable::Default()));
  };
  const std::string base = fp(rows);
  EXPECT_EQ(base.size(), 64u);
  // Row order does not matter.
  const std::vector<std::string> lines = Split(rows, '\n');
  EXPECT_EQ(fp(lines[3] + "\n" + lines[1] + "\n" + lines[2] + "\n" + lines[0] + "\n"), base);
  std::string changed = rows;
  changed[changed.size() - 2] = '2';
  EXPECT_NE(fp(changed), base);
}

TEST(Sha256Test, KnownDigest) {
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace evalstab
