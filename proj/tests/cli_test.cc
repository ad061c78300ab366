// Copyright 2026 The DyadicOT Authors
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

#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include "json.hpp"

#include "test_util.h"

namespace {

using dyadicot::testing::ReadFile;
using dyadicot::testing::TempDir;
using dyadicot::testing::WriteFile;
using Json = nlohmann::json;

int RunCli(const std::string& args) {
  const std::string command = std::string(DYADICOT_CLI) + " " + args + " > /dev/null 2>&1";
  return std::system(command.c_str());
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = TempDir("cli");
    data_ = (root_ / "data").string();
    ASSERT_EQ(RunCli("synth --kind ring --nodes 80 --attributes 8 --seed 2 --out " + data_), 0);
  }
  void TearDown() override { std::filesystem::remove_all(root_); }

  std::filesystem::path root_;
  std::string data_;
};

TEST_F(CliTest, ConfigFileKeysApplyAndFlagsOverride) {
  const auto config = root_ / "run.ini";
  WriteFile(config, "dataset = " + data_ + "\nout = " + (root_ / "out").string() +
                        "\ndim = 8\nnum-walks = 2\nwalk-length = 10\nseeds = [3]\n"
                        "test-fraction = 0.2\neta = 0.25\n");
  ASSERT_EQ(RunCli("pipeline --config " + config.string() + " --dim 6"), 0);
  const Json report = Json::parse(ReadFile(root_ / "out" / "report.json"));
  EXPECT_EQ(report["config"]["skipgram"]["dim"], 6);
  EXPECT_EQ(report["config"]["walks"]["walk_length"], 10);
  EXPECT_EQ(report["config"]["seeds"], Json::array({3}));
  EXPECT_EQ(report["config"]["test_fraction"], 0.2);
  EXPECT_EQ(report["repair"]["eta"], 0.25);
}

TEST_F(CliTest, UnknownConfigKeyIsRejected) {
  const auto config = root_ / "bad.ini";
  WriteFile(config, "dataset = " + data_ + "\nwalk_length = 10\n");
  EXPECT_NE(RunCli("ingest --config " + config.string()), 0);
}

TEST_F(CliTest, CompareWritesTable) {
  const std::string common = " --dataset " + data_ +
                             " --dim 6 --num-walks 2 --walk-length 10 --seeds 0,1"
                             " --write-embeddings false --write-projections false";
  ASSERT_EQ(RunCli("pipeline --out " + (root_ / "a").string() + common), 0);
  ASSERT_EQ(RunCli("pipeline --eta 0.75 --out " + (root_ / "b").string() + common), 0);
  ASSERT_EQ(RunCli("compare " + (root_ / "a" / "report.json").string() + " " +
                (root_ / "b" / "report.json").string() + " --names a,b --out " +
                (root_ / "table.csv").string()),
            0);
  const std::string table = ReadFile(root_ / "table.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')),
            "metric,a/original_mean,a/original_std,a/repaired_mean,a/repaired_std,"
            "b/original_mean,b/original_std,b/repaired_mean,b/repaired_std");
  EXPECT_NE(table.find("\nDyadicRB,"), std::string::npos);
}

TEST_F(CliTest, MissingDatasetFails) {
  EXPECT_NE(RunCli("pipeline --dataset " + (root_ / "nothing").string() + " --out " +
                (root_ / "out").string()),
            0);
  EXPECT_TRUE(std::filesystem::exists(root_ / "out" / "FAILED"));
}

}  // namespace
