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

#include "dyadicot/pipeline.h"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "dyadicot/io.h"
#include "dyadicot/ot.h"
#include "test_util.h"

namespace dyadicot {
namespace {

using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

// Two groups of three, seven edges.
std::filesystem::path WriteSixNodeDataset(const std::filesystem::path& root) {
  const auto dir = root / "six";
  std::filesystem::create_directories(dir);
  WriteFile(dir / "nodes.tsv",
            "0\t1\t0\t1\ta\n"
            "1\t1\t1\t0\ta\n"
            "2\t0\t1\t1\ta\n"
            "3\t0\t0\t1\tb\n"
            "4\t1\t0\t0\tb\n"
            "5\t0\t1\t0\tb\n");
  WriteFile(dir / "edges.tsv", "0\t1\n1\t2\n3\t4\n4\t5\n0\t3\n2\t5\n1\t4\n");
  return dir;
}

PipelineConfig SmallConfig(const std::filesystem::path& dataset,
                           const std::filesystem::path& output) {
  PipelineConfig config;
  config.dataset = dataset;
  config.output = output;
  config.walks.num_walks = 4;
  config.walks.walk_length = 8;
  config.skipgram.dim = 8;
  config.skipgram.window = 3;
  config.skipgram.epochs = 2;
  config.test_fraction = 0.2;
  config.rb_train_fraction = 0.5;
  config.seeds = {0, 1};
  return config;
}

std::vector<std::vector<double>> SortedRows(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows;
  for (Index i = 0; i < m.rows(); ++i) {
    rows.emplace_back();
    for (Index j = 0; j < m.cols(); ++j) rows.back().push_back(m(i, j));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

Eigen::MatrixXd ReadCsvColumns(const std::string& text, Index first, Index count,
                               std::vector<std::string>* last_column) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    std::vector<double> row;
    for (Index c = 0; c < count; ++c) row.push_back(std::stod(fields[first + c]));
    rows.push_back(row);
    if (last_column) last_column->push_back(fields.back());
  }
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), count);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index c = 0; c < count; ++c) m(i, c) = rows[i][c];
  }
  return m;
}

class SixNodePipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = TempDir("pipeline_six");
    dataset_ = WriteSixNodeDataset(root_);
  }
  void TearDown() override { std::filesystem::remove_all(root_); }

  std::filesystem::path root_;
  std::filesystem::path dataset_;
};

TEST_F(SixNodePipelineTest, RunsEndToEndAndWritesOutputs) {
  const auto out = root_ / "out";
  const Json report = RunPipeline(SmallConfig(dataset_, out));
  EXPECT_EQ(report["dataset"]["name"], "six");
  EXPECT_EQ(report["dataset"]["nodes"], 6);
  EXPECT_EQ(report["dataset"]["edges"], 7);
  ASSERT_EQ(report["variants"].size(), 2u);
  EXPECT_EQ(report["variants"][0]["name"], "original");
  EXPECT_EQ(report["variants"][1]["name"], "repaired");
  for (const Json& v : report["variants"]) {
    ASSERT_EQ(v["seeds"].size(), 2u);
    for (const Json& s : v["seeds"]) {
      EXPECT_GE(s["acc"].get<double>(), 0.0);
      EXPECT_LE(s["acc"].get<double>(), 1.0);
      EXPECT_TRUE(s["ddi"].is_null() || s["ddi"].is_number());
    }
    EXPECT_EQ(v["summary"]["acc"]["count"], 2);
  }
  EXPECT_EQ(report["repair"]["mode"], "binary");
  for (const char* f : {"report.json", "report.csv", "repaired/nodes.tsv", "repaired/edges.tsv",
                        "repaired/meta.json", "embeddings/original_seed0.emb",
                        "embeddings/repaired_seed1.emb", "projections/original_nodes.csv",
                        "projections/repaired_pairs.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  EXPECT_FALSE(std::filesystem::exists(out / "FAILED"));
  EXPECT_EQ(Json::parse(ReadFile(out / "report.json")), report);
  EXPECT_EQ(DatasetName(out / "repaired"), "six");
}

TEST_F(SixNodePipelineTest, RepairedGroupsAreAligned) {
  const auto out = root_ / "out";
  RunPipeline(SmallConfig(dataset_, out));
  const DatasetFiles files = FindDatasetFiles(out / "repaired");
  const Graph repaired = LoadDataset(files.nodes, files.edges);
  const std::vector<GroupView> groups = SplitGroups(repaired);
  ASSERT_EQ(groups.size(), 2u);
  const Index d = repaired.NumAttributes();
  const auto a = SortedRows(groups[0].rows.leftCols(d));
  const auto b = SortedRows(groups[1].rows.leftCols(d));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) EXPECT_NEAR(a[i][j], b[i][j], 1e-12);
  }

  // The full (attribute, adjacency) rows coincide before reassembly.
  const DatasetFiles original_files = FindDatasetFiles(dataset_);
  const Graph original = LoadDataset(original_files.nodes, original_files.edges);
  const std::vector<GroupView> views = SplitGroups(original);
  const Eigen::MatrixXd cost = DyadicCost(views[0], views[1], 0.5, AttributeScale(original));
  const TransportPlan plan =
      SolveExact(cost, Uniform(views[0].rows.rows()), Uniform(views[1].rows.rows()));
  const std::vector<GroupView> fixed = RepairBinary(views[0], views[1], plan);
  const Eigen::MatrixXd after = DyadicCost(fixed[0].rows, fixed[1].rows, d, 0.5);
  EXPECT_LE(Wasserstein(after, Uniform(3), Uniform(3)), 1e-9);
}

TEST_F(SixNodePipelineTest, IdenticalConfigIsByteIdentical) {
  const auto out = root_ / "out";
  const PipelineConfig config = SmallConfig(dataset_, out);
  RunPipeline(config);
  const std::string first = ReadFile(out / "report.json");
  const std::string first_csv = ReadFile(out / "report.csv");
  const std::string first_emb = ReadFile(out / "embeddings" / "repaired_seed0.emb");
  RunPipeline(config);
  EXPECT_EQ(ReadFile(out / "report.json"), first);
  EXPECT_EQ(ReadFile(out / "report.csv"), first_csv);
  EXPECT_EQ(ReadFile(out / "embeddings" / "repaired_seed0.emb"), first_emb);
}

TEST_F(SixNodePipelineTest, JobsDoNotChangeResults) {
  PipelineConfig config = SmallConfig(dataset_, root_ / "serial");
  const Json serial = RunPipeline(config);
  config.output = root_ / "parallel";
  config.jobs = 3;
  Json parallel = RunPipeline(config);
  EXPECT_EQ(serial["variants"], parallel["variants"]);
}

TEST_F(SixNodePipelineTest, ProjectionTablesMatchPca) {
  const auto out = root_ / "out";
  RunPipeline(SmallConfig(dataset_, out));
  const Eigen::MatrixXd vectors = ReadEmbedding(out / "embeddings" / "original_seed0.emb");
  std::vector<std::string> labels;
  const Eigen::MatrixXd nodes =
      ReadCsvColumns(ReadFile(out / "projections" / "original_nodes.csv"), 1, 2, &labels);
  ASSERT_EQ(nodes.rows(), 6);
  const PcaResult pca = Pca(vectors, 2);
  EXPECT_LE((nodes - pca.projection).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(labels, (std::vector<std::string>{"a", "a", "a", "b", "b", "b"}));

  labels.clear();
  const Eigen::MatrixXd pairs =
      ReadCsvColumns(ReadFile(out / "projections" / "original_pairs.csv"), 1, 2, &labels);
  EXPECT_EQ(pairs.rows(), 7);
  EXPECT_EQ(std::count(labels.begin(), labels.end(), "same"), 4);
  EXPECT_EQ(std::count(labels.begin(), labels.end(), "different"), 3);
}

TEST_F(SixNodePipelineTest, MissingDatasetLeavesFailedMarker) {
  PipelineConfig config = SmallConfig(root_ / "nowhere", root_ / "out");
  try {
    RunPipeline(config);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "load");
  }
  const std::string marker = ReadFile(root_ / "out" / "FAILED");
  EXPECT_EQ(marker.rfind("load: ", 0), 0u) << marker;
  EXPECT_FALSE(std::filesystem::exists(root_ / "out" / "report.json"));
}

TEST_F(SixNodePipelineTest, FailedMarkerClearedOnSuccess) {
  const auto out = root_ / "out";
  std::filesystem::create_directories(out);
  WriteFile(out / "FAILED", "load: stale\n");
  RunPipeline(SmallConfig(dataset_, out));
  EXPECT_FALSE(std::filesystem::exists(out / "FAILED"));
}

TEST_F(SixNodePipelineTest, InvalidConfigFailsAtConfigStage) {
  PipelineConfig config = SmallConfig(dataset_, root_ / "out");
  config.seeds.clear();
  try {
    RunPipeline(config);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "config");
  }
}

TEST(ValidatePipelineConfigTest, RejectsBadValues) {
  PipelineConfig config;
  config.dataset = "d";
  config.output = "o";
  EXPECT_NO_THROW(ValidatePipelineConfig(config));
  PipelineConfig bad = config;
  bad.test_fraction = 1.0;
  EXPECT_THROW(ValidatePipelineConfig(bad), InvalidArgumentError);
  bad = config;
  bad.rb_train_fraction = 0.0;
  EXPECT_THROW(ValidatePipelineConfig(bad), InvalidArgumentError);
  bad = config;
  bad.jobs = 0;
  EXPECT_THROW(ValidatePipelineConfig(bad), InvalidArgumentError);
  bad = config;
  bad.output.clear();
  EXPECT_THROW(ValidatePipelineConfig(bad), InvalidArgumentError);
  bad = config;
  bad.repair.eta = 2.0;
  EXPECT_THROW(ValidatePipelineConfig(bad), InvalidArgumentError);
}

TEST(SummarizeTest, SampleStandardDeviation) {
  const MetricSummary s = Summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.std, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(s.count, 4u);
  EXPECT_EQ(Summarize({7.0}).std, 0.0);
  EXPECT_EQ(Summarize({}).count, 0u);
}

TEST(StreamsForTest, StreamsAreDistinctAndStable) {
  const SeedStreams a = StreamsFor(3);
  const std::set<std::uint64_t> values = {a.split, a.walks, a.skipgram, a.classifier, a.rb};
  EXPECT_EQ(values.size(), 5u);
  EXPECT_EQ(StreamsFor(3).walks, a.walks);
  EXPECT_NE(StreamsFor(4).walks, a.walks);
}

TEST(ProjectionTableTest, FormatAndErrors) {
  Eigen::MatrixXd f(3, 2);
  f << 1, 0, 0, 1, -1, -1;
  const std::string table = ProjectionTable(f, {"x", "y", "z"}, {"p", "q", "p"}, 1);
  EXPECT_EQ(table.substr(0, table.find('\n')), "id,proj_1,label");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  EXPECT_THROW(ProjectionTable(Eigen::MatrixXd(0, 2), {}, {}), InvalidArgumentError);
  EXPECT_THROW(ProjectionTable(f, {"x"}, {"p", "q", "p"}), InvalidArgumentError);
}

Json FakeReport(const std::string& dataset, double acc) {
  VariantReport v{"original", {0.25, false}, {}};
  for (std::uint64_t s = 0; s < 2; ++s) {
    SeedMetrics m;
    m.seed = s;
    m.acc = acc + 0.01 * s;
    m.ddi = 0.9;
    m.dber = 0.2;
    m.rb = 0.6;
    m.dyadic_rb = 0.7;
    v.seeds.push_back(m);
  }
  VariantReport r = v;
  r.name = "repaired";
  Json report;
  report["dataset"] = {{"name", dataset}};
  report["variants"] = Json::array({VariantToJson(v), VariantToJson(r)});
  return report;
}

TEST(CompareRunsTest, IdenticalReportsHaveIdenticalColumns) {
  const Json a = FakeReport("cora", 0.8);
  const ComparisonTable t = CompareRuns({a, a}, {"x", "y"});
  ASSERT_EQ(t.columns.size(), 4u);
  EXPECT_EQ(t.columns[0], "x/original");
  EXPECT_EQ(t.metrics,
            (std::vector<std::string>{"ACC", "DDI", "DBER", "RB", "DyadicRB", "AC"}));
  for (const auto& row : t.cells) {
    ASSERT_EQ(row.size(), 4u);
    for (std::size_t c = 0; c < 4; ++c) {
      ASSERT_TRUE(row[c].has_value());
      EXPECT_EQ(row[c]->mean, row[0]->mean);
      EXPECT_EQ(row[c]->std, row[0]->std);
    }
  }
  EXPECT_NEAR(t.cells[0][0]->mean, 0.805, 1e-12);
  EXPECT_NE(t.ToText().find("0.805 +- 0.007"), std::string::npos);
  EXPECT_EQ(t.ToCsv().substr(0, t.ToCsv().find('\n')),
            "metric,x/original_mean,x/original_std,x/repaired_mean,x/repaired_std,"
            "y/original_mean,y/original_std,y/repaired_mean,y/repaired_std");
}

TEST(CompareRunsTest, ThreeRunsGiveThreeGroupsOfColumns) {
  const ComparisonTable t = CompareRuns(
      {FakeReport("d", 0.7), FakeReport("d", 0.8), FakeReport("d", 0.9)}, {"a", "b", "c"});
  EXPECT_EQ(t.columns.size(), 6u);
  EXPECT_NEAR(t.cells[0][4]->mean, 0.905, 1e-12);
}

TEST(CompareRunsTest, Errors) {
  EXPECT_THROW(CompareRuns({FakeReport("a", 0.7), FakeReport("b", 0.7)}, {"x", "y"}),
               InvalidArgumentError);
  EXPECT_THROW(CompareRuns({FakeReport("a", 0.7), Json{{"x", 1}}}, {"x", "y"}), FormatError);
  EXPECT_THROW(CompareRuns({FakeReport("a", 0.7)}, {"x", "y"}), InvalidArgumentError);
}

TEST(ReportCsvTest, RowsPerSeedPlusSummary) {
  const std::string csv = ReportCsv(FakeReport("d", 0.5));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * (2 + 2));
  EXPECT_NE(csv.find("original,mean,0.505,0.9,0.2,"), std::string::npos);
}

// Synthetic ring graph with strong homophily. The repair should lower
// assortativity and shift the embedding-level metrics in the fair direction.
TEST(PipelineTrendTest, RingGraphRepairMovesMetricsTowardParity) {
  const auto root = TempDir("pipeline_ring");
  RingGraphParams params;
  params.num_nodes = 200;
  params.num_attributes = 20;
  params.mix = 0.05;
  WriteDataset(SampleRingGraph(params, 11), root / "ring", false);
  PipelineConfig config = SmallConfig(root / "ring", root / "out");
  config.walks.num_walks = 6;
  config.walks.walk_length = 20;
  config.skipgram.dim = 16;
  config.skipgram.window = 5;
  config.skipgram.epochs = 1;
  config.test_fraction = 0.1;
  config.rb_train_fraction = 0.7;
  config.seeds = {0, 1, 2};
  config.write_embeddings = false;
  config.write_projections = false;
  const Json report = RunPipeline(config);
  const Json& orig = report["variants"][0]["summary"];
  const Json& fair = report["variants"][1]["summary"];
  EXPECT_LT(fair["ac"]["mean"].get<double>(), orig["ac"]["mean"].get<double>());
  EXPECT_GT(fair["ddi"]["mean"].get<double>(), orig["ddi"]["mean"].get<double>());
  EXPECT_LT(fair["rb"]["mean"].get<double>(), orig["rb"]["mean"].get<double>());
  std::filesystem::remove_all(root);
}

}  // namespace
}  // namespace dyadicot
