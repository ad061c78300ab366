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

#include "dyadicot/io.h"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>
#include <zlib.h>

#include "dyadicot/error.h"
#include "test_util.h"

namespace dyadicot {
namespace {

using testing::TempDir;
using testing::WriteFile;

void WriteGzip(const std::filesystem::path& path, const std::string& text) {
  gzFile file = gzopen(path.c_str(), "wb");
  ASSERT_NE(file, nullptr);
  gzwrite(file, text.data(), static_cast<unsigned>(text.size()));
  gzclose(file);
}

TEST(ReadTextFileTest, GzipIsTransparent) {
  const auto dir = TempDir("gzip");
  WriteGzip(dir / "a.txt.gz", "hello\nworld\n");
  EXPECT_EQ(ReadTextFile(dir / "a.txt.gz"), "hello\nworld\n");
  WriteFile(dir / "b.txt", "plain");
  EXPECT_EQ(ReadTextFile(dir / "b.txt"), "plain");
  EXPECT_THROW(ReadTextFile(dir / "missing.txt"), IngestError);
}

TEST(SplitFieldsTest, MixedWhitespace) {
  EXPECT_EQ(SplitFields("a\t b  c\t"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(SplitFields("  \t ").empty());
  EXPECT_EQ(SplitFields("x\r"), (std::vector<std::string>{"x"}));
}

TEST(FindDatasetFilesTest, BothLayouts) {
  const auto tsv = TempDir("find_tsv");
  WriteFile(tsv / "nodes.tsv", "");
  WriteFile(tsv / "edges.tsv", "");
  DatasetFiles files = FindDatasetFiles(tsv);
  EXPECT_EQ(files.nodes.filename(), "nodes.tsv");
  EXPECT_EQ(files.edges.filename(), "edges.tsv");

  const auto cora = TempDir("find_cora");
  WriteGzip(cora / "cora.content.gz", "");
  WriteFile(cora / "cora.cites", "");
  files = FindDatasetFiles(cora);
  EXPECT_EQ(files.nodes.filename(), "cora.content.gz");
  EXPECT_EQ(files.edges.filename(), "cora.cites");

  const auto empty = TempDir("find_empty");
  EXPECT_THROW(FindDatasetFiles(empty), IngestError);
  EXPECT_THROW(FindDatasetFiles(empty / "nope"), IngestError);
}

TEST(LoadDatasetTest, GzipInputs) {
  const auto dir = TempDir("load_gzip");
  WriteGzip(dir / "nodes.tsv.gz", "p 1 0 a\nq 0 1 b\n");
  WriteGzip(dir / "edges.tsv.gz", "q p\n");
  const DatasetFiles files = FindDatasetFiles(dir);
  const Graph g = LoadDataset(files.nodes, files.edges);
  EXPECT_EQ(g.NumNodes(), 2);
  EXPECT_EQ(g.NumEdges(), 1);
}

TEST(ParseDoubleTest, StrictWholeString) {
  double v = 0.0;
  EXPECT_TRUE(ParseDouble("1.5e-3", &v));
  EXPECT_DOUBLE_EQ(v, 1.5e-3);
  EXPECT_TRUE(ParseDouble("-2", &v));
  EXPECT_EQ(v, -2.0);
  EXPECT_FALSE(ParseDouble("1.5x", &v));
  EXPECT_FALSE(ParseDouble("", &v));
  EXPECT_FALSE(ParseDouble("abc", &v));
}

TEST(FormatDoubleTest, RoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) / (1 + i);
    double back = 0.0;
    ASSERT_TRUE(ParseDouble(FormatDouble(x), &back));
    EXPECT_EQ(back, x);
  }
  EXPECT_EQ(FormatDouble(0.5), "0.5");
  EXPECT_EQ(FormatDouble(1.0), "1");
}

TEST(DatasetRoundTripTest, WeightedGraphSurvivesWriteAndLoad) {
  std::mt19937_64 rng(3);
  Graph g = testing::RandomGraph({4, 5}, 3, 0.5, rng);
  g.adjacency *= 0.37;
  g.attributes(0, 0) = 0.125;
  const auto dir = TempDir("roundtrip");
  WriteDataset(g, dir, true);
  const DatasetFiles files = FindDatasetFiles(dir);
  const Graph back = LoadDataset(files.nodes, files.edges);
  EXPECT_EQ(back.node_ids, g.node_ids);
  EXPECT_EQ(back.attributes, g.attributes);
  EXPECT_EQ(back.adjacency, g.adjacency);
  EXPECT_EQ(back.group_names.size(), 2u);
  for (Index i = 0; i < g.NumNodes(); ++i) {
    EXPECT_EQ(back.group_names[back.sensitive(i)], g.group_names[g.sensitive(i)]);
  }
}

TEST(EmbeddingIoTest, TextRoundTrip) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd e = testing::RandomMatrix(4, 3, rng, -1, 1);
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  const auto dir = TempDir("emb_text");
  WriteEmbeddingText(e, ids, dir / "e.txt");
  std::vector<std::string> back_ids;
  EmbeddingFileHeader header;
  const Eigen::MatrixXd back = ReadEmbedding(dir / "e.txt", &back_ids, &header);
  EXPECT_EQ(back, e);
  EXPECT_EQ(back_ids, ids);
  EXPECT_EQ(header.rows, 4u);
  EXPECT_EQ(header.cols, 3u);
}

TEST(EmbeddingIoTest, BinaryRoundTripAndHeader) {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd e = testing::RandomMatrix(5, 2, rng, -1, 1);
  const auto dir = TempDir("emb_bin");
  WriteEmbeddingBinary(e, 99, dir / "e.emb");
  EmbeddingFileHeader header;
  const Eigen::MatrixXd back = ReadEmbedding(dir / "e.emb", nullptr, &header);
  EXPECT_EQ(back, e);
  EXPECT_EQ(header.rows, 5u);
  EXPECT_EQ(header.cols, 2u);
  EXPECT_EQ(header.seed, 99u);
  const std::string bytes = testing::ReadFile(dir / "e.emb");
  EXPECT_EQ(bytes.substr(0, 8), "DYOTEMB1");
  EXPECT_EQ(bytes.size(), 8u + 4 + 4 + 8 * 3 + 8 * 10);

  WriteFile(dir / "bad.emb", bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(ReadEmbedding(dir / "bad.emb"), FormatError);
}

TEST(EmbeddingIoTest, RaggedTextIsFormatError) {
  const auto dir = TempDir("emb_ragged");
  WriteFile(dir / "e.txt", "a 1 2\nb 3\n");
  EXPECT_THROW(ReadEmbedding(dir / "e.txt"), FormatError);
}

}  // namespace
}  // namespace dyadicot
