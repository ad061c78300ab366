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

#ifndef DYADICOT_IO_H_
#define DYADICOT_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dyadicot/graph.h"

namespace dyadicot {

// Whole file as text; gzip input is decompressed transparently.
std::string ReadTextFile(const std::filesystem::path& path);

// Splits on runs of spaces and tabs.
std::vector<std::string> SplitFields(const std::string& line);

struct DatasetFiles {
  std::filesystem::path nodes;
  std::filesystem::path edges;
};

// Resolves a dataset directory: `nodes.tsv` + `edges.tsv` or `*.content` +
// `*.cites`, each optionally with a `.gz` suffix.
DatasetFiles FindDatasetFiles(const std::filesystem::path& dir);

// Node file in ingestion format. Labels come from `group_names` when present.
void WriteNodeFile(const Graph& graph, const std::filesystem::path& path);

// Edge file. Binary graphs write `id\tid`; otherwise (or when `weighted`)
// `id\tid\tweight` with round-trip precision.
void WriteEdgeFile(const Graph& graph, const std::filesystem::path& path,
                   bool weighted);

void WriteDataset(const Graph& graph, const std::filesystem::path& dir,
                  bool weighted);

struct EmbeddingFileHeader {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::uint64_t seed = 0;
};

// `node_id v_1 ... v_dim` per line, round-trip precision.
void WriteEmbeddingText(const Eigen::MatrixXd& vectors,
                        const std::vector<std::string>& node_ids,
                        const std::filesystem::path& path);

// Little-endian binary: magic "DYOTEMB1", u32 version, u32 dtype (1 = f64),
// u64 rows, u64 cols, u64 seed, then row-major values.
void WriteEmbeddingBinary(const Eigen::MatrixXd& vectors, std::uint64_t seed,
                          const std::filesystem::path& path);

// Reads either format (detected by magic). For text files the node ids are
// returned through `node_ids` and the seed is reported as 0.
Eigen::MatrixXd ReadEmbedding(const std::filesystem::path& path,
                              std::vector<std::string>* node_ids = nullptr,
                              EmbeddingFileHeader* header = nullptr);

void WriteStringToFile(const std::filesystem::path& path,
                       const std::string& contents);

// Strict decimal parse of the whole string.
bool ParseDouble(const std::string& text, double* value);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace dyadicot

#endif  // DYADICOT_IO_H_
