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

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dyadicot/error.h"

namespace dyadicot {

std::string ReadTextFile(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IngestError("cannot open " + path.string() + ": no such file");
  }
  // gzread passes uncompressed files through unchanged.
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw IngestError("cannot open " + path.string());
  std::string out;
  char buffer[1 << 16];
  int got;
  while ((got = gzread(file, buffer, sizeof(buffer))) > 0) {
    out.append(buffer, static_cast<std::size_t>(got));
  }
  int err = Z_OK;
  const char* message = gzerror(file, &err);
  const std::string detail = message ? message : "";
  gzclose(file);
  if (got < 0 || (err != Z_OK && err != Z_STREAM_END)) {
    throw IngestError("cannot read " + path.string() + ": " + detail);
  }
  return out;
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

namespace {

std::filesystem::path FindWithSuffix(const std::filesystem::path& dir,
                                     const std::string& name_or_ext,
                                     bool is_extension) {
  if (!is_extension) {
    for (const char* suffix : {"", ".gz"}) {
      const auto candidate = dir / (name_or_ext + suffix);
      if (std::filesystem::exists(candidate)) return candidate;
    }
    return {};
  }
  std::vector<std::filesystem::path> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    for (const std::string& suffix : {name_or_ext, name_or_ext + ".gz"}) {
      if (name.size() > suffix.size() &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        found.push_back(entry.path());
      }
    }
  }
  std::sort(found.begin(), found.end());
  return found.empty() ? std::filesystem::path{} : found.front();
}

}  // namespace

DatasetFiles FindDatasetFiles(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IngestError("dataset directory not found: " + dir.string());
  }
  DatasetFiles files{FindWithSuffix(dir, "nodes.tsv", false),
                     FindWithSuffix(dir, "edges.tsv", false)};
  if (files.nodes.empty() || files.edges.empty()) {
    files = {FindWithSuffix(dir, ".content", true), FindWithSuffix(dir, ".cites", true)};
  }
  if (files.nodes.empty() || files.edges.empty()) {
    throw IngestError("no node/edge files (nodes.tsv + edges.tsv or *.content + "
                      "*.cites) in " + dir.string());
  }
  return files;
}

bool ParseDouble(const std::string& text, double* value) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, *value);
  return ec == std::errc() && ptr == end;
}

std::string FormatDouble(double value) {
  char buffer[32];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

void WriteStringToFile(const std::filesystem::path& path,
                       const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("write failed: " + path.string());
}

void WriteNodeFile(const Graph& graph, const std::filesystem::path& path) {
  std::string text;
  for (Index i = 0; i < graph.NumNodes(); ++i) {
    text += graph.node_ids.empty() ? std::to_string(i) : graph.node_ids[i];
    for (Index t = 0; t < graph.NumAttributes(); ++t) {
      text += '\t';
      text += FormatDouble(graph.attributes(i, t));
    }
    text += '\t';
    const int s = graph.sensitive(i);
    if (s >= 0 && s < static_cast<int>(graph.group_names.size())) {
      text += graph.group_names[s];
    } else {
      text += std::to_string(s);
    }
    text += '\n';
  }
  WriteStringToFile(path, text);
}

void WriteEdgeFile(const Graph& graph, const std::filesystem::path& path,
                   bool weighted) {
  const bool with_weight = weighted || !graph.IsBinary();
  std::string text;
  auto id = [&](Index i) {
    return graph.node_ids.empty() ? std::to_string(i) : graph.node_ids[i];
  };
  for (Index u = 0; u < graph.NumNodes(); ++u) {
    for (Index v = u + 1; v < graph.NumNodes(); ++v) {
      const double w = graph.adjacency(u, v);
      if (w <= 0) continue;
      text += id(u);
      text += '\t';
      text += id(v);
      if (with_weight) {
        text += '\t';
        text += FormatDouble(w);
      }
      text += '\n';
    }
  }
  WriteStringToFile(path, text);
}

void WriteDataset(const Graph& graph, const std::filesystem::path& dir,
                  bool weighted) {
  std::filesystem::create_directories(dir);
  WriteNodeFile(graph, dir / "nodes.tsv");
  WriteEdgeFile(graph, dir / "edges.tsv", weighted);
}

void WriteEmbeddingText(const Eigen::MatrixXd& vectors,
                        const std::vector<std::string>& node_ids,
                        const std::filesystem::path& path) {
  std::string text;
  for (Index i = 0; i < vectors.rows(); ++i) {
    text += node_ids.empty() ? std::to_string(i) : node_ids[i];
    for (Index t = 0; t < vectors.cols(); ++t) {
      text += ' ';
      text += FormatDouble(vectors(i, t));
    }
    text += '\n';
  }
  WriteStringToFile(path, text);
}

namespace {

constexpr char kMagic[8] = {'D', 'Y', 'O', 'T', 'E', 'M', 'B', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kDtypeFloat64 = 1;

template <typename T>
void AppendLittleEndian(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "binary embedding I/O assumes a little-endian host");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T ReadLittleEndian(const std::string& in, std::size_t& offset) {
  if (offset + sizeof(T) > in.size()) throw FormatError("embedding: truncated file");
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

void WriteEmbeddingBinary(const Eigen::MatrixXd& vectors, std::uint64_t seed,
                          const std::filesystem::path& path) {
  std::string out(kMagic, sizeof(kMagic));
  AppendLittleEndian(out, kVersion);
  AppendLittleEndian(out, kDtypeFloat64);
  AppendLittleEndian<std::uint64_t>(out, vectors.rows());
  AppendLittleEndian<std::uint64_t>(out, vectors.cols());
  AppendLittleEndian<std::uint64_t>(out, seed);
  for (Index i = 0; i < vectors.rows(); ++i) {
    for (Index t = 0; t < vectors.cols(); ++t) AppendLittleEndian(out, vectors(i, t));
  }
  WriteStringToFile(path, out);
}

Eigen::MatrixXd ReadEmbedding(const std::filesystem::path& path,
                              std::vector<std::string>* node_ids,
                              EmbeddingFileHeader* header) {
  const std::string data = ReadTextFile(path);
  if (data.size() >= sizeof(kMagic) &&
      std::memcmp(data.data(), kMagic, sizeof(kMagic)) == 0) {
    std::size_t offset = sizeof(kMagic);
    const auto version = ReadLittleEndian<std::uint32_t>(data, offset);
    const auto dtype = ReadLittleEndian<std::uint32_t>(data, offset);
    if (version != kVersion || dtype != kDtypeFloat64) {
      throw FormatError("embedding: unsupported version or dtype in " + path.string());
    }
    EmbeddingFileHeader h;
    h.rows = ReadLittleEndian<std::uint64_t>(data, offset);
    h.cols = ReadLittleEndian<std::uint64_t>(data, offset);
    h.seed = ReadLittleEndian<std::uint64_t>(data, offset);
    if (data.size() - offset != h.rows * h.cols * sizeof(double)) {
      throw FormatError("embedding: payload size does not match header in " +
                        path.string());
    }
    Eigen::MatrixXd vectors(h.rows, h.cols);
    for (Index i = 0; i < vectors.rows(); ++i) {
      for (Index t = 0; t < vectors.cols(); ++t) {
        vectors(i, t) = ReadLittleEndian<double>(data, offset);
      }
    }
    if (header) *header = h;
    if (node_ids) node_ids->clear();
    return vectors;
  }

  std::istringstream in(data);
  std::string line;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    const auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (!rows.empty() && fields.size() - 1 != rows.front().size()) {
      throw FormatError("embedding: inconsistent dimension in " + path.string());
    }
    std::vector<double> row(fields.size() - 1);
    for (std::size_t t = 1; t < fields.size(); ++t) {
      if (!ParseDouble(fields[t], &row[t - 1])) {
        throw FormatError("embedding: bad value '" + fields[t] + "' in " + path.string());
      }
    }
    ids.push_back(fields[0]);
    rows.push_back(std::move(row));
  }
  const Index cols = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Eigen::MatrixXd vectors(static_cast<Index>(rows.size()), cols);
  for (Index i = 0; i < vectors.rows(); ++i) {
    for (Index t = 0; t < cols; ++t) vectors(i, t) = rows[i][t];
  }
  if (header) *header = {static_cast<std::uint64_t>(vectors.rows()),
                         static_cast<std::uint64_t>(cols), 0};
  if (node_ids) *node_ids = std::move(ids);
  return vectors;
}

}  // namespace dyadicot
