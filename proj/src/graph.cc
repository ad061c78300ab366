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

#include "dyadicot/graph.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>

#include "dyadicot/error.h"
#include "dyadicot/io.h"
#include "dyadicot/random.h"

namespace dyadicot {

Index Graph::NumEdges() const {
  Index count = 0;
  for (Index j = 0; j < adjacency.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      if (adjacency(i, j) > 0) ++count;
    }
  }
  return count;
}

std::vector<int> Graph::Groups() const {
  std::set<int> seen(sensitive.data(), sensitive.data() + sensitive.size());
  return {seen.begin(), seen.end()};
}

std::vector<NodePair> Graph::Edges() const {
  std::vector<NodePair> edges;
  for (Index u = 0; u < adjacency.rows(); ++u) {
    for (Index v = u + 1; v < adjacency.cols(); ++v) {
      if (adjacency(u, v) > 0) edges.push_back({u, v});
    }
  }
  return edges;
}

bool Graph::IsBinary() const {
  return ((adjacency.array() == 0.0) || (adjacency.array() == 1.0)).all();
}

void ValidateGraph(const Graph& graph, bool require_binary) {
  const Index n = graph.NumNodes();
  if (graph.adjacency.cols() != n) {
    throw InvalidArgumentError("graph: adjacency is not square");
  }
  if (graph.attributes.rows() != n || graph.sensitive.size() != n) {
    throw InvalidArgumentError("graph: attribute/sensitive rows do not match nodes");
  }
  if (!graph.node_ids.empty() && static_cast<Index>(graph.node_ids.size()) != n) {
    throw InvalidArgumentError("graph: node id count does not match nodes");
  }
  if (!graph.adjacency.allFinite() || !graph.attributes.allFinite()) {
    throw InvalidArgumentError("graph: non-finite entries");
  }
  if ((graph.adjacency.array() < 0).any() || (graph.adjacency.array() > 1).any()) {
    throw InvalidArgumentError("graph: adjacency entries must lie in [0, 1]");
  }
  if (graph.adjacency != graph.adjacency.transpose()) {
    throw InvalidArgumentError("graph: adjacency is not symmetric");
  }
  if ((graph.adjacency.diagonal().array() != 0).any()) {
    throw InvalidArgumentError("graph: adjacency has self loops");
  }
  if (require_binary && !graph.IsBinary()) {
    throw InvalidArgumentError("graph: adjacency is not binary");
  }
}

Graph LoadDataset(const std::filesystem::path& node_file,
                  const std::filesystem::path& edge_file) {
  Graph graph;
  std::unordered_map<std::string, Index> index_of;
  std::map<std::string, int> label_ids;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  {
    std::istringstream in(ReadTextFile(node_file));
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto fields = SplitFields(line);
      if (fields.empty() || fields[0][0] == '#') continue;
      if (fields.size() < 2) {
        throw FormatError(node_file.string() + ":" + std::to_string(line_no) +
                          ": expected `id attributes... label`");
      }
      const std::size_t d = fields.size() - 2;
      if (rows.empty()) {
        width = d;
      } else if (d != width) {
        throw FormatError(node_file.string() + ":" + std::to_string(line_no) +
                          ": node '" + fields[0] + "' has " + std::to_string(d) +
                          " attributes, expected " + std::to_string(width));
      }
      if (index_of.count(fields[0])) {
        throw FormatError(node_file.string() + ":" + std::to_string(line_no) +
                          ": duplicate node id '" + fields[0] + "'");
      }
      std::vector<double> row(d);
      for (std::size_t t = 0; t < d; ++t) {
        if (!ParseDouble(fields[t + 1], &row[t])) {
          throw FormatError(node_file.string() + ":" + std::to_string(line_no) +
                            ": bad attribute value '" + fields[t + 1] + "'");
        }
      }
      const std::string& label = fields.back();
      auto [it, inserted] =
          label_ids.emplace(label, static_cast<int>(label_ids.size()));
      if (inserted) graph.group_names.push_back(label);
      index_of.emplace(fields[0], static_cast<Index>(rows.size()));
      graph.node_ids.push_back(fields[0]);
      rows.push_back(std::move(row));
      labels.push_back(it->second);
    }
  }

  const Index n = static_cast<Index>(rows.size());
  const Index d = n > 0 ? static_cast<Index>(rows[0].size()) : 0;
  graph.attributes.resize(n, d);
  graph.sensitive.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < d; ++t) graph.attributes(i, t) = rows[i][t];
    graph.sensitive(i) = labels[i];
  }
  graph.adjacency = Eigen::MatrixXd::Zero(n, n);

  std::istringstream in(ReadTextFile(edge_file));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = SplitFields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    if (fields.size() != 2 && fields.size() != 3) {
      throw FormatError(edge_file.string() + ":" + std::to_string(line_no) +
                        ": expected `id id [weight]`");
    }
    auto lookup = [&](const std::string& id) {
      auto it = index_of.find(id);
      if (it == index_of.end()) {
        throw IngestError(edge_file.string() + ":" + std::to_string(line_no) +
                          ": unknown node id '" + id + "'");
      }
      return it->second;
    };
    const Index u = lookup(fields[0]);
    const Index v = lookup(fields[1]);
    double w = 1.0;
    if (fields.size() == 3) {
      if (!ParseDouble(fields[2], &w)) {
        throw FormatError(edge_file.string() + ":" + std::to_string(line_no) +
                          ": bad edge weight '" + fields[2] + "'");
      }
      if (!(w >= 0.0 && w <= 1.0)) {
        throw FormatError(edge_file.string() + ":" + std::to_string(line_no) +
                          ": edge weight outside [0, 1]");
      }
    }
    if (u == v) continue;
    // Duplicates and reciprocal listings keep the larger weight.
    const double merged = std::max(graph.adjacency(u, v), w);
    graph.adjacency(u, v) = merged;
    graph.adjacency(v, u) = merged;
  }
  return graph;
}

std::vector<GroupView> SplitGroups(const Graph& graph) {
  const std::vector<int> groups = graph.Groups();
  if (groups.size() < 2) {
    throw InvalidArgumentError("fairness undefined for one group");
  }
  const Index n = graph.NumNodes();
  const Index d = graph.NumAttributes();
  std::vector<GroupView> views;
  for (int g : groups) {
    GroupView view;
    view.group_id = g;
    view.attribute_dim = d;
    for (Index i = 0; i < n; ++i) {
      if (graph.sensitive(i) == g) view.member_index.push_back(i);
    }
    view.rows.resize(static_cast<Index>(view.member_index.size()), d + n);
    for (Index r = 0; r < view.size(); ++r) {
      const Index i = view.member_index[r];
      view.rows.row(r).head(d) = graph.attributes.row(i);
      view.rows.row(r).tail(n) = graph.adjacency.row(i);
    }
    views.push_back(std::move(view));
  }
  return views;
}

EdgeSplit SplitEdges(const Graph& graph, double test_fraction,
                     std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw InvalidArgumentError("split_edges: test_fraction must be in [0, 1)");
  }
  std::vector<NodePair> edges = graph.Edges();
  if (edges.empty()) throw InvalidArgumentError("split_edges: graph has no edges");
  const std::size_t num_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(edges.size())));
  if (num_test >= edges.size()) {
    throw InvalidArgumentError("split_edges: test_fraction leaves no training edges");
  }

  EdgeSplit split;
  split.seed = seed;
  Rng rng(DeriveSeed(seed, 0x5e11));
  Shuffle(edges, rng);
  split.test_pos.assign(edges.begin(), edges.begin() + num_test);
  split.train_edges.assign(edges.begin() + num_test, edges.end());

  const Index n = graph.NumNodes();
  const double possible = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  if (possible - static_cast<double>(edges.size()) < static_cast<double>(num_test)) {
    throw InvalidArgumentError("split_edges: not enough non-edges to sample negatives");
  }
  std::set<NodePair> taken;
  while (split.test_neg.size() < num_test) {
    const Index u = static_cast<Index>(UniformIndex(rng, n));
    const Index v = static_cast<Index>(UniformIndex(rng, n));
    if (u == v || graph.adjacency(u, v) > 0) continue;
    const NodePair pair = NodePair::Canonical(u, v);
    if (taken.insert(pair).second) split.test_neg.push_back(pair);
  }
  return split;
}

Graph RemovePairs(const Graph& graph, const std::vector<NodePair>& pairs) {
  Graph out = graph;
  for (const NodePair& p : pairs) {
    out.adjacency(p.u, p.v) = 0.0;
    out.adjacency(p.v, p.u) = 0.0;
  }
  return out;
}

namespace {

void FillWordAttributes(Graph& graph, Index num_attributes, int num_groups,
                        double word_rate, double group_word_rate, Rng& rng) {
  const Index n = graph.NumNodes();
  graph.attributes = Eigen::MatrixXd::Zero(n, num_attributes);
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < num_attributes; ++t) {
      const bool tied = (t % num_groups) == graph.sensitive(i);
      const double rate = tied ? group_word_rate : word_rate;
      graph.attributes(i, t) = UniformUnit(rng) < rate ? 1.0 : 0.0;
    }
  }
}

void NameNodesAndGroups(Graph& graph, int num_groups) {
  for (int g = 0; g < num_groups; ++g) {
    graph.group_names.push_back("group" + std::to_string(g));
  }
  graph.node_ids.reserve(graph.NumNodes());
  for (Index i = 0; i < graph.NumNodes(); ++i) {
    graph.node_ids.push_back("n" + std::to_string(i));
  }
}

}  // namespace

Graph SampleRingGraph(const RingGraphParams& params, std::uint64_t seed) {
  if (params.num_nodes < 3 || params.num_groups < 1) {
    throw InvalidArgumentError("ring graph: need >= 3 nodes and >= 1 group");
  }
  Rng rng(DeriveSeed(seed, 0x717));
  const Index n = params.num_nodes;
  Graph graph;
  graph.sensitive.resize(n);
  for (Index i = 0; i < n; ++i) {
    int g = static_cast<int>(i * params.num_groups / n);
    if (UniformUnit(rng) < params.mix) {
      g = static_cast<int>(UniformIndex(rng, params.num_groups));
    }
    graph.sensitive(i) = g;
  }
  graph.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (Index v = 0; v < n; ++v) {
    for (Index u = 0; u < v; ++u) {
      const Index gap = std::min(v - u, n - (v - u));
      const double p = gap <= params.neighbors ? params.p_local : params.p_random;
      if (UniformUnit(rng) < p) {
        graph.adjacency(u, v) = 1.0;
        graph.adjacency(v, u) = 1.0;
      }
    }
  }
  FillWordAttributes(graph, params.num_attributes, params.num_groups, params.word_rate,
                     params.group_word_rate, rng);
  NameNodesAndGroups(graph, params.num_groups);
  return graph;
}

Graph SampleBlockModelGraph(const BlockModelParams& params, std::uint64_t seed) {
  if (params.num_nodes < 2 || params.num_groups < 1) {
    throw InvalidArgumentError("block model: need >= 2 nodes and >= 1 group");
  }
  Rng rng(DeriveSeed(seed, 0xb10c));
  const Index n = params.num_nodes;
  Graph graph;
  graph.sensitive.resize(n);
  for (Index i = 0; i < n; ++i) {
    graph.sensitive(i) = static_cast<int>(i % params.num_groups);
  }
  graph.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (Index v = 0; v < n; ++v) {
    for (Index u = 0; u < v; ++u) {
      const double p =
          graph.sensitive(u) == graph.sensitive(v) ? params.p_in : params.p_out;
      if (UniformUnit(rng) < p) {
        graph.adjacency(u, v) = 1.0;
        graph.adjacency(v, u) = 1.0;
      }
    }
  }
  FillWordAttributes(graph, params.num_attributes, params.num_groups, params.word_rate,
                     params.group_word_rate, rng);
  NameNodesAndGroups(graph, params.num_groups);
  return graph;
}

}  // namespace dyadicot
