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

#ifndef DYADICOT_GRAPH_H_
#define DYADICOT_GRAPH_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dyadicot {

using Index = Eigen::Index;

// Unordered node pair, stored canonically with u < v.
struct NodePair {
  Index u = 0;
  Index v = 0;

  static NodePair Canonical(Index a, Index b) {
    return a < b ? NodePair{a, b} : NodePair{b, a};
  }
  auto operator<=>(const NodePair&) const = default;
};

// Attributed undirected graph with one categorical sensitive value per node.
// Row i of `adjacency` is the structural vector of node i; columns follow the
// node order of `node_ids`, which is fixed at construction.
struct Graph {
  Eigen::MatrixXd attributes;  // n x d
  Eigen::MatrixXd adjacency;   // n x n, symmetric, zero diagonal, in [0, 1]
  Eigen::VectorXi sensitive;   // n
  std::vector<std::string> node_ids;
  std::vector<std::string> group_names;  // label text for each sensitive id

  Index NumNodes() const { return adjacency.rows(); }
  Index NumAttributes() const { return attributes.cols(); }
  // Number of unordered pairs with positive weight.
  Index NumEdges() const;
  // Distinct sensitive values, ascending.
  std::vector<int> Groups() const;
  // Canonical pairs with positive weight, sorted.
  std::vector<NodePair> Edges() const;
  bool IsBinary() const;
};

// Throws InvalidArgumentError describing the first violated invariant.
void ValidateGraph(const Graph& graph, bool require_binary = false);

// Reads a node file (`id <attrs...> label`, whitespace separated) and an edge
// file (`id id [weight]`). Either may be gzip compressed. Reciprocal and
// duplicate edges collapse to one undirected edge; self loops are dropped.
Graph LoadDataset(const std::filesystem::path& node_file,
                  const std::filesystem::path& edge_file);

// Rows of the stacked [attributes | adjacency] matrix for one sensitive value.
struct GroupView {
  int group_id = 0;
  Eigen::MatrixXd rows;  // N_k x (d + n)
  std::vector<Index> member_index;
  Index attribute_dim = 0;

  Index size() const { return rows.rows(); }
  auto Attributes() const { return rows.leftCols(attribute_dim); }
  auto Structure() const { return rows.rightCols(rows.cols() - attribute_dim); }
};

// One view per observed sensitive value, ordered by ascending value.
std::vector<GroupView> SplitGroups(const Graph& graph);

struct EdgeSplit {
  std::vector<NodePair> train_edges;
  std::vector<NodePair> test_pos;
  std::vector<NodePair> test_neg;
  std::uint64_t seed = 0;
};

// Holds out round(test_fraction * |E|) edges and as many sampled non-edges.
EdgeSplit SplitEdges(const Graph& graph, double test_fraction,
                     std::uint64_t seed);

// Copy of `graph` with the given pairs' adjacency entries zeroed.
Graph RemovePairs(const Graph& graph, const std::vector<NodePair>& pairs);

// Planted-partition graph with bag-of-words attributes whose word rates
// depend on the group. Used for synthetic fixtures and demos.
struct BlockModelParams {
  Index num_nodes = 200;
  int num_groups = 2;
  Index num_attributes = 50;
  double p_in = 0.08;
  double p_out = 0.01;
  double word_rate = 0.1;
  double group_word_rate = 0.4;  // rate for the words tied to a node's group
};
Graph SampleBlockModelGraph(const BlockModelParams& params, std::uint64_t seed);

// Ring lattice with local structure: node i links to each of its `neighbors`
// nearest ring successors with probability p_local and to any other node
// with probability p_random. Groups are contiguous arcs, with each node
// moved to a uniformly drawn group with probability `mix`. Attributes follow
// the block model word rates.
struct RingGraphParams {
  Index num_nodes = 300;
  int num_groups = 2;
  Index num_attributes = 50;
  Index neighbors = 5;
  double p_local = 0.8;
  double p_random = 0.002;
  double mix = 0.1;
  double word_rate = 0.1;
  double group_word_rate = 0.4;
};
Graph SampleRingGraph(const RingGraphParams& params, std::uint64_t seed);

}  // namespace dyadicot

#endif  // DYADICOT_GRAPH_H_
