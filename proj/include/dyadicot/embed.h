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

#ifndef DYADICOT_EMBED_H_
#define DYADICOT_EMBED_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dyadicot/graph.h"
#include "dyadicot/random.h"

namespace dyadicot {

// Weighted neighbour lists of a symmetric adjacency matrix, sorted by target.
class WeightedAdjacency {
 public:
  // Entries at or below `min_weight` are treated as absent.
  explicit WeightedAdjacency(const Eigen::MatrixXd& adjacency,
                             double min_weight = 1e-12);

  Index NumNodes() const { return static_cast<Index>(offsets_.size()) - 1; }
  Index Degree(Index v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const Index> Neighbors(Index v) const;
  std::span<const double> Weights(Index v) const;
  bool HasEdge(Index u, Index v) const;
  // Draws a neighbour of v with probability proportional to its weight.
  Index SampleNeighbor(Index v, Rng& rng) const;

 private:
  std::vector<Index> offsets_;
  std::vector<Index> targets_;
  std::vector<double> weights_;
  std::vector<AliasTable> alias_;
};

struct WalkParams {
  Index num_walks = 10;
  Index walk_length = 80;
  double p = 1.0;  // return parameter
  double q = 1.0;  // in-out parameter
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct WalkCorpus {
  // walks[r * n + v] is the r-th walk started at node v.
  std::vector<std::vector<Index>> walks;
  Index num_nodes = 0;
  WalkParams params;
};

void ValidateWalkParams(const WalkParams& params);

// Second-order biased walks: from current v with previous t, candidate x has
// weight w(v, x) / p if x == t, w(v, x) if x ~ t, w(v, x) / q otherwise.
// Each walk uses its own derived seed, so the corpus does not depend on jobs.
WalkCorpus RandomWalks(const WeightedAdjacency& graph, const WalkParams& params);
WalkCorpus RandomWalks(const Graph& graph, const WalkParams& params);

// Exact next-step distribution (neighbour, probability) from `current`;
// `previous` < 0 for the first step.
std::vector<std::pair<Index, double>> TransitionProbabilities(
    const WeightedAdjacency& graph, Index previous, Index current, double p,
    double q);

struct SkipGramParams {
  Index dim = 128;
  Index window = 10;
  Index negatives = 5;
  Index epochs = 1;
  double learning_rate = 0.025;
  std::uint64_t seed = 0;
};

struct EmbeddingMatrix {
  Eigen::MatrixXd vectors;  // n x dim
  Index dim = 0;
  Index epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
};

void ValidateSkipGramParams(const SkipGramParams& params);

// Input vectors start uniform in (-0.5, 0.5) / dim, output vectors at zero.
Eigen::MatrixXd InitialEmbedding(Index num_nodes, Index dim, std::uint64_t seed);

// Skip-gram with negative sampling over the walk corpus, sequential SGD with
// a linearly decaying rate and a unigram^0.75 noise distribution.
EmbeddingMatrix TrainSkipGram(const WalkCorpus& corpus, const SkipGramParams& params);

// Negative-sampling loss of one (center, context) pair,
//   label 1: -log sigmoid(u . v),  label 0: -log sigmoid(-u . v),
// with its gradients with respect to u and v.
double SkipGramPairLoss(const Eigen::Ref<const Eigen::VectorXd>& center,
                        const Eigen::Ref<const Eigen::VectorXd>& context, int label,
                        Eigen::VectorXd* grad_center = nullptr,
                        Eigen::VectorXd* grad_context = nullptr);

struct PcaResult {
  Eigen::MatrixXd projection;   // n x k
  Eigen::MatrixXd components;   // dim x k, orthonormal columns
  Eigen::VectorXd explained_variance;
  Eigen::VectorXd explained_variance_ratio;
  Eigen::VectorXd mean;
};

// Centered projection onto the top-k principal directions, ordered by
// decreasing variance. Each component's largest-magnitude entry is positive.
PcaResult Pca(const Eigen::MatrixXd& data, Index k);

enum class EdgeCombiner { kHadamard, kConcat };

std::string ToString(EdgeCombiner combiner);
EdgeCombiner ParseEdgeCombiner(const std::string& text);

// One feature row per pair. Concat puts the lower node index first.
Eigen::MatrixXd EdgeFeatures(const Eigen::MatrixXd& vectors,
                             const std::vector<NodePair>& pairs,
                             EdgeCombiner combiner);

}  // namespace dyadicot

#endif  // DYADICOT_EMBED_H_
