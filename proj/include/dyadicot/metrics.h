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

#ifndef DYADICOT_METRICS_H_
#define DYADICOT_METRICS_H_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dyadicot/classifier.h"
#include "dyadicot/embed.h"
#include "dyadicot/graph.h"

namespace dyadicot {

// Scored node pairs. xor_label is 1 when the endpoints lie in different
// sensitive groups.
struct DyadicSample {
  std::vector<NodePair> pairs;
  std::vector<int> xor_label;
  std::vector<int> link_label;
  std::vector<int> predicted;
  std::vector<double> score;

  std::size_t size() const { return pairs.size(); }
};

void ValidateSample(const DyadicSample& sample);

// P(g = 1 | xor = 1) / P(g = 1 | xor = 0).
double Ddi(const DyadicSample& sample);

// (P(g = 0 | xor = 1) + P(g = 1 | xor = 0)) / 2.
double Dber(const DyadicSample& sample);

// Smallest DBER over every deterministic labelling of a shared finite
// support, by enumeration; gamma0 is the xor = 0 distribution.
double MinDberBruteForce(const Eigen::VectorXd& gamma0, const Eigen::VectorXd& gamma1);

// Half the L1 distance.
double TotalVariation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Optimal transport cost under the 0/1 cost on a shared support.
double HammingWasserstein(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// (1 - TV) / 2 between the prediction distributions of the two xor groups:
// the lowest DBER reachable by relabelling the predictor's outputs.
double MinDberBound(const DyadicSample& sample);

struct AssortativityResult {
  double value = 0.0;
  // True when all edge mass sits in one group and the coefficient is set to 1.
  bool degenerate = false;
};

// Newman's categorical coefficient over the weighted mixing matrix of the
// sensitive attribute; each undirected edge counts in both directions.
AssortativityResult Assortativity(const Graph& graph);

// Per class, the first round(train_fraction * size) members of a seeded
// shuffle go to training, clamped so both sides keep at least one member.
std::pair<std::vector<Index>, std::vector<Index>> StratifiedSplit(
    const Eigen::VectorXi& labels, double train_fraction, std::uint64_t seed);

// Held-out accuracy of predicting the sensitive attribute from the embedding.
double RepresentationBias(const Eigen::MatrixXd& vectors,
                          const Eigen::VectorXi& sensitive, double train_fraction,
                          std::uint64_t seed, const ClassifierParams& params = {});

// Sum over s of |E_s| / |E| * Acc_s, where E_s are the edges with xor label s
// and Acc_s the held-out accuracy on E_s of predicting the xor label from
// concatenated pair embeddings.
double DyadicRb(const Eigen::MatrixXd& vectors, const std::vector<NodePair>& edges,
                const Eigen::VectorXi& sensitive, double train_fraction,
                std::uint64_t seed, const ClassifierParams& params = {});

struct LinkPredictionResult {
  double accuracy = 0.0;
  DyadicSample sample;
};

// Trains on split.train_edges plus as many sampled non-edges of `graph`
// (disjoint from split.test_neg), then scores test_pos and test_neg.
LinkPredictionResult LinkPredictionEval(const Eigen::MatrixXd& vectors,
                                        const Graph& graph, const EdgeSplit& split,
                                        EdgeCombiner combiner, std::uint64_t seed,
                                        const ClassifierParams& params = {});

struct AssumptionDiagnostics {
  double xor_rate = 0.0;  // fraction of pairs with xor = 1
  double xor_ci_low = 0.0;
  double xor_ci_high = 0.0;
  bool equivalence_holds = false;  // interval contains 1/2
  double intra_rate = 0.0;         // P(g = 1 | xor = 0)
  double inter_rate = 0.0;         // P(g = 1 | xor = 1)
  bool propensity_holds = false;   // intra_rate >= inter_rate
};

// 95% Wilson interval for the xor rate; never throws on a non-empty sample.
AssumptionDiagnostics DiagnoseAssumptions(const DyadicSample& sample);

std::pair<double, double> WilsonInterval(std::size_t successes, std::size_t trials,
                                         double z = 1.959963984540054);

// Joint distributions of (z_u, z_v) given xor = 0 and xor = 1 when u and v are
// drawn independently, each from group 0 with probability prior0, and
// z ~ p0 or p1 according to the group.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> XorConditionalJoints(
    const Eigen::VectorXd& p0, const Eigen::VectorXd& p1, double prior0);

}  // namespace dyadicot

#endif  // DYADICOT_METRICS_H_
