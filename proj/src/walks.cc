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

#include <algorithm>
#include <exception>
#include <thread>

#include "dyadicot/embed.h"
#include "dyadicot/error.h"

namespace dyadicot {

WeightedAdjacency::WeightedAdjacency(const Eigen::MatrixXd& adjacency,
                                     double min_weight) {
  if (adjacency.rows() != adjacency.cols()) {
    throw InvalidArgumentError("walks: adjacency is not square");
  }
  const Index n = adjacency.rows();
  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  alias_.resize(n);
  for (Index v = 0; v < n; ++v) {
    // Column access is contiguous; the matrix is symmetric.
    for (Index x = 0; x < n; ++x) {
      const double w = adjacency(x, v);
      if (w > min_weight && x != v) {
        targets_.push_back(x);
        weights_.push_back(w);
      }
    }
    offsets_[v + 1] = static_cast<Index>(targets_.size());
  }
  for (Index v = 0; v < n; ++v) alias_[v] = AliasTable(Weights(v));
}

std::span<const Index> WeightedAdjacency::Neighbors(Index v) const {
  return {targets_.data() + offsets_[v], static_cast<std::size_t>(Degree(v))};
}

std::span<const double> WeightedAdjacency::Weights(Index v) const {
  return {weights_.data() + offsets_[v], static_cast<std::size_t>(Degree(v))};
}

bool WeightedAdjacency::HasEdge(Index u, Index v) const {
  const auto nbrs = Neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

Index WeightedAdjacency::SampleNeighbor(Index v, Rng& rng) const {
  return targets_[offsets_[v] + static_cast<Index>(alias_[v].Sample(rng))];
}

void ValidateWalkParams(const WalkParams& params) {
  if (!(params.p > 0.0) || !(params.q > 0.0)) {
    throw InvalidArgumentError("random_walks: p and q must be positive");
  }
  if (params.num_walks < 1 || params.walk_length < 1) {
    throw InvalidArgumentError("random_walks: num_walks and walk_length must be >= 1");
  }
  if (params.jobs < 1) throw InvalidArgumentError("random_walks: jobs must be >= 1");
}

namespace {

double Bias(const WeightedAdjacency& graph, Index previous, Index candidate,
            double p, double q) {
  if (candidate == previous) return 1.0 / p;
  if (graph.HasEdge(previous, candidate)) return 1.0;
  return 1.0 / q;
}

std::vector<Index> OneWalk(const WeightedAdjacency& graph, Index start,
                           const WalkParams& params, Rng& rng) {
  std::vector<Index> walk;
  walk.reserve(params.walk_length);
  walk.push_back(start);
  if (graph.Degree(start) == 0) return walk;
  const bool first_order = params.p == 1.0 && params.q == 1.0;
  const double bias_max = std::max({1.0 / params.p, 1.0, 1.0 / params.q});
  while (static_cast<Index>(walk.size()) < params.walk_length) {
    const Index current = walk.back();
    if (walk.size() == 1 || first_order) {
      walk.push_back(graph.SampleNeighbor(current, rng));
      continue;
    }
    const Index previous = walk[walk.size() - 2];
    // Rejection sampling against the first-order proposal.
    while (true) {
      const Index x = graph.SampleNeighbor(current, rng);
      if (UniformUnit(rng) * bias_max < Bias(graph, previous, x, params.p, params.q)) {
        walk.push_back(x);
        break;
      }
    }
  }
  return walk;
}

}  // namespace

WalkCorpus RandomWalks(const WeightedAdjacency& graph, const WalkParams& params) {
  ValidateWalkParams(params);
  const Index n = graph.NumNodes();
  WalkCorpus corpus;
  corpus.num_nodes = n;
  corpus.params = params;
  const Index total = params.num_walks * n;
  corpus.walks.resize(total);
  auto run = [&](Index begin, Index step) {
    for (Index w = begin; w < total; w += step) {
      Rng rng(DeriveSeed(params.seed, static_cast<std::uint64_t>(w)));
      corpus.walks[w] = OneWalk(graph, w % n, params, rng);
    }
  };
  if (params.jobs == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(params.jobs);
    for (int j = 0; j < params.jobs; ++j) {
      workers.emplace_back([&, j] {
        try {
          run(j, params.jobs);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return corpus;
}

WalkCorpus RandomWalks(const Graph& graph, const WalkParams& params) {
  ValidateWalkParams(params);
  return RandomWalks(WeightedAdjacency(graph.adjacency), params);
}

std::vector<std::pair<Index, double>> TransitionProbabilities(
    const WeightedAdjacency& graph, Index previous, Index current, double p,
    double q) {
  if (!(p > 0.0) || !(q > 0.0)) {
    throw InvalidArgumentError("transition: p and q must be positive");
  }
  const auto nbrs = graph.Neighbors(current);
  const auto weights = graph.Weights(current);
  std::vector<std::pair<Index, double>> out;
  double total = 0.0;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    double w = weights[i];
    if (previous >= 0) w *= Bias(graph, previous, nbrs[i], p, q);
    out.emplace_back(nbrs[i], w);
    total += w;
  }
  for (auto& entry : out) entry.second /= total;
  return out;
}

}  // namespace dyadicot
