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
#include <cmath>

#include "dyadicot/embed.h"
#include "dyadicot/error.h"

namespace dyadicot {

namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

void ValidateSkipGramParams(const SkipGramParams& params) {
  if (params.dim <= 0) throw InvalidArgumentError("skipgram: dim must be positive");
  if (params.window <= 0) throw InvalidArgumentError("skipgram: window must be positive");
  if (params.negatives < 0) throw InvalidArgumentError("skipgram: negatives must be >= 0");
  if (params.epochs < 0) throw InvalidArgumentError("skipgram: epochs must be >= 0");
  if (!(params.learning_rate > 0.0)) {
    throw InvalidArgumentError("skipgram: learning rate must be positive");
  }
}

double SkipGramPairLoss(const Eigen::Ref<const Eigen::VectorXd>& center,
                        const Eigen::Ref<const Eigen::VectorXd>& context, int label,
                        Eigen::VectorXd* grad_center, Eigen::VectorXd* grad_context) {
  if (center.size() != context.size()) {
    throw InvalidArgumentError("skipgram loss: vector sizes differ");
  }
  const double f = center.dot(context);
  const double loss = label == 1 ? Softplus(-f) : Softplus(f);
  const double g = Sigmoid(f) - (label == 1 ? 1.0 : 0.0);
  if (grad_center) *grad_center = g * context;
  if (grad_context) *grad_context = g * center;
  return loss;
}

Eigen::MatrixXd InitialEmbedding(Index num_nodes, Index dim, std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, 0xe1));
  Eigen::MatrixXd vectors(num_nodes, dim);
  for (Index i = 0; i < num_nodes; ++i) {
    for (Index t = 0; t < dim; ++t) {
      vectors(i, t) = (UniformUnit(rng) - 0.5) / static_cast<double>(dim);
    }
  }
  return vectors;
}

EmbeddingMatrix TrainSkipGram(const WalkCorpus& corpus, const SkipGramParams& params) {
  ValidateSkipGramParams(params);
  if (corpus.walks.empty() || corpus.num_nodes <= 0) {
    throw InvalidArgumentError("skipgram: empty corpus");
  }
  const Index n = corpus.num_nodes;
  const Index dim = params.dim;
  EmbeddingMatrix out;
  out.dim = dim;
  out.epochs = params.epochs;
  out.learning_rate = params.learning_rate;
  out.seed = params.seed;
  out.vectors = InitialEmbedding(n, dim, params.seed);
  if (params.epochs == 0) return out;

  // Column-major dim x n keeps each node's vector contiguous.
  Eigen::MatrixXd input = out.vectors.transpose();
  Eigen::MatrixXd output = Eigen::MatrixXd::Zero(dim, n);

  std::vector<double> counts(n, 0.0);
  double tokens_per_epoch = 0.0;
  for (const auto& walk : corpus.walks) {
    for (Index v : walk) {
      if (v < 0 || v >= n) throw InvalidArgumentError("skipgram: node index out of range");
      counts[v] += 1.0;
    }
    tokens_per_epoch += static_cast<double>(walk.size());
  }
  for (double& c : counts) c = std::pow(c, 0.75);
  const AliasTable noise(counts);

  Rng rng(DeriveSeed(params.seed, 0x5a));
  const double total_tokens = tokens_per_epoch * static_cast<double>(params.epochs);
  const double lr0 = params.learning_rate;
  double processed = 0.0;
  Eigen::VectorXd neu1e(dim);

  for (Index epoch = 0; epoch < params.epochs; ++epoch) {
    for (const auto& walk : corpus.walks) {
      const Index len = static_cast<Index>(walk.size());
      for (Index pos = 0; pos < len; ++pos) {
        const double lr = lr0 * std::max(1e-4, 1.0 - processed / total_tokens);
        processed += 1.0;
        const Index center = walk[pos];
        const Index reduced =
            params.window - static_cast<Index>(UniformIndex(rng, params.window));
        const Index lo = std::max<Index>(0, pos - reduced);
        const Index hi = std::min<Index>(len - 1, pos + reduced);
        for (Index c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          auto l1 = input.col(walk[c]);
          neu1e.setZero();
          for (Index s = 0; s <= params.negatives; ++s) {
            Index target;
            double label;
            if (s == 0) {
              target = center;
              label = 1.0;
            } else {
              target = static_cast<Index>(noise.Sample(rng));
              if (target == center) continue;
              label = 0.0;
            }
            auto l2 = output.col(target);
            const double g = (label - Sigmoid(l1.dot(l2))) * lr;
            neu1e.noalias() += g * l2;
            l2.noalias() += g * l1;
          }
          l1 += neu1e;
        }
      }
    }
  }
  out.vectors = input.transpose();
  return out;
}

}  // namespace dyadicot
