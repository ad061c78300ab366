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

#include <Eigen/Eigenvalues>

#include "dyadicot/embed.h"
#include "dyadicot/error.h"

namespace dyadicot {

PcaResult Pca(const Eigen::MatrixXd& data, Index k) {
  const Index dim = data.cols();
  if (k < 1 || k > dim) {
    throw InvalidArgumentError("pca: k=" + std::to_string(k) +
                               " must lie in [1, " + std::to_string(dim) + "]");
  }
  if (data.rows() < 1) throw InvalidArgumentError("pca: no rows");
  PcaResult result;
  result.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - result.mean.transpose();
  const double denom = std::max<double>(1.0, static_cast<double>(data.rows() - 1));
  const Eigen::MatrixXd covariance = (centered.transpose() * centered) / denom;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success) throw Error("pca: eigen decomposition failed");

  // Eigenvalues come in increasing order.
  result.components.resize(dim, k);
  result.explained_variance.resize(k);
  for (Index j = 0; j < k; ++j) {
    const Index src = dim - 1 - j;
    Eigen::VectorXd c = solver.eigenvectors().col(src);
    Index arg;
    c.cwiseAbs().maxCoeff(&arg);
    if (c(arg) < 0) c = -c;
    result.components.col(j) = c;
    result.explained_variance(j) = std::max(0.0, solver.eigenvalues()(src));
  }
  const double total = std::max(0.0, solver.eigenvalues().sum());
  result.explained_variance_ratio =
      total > 0 ? Eigen::VectorXd(result.explained_variance / total)
                : Eigen::VectorXd::Zero(k);
  result.projection = centered * result.components;
  return result;
}

std::string ToString(EdgeCombiner combiner) {
  return combiner == EdgeCombiner::kHadamard ? "hadamard" : "concat";
}

EdgeCombiner ParseEdgeCombiner(const std::string& text) {
  if (text == "hadamard") return EdgeCombiner::kHadamard;
  if (text == "concat") return EdgeCombiner::kConcat;
  throw InvalidArgumentError("unknown edge combiner '" + text +
                             "' (expected hadamard or concat)");
}

Eigen::MatrixXd EdgeFeatures(const Eigen::MatrixXd& vectors,
                             const std::vector<NodePair>& pairs,
                             EdgeCombiner combiner) {
  const Index n = vectors.rows();
  const Index dim = vectors.cols();
  const Index width = combiner == EdgeCombiner::kHadamard ? dim : 2 * dim;
  Eigen::MatrixXd features(static_cast<Index>(pairs.size()), width);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const NodePair p = NodePair::Canonical(pairs[r].u, pairs[r].v);
    if (p.u < 0 || p.v >= n) {
      throw InvalidArgumentError("edge_features: node index out of range");
    }
    if (combiner == EdgeCombiner::kHadamard) {
      features.row(r) = vectors.row(p.u).cwiseProduct(vectors.row(p.v));
    } else {
      features.row(r).head(dim) = vectors.row(p.u);
      features.row(r).tail(dim) = vectors.row(p.v);
    }
  }
  return features;
}

}  // namespace dyadicot
