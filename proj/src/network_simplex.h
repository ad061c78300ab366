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

#ifndef DYADICOT_SRC_NETWORK_SIMPLEX_H_
#define DYADICOT_SRC_NETWORK_SIMPLEX_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace dyadicot::internal {

// Primal network simplex for the balanced transportation problem
//   min sum_ij C_ij x_ij  s.t.  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0
// on the complete bipartite graph. Rows are supply nodes 0..m-1, columns are
// demand nodes m..m+n-1, and an artificial root carries one big-M arc per
// node so the starting tree is strongly feasible. Entering arcs come from
// block pricing; leaving arcs follow the strongly feasible rule, which rules
// out cycling on the highly degenerate uniform-marginal instances.
class TransportNetworkSimplex {
 public:
  TransportNetworkSimplex(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b);

  // Runs to optimality; throws if the pivot budget is exhausted.
  void Solve(std::int64_t max_pivots = -1);

  // m x n flow matrix.
  Eigen::MatrixXd Flow() const;
  // Largest flow left on an artificial arc (zero for balanced inputs).
  double ArtificialFlow() const;
  std::int64_t pivots() const { return pivots_; }

 private:
  using Node = std::int32_t;
  using Arc = std::int64_t;

  bool IsRow(Node u) const { return u < m_; }
  Node Source(Arc e) const;
  Node Target(Arc e) const;
  double ArcCost(Arc e) const;
  double Reduced(Arc e) const {
    return ArcCost(e) + pi_[Source(e)] - pi_[Target(e)];
  }

  bool FindEnteringArc();
  void Pivot(Arc in);
  void RemoveTreeArc(Node u, Arc e);

  const Eigen::MatrixXd& cost_;
  Node m_ = 0;
  Node n_ = 0;
  Node root_ = 0;
  Arc real_arcs_ = 0;
  double art_cost_ = 0;
  double pricing_tol_ = 0;

  std::vector<double> flow_;
  std::vector<std::uint8_t> in_tree_;
  std::vector<Node> parent_;
  std::vector<Arc> pred_;
  std::vector<std::uint8_t> pred_up_;  // pred arc points from node to parent
  std::vector<std::int32_t> depth_;
  std::vector<double> pi_;
  std::vector<std::vector<Arc>> tree_arcs_;
  std::vector<Node> stack_;

  Arc next_arc_ = 0;
  Arc block_size_ = 0;
  std::int64_t pivots_ = 0;
};

}  // namespace dyadicot::internal

#endif  // DYADICOT_SRC_NETWORK_SIMPLEX_H_
