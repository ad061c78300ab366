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

#ifndef DYADICOT_REPAIR_H_
#define DYADICOT_REPAIR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dyadicot/error.h"
#include "dyadicot/graph.h"
#include "dyadicot/ot.h"

namespace dyadicot {

enum class RepairMode { kAuto, kBinary, kMulticlass };

std::string ToString(RepairMode mode);
RepairMode ParseRepairMode(const std::string& text);
std::string ToString(SolverPolicy::Kind kind);
SolverPolicy::Kind ParseSolverKind(const std::string& text);

struct RepairConfig {
  // Weight of the attribute block against the adjacency block in the cost.
  double eta = 0.5;
  // kAuto picks binary repair for two groups and the barycenter otherwise.
  RepairMode mode = RepairMode::kAuto;
  SolverPolicy solver;
  bool symmetrize = true;
  // When set, repaired adjacency entries >= threshold become 1, others 0.
  std::optional<double> threshold;
  // Scale attribute columns to unit max absolute value inside the cost.
  bool normalize_attributes = true;
  std::uint64_t seed = 0;
  Eigen::Index barycenter_iters = 10;
  int jobs = 1;
};

void ValidateRepairConfig(const RepairConfig& config);

// C_ij = eta * |w o (x_i - x_j)|^2 + (1 - eta) * |e_i - e_j|^2 where x is the
// first `attribute_dim` columns, e the rest, and w optional per-attribute
// scales (empty = all ones).
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> DyadicCost(
    const Eigen::MatrixBase<DerivedA>& rows_a,
    const Eigen::MatrixBase<DerivedB>& rows_b, Eigen::Index attribute_dim,
    double eta, const Eigen::VectorXd& attribute_scale = {}) {
  using Scalar = typename DerivedA::Scalar;
  if (rows_a.cols() != rows_b.cols() || attribute_dim > rows_a.cols() ||
      attribute_dim < 0) {
    throw InvalidArgumentError("dyadic cost: mismatched row widths");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgumentError("dyadic cost: eta must lie in [0, 1]");
  }
  const Eigen::Index structure_dim = rows_a.cols() - attribute_dim;
  MatrixX<Scalar> cost = MatrixX<Scalar>::Zero(rows_a.rows(), rows_b.rows());
  if (eta > 0.0 && attribute_dim > 0) {
    if (attribute_scale.size() == 0) {
      cost += Scalar(eta) * SquaredEuclideanCost(rows_a.leftCols(attribute_dim),
                                                 rows_b.leftCols(attribute_dim));
    } else {
      const auto scale = attribute_scale.cast<Scalar>().asDiagonal();
      const MatrixX<Scalar> xa = rows_a.leftCols(attribute_dim) * scale;
      const MatrixX<Scalar> xb = rows_b.leftCols(attribute_dim) * scale;
      cost += Scalar(eta) * SquaredEuclideanCost(xa, xb);
    }
  }
  if (eta < 1.0 && structure_dim > 0) {
    cost += Scalar(1.0 - eta) * SquaredEuclideanCost(rows_a.rightCols(structure_dim),
                                                     rows_b.rightCols(structure_dim));
  }
  return cost;
}

MatrixX<double> DyadicCost(const GroupView& g0, const GroupView& g1, double eta,
                           const Eigen::VectorXd& attribute_scale = {});

// 1 / max_i |x_it| per attribute column (1 for all-zero columns).
Eigen::VectorXd AttributeScale(const Graph& graph);

// Moves both groups to the midpoint of the Wasserstein geodesic:
//   G0' = pi0 G0 + pi1 T G1,  G1' = pi1 G1 + pi0 T' G0
// with pi_s = N_s / (N0 + N1), T the row-normalised plan and T' the
// row-normalised transpose. Every output row is a convex combination of
// input rows.
template <typename Derived0, typename Derived1, typename DerivedPlan>
std::pair<MatrixX<typename Derived0::Scalar>, MatrixX<typename Derived0::Scalar>>
GeodesicMidpoint(const Eigen::MatrixBase<Derived0>& g0,
                 const Eigen::MatrixBase<Derived1>& g1,
                 const Eigen::MatrixBase<DerivedPlan>& plan) {
  using Scalar = typename Derived0::Scalar;
  if (plan.rows() != g0.rows() || plan.cols() != g1.rows()) {
    throw InvalidArgumentError("repair: plan shape does not match group sizes");
  }
  if (g0.cols() != g1.cols()) {
    throw InvalidArgumentError("repair: group row widths differ");
  }
  const Scalar total = static_cast<Scalar>(g0.rows() + g1.rows());
  const Scalar pi0 = static_cast<Scalar>(g0.rows()) / total;
  const Scalar pi1 = static_cast<Scalar>(g1.rows()) / total;
  MatrixX<Scalar> repaired0 = pi0 * g0;
  repaired0.noalias() += pi1 * (RowNormalized(plan) * g1);
  MatrixX<Scalar> repaired1 = pi1 * g1;
  repaired1.noalias() += pi0 * (RowNormalized(plan.transpose()) * g0);
  return {std::move(repaired0), std::move(repaired1)};
}

// Group rows replaced by the barycentric projection N_k Gamma_k^T Gbar of the
// barycenter support; Gamma_k is N x N_k.
template <typename DerivedPlan, typename DerivedSupport>
MatrixX<typename DerivedSupport::Scalar> ProjectFromBarycenter(
    const Eigen::MatrixBase<DerivedPlan>& plan,
    const Eigen::MatrixBase<DerivedSupport>& support) {
  if (plan.rows() != support.rows()) {
    throw InvalidArgumentError("repair: plan rows do not match barycenter support");
  }
  return RowNormalized(plan.transpose()) * support;
}

// Validates plan marginals against the groups and applies GeodesicMidpoint.
std::vector<GroupView> RepairBinary(const GroupView& g0, const GroupView& g1,
                                    const TransportPlan& plan);

// One repaired view per group, in the order given.
std::vector<GroupView> RepairMulticlass(const std::vector<GroupView>& groups,
                                        const BarycenterResult& barycenter);

struct RepairMeta {
  RepairMode mode = RepairMode::kAuto;  // the mode actually used
  double eta = 0.5;
  std::vector<std::string> solvers;     // per plan: "exact" or "entropic"
  std::vector<double> plan_objectives;  // per plan <Gamma, C>
  bool plans_converged = true;
  std::vector<double> barycenter_objectives;
  Eigen::Index barycenter_iterations = 0;
};

struct RepairedGraph {
  Graph graph;
  std::vector<std::string> provenance;  // original node ids, in node order
  RepairMeta meta;
};

// Splits repaired rows back into attribute and adjacency blocks at the
// original node positions, then symmetrises, thresholds, zeroes the diagonal
// and clips to [0, 1] as configured.
RepairedGraph ReassembleGraph(const Graph& original,
                              const std::vector<GroupView>& repaired,
                              const RepairConfig& config);

// Full repair: split groups, build the cost, solve the plan(s), move the
// groups and reassemble.
RepairedGraph RepairGraph(const Graph& graph, const RepairConfig& config);

// Drops each edge whose endpoints share a sensitive value with probability
// `delta`; other edges are kept.
Graph HeterophilyDropout(const Graph& graph, double delta, std::uint64_t seed);

}  // namespace dyadicot

#endif  // DYADICOT_REPAIR_H_
