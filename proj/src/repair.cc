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

#include "dyadicot/repair.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyadicot/random.h"

namespace dyadicot {

std::string ToString(RepairMode mode) {
  switch (mode) {
    case RepairMode::kAuto:
      return "auto";
    case RepairMode::kBinary:
      return "binary";
    case RepairMode::kMulticlass:
      return "multiclass";
  }
  return "auto";
}

RepairMode ParseRepairMode(const std::string& text) {
  if (text == "auto") return RepairMode::kAuto;
  if (text == "binary") return RepairMode::kBinary;
  if (text == "multiclass") return RepairMode::kMulticlass;
  throw InvalidArgumentError("unknown repair mode '" + text +
                             "' (expected auto, binary or multiclass)");
}

std::string ToString(SolverPolicy::Kind kind) {
  switch (kind) {
    case SolverPolicy::Kind::kAuto:
      return "auto";
    case SolverPolicy::Kind::kExact:
      return "exact";
    case SolverPolicy::Kind::kEntropic:
      return "entropic";
  }
  return "auto";
}

SolverPolicy::Kind ParseSolverKind(const std::string& text) {
  if (text == "auto") return SolverPolicy::Kind::kAuto;
  if (text == "exact") return SolverPolicy::Kind::kExact;
  if (text == "entropic") return SolverPolicy::Kind::kEntropic;
  throw InvalidArgumentError("unknown solver '" + text +
                             "' (expected auto, exact or entropic)");
}

void ValidateRepairConfig(const RepairConfig& config) {
  if (!(config.eta >= 0.0 && config.eta <= 1.0)) {
    throw InvalidArgumentError("repair: eta must lie in [0, 1]");
  }
  if (config.threshold && !(*config.threshold > 0.0 && *config.threshold <= 1.0)) {
    throw InvalidArgumentError("repair: threshold must lie in (0, 1]");
  }
  if (config.barycenter_iters < 0) {
    throw InvalidArgumentError("repair: barycenter_iters must be >= 0");
  }
  if (config.solver.sinkhorn.epsilon < 0.0) {
    throw InvalidArgumentError("repair: epsilon must be positive");
  }
  if (config.jobs < 1) throw InvalidArgumentError("repair: jobs must be >= 1");
}

MatrixX<double> DyadicCost(const GroupView& g0, const GroupView& g1, double eta,
                           const Eigen::VectorXd& attribute_scale) {
  if (g0.attribute_dim != g1.attribute_dim || g0.rows.cols() != g1.rows.cols()) {
    throw InvalidArgumentError("dyadic cost: groups come from different graphs");
  }
  if (attribute_scale.size() != 0 && attribute_scale.size() != g0.attribute_dim) {
    throw InvalidArgumentError("dyadic cost: attribute scale has wrong length");
  }
  return DyadicCost(g0.rows, g1.rows, g0.attribute_dim, eta, attribute_scale);
}

Eigen::VectorXd AttributeScale(const Graph& graph) {
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(graph.NumAttributes());
  if (graph.NumNodes() == 0) return scale;
  const Eigen::VectorXd max_abs =
      graph.attributes.cwiseAbs().colwise().maxCoeff().transpose();
  for (Index t = 0; t < scale.size(); ++t) {
    if (max_abs(t) > 0) scale(t) = 1.0 / max_abs(t);
  }
  return scale;
}

namespace {

void CheckPlanMarginals(const Eigen::MatrixXd& plan, Index rows, Index cols,
                        const char* what) {
  if (plan.rows() != rows || plan.cols() != cols) {
    throw InvalidArgumentError(std::string(what) + ": plan is " +
                               std::to_string(plan.rows()) + "x" +
                               std::to_string(plan.cols()) + ", expected " +
                               std::to_string(rows) + "x" + std::to_string(cols));
  }
  constexpr double kTolerance = 1e-8;
  const double row_mass = 1.0 / static_cast<double>(rows);
  const double col_mass = 1.0 / static_cast<double>(cols);
  const double row_err = (plan.rowwise().sum().array() - row_mass).abs().maxCoeff();
  const double col_err = (plan.colwise().sum().array() - col_mass).abs().maxCoeff();
  if (row_err > kTolerance || col_err > kTolerance || (plan.array() < 0).any()) {
    throw InvalidArgumentError(std::string(what) +
                               ": plan marginals are inconsistent with group sizes");
  }
}

GroupView WithRows(const GroupView& view, Eigen::MatrixXd rows) {
  GroupView out;
  out.group_id = view.group_id;
  out.member_index = view.member_index;
  out.attribute_dim = view.attribute_dim;
  out.rows = std::move(rows);
  return out;
}

}  // namespace

std::vector<GroupView> RepairBinary(const GroupView& g0, const GroupView& g1,
                                    const TransportPlan& plan) {
  if (g0.size() == 0 || g1.size() == 0) {
    throw InvalidArgumentError("repair_binary: empty group");
  }
  CheckPlanMarginals(plan.values, g0.size(), g1.size(), "repair_binary");
  auto [rows0, rows1] = GeodesicMidpoint(g0.rows, g1.rows, plan.values);
  return {WithRows(g0, std::move(rows0)), WithRows(g1, std::move(rows1))};
}

std::vector<GroupView> RepairMulticlass(const std::vector<GroupView>& groups,
                                        const BarycenterResult& barycenter) {
  if (groups.size() != barycenter.plans.size()) {
    throw InvalidArgumentError("repair_multiclass: " +
                               std::to_string(barycenter.plans.size()) +
                               " plans for " + std::to_string(groups.size()) +
                               " groups");
  }
  std::vector<GroupView> repaired;
  repaired.reserve(groups.size());
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].rows.cols() != barycenter.support.cols()) {
      throw InvalidArgumentError("repair_multiclass: support width mismatch");
    }
    CheckPlanMarginals(barycenter.plans[k].values, barycenter.support.rows(),
                       groups[k].size(), "repair_multiclass");
    repaired.push_back(WithRows(
        groups[k], ProjectFromBarycenter(barycenter.plans[k].values, barycenter.support)));
  }
  return repaired;
}

RepairedGraph ReassembleGraph(const Graph& original,
                              const std::vector<GroupView>& repaired,
                              const RepairConfig& config) {
  const Index n = original.NumNodes();
  const Index d = original.NumAttributes();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  RepairedGraph out;
  Graph& graph = out.graph;
  graph.attributes.resize(n, d);
  graph.adjacency.resize(n, n);
  graph.sensitive = original.sensitive;
  graph.node_ids = original.node_ids;
  graph.group_names = original.group_names;
  for (const GroupView& view : repaired) {
    if (view.rows.cols() != d + n || view.attribute_dim != d ||
        static_cast<Index>(view.member_index.size()) != view.size()) {
      throw InvalidArgumentError("reassemble: repaired rows have the wrong shape");
    }
    for (Index r = 0; r < view.size(); ++r) {
      const Index i = view.member_index[r];
      if (i < 0 || i >= n) throw InvalidArgumentError("reassemble: node index out of range");
      if (seen[i]) {
        throw InvalidArgumentError("reassemble: node " + std::to_string(i) +
                                   " appears twice");
      }
      seen[i] = 1;
      graph.attributes.row(i) = view.rows.row(r).head(d);
      graph.adjacency.row(i) = view.rows.row(r).tail(n);
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw InvalidArgumentError("reassemble: node " + std::to_string(i) +
                                 " is not covered");
    }
  }
  if (config.symmetrize) {
    Eigen::MatrixXd sym = 0.5 * (graph.adjacency + graph.adjacency.transpose());
    graph.adjacency = std::move(sym);
  }
  if (config.threshold) {
    const double t = *config.threshold;
    graph.adjacency = (graph.adjacency.array() >= t).cast<double>().matrix();
  }
  graph.adjacency.diagonal().setZero();
  graph.adjacency = graph.adjacency.cwiseMax(0.0).cwiseMin(1.0);
  out.provenance = original.node_ids;
  out.meta.eta = config.eta;
  out.meta.mode = config.mode;
  return out;
}

RepairedGraph RepairGraph(const Graph& graph, const RepairConfig& config) {
  ValidateRepairConfig(config);
  ValidateGraph(graph);
  const std::vector<GroupView> groups = SplitGroups(graph);
  RepairMode mode = config.mode;
  if (mode == RepairMode::kAuto) {
    mode = groups.size() == 2 ? RepairMode::kBinary : RepairMode::kMulticlass;
  }
  if (mode == RepairMode::kBinary && groups.size() != 2) {
    throw InvalidArgumentError("binary repair needs exactly 2 sensitive groups, found " +
                               std::to_string(groups.size()));
  }
  const Eigen::VectorXd scale =
      config.normalize_attributes ? AttributeScale(graph) : Eigen::VectorXd();
  auto solver_name = [](Solver s) {
    return s == Solver::kExact ? std::string("exact") : std::string("entropic");
  };

  RepairMeta meta;
  meta.mode = mode;
  meta.eta = config.eta;
  std::vector<GroupView> repaired;
  if (mode == RepairMode::kBinary) {
    const Eigen::MatrixXd cost = DyadicCost(groups[0], groups[1], config.eta, scale);
    const Solver solver = config.solver.Choose(groups[0].size(), groups[1].size());
    const TransportPlan plan =
        SolveTransport(cost, Uniform(groups[0].size()), Uniform(groups[1].size()),
                       solver, config.solver.sinkhorn);
    meta.solvers.push_back(solver_name(solver));
    meta.plan_objectives.push_back(plan.objective);
    meta.plans_converged = plan.converged;
    repaired = RepairBinary(groups[0], groups[1], plan);
  } else {
    std::vector<Eigen::MatrixXd> rows;
    rows.reserve(groups.size());
    for (const GroupView& g : groups) rows.push_back(g.rows);
    const Index d = graph.NumAttributes();
    BarycenterOptions options;
    options.max_iters = config.barycenter_iters;
    options.solver = config.solver;
    options.jobs = config.jobs;
    const double eta = config.eta;
    options.cost = [d, eta, &scale](const Eigen::MatrixXd& support,
                                    const Eigen::MatrixXd& group) {
      return DyadicCost(support, group, d, eta, scale);
    };
    const Eigen::MatrixXd init =
        SampleInitialSupport(rows, graph.NumNodes(), config.seed);
    const BarycenterResult bary = FreeSupportBarycenter(rows, init, options);
    for (std::size_t k = 0; k < groups.size(); ++k) {
      meta.solvers.push_back(
          solver_name(config.solver.Choose(init.rows(), groups[k].size())));
      meta.plan_objectives.push_back(bary.plans[k].objective);
    }
    meta.plans_converged = bary.plans_converged;
    meta.barycenter_objectives = bary.objective_history;
    meta.barycenter_iterations = bary.iterations;
    repaired = RepairMulticlass(groups, bary);
  }
  RepairedGraph out = ReassembleGraph(graph, repaired, config);
  out.meta = std::move(meta);
  return out;
}

Graph HeterophilyDropout(const Graph& graph, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidArgumentError("heterophily_dropout: delta must lie in [0, 1]");
  }
  Graph out = graph;
  Rng rng(DeriveSeed(seed, 0xd209));
  for (const NodePair& e : graph.Edges()) {
    if (graph.sensitive(e.u) != graph.sensitive(e.v)) continue;
    if (UniformUnit(rng) < delta) {
      out.adjacency(e.u, e.v) = 0.0;
      out.adjacency(e.v, e.u) = 0.0;
    }
  }
  return out;
}

}  // namespace dyadicot
