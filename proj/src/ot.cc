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

#include "dyadicot/ot.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "dyadicot/random.h"
#include "network_simplex.h"

namespace dyadicot {

void CheckMarginals(const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b,
                    double tolerance) {
  auto check = [tolerance](const Eigen::Ref<const Eigen::VectorXd>& v,
                           const char* name) {
    if (v.size() == 0) {
      throw InvalidArgumentError(std::string("transport: empty marginal ") + name);
    }
    if (!v.allFinite() || (v.array() < 0).any()) {
      throw InfeasibleInputError(std::string("transport: marginal ") + name +
                                 " must be finite and non-negative");
    }
    if (std::abs(v.sum() - 1.0) > tolerance) {
      throw InfeasibleInputError(std::string("transport: marginal ") + name +
                                 " sums to " + std::to_string(v.sum()) +
                                 ", expected 1");
    }
  };
  check(a, "a");
  check(b, "b");
}

void CheckCost(const Eigen::Ref<const Eigen::MatrixXd>& cost, Eigen::Index m,
               Eigen::Index n) {
  if (cost.rows() != m || cost.cols() != n) {
    throw InvalidArgumentError("transport: cost is " +
                               std::to_string(cost.rows()) + "x" +
                               std::to_string(cost.cols()) + ", marginals are " +
                               std::to_string(m) + " and " + std::to_string(n));
  }
  if (!cost.allFinite() || (cost.array() < 0).any()) {
    throw InvalidArgumentError("transport: cost entries must be finite and >= 0");
  }
}

double DefaultEpsilon(const Eigen::Ref<const Eigen::MatrixXd>& cost) {
  if (cost.size() == 0) return 1.0;
  const Eigen::MatrixXd copy = cost;
  double scale = Median(copy);
  if (!(scale > 0)) scale = cost.maxCoeff();
  if (!(scale > 0)) return 1.0;
  return 0.05 * scale;
}

TransportPlan SolveExact(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& b) {
  CheckMarginals(a, b);
  CheckCost(cost, a.size(), b.size());
  internal::TransportNetworkSimplex simplex(cost, a, b);
  simplex.Solve();
  if (simplex.ArtificialFlow() > 1e-9) {
    throw InfeasibleInputError("transport: marginals cannot be coupled");
  }
  TransportPlan plan;
  plan.values = simplex.Flow();
  plan.row_marginal = a;
  plan.col_marginal = b;
  plan.objective = (plan.values.array() * cost.array()).sum();
  plan.converged = true;
  plan.iterations = simplex.pivots();
  plan.marginal_error =
      (plan.values.rowwise().sum() - a).cwiseAbs().sum() +
      (plan.values.colwise().sum().transpose() - b).cwiseAbs().sum();
  return plan;
}

TransportPlan SolveTransport(const Eigen::MatrixXd& cost,
                             const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             Solver solver, const SinkhornOptions& sinkhorn) {
  if (solver == Solver::kExact) return SolveExact(cost, a, b);
  return Sinkhorn<double>(cost, a, b, sinkhorn);
}

double Wasserstein(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b, Solver solver,
                   const SinkhornOptions& sinkhorn) {
  return SolveTransport(cost, a, b, solver, sinkhorn).objective;
}

double EmpiricalWasserstein(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return Wasserstein(SquaredEuclideanCost(x, y), Uniform(x.rows()),
                     Uniform(y.rows()), Solver::kExact);
}

Eigen::MatrixXd SampleInitialSupport(std::span<const Eigen::MatrixXd> groups,
                                     Eigen::Index support_size,
                                     std::uint64_t seed) {
  if (groups.empty()) throw InvalidArgumentError("barycenter: no groups");
  if (support_size <= 0) {
    throw InvalidArgumentError("barycenter: support size must be positive");
  }
  std::vector<std::pair<std::size_t, Eigen::Index>> pool;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    for (Eigen::Index i = 0; i < groups[k].rows(); ++i) pool.emplace_back(k, i);
  }
  if (pool.empty()) throw InvalidArgumentError("barycenter: empty group");
  Rng rng(DeriveSeed(seed, 0xba7));
  std::vector<std::pair<std::size_t, Eigen::Index>> chosen;
  chosen.reserve(support_size);
  while (static_cast<Eigen::Index>(chosen.size()) < support_size) {
    std::vector<std::pair<std::size_t, Eigen::Index>> round = pool;
    Shuffle(round, rng);
    const std::size_t take = std::min<std::size_t>(
        round.size(), static_cast<std::size_t>(support_size) - chosen.size());
    chosen.insert(chosen.end(), round.begin(), round.begin() + take);
  }
  Eigen::MatrixXd support(support_size, groups.front().cols());
  for (Eigen::Index r = 0; r < support_size; ++r) {
    support.row(r) = groups[chosen[r].first].row(chosen[r].second);
  }
  return support;
}

namespace {

struct PlanState {
  std::vector<TransportPlan> plans;
  double objective = 0.0;
  bool plans_converged = true;
};

PlanState SolvePlans(std::span<const Eigen::MatrixXd> groups,
                     const Eigen::MatrixXd& support,
                     const BarycenterOptions& options) {
  const std::size_t count = groups.size();
  PlanState state;
  state.plans.resize(count);
  const Eigen::VectorXd support_weights = Uniform(support.rows());
  auto solve_one = [&](std::size_t k) {
    const Eigen::MatrixXd cost = options.cost
                                     ? options.cost(support, groups[k])
                                     : SquaredEuclideanCost(support, groups[k]);
    const Solver solver = options.solver.Choose(support.rows(), groups[k].rows());
    state.plans[k] = SolveTransport(cost, support_weights, Uniform(groups[k].rows()),
                                    solver, options.solver.sinkhorn);
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1 || count == 1) {
    for (std::size_t k = 0; k < count; ++k) solve_one(k);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(count);
    std::size_t next = 0;
    std::mutex mu;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        while (true) {
          std::size_t k;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= count) return;
            k = next++;
          }
          try {
            solve_one(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (const auto& plan : state.plans) {
    state.objective += plan.objective / static_cast<double>(count);
    state.plans_converged = state.plans_converged && plan.converged;
  }
  return state;
}

}  // namespace

BarycenterResult FreeSupportBarycenter(std::span<const Eigen::MatrixXd> groups,
                                       const Eigen::MatrixXd& init,
                                       const BarycenterOptions& options) {
  if (groups.empty()) throw InvalidArgumentError("barycenter: no groups");
  if (init.rows() <= 0) {
    throw InvalidArgumentError("barycenter: support size must be positive");
  }
  for (const auto& g : groups) {
    if (g.rows() == 0) throw InvalidArgumentError("barycenter: empty group");
    if (g.cols() != init.cols()) {
      throw InvalidArgumentError("barycenter: group dimension mismatch");
    }
  }
  const double weight = 1.0 / static_cast<double>(groups.size());

  BarycenterResult result;
  result.support = init;
  PlanState state = SolvePlans(groups, result.support, options);
  result.objective_history.push_back(state.objective);

  for (Eigen::Index it = 0; it < options.max_iters; ++it) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(init.rows(), init.cols());
    for (std::size_t k = 0; k < groups.size(); ++k) {
      next.noalias() += weight * (RowNormalized(state.plans[k].values) * groups[k]);
    }
    PlanState candidate = SolvePlans(groups, next, options);
    ++result.iterations;
    const double improvement = result.objective_history.back() - candidate.objective;
    if (improvement < 0) {
      // Only possible with entropic plans; keep the better state.
      result.converged = true;
      break;
    }
    result.support = std::move(next);
    state = std::move(candidate);
    result.objective_history.push_back(state.objective);
    if (improvement < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.plans = std::move(state.plans);
  result.plans_converged = state.plans_converged;
  return result;
}

}  // namespace dyadicot
