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

#ifndef DYADICOT_OT_H_
#define DYADICOT_OT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dyadicot/error.h"

namespace dyadicot {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------------------
// Costs
// ---------------------------------------------------------------------------

namespace internal {
// Below this many multiply-adds the cost is evaluated entry by entry, which
// keeps it exact (e.g. a zero diagonal for A == B). Above it the expanded
// |a|^2 + |b|^2 - 2ab form runs through GEMM.
inline constexpr double kDirectCostWork = 4.0e7;
}  // namespace internal

// C_ij = sum_t (A_it - B_jt)^2 for point sets stored one point per row.
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> SquaredEuclideanCost(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() != b.cols()) {
    throw InvalidArgumentError("cost: point dimension mismatch (" +
                               std::to_string(a.cols()) + " vs " +
                               std::to_string(b.cols()) + ")");
  }
  MatrixX<Scalar> cost(a.rows(), b.rows());
  const double work = static_cast<double>(a.rows()) * b.rows() * a.cols();
  if (work <= internal::kDirectCostWork) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        cost(i, j) = (a.row(i) - b.row(j)).squaredNorm();
      }
    }
    return cost;
  }
  const VectorX<Scalar> a_norm = a.rowwise().squaredNorm();
  const VectorX<Scalar> b_norm = b.rowwise().squaredNorm();
  cost.noalias() = Scalar(-2) * (a * b.transpose());
  cost.colwise() += a_norm;
  cost.rowwise() += b_norm.transpose();
  return cost.cwiseMax(Scalar(0));
}

// 0 where the two points are identical (all coordinates equal), 1 otherwise.
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> HammingCost(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() != b.cols()) {
    throw InvalidArgumentError("cost: point dimension mismatch");
  }
  MatrixX<Scalar> cost(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      cost(i, j) = (a.row(i) == b.row(j)) ? Scalar(0) : Scalar(1);
    }
  }
  return cost;
}

// Hamming cost between labelled support points (equal labels cost 0).
template <typename Label>
Eigen::MatrixXd HammingCost(std::span<const Label> a, std::span<const Label> b) {
  Eigen::MatrixXd cost(a.size(), b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      cost(i, j) = a[i] == b[j] ? 0.0 : 1.0;
    }
  }
  return cost;
}

template <typename Derived>
typename Derived::Scalar Median(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> v(values.derived().data(),
                        values.derived().data() + values.size());
  if (v.empty()) return Scalar(0);
  const auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  Scalar hi = *mid;
  if (v.size() % 2 == 1) return hi;
  Scalar lo = *std::max_element(v.begin(), mid);
  return (lo + hi) / Scalar(2);
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

// Coupling between a row distribution and a column distribution.
template <typename Scalar>
struct BasicTransportPlan {
  MatrixX<Scalar> values;
  VectorX<Scalar> row_marginal;
  VectorX<Scalar> col_marginal;
  Scalar objective = 0;
  // Entropic solves only: whether the marginal tolerance was reached, the
  // iterations used, and the L1 marginal violation before final rounding.
  bool converged = true;
  Eigen::Index iterations = 0;
  Scalar marginal_error = 0;
};
using TransportPlan = BasicTransportPlan<double>;

// Uniform probability vector of length n.
inline Eigen::VectorXd Uniform(Eigen::Index n) {
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

// Row-stochastic matrix obtained by dividing each row by its mass; this is
// the barycentric projection operator of the plan. Rows without mass stay 0.
template <typename Derived>
MatrixX<typename Derived::Scalar> RowNormalized(
    const Eigen::MatrixBase<Derived>& plan) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> out = plan;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Scalar mass = out.row(i).sum();
    if (mass > Scalar(0)) out.row(i) /= mass;
  }
  return out;
}

// Throws if marginals are negative, non-finite or do not sum to one.
void CheckMarginals(const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b,
                    double tolerance = 1e-10);
void CheckCost(const Eigen::Ref<const Eigen::MatrixXd>& cost, Eigen::Index m,
               Eigen::Index n);

// ---------------------------------------------------------------------------
// Exact solver
// ---------------------------------------------------------------------------

// Minimises <P, C> over couplings of a and b with a network simplex on the
// complete bipartite transportation graph. Deterministic: a fixed block
// pricing order and the strongly feasible leaving-arc rule.
TransportPlan SolveExact(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& b);

// ---------------------------------------------------------------------------
// Entropic solver
// ---------------------------------------------------------------------------

struct SinkhornOptions {
  // Absolute regularisation. Zero means DefaultEpsilon(cost); negative
  // values are rejected.
  double epsilon = 0.0;
  Eigen::Index max_iter = 10000;
  // Stop when the L1 violation of the row marginal falls below this.
  double tol = 1e-7;
  // Start from a larger epsilon and shrink towards the target, warm
  // starting the potentials. Does not change the fixed point.
  bool anneal = true;
  // Throw instead of returning an unconverged (but rounded) plan.
  bool throw_on_nonconvergence = false;
};

// 0.05 * median(C), falling back to the max entry when the median is zero.
double DefaultEpsilon(const Eigen::Ref<const Eigen::MatrixXd>& cost);

namespace internal {

// Row-wise log-sum-exp of (kernel + shift broadcast along columns).
template <typename Scalar>
void RowLogSumExp(const MatrixX<Scalar>& kernel, const VectorX<Scalar>& shift,
                  MatrixX<Scalar>& work, VectorX<Scalar>& out) {
  work = kernel.rowwise() + shift.transpose();
  const VectorX<Scalar> hi = work.rowwise().maxCoeff();
  work.colwise() -= hi;
  out = hi.array() + work.array().exp().rowwise().sum().log();
}

template <typename Scalar>
void ColLogSumExp(const MatrixX<Scalar>& kernel, const VectorX<Scalar>& shift,
                  MatrixX<Scalar>& work, VectorX<Scalar>& out) {
  work = kernel.colwise() + shift;
  const VectorX<Scalar> hi = work.colwise().maxCoeff().transpose();
  work.rowwise() -= hi.transpose();
  out = hi.array() + work.array().exp().colwise().sum().transpose().log();
}

// Projects a nearly feasible non-negative matrix onto the coupling set
// exactly: shrink overfull rows, then overfull columns, then add the rank-one
// correction err_r err_c^T / |err_r|_1.
template <typename Scalar>
void RoundToCouplings(MatrixX<Scalar>& plan, const VectorX<Scalar>& a,
                      const VectorX<Scalar>& b) {
  VectorX<Scalar> rows = plan.rowwise().sum();
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    if (rows(i) > a(i)) plan.row(i) *= a(i) / rows(i);
  }
  VectorX<Scalar> cols = plan.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < plan.cols(); ++j) {
    if (cols(j) > b(j)) plan.col(j) *= b(j) / cols(j);
  }
  const VectorX<Scalar> err_r =
      (a - plan.rowwise().sum()).cwiseMax(Scalar(0));
  const VectorX<Scalar> err_c =
      (b - plan.colwise().sum().transpose()).cwiseMax(Scalar(0));
  const Scalar mass = err_r.sum();
  if (mass > Scalar(0)) plan.noalias() += err_r * err_c.transpose() / mass;
}

}  // namespace internal

// Log-domain Sinkhorn for min <P,C> - eps H(P) over couplings of a and b.
// The returned plan is rounded onto the coupling set, so its marginals are
// exact up to floating point and `objective` is the unregularised <P, C>.
template <typename Scalar>
BasicTransportPlan<Scalar> Sinkhorn(const MatrixX<Scalar>& cost,
                                    const VectorX<Scalar>& a,
                                    const VectorX<Scalar>& b,
                                    const SinkhornOptions& options) {
  const Eigen::Index m = cost.rows();
  const Eigen::Index n = cost.cols();
  if (a.size() != m || b.size() != n) {
    throw InvalidArgumentError("sinkhorn: marginal sizes do not match cost");
  }
  CheckMarginals(a.template cast<double>(), b.template cast<double>(),
                 std::max(1e-10, 16 * (m + n) * double(Eigen::NumTraits<Scalar>::epsilon())));
  CheckCost(cost.template cast<double>(), m, n);
  if (!(options.epsilon >= 0)) {
    throw InvalidArgumentError("sinkhorn: epsilon must be > 0");
  }
  const Scalar target_eps =
      options.epsilon > 0 ? Scalar(options.epsilon)
                          : Scalar(DefaultEpsilon(cost.template cast<double>()));
  if (!(target_eps > Scalar(0))) {
    throw InvalidArgumentError("sinkhorn: epsilon must be > 0");
  }

  // Restrict to the support of both marginals; zero-mass rows and columns
  // get zero plan entries.
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (a(i) > Scalar(0)) rows.push_back(i);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (b(j) > Scalar(0)) cols.push_back(j);
  }
  const Eigen::Index ms = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index ns = static_cast<Eigen::Index>(cols.size());
  MatrixX<Scalar> c(ms, ns);
  for (Eigen::Index jj = 0; jj < ns; ++jj) {
    for (Eigen::Index ii = 0; ii < ms; ++ii) c(ii, jj) = cost(rows[ii], cols[jj]);
  }
  VectorX<Scalar> as(ms), bs(ns);
  for (Eigen::Index ii = 0; ii < ms; ++ii) as(ii) = a(rows[ii]);
  for (Eigen::Index jj = 0; jj < ns; ++jj) bs(jj) = b(cols[jj]);
  const VectorX<Scalar> log_a = as.array().log();
  const VectorX<Scalar> log_b = bs.array().log();

  std::vector<Scalar> schedule;
  {
    Scalar eps = target_eps;
    const Scalar c_max = c.size() > 0 ? c.maxCoeff() : Scalar(0);
    schedule.push_back(eps);
    if (options.anneal) {
      while (eps * Scalar(4) < c_max) {
        eps *= Scalar(4);
        schedule.push_back(eps);
      }
    }
    std::reverse(schedule.begin(), schedule.end());
  }

  // Potentials are stored divided by the current epsilon (f / eps).
  VectorX<Scalar> f = VectorX<Scalar>::Zero(ms);
  VectorX<Scalar> g = VectorX<Scalar>::Zero(ns);
  MatrixX<Scalar> kernel, work;
  VectorX<Scalar> lse, f_new;
  Scalar prev_eps = schedule.front();
  Eigen::Index total_iters = 0;
  Scalar violation = std::numeric_limits<Scalar>::infinity();
  bool converged = false;

  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const Scalar eps = schedule[stage];
    f *= prev_eps / eps;
    g *= prev_eps / eps;
    prev_eps = eps;
    kernel = -c / eps;
    const bool final_stage = stage + 1 == schedule.size();
    const Eigen::Index stage_cap = final_stage ? options.max_iter : 200;
    const Scalar stage_tol =
        final_stage ? Scalar(options.tol) : std::max(Scalar(options.tol), Scalar(1e-4));
    violation = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index it = 0; it < stage_cap; ++it) {
      internal::RowLogSumExp(kernel, g, work, lse);
      f_new = log_a - lse;
      if (it > 0) {
        // Row masses of the current plan are a_i * exp(f_i - f_new_i).
        violation = (as.array() * ((f - f_new).array().exp() - Scalar(1)).abs()).sum();
      }
      f = f_new;
      internal::ColLogSumExp(kernel, f, work, lse);
      g = log_b - lse;
      ++total_iters;
      if (it > 0 && violation < stage_tol) break;
    }
    if (final_stage) converged = violation < Scalar(options.tol);
  }

  MatrixX<Scalar> sub = ((kernel.colwise() + f).rowwise() + g.transpose()).array().exp();
  const Scalar pre_error =
      (sub.rowwise().sum() - as).cwiseAbs().sum() +
      (sub.colwise().sum().transpose() - bs).cwiseAbs().sum();
  if (!sub.allFinite()) {
    throw InvalidArgumentError("sinkhorn: non-finite plan (epsilon too small)");
  }
  internal::RoundToCouplings(sub, as, bs);

  BasicTransportPlan<Scalar> plan;
  plan.values = MatrixX<Scalar>::Zero(m, n);
  for (Eigen::Index jj = 0; jj < ns; ++jj) {
    for (Eigen::Index ii = 0; ii < ms; ++ii) plan.values(rows[ii], cols[jj]) = sub(ii, jj);
  }
  plan.row_marginal = a;
  plan.col_marginal = b;
  plan.objective = (plan.values.array() * cost.array()).sum();
  plan.converged = converged;
  plan.iterations = total_iters;
  plan.marginal_error = pre_error;
  if (!converged && options.throw_on_nonconvergence) {
    throw Error("sinkhorn: no convergence within " +
                std::to_string(options.max_iter) + " iterations (violation " +
                std::to_string(static_cast<double>(violation)) + ")");
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Distances and barycenters
// ---------------------------------------------------------------------------

enum class Solver { kExact, kEntropic };

// Exact at or below `exact_limit` points per side, entropic above.
struct SolverPolicy {
  enum class Kind { kAuto, kExact, kEntropic };
  Kind kind = Kind::kAuto;
  Eigen::Index exact_limit = 1500;
  SinkhornOptions sinkhorn;

  Solver Choose(Eigen::Index m, Eigen::Index n) const {
    if (kind == Kind::kExact) return Solver::kExact;
    if (kind == Kind::kEntropic) return Solver::kEntropic;
    return std::max(m, n) <= exact_limit ? Solver::kExact : Solver::kEntropic;
  }
};

TransportPlan SolveTransport(const Eigen::MatrixXd& cost,
                             const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             Solver solver, const SinkhornOptions& sinkhorn = {});

// Optimal transport cost between a and b under `cost`.
double Wasserstein(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b, Solver solver = Solver::kExact,
                   const SinkhornOptions& sinkhorn = {});

// Exact squared-Euclidean Wasserstein distance between two uniformly
// weighted point clouds (one point per row).
double EmpiricalWasserstein(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

struct BarycenterOptions {
  Eigen::Index max_iters = 10;
  // Stop once an iteration improves the objective by less than this.
  double tolerance = 1e-9;
  SolverPolicy solver;
  int jobs = 1;
  // Cost between support points (rows) and group points (rows). Defaults to
  // SquaredEuclideanCost. The support update is the plan-weighted average,
  // which is the exact minimiser for any cost of the form sum_t w_t (.)^2.
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&, const Eigen::MatrixXd&)>
      cost;
};

struct BarycenterResult {
  Eigen::MatrixXd support;           // N x D
  std::vector<TransportPlan> plans;  // plans[k] is N x N_k
  std::vector<double> objective_history;
  Eigen::Index iterations = 0;
  bool converged = false;
  // False if any entropic plan in the final state missed its tolerance.
  bool plans_converged = true;
};

// Uniform sample of `support_size` rows from the pooled groups, without
// replacement while possible.
Eigen::MatrixXd SampleInitialSupport(std::span<const Eigen::MatrixXd> groups,
                                     Eigen::Index support_size,
                                     std::uint64_t seed);

// Free-support barycenter with equal weights 1/|groups| and a uniform
// support of init.rows() points. Alternates optimal plans for the fixed
// support with the barycentric support update. objective_history holds the
// objective of every accepted support and never increases.
BarycenterResult FreeSupportBarycenter(std::span<const Eigen::MatrixXd> groups,
                                       const Eigen::MatrixXd& init,
                                       const BarycenterOptions& options);

}  // namespace dyadicot

#endif  // DYADICOT_OT_H_
