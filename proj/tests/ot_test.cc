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

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dyadicot/error.h"
#include "test_util.h"

namespace dyadicot {
namespace {

using testing::BruteForceAssignment;
using testing::HasNegativeResidualCycle;
using testing::RandomMatrix;
using testing::RandomSimplex;

void ExpectCoupling(const TransportPlan& plan, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b, double tol = 1e-8) {
  EXPECT_GE(plan.values.minCoeff(), 0.0);
  const Eigen::VectorXd rows = plan.values.rowwise().sum();
  const Eigen::VectorXd cols = plan.values.colwise().sum().transpose();
  for (Index i = 0; i < a.size(); ++i) EXPECT_NEAR(rows(i), a(i), tol);
  for (Index j = 0; j < b.size(); ++j) EXPECT_NEAR(cols(j), b(j), tol);
}

Eigen::MatrixXd Points(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST(SquaredEuclideanCostTest, Examples) {
  EXPECT_EQ(SquaredEuclideanCost(Points({{0, 0}}), Points({{3, 4}}))(0, 0), 25.0);
  const Eigen::MatrixXd c = SquaredEuclideanCost(Points({{1}, {2}}), Points({{0}}));
  EXPECT_EQ(c, Points({{1}, {4}}));
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd a = RandomMatrix(6, 3, rng);
  EXPECT_TRUE(SquaredEuclideanCost(a, a).diagonal().isZero(0.0));
  EXPECT_THROW(SquaredEuclideanCost(Points({{1, 2}}), Points({{1}})), InvalidArgumentError);
}

TEST(SquaredEuclideanCostTest, GemmPathMatchesDirect) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd a = RandomMatrix(400, 300, rng);
  const Eigen::MatrixXd b = RandomMatrix(400, 300, rng);
  const Eigen::MatrixXd fast = SquaredEuclideanCost(a, b);
  for (Index i = 0; i < 400; i += 37) {
    for (Index j = 0; j < 400; j += 41) {
      EXPECT_NEAR(fast(i, j), (a.row(i) - b.row(j)).squaredNorm(), 1e-9);
    }
  }
}

TEST(HammingCostTest, Examples) {
  const std::vector<char> single = {'p'};
  EXPECT_EQ(HammingCost<char>(single, single)(0, 0), 0.0);
  const std::vector<char> a = {'p', 'q'};
  const std::vector<char> b = {'q', 'r'};
  EXPECT_EQ(HammingCost<char>(a, b), Points({{1, 1}, {0, 1}}));
  const std::vector<char> c = {'x', 'y'};
  EXPECT_EQ(HammingCost<char>(a, c), Eigen::MatrixXd::Ones(2, 2));
  EXPECT_EQ(HammingCost(Points({{1, 2}, {3, 4}}), Points({{3, 4}})), Points({{1}, {0}}));
}

TEST(SolveExactTest, Examples) {
  const Eigen::VectorXd half = Uniform(2);
  TransportPlan plan = SolveExact(Points({{0, 1}, {1, 0}}), half, half);
  EXPECT_TRUE(plan.values.isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_EQ(plan.objective, 0.0);

  plan = SolveExact(Points({{1, 2}, {3, 1}}), half, half);
  EXPECT_TRUE(plan.values.isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_DOUBLE_EQ(plan.objective, 1.0);

  plan = SolveExact(Points({{7.5}}), Uniform(1), Uniform(1));
  EXPECT_EQ(plan.values(0, 0), 1.0);
  EXPECT_EQ(plan.objective, 7.5);
}

TEST(SolveExactTest, InfeasibleMarginals) {
  Eigen::VectorXd a(2), b(2);
  a << 0.5, 0.5;
  b << 0.5, 0.6;
  EXPECT_THROW(SolveExact(Eigen::MatrixXd::Ones(2, 2), a, b), InfeasibleInputError);
  b << 1.5, -0.5;
  EXPECT_THROW(SolveExact(Eigen::MatrixXd::Ones(2, 2), a, b), InfeasibleInputError);
  EXPECT_THROW(SolveExact(Eigen::MatrixXd::Ones(3, 2), a, a), InvalidArgumentError);
}

TEST(SolveExactTest, MatchesPermutationBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 1 + trial % 5;
    const Eigen::MatrixXd cost = RandomMatrix(n, n, rng, 0, 10);
    const TransportPlan plan = SolveExact(cost, Uniform(n), Uniform(n));
    ExpectCoupling(plan, Uniform(n), Uniform(n));
    EXPECT_NEAR(plan.objective, BruteForceAssignment(cost), 1e-12);
    EXPECT_NEAR(plan.objective, (plan.values.array() * cost.array()).sum(), 1e-12);
  }
}

TEST(SolveExactTest, ResidualGraphHasNoNegativeCycle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> size(1, 12);
    const Index m = size(rng);
    const Index n = size(rng);
    const Eigen::MatrixXd cost = RandomMatrix(m, n, rng, 0, 5);
    const Eigen::VectorXd a = RandomSimplex(m, rng);
    const Eigen::VectorXd b = RandomSimplex(n, rng);
    const TransportPlan plan = SolveExact(cost, a, b);
    ExpectCoupling(plan, a, b);
    EXPECT_FALSE(HasNegativeResidualCycle(cost, plan.values));
  }
}

TEST(SolveExactTest, ZeroMassEntries) {
  Eigen::VectorXd a(3), b(2);
  a << 0.5, 0.0, 0.5;
  b << 1.0, 0.0;
  const TransportPlan plan = SolveExact(Points({{1, 0}, {0, 0}, {2, 0}}), a, b);
  ExpectCoupling(plan, a, b);
  EXPECT_DOUBLE_EQ(plan.objective, 1.5);
}

TEST(SolveExactTest, LargerInstanceCertificateAndDeterminism) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd x = RandomMatrix(120, 4, rng);
  const Eigen::MatrixXd y = RandomMatrix(90, 4, rng);
  const Eigen::MatrixXd cost = SquaredEuclideanCost(x, y);
  const TransportPlan first = SolveExact(cost, Uniform(120), Uniform(90));
  const TransportPlan second = SolveExact(cost, Uniform(120), Uniform(90));
  ExpectCoupling(first, Uniform(120), Uniform(90), 1e-12);
  EXPECT_FALSE(HasNegativeResidualCycle(cost, first.values));
  EXPECT_EQ(first.values, second.values);
}

TEST(SinkhornTest, ZeroCostGivesProductPlan) {
  std::mt19937_64 rng(6);
  const Eigen::VectorXd a = RandomSimplex(4, rng);
  const Eigen::VectorXd b = RandomSimplex(5, rng);
  SinkhornOptions options;
  options.epsilon = 0.1;
  const TransportPlan plan = Sinkhorn<double>(Eigen::MatrixXd::Zero(4, 5), a, b, options);
  EXPECT_TRUE(plan.converged);
  EXPECT_LT((plan.values - a * b.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SinkhornTest, SelfMatchingIsNearDiagonal) {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd pts = RandomMatrix(8, 2, rng);
  const Eigen::MatrixXd cost = SquaredEuclideanCost(pts, pts);
  SinkhornOptions options;
  options.epsilon = 1e-3 * Median(cost.reshaped());
  const TransportPlan plan = Sinkhorn<double>(cost, Uniform(8), Uniform(8), options);
  EXPECT_GT(plan.values.diagonal().sum(), 0.99);
}

TEST(SinkhornTest, CloseToExactWithSmallEpsilon) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd cost = RandomMatrix(10, 10, rng);
    const Eigen::VectorXd a = RandomSimplex(10, rng);
    const Eigen::VectorXd b = RandomSimplex(10, rng);
    SinkhornOptions options;
    options.epsilon = 1e-3 * Median(cost.reshaped());
    options.max_iter = 200000;
    const TransportPlan entropic = Sinkhorn<double>(cost, a, b, options);
    const TransportPlan exact = SolveExact(cost, a, b);
    ExpectCoupling(entropic, a, b);
    EXPECT_TRUE(entropic.converged);
    EXPECT_LE(std::abs(entropic.objective - exact.objective), 1e-3 * (1 + exact.objective));
  }
}

TEST(SinkhornTest, NeverBeatsExact) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> size(1, 9);
    const Index m = size(rng);
    const Index n = size(rng);
    const Eigen::MatrixXd cost = RandomMatrix(m, n, rng, 0, 3);
    const Eigen::VectorXd a = RandomSimplex(m, rng);
    const Eigen::VectorXd b = RandomSimplex(n, rng);
    SinkhornOptions options;
    options.epsilon = std::uniform_real_distribution<double>(0.001, 1.0)(rng);
    const TransportPlan entropic = Sinkhorn<double>(cost, a, b, options);
    const TransportPlan exact = SolveExact(cost, a, b);
    EXPECT_GE(entropic.objective, exact.objective - 1e-12);
  }
}

TEST(SinkhornTest, FlagsNonConvergence) {
  std::mt19937_64 rng(10);
  const Eigen::MatrixXd cost = RandomMatrix(10, 10, rng);
  SinkhornOptions options;
  options.epsilon = 1e-4;
  options.max_iter = 2;
  options.anneal = false;
  const TransportPlan plan = Sinkhorn<double>(cost, Uniform(10), Uniform(10), options);
  EXPECT_FALSE(plan.converged);
  ExpectCoupling(plan, Uniform(10), Uniform(10));
  options.throw_on_nonconvergence = true;
  EXPECT_THROW(Sinkhorn<double>(cost, Uniform(10), Uniform(10), options), Error);
}

TEST(SinkhornTest, SmallEpsilonStaysFinite) {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd cost = RandomMatrix(30, 30, rng, 0, 100);
  SinkhornOptions options;
  options.epsilon = 1e-3 * Median(cost.reshaped());
  options.max_iter = 50;
  const TransportPlan plan = Sinkhorn<double>(cost, Uniform(30), Uniform(30), options);
  EXPECT_TRUE(plan.values.allFinite());
}

TEST(SinkhornTest, FloatScalar) {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXf cost = RandomMatrix(6, 6, rng).cast<float>();
  SinkhornOptions options;
  options.epsilon = 0.05;
  options.tol = 1e-4;
  const auto plan = Sinkhorn<float>(cost, Uniform(6).cast<float>(), Uniform(6).cast<float>(),
                                    options);
  EXPECT_TRUE(plan.values.allFinite());
  EXPECT_NEAR(plan.values.sum(), 1.0f, 1e-5f);
}

TEST(SinkhornTest, RejectsNegativeEpsilon) {
  SinkhornOptions options;
  options.epsilon = -1;
  EXPECT_THROW(Sinkhorn<double>(Eigen::MatrixXd::Ones(2, 2), Uniform(2), Uniform(2), options),
               InvalidArgumentError);
}

TEST(WassersteinTest, Examples) {
  EXPECT_EQ(Wasserstein(Points({{0, 1}, {1, 0}}), Uniform(2), Uniform(2)), 0.0);
  Eigen::VectorXd a(2), b(2);
  a << 0.7, 0.3;
  b << 0.4, 0.6;
  EXPECT_NEAR(Wasserstein(Points({{0, 1}, {1, 0}}), a, b), 0.3, 1e-15);
  EXPECT_NEAR(Wasserstein(Eigen::MatrixXd::Ones(2, 2), a, b), 1.0, 1e-15);
}

TEST(WassersteinTest, HammingEqualsTotalVariation) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + trial % 8;
    const Eigen::VectorXd a = RandomSimplex(n, rng);
    const Eigen::VectorXd b = RandomSimplex(n, rng);
    std::vector<int> support(n);
    std::iota(support.begin(), support.end(), 0);
    const Eigen::MatrixXd cost = HammingCost<int>(support, support);
    EXPECT_NEAR(Wasserstein(cost, a, b), 0.5 * (a - b).cwiseAbs().sum(), 1e-12);
  }
}

TEST(WassersteinTest, MetricAxioms) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + trial % 6;
    Eigen::MatrixXd cost = RandomMatrix(n, n, rng);
    cost = (cost + cost.transpose()).eval();
    cost.diagonal().setZero();
    const Eigen::VectorXd a = RandomSimplex(n, rng);
    const Eigen::VectorXd b = RandomSimplex(n, rng);
    EXPECT_NEAR(Wasserstein(cost, a, a), 0.0, 1e-14);
    EXPECT_NEAR(Wasserstein(cost, a, b), Wasserstein(cost, b, a), 1e-12);
  }
}

TEST(SolverPolicyTest, ChoosesBySize) {
  SolverPolicy policy;
  policy.exact_limit = 10;
  EXPECT_EQ(policy.Choose(10, 3), Solver::kExact);
  EXPECT_EQ(policy.Choose(11, 3), Solver::kEntropic);
  policy.kind = SolverPolicy::Kind::kExact;
  EXPECT_EQ(policy.Choose(1000, 1000), Solver::kExact);
  policy.kind = SolverPolicy::Kind::kEntropic;
  EXPECT_EQ(policy.Choose(1, 1), Solver::kEntropic);
}

double BarycenterObjective(const std::vector<Eigen::MatrixXd>& groups,
                           const Eigen::MatrixXd& support) {
  double total = 0.0;
  for (const auto& g : groups) {
    total += Wasserstein(SquaredEuclideanCost(support, g), Uniform(support.rows()),
                         Uniform(g.rows())) /
             static_cast<double>(groups.size());
  }
  return total;
}

TEST(BarycenterTest, SingleGroupRecoversGroup) {
  std::mt19937_64 rng(15);
  const std::vector<Eigen::MatrixXd> groups = {RandomMatrix(6, 2, rng)};
  BarycenterOptions options;
  const Eigen::MatrixXd init = RandomMatrix(6, 2, rng);
  const BarycenterResult result = FreeSupportBarycenter(groups, init, options);
  EXPECT_NEAR(result.objective_history.back(), 0.0, 1e-12);
  EXPECT_TRUE(result.converged);
}

TEST(BarycenterTest, MidpointOfTwoPoints) {
  const std::vector<Eigen::MatrixXd> groups = {Points({{0}}), Points({{2}})};
  const BarycenterResult result = FreeSupportBarycenter(groups, Points({{0}}), {});
  EXPECT_DOUBLE_EQ(result.support(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(result.objective_history.back(), 1.0);
}

TEST(BarycenterTest, LocallyOptimalAgainstPerturbations) {
  const std::vector<Eigen::MatrixXd> groups = {Points({{0}, {0}}), Points({{2}, {4}})};
  const Eigen::MatrixXd init = SampleInitialSupport(groups, 2, 0);
  const BarycenterResult result = FreeSupportBarycenter(groups, init, {});
  Eigen::VectorXd sorted = result.support.col(0);
  std::sort(sorted.begin(), sorted.end());
  EXPECT_NEAR(sorted(0), 1.0, 1e-12);
  EXPECT_NEAR(sorted(1), 2.0, 1e-12);
  const double best = result.objective_history.back();
  EXPECT_NEAR(best, BarycenterObjective(groups, result.support), 1e-12);
  std::mt19937_64 rng(16);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd moved = result.support;
    for (Index i = 0; i < moved.rows(); ++i) moved(i, 0) += noise(rng);
    EXPECT_LE(best, BarycenterObjective(groups, moved) + 1e-12);
  }
}

TEST(BarycenterTest, ObjectiveNeverIncreases) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::MatrixXd> groups;
    for (int k = 0; k < 3; ++k) groups.push_back(RandomMatrix(4 + trial % 5, 3, rng));
    BarycenterOptions options;
    options.max_iters = 20;
    if (trial % 2 == 1) options.solver.kind = SolverPolicy::Kind::kEntropic;
    const Eigen::MatrixXd init = SampleInitialSupport(groups, 12, trial);
    const BarycenterResult result = FreeSupportBarycenter(groups, init, options);
    for (std::size_t i = 1; i < result.objective_history.size(); ++i) {
      EXPECT_LE(result.objective_history[i], result.objective_history[i - 1]);
    }
    ASSERT_EQ(result.plans.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
      ExpectCoupling(result.plans[k], Uniform(12), Uniform(groups[k].rows()));
    }
  }
}

TEST(BarycenterTest, CustomCostAndParallelAgree) {
  std::mt19937_64 rng(18);
  std::vector<Eigen::MatrixXd> groups;
  for (int k = 0; k < 3; ++k) groups.push_back(RandomMatrix(5, 2, rng));
  const Eigen::MatrixXd init = SampleInitialSupport(groups, 6, 1);
  BarycenterOptions serial;
  BarycenterOptions parallel;
  parallel.jobs = 3;
  parallel.cost = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return SquaredEuclideanCost(a, b);
  };
  const BarycenterResult x = FreeSupportBarycenter(groups, init, serial);
  const BarycenterResult y = FreeSupportBarycenter(groups, init, parallel);
  EXPECT_EQ(x.support, y.support);
  EXPECT_EQ(x.objective_history, y.objective_history);
}

TEST(BarycenterTest, Errors) {
  const std::vector<Eigen::MatrixXd> none;
  EXPECT_THROW(FreeSupportBarycenter(none, Points({{0}}), {}), InvalidArgumentError);
  const std::vector<Eigen::MatrixXd> empty = {Eigen::MatrixXd(0, 1), Points({{1}})};
  EXPECT_THROW(FreeSupportBarycenter(empty, Points({{0}}), {}), InvalidArgumentError);
  const std::vector<Eigen::MatrixXd> ok = {Points({{1}})};
  EXPECT_THROW(FreeSupportBarycenter(ok, Eigen::MatrixXd(0, 1), {}), InvalidArgumentError);
  EXPECT_THROW(SampleInitialSupport(ok, 0, 0), InvalidArgumentError);
}

TEST(SampleInitialSupportTest, WithoutReplacementWhilePossible) {
  const std::vector<Eigen::MatrixXd> groups = {Points({{0}, {1}}), Points({{2}, {3}, {4}})};
  const Eigen::MatrixXd support = SampleInitialSupport(groups, 5, 3);
  std::vector<double> values(support.data(), support.data() + 5);
  std::sort(values.begin(), values.end());
  EXPECT_EQ(values, (std::vector<double>{0, 1, 2, 3, 4}));
  EXPECT_EQ(SampleInitialSupport(groups, 4, 9), SampleInitialSupport(groups, 4, 9));
}

}  // namespace
}  // namespace dyadicot
