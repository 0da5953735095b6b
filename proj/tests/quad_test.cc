// Copyright 2026 The Authors.
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

#include "recourse/quad.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "oracles.h"
#include "test_util.h"

namespace recourse {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

struct Instance {
  Matrix A;
  QuadProblem problem;
};

Instance RandomInstance(std::mt19937_64& rng, int n, int p, double weight,
                        int K) {
  Instance inst;
  const Matrix samples = testing::RandomMatrix(rng, n, p, -2, 2);
  inst.A = ComputeDirections(Vector::Zero(p), samples).A;
  inst.problem.S = Similarity(inst.A);
  inst.problem.d = EuclideanDistances(Vector::Zero(p), samples).d;
  inst.problem.weight = weight;
  inst.problem.K = K;
  return inst;
}

EigenBasis SingleVector(int n, double sigma, const Vector& v) {
  EigenBasis basis;
  basis.sigma = Vector::Constant(1, sigma);
  basis.v = v;
  basis.v.resize(n, 1);
  basis.requested = 1;
  return basis;
}

TEST(QuadObjectiveTest, Examples) {
  QuadProblem problem;
  problem.S = Matrix::Identity(3, 3);
  problem.d = Vector::Ones(3);
  problem.weight = 0.5;
  problem.K = 2;
  EXPECT_EQ(QuadObjective(problem, {0, 1}), 2.0);
  problem.weight = 0.0;
  problem.d << 1, 2, 4;
  EXPECT_EQ(QuadObjective(problem, {1, 2}), 6.0);
  problem.weight = 1.0;
  problem.S(0, 1) = problem.S(1, 0) = -1.0;
  EXPECT_EQ(QuadObjective(problem, {0, 1}), 0.0);
  EXPECT_THROW(QuadObjective(problem, {0}), RecourseError);
}

TEST(QuadObjectiveTest, MatchesNaiveSum) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = RandomInstance(rng, 15, 3, 0.7, 4);
    const IndexSet z = {1, 4, 9, 13};
    EXPECT_NEAR(
        QuadObjective(inst.problem, z),
        testing::NaiveQuadObjective(inst.problem.S, inst.problem.d, 0.7, z),
        1e-12);
  }
}

TEST(ZStarTest, Examples) {
  const EigenBasis basis = SingleVector(4, 1.0, Vector::Unit(4, 0));
  Vector d(4);
  d << 4, 1, 3, 2;
  EXPECT_THAT(ZStar(Vector::Zero(1), basis, d, 0.5, 2), ElementsAre(1, 3));
  EXPECT_THAT(ZStar(Vector::Zero(1), basis, d, 0.5, 4),
              ElementsAre(0, 1, 2, 3));
  EXPECT_THAT(ZStar(Vector::Zero(1), basis, Vector::Ones(4), 0.5, 3),
              ElementsAre(0, 1, 2));
}

TEST(ZStarTest, MinimizesLagrangianOverSubsets) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = RandomInstance(rng, 9, 3, 0.8, 3);
    const EigenBasis basis = EigenBasisFromDirections(inst.A, 2);
    const Vector gamma = testing::RandomMatrix(rng, 2, 1, -1, 1);
    const IndexSet z = ZStar(gamma, basis, inst.problem.d, 0.8, 3);
    const double value = Lagrangian(z, gamma, basis, inst.problem.d, 0.8);
    testing::ForEachSubset(9, 3, [&](const std::vector<int>& other) {
      EXPECT_LE(value,
                Lagrangian(other, gamma, basis, inst.problem.d, 0.8) + 1e-12);
    });
  }
}

TEST(GammaStarTest, Examples) {
  const EigenBasis basis = SingleVector(3, 2.0, Vector::Unit(3, 0));
  EXPECT_EQ(GammaStar({}, basis, 0.9)[0], 0.0);
  EXPECT_NEAR(GammaStar({0}, basis, 0.9)[0], -1.8, 1e-15);
  EXPECT_EQ(GammaStar({1, 2}, basis, 0.9)[0], 0.0);
}

TEST(LagrangianTest, Examples) {
  const EigenBasis basis = SingleVector(3, 2.0, Vector::Unit(3, 0));
  Vector d(3);
  d << 1, 2, 3;
  EXPECT_NEAR(Lagrangian({1, 2}, Vector::Zero(1), basis, d, 0.6), 0.4 * 5,
              1e-15);
  const Vector gamma = Vector::Constant(1, 0.5);
  EXPECT_NEAR(Lagrangian({}, gamma, basis, d, 0.6), -0.25 / (0.6 * 2.0), 1e-15);
}

TEST(LagrangianTest, MaximizedAtGammaStar) {
  // max_gamma L(z, gamma) equals the S_M objective of z.
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const double w = testing::Uniform(rng, 0.05, 1.0);
    const Instance inst = RandomInstance(rng, 10, 4, w, 3);
    const int M = 1 + t % 4;
    const EigenBasis basis = EigenBasisFromDirections(inst.A, M);
    const Matrix SM = testing::DenseTruncation(inst.problem.S, M);
    testing::ForEachSubset(10, 3, [&](const std::vector<int>& z) {
      const Vector g = GammaStar(z, basis, w);
      const double at_star = Lagrangian(z, g, basis, inst.problem.d, w);
      EXPECT_NEAR(at_star,
                  testing::NaiveQuadObjective(SM, inst.problem.d, w, z), 1e-8);
      EXPECT_NEAR(at_star, ApproxObjective(basis, inst.problem.d, w, z), 1e-8);
      // Concave in gamma, so nearby points are no higher.
      const Vector nudge = testing::RandomMatrix(rng, M, 1, -0.1, 0.1);
      EXPECT_LE(Lagrangian(z, g + nudge, basis, inst.problem.d, w),
                at_star + 1e-12);
    });
  }
}

TEST(ApproxObjectiveTest, FullRankIsExact) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = RandomInstance(rng, 12, 3, 0.9, 3);
    const EigenBasis basis =
        EigenBasisFromDirections(inst.A, DefaultEigenRank(inst.A));
    testing::ForEachSubset(12, 3, [&](const std::vector<int>& z) {
      EXPECT_NEAR(ApproxObjective(basis, inst.problem.d, 0.9, z),
                  QuadObjective(inst.problem, z), 1e-8);
    });
  }
}

TEST(DualValueTest, ZeroGammaIsSumOfSmallestDistances) {
  std::mt19937_64 rng(5);
  const Instance inst = RandomInstance(rng, 10, 3, 0.7, 4);
  const EigenBasis basis = EigenBasisFromDirections(inst.A, 3);
  Vector sorted = inst.problem.d;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_NEAR(DualValue(Vector::Zero(3), basis, inst.problem.d, 0.7, 4),
              0.3 * sorted.head(4).sum(), 1e-12);
}

TEST(DualValueTest, EmptyBasisRejected) {
  EigenBasis empty;
  empty.v = Matrix(4, 0);
  EXPECT_THROW(DualValue(Vector(0), empty, Vector::Ones(4), 0.5, 2),
               RecourseError);
}

TEST(DualValueTest, WeakDualityAgainstEnumeration) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 30; ++t) {
    const double w = testing::Uniform(rng, 0.1, 1.0);
    const Instance inst = RandomInstance(rng, 12, 4, w, 3);
    const int M = 1 + t % 4;
    const EigenBasis basis = EigenBasisFromDirections(inst.A, M);
    const double primal =
        testing::EnumerateQuad(testing::DenseTruncation(inst.problem.S, M),
                               inst.problem.d, w, 3)
            .second;
    for (int r = 0; r < 10; ++r) {
      const Vector gamma = testing::RandomMatrix(rng, M, 1, -2, 2);
      EXPECT_LE(DualValue(gamma, basis, inst.problem.d, w, 3), primal + 1e-8);
    }
    const IterateTrace da = DualAscent(inst.problem, basis, 30, 0.1);
    for (double dual : da.dual) EXPECT_LE(dual, primal + 1e-8);
  }
}

TEST(BestResponseTest, FirstIterateAndFixedPoints) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = RandomInstance(rng, 20, 3, 0.9, 3);
    const EigenBasis basis = EigenBasisFromDirections(inst.A, 3);
    const IterateTrace trace = BestResponse(inst.problem, basis, 20);
    ASSERT_EQ(trace.size(), 20);
    EXPECT_EQ(trace.z[0], testing::SortedKNearest(inst.problem.d, 3));
    EXPECT_EQ(trace.gamma[0], Vector::Zero(3));
    for (int s = 0; s + 1 < trace.size(); ++s) {
      EXPECT_EQ(trace.z[s].size(), 3u);
      if (trace.z[s + 1] == trace.z[s]) {
        for (int u = s + 1; u < trace.size(); ++u) {
          EXPECT_EQ(trace.z[u], trace.z[s]);
        }
        break;
      }
    }
    // Deterministic.
    EXPECT_EQ(BestResponse(inst.problem, basis, 20).z, trace.z);
  }
}

TEST(BestResponseTest, BestIterateBoundedByOptimum) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = RandomInstance(rng, 12, 3, 0.9, 3);
    const EigenBasis basis = EigenBasisFromDirections(inst.A, 3);
    const IterateTrace trace = BestResponse(inst.problem, basis, 50);
    const double opt =
        testing::EnumerateQuad(inst.problem.S, inst.problem.d, 0.9, 3).second;
    const int best = trace.BestIterate();
    EXPECT_GE(trace.primal[best], opt - 1e-12);
    for (double v : trace.primal) EXPECT_GE(v, trace.primal[best]);
  }
}

TEST(DualAscentTest, FirstIterateAndZeroStep) {
  std::mt19937_64 rng(9);
  const Instance inst = RandomInstance(rng, 20, 3, 0.9, 3);
  const EigenBasis basis = EigenBasisFromDirections(inst.A, 3);
  const IndexSet nearest = testing::SortedKNearest(inst.problem.d, 3);
  const IterateTrace trace = DualAscent(inst.problem, basis, 10, 0.1);
  EXPECT_EQ(trace.z[0], nearest);
  EXPECT_EQ(trace.gamma[0], Vector::Zero(3));
  const IterateTrace frozen = DualAscent(inst.problem, basis, 10, 0.0);
  for (int t = 0; t < frozen.size(); ++t) {
    EXPECT_EQ(frozen.gamma[t], Vector::Zero(3));
    EXPECT_EQ(frozen.z[t], nearest);
  }
}

TEST(DualAscentTest, StepFollowsUpdateRule) {
  std::mt19937_64 rng(10);
  const double w = 0.8;
  const double lambda = 0.1;
  const Instance inst = RandomInstance(rng, 15, 3, w, 4);
  const EigenBasis basis = EigenBasisFromDirections(inst.A, 2);
  const IterateTrace trace = DualAscent(inst.problem, basis, 8, lambda);
  Vector gamma = Vector::Zero(2);
  IndexSet z;
  for (int t = 0; t < 8; ++t) {
    const Vector vz = basis.v.transpose() * Indicator(z, 15);
    for (int m = 0; m < 2; ++m) {
      gamma[m] -= 2 * lambda / std::sqrt(t + 1.0) *
                  (gamma[m] / (w * basis.sigma[m]) + vz[m]);
    }
    z = ZStar(gamma, basis, inst.problem.d, w, 4);
    EXPECT_LE((trace.gamma[t] - gamma).norm(), 1e-12) << "t=" << t;
    EXPECT_EQ(trace.z[t], z);
  }
}

TEST(ScreenTest, Examples) {
  IterateTrace trace;
  trace.z = {{0, 1, 5}, {1, 2, 3}, {0, 1, 2}};
  EXPECT_THAT(Screen(trace, 1, 3).members, ElementsAre(0, 1, 2, 3));
  EXPECT_THAT(Screen(trace, 2, 3).members, ElementsAre(0, 1, 2, 3, 5));
  IterateTrace constant;
  constant.z = {{2, 4}, {2, 4}, {2, 4}};
  EXPECT_THAT(Screen(constant, 2, 2).members, ElementsAre(2, 4));
  EXPECT_THROW(Screen(trace, 3, 3), RecourseError);
  try {
    Screen(constant, 1, 3);
    FAIL() << "expected a failure";
  } catch (const RecourseError& e) {
    EXPECT_THAT(e.what(), HasSubstr("screening set smaller than K"));
  }
}

TEST(SolveReducedTest, FullSetMatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = RandomInstance(rng, 11, 3, 0.9, 3);
    IndexSet all(11);
    std::iota(all.begin(), all.end(), 0);
    const auto [best, value] =
        testing::EnumerateQuad(inst.problem.S, inst.problem.d, 0.9, 3);
    EXPECT_EQ(SolveReduced(inst.problem, all).indices, best);
    EXPECT_EQ(BruteForceQuad(inst.problem).indices, best);
  }
}

TEST(SolveReducedTest, RestrictedSetsAndIterates) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const Instance inst = RandomInstance(rng, 40, 3, 0.9, 3);
    const EigenBasis basis = EigenBasisFromDirections(inst.A, 3);
    const IterateTrace trace = DualAscent(inst.problem, basis, 50, 0.1);
    const ScreeningSet zset = Screen(trace, 10, 3);
    const Selection sel = SolveReduced(inst.problem, zset.members);
    ASSERT_EQ(sel.indices.size(), 3u);
    for (int i : sel.indices) {
      EXPECT_TRUE(
          std::binary_search(zset.members.begin(), zset.members.end(), i));
    }
    const double value = QuadObjective(inst.problem, sel.indices);
    EXPECT_NEAR(value,
                testing::EnumerateQuad(inst.problem.S, inst.problem.d, 0.9, 3,
                                       zset.members)
                    .second,
                1e-12);
    for (int s = 0; s < trace.size(); ++s) {
      const bool inside =
          std::all_of(trace.z[s].begin(), trace.z[s].end(), [&](int i) {
            return std::binary_search(zset.members.begin(), zset.members.end(),
                                      i);
          });
      if (inside) EXPECT_LE(value, trace.primal[s]);
    }
  }
}

TEST(SolveReducedTest, UniqueFeasibleAndInfeasible) {
  std::mt19937_64 rng(13);
  const Instance inst = RandomInstance(rng, 10, 3, 0.5, 3);
  EXPECT_THAT(SolveReduced(inst.problem, {2, 5, 7}).indices,
              ElementsAre(2, 5, 7));
  EXPECT_THROW(SolveReduced(inst.problem, {2, 5}), RecourseError);
}

TEST(SolveReducedTest, BranchAndBoundMatchesEnumeration) {
  // C(200, 3) exceeds the enumeration budget.
  std::mt19937_64 rng(14);
  for (int t = 0; t < 2; ++t) {
    const Instance inst = RandomInstance(rng, 200, 2, 0.9, 3);
    IndexSet all(200);
    std::iota(all.begin(), all.end(), 0);
    const Selection sel = SolveReduced(inst.problem, all);
    EXPECT_EQ(sel.report, "branch-and-bound");
    const auto [best, value] =
        testing::EnumerateQuad(inst.problem.S, inst.problem.d, 0.9, 3);
    EXPECT_NEAR(QuadObjective(inst.problem, sel.indices), value, 1e-12);
    EXPECT_EQ(sel.indices, best);
  }
}

TEST(BruteForceQuadTest, ThetaZeroIsNearest) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    const Instance inst = RandomInstance(rng, 12, 3, 0.0, 1 + t % 4);
    const IndexSet nearest =
        testing::SortedKNearest(inst.problem.d, inst.problem.K);
    EXPECT_EQ(BruteForceQuad(inst.problem).indices, nearest);
    EXPECT_EQ(QuadGreedy(inst.problem).indices, nearest);
    IndexSet all(12);
    std::iota(all.begin(), all.end(), 0);
    EXPECT_EQ(SolveReduced(inst.problem, all).indices, nearest);
    EXPECT_EQ(KNearest(inst.problem.d, inst.problem.K), nearest);
  }
}

TEST(BruteForceQuadTest, OrthogonalTripleAtFullDiversity) {
  Matrix A(3, 6);
  A.col(0) = Vector::Unit(3, 0);
  A.col(1) = Vector::Unit(3, 1);
  A.col(2) = Vector::Unit(3, 2);
  A.col(3) = Vector(Eigen::Vector3d(1, 1, 0).normalized());
  A.col(4) = Vector(Eigen::Vector3d(1, 1, 1).normalized());
  A.col(5) = Vector(Eigen::Vector3d(0, 1, 1).normalized());
  QuadProblem problem;
  problem.S = Similarity(A);
  problem.d = Vector::LinSpaced(6, 3.0, 0.5);  // diverse points are farthest
  problem.weight = 1.0;
  problem.K = 3;
  const Selection sel = BruteForceQuad(problem);
  EXPECT_THAT(sel.indices, ElementsAre(0, 1, 2));
  EXPECT_NEAR(QuadObjective(problem, sel.indices), 3.0, 1e-12);
}

TEST(BruteForceQuadTest, AllSelectedWhenKEqualsN) {
  std::mt19937_64 rng(16);
  const Instance inst = RandomInstance(rng, 4, 2, 0.5, 4);
  EXPECT_THAT(BruteForceQuad(inst.problem).indices, ElementsAre(0, 1, 2, 3));
}

TEST(BruteForceQuadTest, WeightExtremesOrderTerms) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    Instance inst = RandomInstance(rng, 10, 3, 1.0, 3);
    auto terms = [&](double w) {
      inst.problem.weight = w;
      const IndexSet z = BruteForceQuad(inst.problem).indices;
      const Vector ind = Indicator(z, 10);
      return std::make_pair(ind.dot(inst.problem.S * ind),
                            ind.dot(inst.problem.d));
    };
    const auto [quad_one, dist_one] = terms(1.0);
    const auto [quad_zero, dist_zero] = terms(0.0);
    for (double w : {0.1, 0.5, 0.9}) {
      const auto [quad, dist] = terms(w);
      EXPECT_LE(quad_one, quad + 1e-12);
      EXPECT_LE(dist_zero, dist + 1e-12);
    }
    (void)dist_one;
    (void)quad_zero;
  }
}

TEST(QuadGreedyTest, SingleStepFormula) {
  std::mt19937_64 rng(18);
  for (int t = 0; t < 20; ++t) {
    const Instance inst = RandomInstance(rng, 15, 3, 0.6, 1);
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 15; ++i) {
      const double v = 0.6 * inst.problem.S(i, i) + 0.4 * inst.problem.d[i];
      if (v < best_value) {
        best_value = v;
        best = i;
      }
    }
    EXPECT_THAT(QuadGreedy(inst.problem).indices, ElementsAre(best));
  }
}

TEST(QuadLocalSearchTest, MonotoneAndBoundedByOptimum) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 50; ++t) {
    const Instance inst = RandomInstance(rng, 10, 3, 0.9, 3);
    const Selection greedy = QuadGreedy(inst.problem);
    const Selection ls = QuadLocalSearch(inst.problem, greedy);
    const auto [best, opt] =
        testing::EnumerateQuad(inst.problem.S, inst.problem.d, 0.9, 3);
    const double g = QuadObjective(inst.problem, greedy.indices);
    const double l = QuadObjective(inst.problem, ls.indices);
    EXPECT_LE(l, g);
    EXPECT_GE(g, opt - 1e-12);
    EXPECT_GE(l, opt - 1e-12);
    Selection start;
    start.indices = best;
    EXPECT_EQ(QuadLocalSearch(inst.problem, start).indices, best);
  }
}

TEST(TraceCsvTest, OneRowPerIterate) {
  std::mt19937_64 rng(20);
  const Instance inst = RandomInstance(rng, 12, 3, 0.9, 3);
  const EigenBasis basis = EigenBasisFromDirections(inst.A, 3);
  const IterateTrace trace = BestResponse(inst.problem, basis, 5);
  testing::TempDir dir;
  WriteTraceCsv(trace, dir / "trace.csv");
  const std::string text = testing::ReadFile(dir / "trace.csv");
  EXPECT_EQ(text.rfind("t,primal,dual,support\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
}

}  // namespace
}  // namespace recourse
