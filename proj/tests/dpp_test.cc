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

#include "recourse/dpp.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "oracles.h"
#include "recourse/geometry.h"
#include "test_util.h"

namespace recourse {
namespace {

using ::testing::ElementsAre;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Matrix Diag(std::initializer_list<double> values) {
  Vector v(values.size());
  int i = 0;
  for (double x : values) v[i++] = x;
  return v.asDiagonal();
}

double Objective(const Matrix& L, const IndexSet& J) {
  return testing::NaiveLogDet(L, J);
}

// Proximity-weighted kernel on random 2-D data around the origin.
Matrix RandomKernel(std::mt19937_64& rng, int n, double theta) {
  const Matrix samples = testing::RandomMatrix(rng, n, 2, -2, 2);
  const DirectionMatrix dm = ComputeDirections(Vector::Zero(2), samples);
  const DistanceVector dv = EuclideanDistances(Vector::Zero(2), samples);
  return DppKernel(Similarity(dm.A), LocalityDiag(dv.d, 1.0), theta);
}

TEST(LocalityDiagTest, Examples) {
  Vector d(3);
  d << 0.0, 2.0, 1e6;
  const Vector D = LocalityDiag(d, 2.0);
  EXPECT_EQ(D[0], 1.0);
  EXPECT_NEAR(D[1], std::exp(-1.0), 1e-15);
  EXPECT_NEAR(D[1], 0.36788, 5e-6);
  EXPECT_EQ(D[2], 0.0);
  EXPECT_THROW(LocalityDiag(d, 0.0), RecourseError);
  EXPECT_THROW(LocalityDiag(d, -1.0), RecourseError);
}

TEST(KernelTest, Examples) {
  std::mt19937_64 rng(1);
  const Matrix A = testing::RandomUnitColumns(rng, 3, 5);
  const Matrix S = Similarity(A);
  const Vector D = testing::RandomMatrix(rng, 5, 1, 0.1, 1.0);
  EXPECT_EQ(DppKernel(S, D, 0.0), Matrix(D.asDiagonal()));
  EXPECT_EQ(DppKernel(S, D, 1.0), S);
  EXPECT_EQ(DppKernel(Matrix::Identity(4, 4), Vector::Ones(4), 0.5),
            Matrix::Identity(4, 4));
  EXPECT_THROW(DppKernel(S, D, 1.5), RecourseError);
  EXPECT_THROW(DppKernel(S, D, -0.1), RecourseError);
}

TEST(KernelTest, PositiveSemidefinite) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const Matrix L = RandomKernel(rng, 25, testing::Uniform(rng, 0, 1));
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(L);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(LogDetSubsetTest, Examples) {
  const Matrix L = Diag({1, 2, 3});
  const std::vector<int> J = {1, 2};
  EXPECT_NEAR(LogDetSubset(L, J), std::log(6.0), 1e-14);
  const std::vector<int> single = {2};
  EXPECT_NEAR(LogDetSubset(L, single), std::log(3.0), 1e-14);
}

TEST(LogDetSubsetTest, DuplicatedDirectionIsNegativeInfinity) {
  Matrix A(2, 3);
  A << 1, 1, 0, 0, 0, 1;
  const std::vector<int> J = {0, 1};
  EXPECT_EQ(LogDetSubset(Similarity(A), J), kNegInf);
}

TEST(LogDetSubsetTest, MatchesDenseDeterminant) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Matrix L = RandomKernel(rng, 10, 0.7);
    std::vector<int> J = {0, 3, 4, 8};
    EXPECT_NEAR(LogDetSubset(L, J), testing::NaiveLogDet(L, J), 1e-9);
  }
}

TEST(GreedyMapTest, Examples) {
  EXPECT_THAT(GreedyMap(Diag({1, 2, 3}), 1).indices, ElementsAre(2));
  const Selection two = GreedyMap(2.0 * Matrix::Identity(2, 2), 2);
  EXPECT_THAT(two.indices, ElementsAre(0, 1));
  EXPECT_NEAR(LogDetSubset(2.0 * Matrix::Identity(2, 2), two.indices),
              std::log(4.0), 1e-14);
}

TEST(GreedyMapTest, ThetaZeroSelectsNearest) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const Matrix samples = testing::RandomMatrix(rng, 30, 3, -2, 2);
    const DistanceVector dv = EuclideanDistances(Vector::Zero(3), samples);
    const Matrix S = Similarity(ComputeDirections(Vector::Zero(3), samples).A);
    const Matrix L = DppKernel(S, LocalityDiag(dv.d, 1.0), 0.0);
    const int K = 1 + t % 5;
    EXPECT_EQ(GreedyMap(L, K).indices, testing::SortedKNearest(dv.d, K));
  }
}

TEST(GreedyMapTest, StopsEarlyWhenEveryGainIsSingular) {
  // Three copies of one direction: only one can be picked.
  Matrix A(2, 3);
  A.colwise() = Vector::Unit(2, 0);
  const Selection sel = GreedyMap(Similarity(A), 2);
  EXPECT_EQ(sel.indices.size(), 1u);
  EXPECT_FALSE(sel.report.empty());
}

TEST(GreedyMapTest, MatchesNaiveGreedy) {
  // Greedy by full refactorization, lowest index on ties.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const Matrix L = RandomKernel(rng, 20, 0.9);
    IndexSet chosen;
    for (int k = 0; k < 4; ++k) {
      int best = -1;
      double best_value = kNegInf;
      for (int i = 0; i < 20; ++i) {
        if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) {
          continue;
        }
        IndexSet trial = chosen;
        trial.push_back(i);
        const double v = testing::NaiveLogDet(L, trial);
        if (v > best_value + 1e-12) {
          best_value = v;
          best = i;
        }
      }
      chosen.push_back(best);
    }
    std::sort(chosen.begin(), chosen.end());
    EXPECT_EQ(GreedyMap(L, 4).indices, chosen) << "instance " << t;
  }
}

TEST(LocalSearchTest, NeverWorseAndBoundedByBruteForce) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const Matrix L = RandomKernel(rng, 8, testing::Uniform(rng, 0.3, 1.0));
    const Selection greedy = GreedyMap(L, 3);
    ASSERT_EQ(greedy.indices.size(), 3u);
    const Selection ls = LocalSearchMap(L, 3, greedy);
    const auto [best, best_value] = testing::EnumerateLogDet(L, 3);
    const double g = Objective(L, greedy.indices);
    const double l = Objective(L, ls.indices);
    EXPECT_GE(l, g - 1e-12);
    EXPECT_LE(l, best_value + 1e-9);
    EXPECT_LE(g, best_value + 1e-9);
  }
}

TEST(LocalSearchTest, OptimalStartIsUnchanged) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 30; ++t) {
    const Matrix L = RandomKernel(rng, 8, 0.8);
    const auto [best, best_value] = testing::EnumerateLogDet(L, 3);
    Selection start;
    start.indices = best;
    EXPECT_EQ(LocalSearchMap(L, 3, start).indices, best);
  }
}

TEST(LocalSearchTest, FullSetIsUnchanged) {
  std::mt19937_64 rng(8);
  const Matrix L = RandomKernel(rng, 5, 0.5);
  Selection start;
  start.indices = {0, 1, 2, 3, 4};
  EXPECT_EQ(LocalSearchMap(L, 5, start).indices, start.indices);
}

TEST(LocalSearchTest, WrongStartSizeThrows) {
  Selection start;
  start.indices = {0};
  EXPECT_THROW(LocalSearchMap(Matrix::Identity(4, 4), 2, start), RecourseError);
}

TEST(BruteForceTest, Examples) {
  EXPECT_THAT(BruteForceMap(Diag({1, 2, 3}), 2).indices, ElementsAre(1, 2));
  EXPECT_THAT(BruteForceMap(Matrix::Identity(3, 3), 2).indices,
              ElementsAre(0, 1));
}

TEST(BruteForceTest, AgreesWithGreedyOnDiagonal) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    const Vector diag = testing::RandomMatrix(rng, 9, 1, 0.1, 2.0);
    const Matrix L = diag.asDiagonal();
    EXPECT_EQ(BruteForceMap(L, 4).indices, GreedyMap(L, 4).indices);
  }
}

TEST(BruteForceTest, MatchesEnumerationOracle) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 50; ++t) {
    const Matrix L = RandomKernel(rng, 10, 0.9);
    const auto [best, best_value] = testing::EnumerateLogDet(L, 3);
    const Selection bf = BruteForceMap(L, 3);
    EXPECT_NEAR(Objective(L, bf.indices), best_value, 1e-9);
  }
}

TEST(BruteForceTest, BudgetExceededThrows) {
  // C(200, 5) is far beyond 1e7.
  EXPECT_THROW(BruteForceMap(Matrix::Identity(200, 200), 5), RecourseError);
}

TEST(GreedyMapTest, DoublingNRoughlyDoublesTime) {
  std::mt19937_64 rng(11);
  const int K = 10;
  auto median_seconds = [&](const Matrix& L) {
    std::vector<double> times;
    for (int r = 0; r < 15; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const Selection sel = GreedyMap(L, K);
      const auto stop = std::chrono::steady_clock::now();
      EXPECT_EQ(sel.indices.size(), static_cast<size_t>(K));
      times.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::nth_element(times.begin(), times.begin() + 7, times.end());
    return times[7];
  };
  const Matrix small = RandomKernel(rng, 1500, 0.9);
  const Matrix large = RandomKernel(rng, 3000, 0.9);
  const double t_small = median_seconds(small);
  const double t_large = median_seconds(large);
  RecordProperty("ratio", std::to_string(t_large / t_small));
  EXPECT_LE(t_large / t_small, 3.0)
      << "small " << t_small << "s, large " << t_large << "s";
}

}  // namespace
}  // namespace recourse
