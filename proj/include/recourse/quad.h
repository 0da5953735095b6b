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

// Prototype selection as the cardinality-constrained binary quadratic program
//
//   min  w z^T S z + (1 - w) d^T z   s.t.  z in {0,1}^N, ||z||_0 = K,
//
// where w in [0, 1] trades anti-diversity against distance. Replacing S by its
// top-M eigenspace S_M gives a min-max form with closed-form best responses
// in both the selection z and the dual vector gamma; the resulting iterates
// screen a small candidate set on which the exact program is solved.

#ifndef RECOURSE_QUAD_H_
#define RECOURSE_QUAD_H_

#include <filesystem>
#include <vector>

#include "recourse/common.h"
#include "recourse/geometry.h"

namespace recourse {

inline constexpr double kQuadImprovementTolerance = 1e-10;

struct QuadProblem {
  Matrix S;  // N x N similarity
  Vector d;  // N distances
  double weight = 0.9;
  int K = 3;

  int size() const { return static_cast<int>(d.size()); }
  // Throws on inconsistent sizes, weight outside [0, 1] or K outside [1, N].
  void Validate() const;
};

// w z^T S z + (1 - w) d^T z with the full S. Throws unless |z| = K.
double QuadObjective(const QuadProblem& problem, const IndexSet& z);

// (1 - w) d^T z + w z^T S_M z.
double ApproxObjective(const EigenBasis& basis, const Vector& d, double weight,
                       const IndexSet& z);

// Inner minimizer for fixed gamma: the K smallest entries of
// (1 - w) d - 2 sum_m gamma_m v_m, ties to the lowest index.
IndexSet ZStar(const Vector& gamma, const EigenBasis& basis, const Vector& d,
               double weight, int K);

// Inner maximizer for fixed z: gamma_m = -w sigma_m v_m^T z.
Vector GammaStar(const IndexSet& z, const EigenBasis& basis, double weight);

// ((1 - w) d - 2 sum gamma_m v_m)^T z - sum gamma_m^2 / (w sigma_m).
double Lagrangian(const IndexSet& z, const Vector& gamma,
                  const EigenBasis& basis, const Vector& d, double weight);

// min over feasible z of the Lagrangian; a lower bound on the eigen-
// approximate program for every gamma.
double DualValue(const Vector& gamma, const EigenBasis& basis, const Vector& d,
                 double weight, int K);

struct IterateTrace {
  std::vector<IndexSet> z;     // z_1 .. z_T
  std::vector<Vector> gamma;   // gamma_1 .. gamma_T
  std::vector<double> primal;  // QuadObjective(z_t), full S
  std::vector<double> dual;    // DualValue(gamma_t)

  int size() const { return static_cast<int>(z.size()); }
  // Iterate with the smallest primal value (earliest on ties).
  int BestIterate() const;
};

// Alternating best responses starting from z_0 = 0, gamma_0 = 0.
IterateTrace BestResponse(const QuadProblem& problem, const EigenBasis& basis,
                          int iterations);

// Gradient ascent on the dual with step 2 lambda / sqrt(t + 1); lambda = 0
// keeps gamma at zero.
IterateTrace DualAscent(const QuadProblem& problem, const EigenBasis& basis,
                        int iterations, double step);

// Per-iteration CSV: t, primal, dual, space-separated support.
void WriteTraceCsv(const IterateTrace& trace,
                   const std::filesystem::path& path);

struct ScreeningSet {
  IndexSet members;
  int window = 0;
};

// Union of the supports of the last window + 1 iterates.
ScreeningSet Screen(const IterateTrace& trace, int window, int K);

// Exact minimizer of the full-S program restricted to `allowed`. Plain
// enumeration when C(|allowed|, K) <= 1e6, otherwise depth-first
// branch-and-bound. `incumbent`, when given, seeds the search. Ties go to the
// lexicographically smallest set.
Selection SolveReduced(const QuadProblem& problem, const IndexSet& allowed,
                       const IndexSet* incumbent = nullptr);

// Exhaustive enumeration over all K-subsets; throws when C(N, K) > 1e7.
Selection BruteForceQuad(const QuadProblem& problem);

// Adds argmin_i objective(z + e_i) until |z| = K, ties to the lowest index.
Selection QuadGreedy(const QuadProblem& problem);

// Swap local search from `start`; the objective never increases.
Selection QuadLocalSearch(const QuadProblem& problem, const Selection& start);

// Closed form for w = 0: the K smallest distances.
IndexSet KNearest(const Vector& d, int K);

}  // namespace recourse

#endif  // RECOURSE_QUAD_H_
