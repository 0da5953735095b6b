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

// Prototype selection as MAP inference for a proximity-weighted L-ensemble
// DPP: maximize det(L_J) over |J| = K with L = theta S + (1 - theta) D.

#ifndef RECOURSE_DPP_H_
#define RECOURSE_DPP_H_

#include <span>

#include "recourse/common.h"

namespace recourse {

// Cholesky pivots at or below this value mark a numerically singular
// submatrix.
inline constexpr double kDppPivotTolerance = 1e-9;
// Ridge added once before giving up on a factorization.
inline constexpr double kDppRidge = 1e-10;
// Local search accepts a move only above this gain.
inline constexpr double kDppImprovementTolerance = 1e-10;

// D_ii = exp(-d_i^2 / h^2). Throws for h <= 0.
Vector LocalityDiag(const Vector& d, double h);

// theta S + (1 - theta) diag(locality). Throws for theta outside [0, 1].
Matrix DppKernel(const Matrix& S, const Vector& locality, double theta);

// log det(L_J) through a Cholesky factorization; kNegInf when L_J (even after
// one ridge retry) is numerically singular. log det of the empty set is 0.
double LogDetSubset(const Matrix& L, std::span<const int> J);

// Fast greedy MAP with incremental Cholesky rows, O(K^2 N). Adds the
// candidate with the largest log-det gain (ties to the lowest index) and
// stops early, with a report, once every remaining gain is -inf.
Selection GreedyMap(const Matrix& L, int K);

// Swap local search started from `start` (|start| = K). Each move drops the
// member whose removal costs the least log-det and adds the best replacement;
// if that move does not improve, the other removals are tried in the same
// order. Stops when no swap improves by more than kDppImprovementTolerance.
Selection LocalSearchMap(const Matrix& L, int K, const Selection& start);

// Exhaustive maximization of det(L_J); ties to the lexicographically
// smallest set. Throws when C(N, K) > 1e7.
Selection BruteForceMap(const Matrix& L, int K);

}  // namespace recourse

#endif  // RECOURSE_DPP_H_
