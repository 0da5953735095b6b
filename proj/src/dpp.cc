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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace recourse {
namespace {

constexpr long double kBruteForceBudget = 1e7L;

// In-place lower Cholesky; returns log det or kNegInf on a small pivot.
double CholeskyLogDet(Matrix* m) {
  const Eigen::Index n = m->rows();
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = (*m)(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= (*m)(j, k) * (*m)(j, k);
    if (!(pivot > kDppPivotTolerance)) return kNegInf;
    const double root = std::sqrt(pivot);
    (*m)(j, j) = root;
    log_det += std::log(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double value = (*m)(i, j);
      for (Eigen::Index k = 0; k < j; ++k) value -= (*m)(i, k) * (*m)(j, k);
      (*m)(i, j) = value / root;
    }
  }
  return log_det;
}

Matrix Gather(const Matrix& L, std::span<const int> J) {
  const Eigen::Index k = static_cast<Eigen::Index>(J.size());
  Matrix sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = L(J[a], J[b]);
  }
  return sub;
}

void CheckKernel(const Matrix& L, int K) {
  if (L.rows() != L.cols()) throw RecourseError("dpp: kernel is not square");
  if (K < 1 || K > L.rows()) {
    throw RecourseError("dpp: K=" + std::to_string(K) +
                        " outside [1, N=" + std::to_string(L.rows()) + "]");
  }
}

struct Addition {
  int index = -1;
  double value = kNegInf;  // log det(L_{base + index})
};

// Best single addition to `base` over candidates outside base, O(N |base|^2).
Addition BestAddition(const Matrix& L, const IndexSet& base) {
  const int n = static_cast<int>(L.rows());
  const Eigen::Index k = static_cast<Eigen::Index>(base.size());
  std::vector<char> in_base(n, 0);
  for (int i : base) in_base[i] = 1;

  Addition best;
  if (k == 0) {
    for (int i = 0; i < n; ++i) {
      const double d2 = L(i, i);
      if (d2 > kDppPivotTolerance && std::log(d2) > best.value) {
        best = {i, std::log(d2)};
      }
    }
    return best;
  }
  Matrix chol = Gather(L, base);
  const double base_log_det = CholeskyLogDet(&chol);
  if (base_log_det == kNegInf) return best;
  Matrix cross(k, n);
  for (Eigen::Index a = 0; a < k; ++a) cross.row(a) = L.row(base[a]);
  chol.triangularView<Eigen::Lower>().solveInPlace(cross);
  for (int i = 0; i < n; ++i) {
    if (in_base[i]) continue;
    const double d2 = L(i, i) - cross.col(i).squaredNorm();
    if (!(d2 > kDppPivotTolerance)) continue;
    const double value = base_log_det + std::log(d2);
    if (value > best.value) best = {i, value};
  }
  return best;
}

}  // namespace

Vector LocalityDiag(const Vector& d, double h) {
  if (!(h > 0.0)) throw RecourseError("dpp: bandwidth h must be > 0");
  return (-(d.array().square()) / (h * h)).exp().matrix();
}

Matrix DppKernel(const Matrix& S, const Vector& locality, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw RecourseError("dpp: theta must lie in [0, 1]");
  }
  if (S.rows() != S.cols() || S.rows() != locality.size()) {
    throw RecourseError("dpp: S and D sizes differ");
  }
  Matrix L = theta * S;
  L.diagonal() += (1.0 - theta) * locality;
  return L;
}

double LogDetSubset(const Matrix& L, std::span<const int> J) {
  if (J.empty()) return 0.0;
  Matrix sub = Gather(L, J);
  Matrix work = sub;
  double log_det = CholeskyLogDet(&work);
  if (log_det != kNegInf) return log_det;
  sub.diagonal().array() += kDppRidge;
  return CholeskyLogDet(&sub);
}

Selection GreedyMap(const Matrix& L, int K) {
  CheckKernel(L, K);
  const int n = static_cast<int>(L.rows());
  // Row k of `rows` holds the k-th incremental Cholesky coefficient of every
  // candidate; `residual` is the squared pivot each candidate would get.
  Matrix rows(K, n);
  Vector residual = L.diagonal();
  std::vector<char> chosen(n, 0);
  Selection out;
  for (int k = 0; k < K; ++k) {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (chosen[i] || !(residual[i] > kDppPivotTolerance)) continue;
      if (best < 0 || residual[i] > residual[best]) best = i;
    }
    if (best < 0) {
      out.report = "greedy stopped after " + std::to_string(k) +
                   " of K=" + std::to_string(K) +
                   " picks: every remaining marginal gain is -inf";
      break;
    }
    chosen[best] = 1;
    out.indices.push_back(best);
    const double pivot = std::sqrt(residual[best]);
    for (int i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      double e = L(best, i);
      for (int m = 0; m < k; ++m) e -= rows(m, best) * rows(m, i);
      e /= pivot;
      rows(k, i) = e;
      residual[i] -= e * e;
    }
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

Selection LocalSearchMap(const Matrix& L, int K, const Selection& start) {
  CheckKernel(L, K);
  if (static_cast<int>(start.indices.size()) != K) {
    throw RecourseError("dpp local search: start has " +
                        std::to_string(start.indices.size()) +
                        " members, expected K=" + std::to_string(K));
  }
  IndexSet current = start.indices;
  std::sort(current.begin(), current.end());
  double current_value = LogDetSubset(L, current);
  int moves = 0;
  while (true) {
    // Removal order: largest remaining log det first (smallest decrease).
    std::vector<std::pair<double, int>> removals;
    for (int r = 0; r < K; ++r) {
      IndexSet rest = current;
      rest.erase(rest.begin() + r);
      removals.emplace_back(LogDetSubset(L, rest), r);
    }
    std::stable_sort(
        removals.begin(), removals.end(),
        [](const auto& a, const auto& b) { return a.first > b.first; });
    bool improved = false;
    for (const auto& [unused, r] : removals) {
      IndexSet rest = current;
      const int removed = rest[r];
      rest.erase(rest.begin() + r);
      const Addition add = BestAddition(L, rest);
      if (add.index < 0 || add.index == removed) continue;
      if (!(add.value > current_value + kDppImprovementTolerance)) continue;
      rest.insert(std::upper_bound(rest.begin(), rest.end(), add.index),
                  add.index);
      const double value = LogDetSubset(L, rest);
      if (!(value > current_value)) continue;
      current = std::move(rest);
      current_value = value;
      improved = true;
      ++moves;
      break;
    }
    if (!improved) break;
  }
  Selection out;
  out.indices = std::move(current);
  if (moves > 0) out.report = std::to_string(moves) + " improving swaps";
  return out;
}

Selection BruteForceMap(const Matrix& L, int K) {
  CheckKernel(L, K);
  const int n = static_cast<int>(L.rows());
  if (BinomialCapped(n, K, kBruteForceBudget) > kBruteForceBudget) {
    throw RecourseError("dpp brute force: C(" + std::to_string(n) + ", " +
                        std::to_string(K) + ") exceeds the 1e7 budget");
  }
  std::vector<int> combo(K);
  std::iota(combo.begin(), combo.end(), 0);
  IndexSet best = combo;
  double best_value = kNegInf;
  while (true) {
    const double value = LogDetSubset(L, combo);
    // Later (lexicographically larger) sets must win by more than a relative
    // 1e-12 to displace the incumbent.
    const double threshold =
        best_value == kNegInf
            ? kNegInf
            : best_value + 1e-12 * std::max(1.0, std::abs(best_value));
    if (value > threshold) {
      best_value = value;
      best = combo;
    }
    int pos = K - 1;
    while (pos >= 0 && combo[pos] == n - K + pos) --pos;
    if (pos < 0) break;
    ++combo[pos];
    for (int q = pos + 1; q < K; ++q) combo[q] = combo[q - 1] + 1;
  }
  Selection out;
  out.indices = std::move(best);
  if (best_value == kNegInf) out.report = "every K-subset is singular";
  return out;
}

}  // namespace recourse
