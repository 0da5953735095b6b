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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>

namespace recourse {
namespace {

constexpr long double kEnumerationBudget = 1e6L;
constexpr long double kBruteForceBudget = 1e7L;

void CheckWeightPositive(double weight) {
  if (!(weight > 0.0 && weight <= 1.0)) {
    throw RecourseError("quad: weight must lie in (0, 1] for the min-max form");
  }
}

void CheckBasis(const EigenBasis& basis, const Vector& d) {
  if (basis.rank() < 1) throw RecourseError("quad: eigenbasis is empty (M=0)");
  if (basis.v.rows() != d.size()) {
    throw RecourseError("quad: eigenbasis and distance sizes differ");
  }
}

// v^T z for every basis vector.
Vector Project(const IndexSet& z, const EigenBasis& basis) {
  Vector out = Vector::Zero(basis.rank());
  for (int i : z) out += basis.v.row(i).transpose();
  return out;
}

double Tolerance(double value) {
  return 1e-12 * std::max(1.0, std::abs(value));
}

// Depth-first search over K-subsets of the candidates. Candidates are visited
// in increasing distance so the distance bound tightens fast; the quadratic
// bound uses ||s + f|| >= ||s|| - ||f|| with ||f|| <= sum of sqrt(S_jj) over
// the r remaining picks, valid for any PSD S.
class ExactSearch {
 public:
  ExactSearch(const QuadProblem& problem, const IndexSet& allowed,
              bool use_bounds)
      : problem_(problem), use_bounds_(use_bounds), candidates_(allowed) {
    std::stable_sort(candidates_.begin(), candidates_.end(), [&](int a, int b) {
      return problem_.d[a] < problem_.d[b] ||
             (problem_.d[a] == problem_.d[b] && a < b);
    });
    const int n = static_cast<int>(candidates_.size());
    prefix_d_.assign(n + 1, 0.0);
    for (int c = 0; c < n; ++c) {
      prefix_d_[c + 1] = prefix_d_[c] + problem_.d[candidates_[c]];
    }
    max_root_.assign(n + 1, 0.0);
    for (int c = n - 1; c >= 0; --c) {
      const double root =
          std::sqrt(std::max(0.0, problem_.S(candidates_[c], candidates_[c])));
      max_root_[c] = std::max(max_root_[c + 1], root);
    }
    partial_.reserve(problem_.K);
  }

  void Seed(const IndexSet& incumbent) {
    best_ = incumbent;
    std::sort(best_.begin(), best_.end());
    best_value_ = QuadObjective(problem_, best_);
    have_best_ = true;
  }

  Selection Run() {
    Recurse(0, 0.0, 0.0);
    Selection out;
    out.indices = best_;
    return out;
  }

 private:
  double LowerBound(int pos, double quad, double dist) const {
    const int remaining = problem_.K - static_cast<int>(partial_.size());
    const double dist_bound =
        dist + (prefix_d_[pos + remaining] - prefix_d_[pos]);
    const double gap = std::max(
        0.0, std::sqrt(std::max(0.0, quad)) - remaining * max_root_[pos]);
    return (1.0 - problem_.weight) * dist_bound + problem_.weight * gap * gap;
  }

  void Consider(double value) {
    IndexSet set = partial_;
    std::sort(set.begin(), set.end());
    if (!have_best_ || value < best_value_ - Tolerance(best_value_) ||
        (value <= best_value_ + Tolerance(best_value_) && set < best_)) {
      best_ = std::move(set);
      best_value_ = value;
      have_best_ = true;
    }
  }

  void Recurse(int pos, double quad, double dist) {
    const int n = static_cast<int>(candidates_.size());
    const int remaining = problem_.K - static_cast<int>(partial_.size());
    if (remaining == 0) {
      Consider(problem_.weight * quad + (1.0 - problem_.weight) * dist);
      return;
    }
    for (int c = pos; c + remaining <= n; ++c) {
      if (use_bounds_ && have_best_) {
        const double limit = best_value_ + Tolerance(best_value_);
        // Distance part alone only grows with c.
        const double dist_only =
            (1.0 - problem_.weight) *
            (dist + prefix_d_[c + remaining] - prefix_d_[c]);
        if (dist_only > limit) break;
        if (LowerBound(c, quad, dist) > limit) continue;
      }
      const int j = candidates_[c];
      double added = problem_.S(j, j);
      for (int i : partial_) added += 2.0 * problem_.S(i, j);
      partial_.push_back(j);
      Recurse(c + 1, quad + added, dist + problem_.d[j]);
      partial_.pop_back();
    }
  }

  const QuadProblem& problem_;
  bool use_bounds_;
  IndexSet candidates_;
  std::vector<double> prefix_d_;
  std::vector<double> max_root_;
  IndexSet partial_;
  IndexSet best_;
  double best_value_ = kInf;
  bool have_best_ = false;
};

IterateTrace RunIterations(
    const QuadProblem& problem, const EigenBasis& basis, int iterations,
    const std::function<Vector(int, const Vector&, const IndexSet&)>& update) {
  problem.Validate();
  CheckWeightPositive(problem.weight);
  CheckBasis(basis, problem.d);
  if (iterations < 1) throw RecourseError("quad: T must be >= 1");
  IterateTrace trace;
  IndexSet z;  // z_0 = 0
  Vector gamma = Vector::Zero(basis.rank());
  for (int t = 0; t < iterations; ++t) {
    gamma = update(t, gamma, z);
    z = ZStar(gamma, basis, problem.d, problem.weight, problem.K);
    trace.z.push_back(z);
    trace.gamma.push_back(gamma);
    trace.primal.push_back(QuadObjective(problem, z));
    trace.dual.push_back(
        DualValue(gamma, basis, problem.d, problem.weight, problem.K));
  }
  return trace;
}

}  // namespace

void QuadProblem::Validate() const {
  if (S.rows() != S.cols() || S.rows() != d.size()) {
    throw RecourseError("quad: S is " + std::to_string(S.rows()) + "x" +
                        std::to_string(S.cols()) + " but d has " +
                        std::to_string(d.size()) + " entries");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw RecourseError("quad: weight must lie in [0, 1]");
  }
  if (K < 1 || K > size()) {
    throw RecourseError("quad: K=" + std::to_string(K) +
                        " outside [1, N=" + std::to_string(size()) + "]");
  }
}

double QuadObjective(const QuadProblem& problem, const IndexSet& z) {
  if (static_cast<int>(z.size()) != problem.K) {
    throw RecourseError("quad: selection has " + std::to_string(z.size()) +
                        " members, expected K=" + std::to_string(problem.K));
  }
  double quad = 0.0, dist = 0.0;
  for (int i : z) {
    dist += problem.d[i];
    for (int j : z) quad += problem.S(i, j);
  }
  return problem.weight * quad + (1.0 - problem.weight) * dist;
}

double ApproxObjective(const EigenBasis& basis, const Vector& d, double weight,
                       const IndexSet& z) {
  const Vector proj = Project(z, basis);
  double dist = 0.0;
  for (int i : z) dist += d[i];
  return (1.0 - weight) * dist +
         weight * (basis.sigma.array() * proj.array().square()).sum();
}

IndexSet ZStar(const Vector& gamma, const EigenBasis& basis, const Vector& d,
               double weight, int K) {
  CheckBasis(basis, d);
  if (gamma.size() != basis.rank()) {
    throw RecourseError("quad: gamma has length " +
                        std::to_string(gamma.size()) +
                        ", basis has M=" + std::to_string(basis.rank()));
  }
  const Vector scores = (1.0 - weight) * d - 2.0 * (basis.v * gamma);
  return KSmallest(scores, K);
}

Vector GammaStar(const IndexSet& z, const EigenBasis& basis, double weight) {
  CheckWeightPositive(weight);
  return -weight * basis.sigma.cwiseProduct(Project(z, basis));
}

double Lagrangian(const IndexSet& z, const Vector& gamma,
                  const EigenBasis& basis, const Vector& d, double weight) {
  CheckWeightPositive(weight);
  CheckBasis(basis, d);
  double linear = 0.0;
  for (int i : z) linear += (1.0 - weight) * d[i];
  linear -= 2.0 * gamma.dot(Project(z, basis));
  const double penalty =
      (gamma.array().square() / (weight * basis.sigma.array())).sum();
  return linear - penalty;
}

double DualValue(const Vector& gamma, const EigenBasis& basis, const Vector& d,
                 double weight, int K) {
  const IndexSet z = ZStar(gamma, basis, d, weight, K);
  return Lagrangian(z, gamma, basis, d, weight);
}

int IterateTrace::BestIterate() const {
  if (z.empty()) throw RecourseError("quad: empty trace");
  int best = 0;
  for (int t = 1; t < size(); ++t) {
    if (primal[t] < primal[best]) best = t;
  }
  return best;
}

IterateTrace BestResponse(const QuadProblem& problem, const EigenBasis& basis,
                          int iterations) {
  return RunIterations(problem, basis, iterations,
                       [&](int, const Vector&, const IndexSet& z) {
                         return GammaStar(z, basis, problem.weight);
                       });
}

IterateTrace DualAscent(const QuadProblem& problem, const EigenBasis& basis,
                        int iterations, double step) {
  if (!(step >= 0.0)) throw RecourseError("quad: step must be >= 0");
  return RunIterations(
      problem, basis, iterations,
      [&](int t, const Vector& gamma, const IndexSet& z) {
        const Vector grad =
            (gamma.array() / (problem.weight * basis.sigma.array())).matrix() +
            Project(z, basis);
        return Vector(gamma - (2.0 * step / std::sqrt(t + 1.0)) * grad);
      });
}

void WriteTraceCsv(const IterateTrace& trace,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RecourseError("trace: cannot write " + path.string());
  out.precision(17);
  out << "t,primal,dual,support\n";
  for (int t = 0; t < trace.size(); ++t) {
    out << t + 1 << ',' << trace.primal[t] << ',' << trace.dual[t] << ',';
    for (size_t k = 0; k < trace.z[t].size(); ++k) {
      out << (k ? " " : "") << trace.z[t][k];
    }
    out << '\n';
  }
}

ScreeningSet Screen(const IterateTrace& trace, int window, int K) {
  const int T = trace.size();
  if (window < 0 || window >= T) {
    throw RecourseError("screen: window tau=" + std::to_string(window) +
                        " must satisfy 0 <= tau < T=" + std::to_string(T));
  }
  IndexSet members;
  for (int t = T - 1 - window; t < T; ++t) {
    members.insert(members.end(), trace.z[t].begin(), trace.z[t].end());
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (static_cast<int>(members.size()) < K) {
    throw RecourseError("screen: screening set smaller than K");
  }
  return {std::move(members), window};
}

Selection SolveReduced(const QuadProblem& problem, const IndexSet& allowed,
                       const IndexSet* incumbent) {
  problem.Validate();
  IndexSet members = allowed;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (static_cast<int>(members.size()) < problem.K) {
    throw RecourseError("solve_reduced: infeasible, " +
                        std::to_string(members.size()) +
                        " allowed indices for K=" + std::to_string(problem.K));
  }
  for (int i : members) {
    if (i < 0 || i >= problem.size()) {
      throw RecourseError("solve_reduced: index " + std::to_string(i) +
                          " out of range");
    }
  }
  const bool enumerate =
      BinomialCapped(static_cast<long long>(members.size()), problem.K,
                     kEnumerationBudget) <= kEnumerationBudget;
  ExactSearch search(problem, members, /*use_bounds=*/!enumerate);
  if (incumbent) {
    for (int i : *incumbent) {
      if (!std::binary_search(members.begin(), members.end(), i)) {
        throw RecourseError("solve_reduced: incumbent outside allowed set");
      }
    }
    search.Seed(*incumbent);
  }
  Selection out = search.Run();
  out.report = enumerate ? "enumeration" : "branch-and-bound";
  return out;
}

Selection BruteForceQuad(const QuadProblem& problem) {
  problem.Validate();
  if (BinomialCapped(problem.size(), problem.K, kBruteForceBudget) >
      kBruteForceBudget) {
    throw RecourseError("quad brute force: C(" +
                        std::to_string(problem.size()) + ", " +
                        std::to_string(problem.K) + ") exceeds the 1e7 budget");
  }
  IndexSet all(problem.size());
  std::iota(all.begin(), all.end(), 0);
  ExactSearch search(problem, all, /*use_bounds=*/false);
  return search.Run();
}

Selection QuadGreedy(const QuadProblem& problem) {
  problem.Validate();
  const int n = problem.size();
  const double w = problem.weight;
  Vector row_sum = Vector::Zero(n);  // sum over chosen j of S_ij
  std::vector<char> chosen(n, 0);
  Selection out;
  for (int k = 0; k < problem.K; ++k) {
    int best = -1;
    double best_gain = kInf;
    for (int i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      const double gain =
          w * (problem.S(i, i) + 2.0 * row_sum[i]) + (1.0 - w) * problem.d[i];
      if (gain < best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    chosen[best] = 1;
    out.indices.push_back(best);
    row_sum += problem.S.col(best);
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

Selection QuadLocalSearch(const QuadProblem& problem, const Selection& start) {
  problem.Validate();
  if (static_cast<int>(start.indices.size()) != problem.K) {
    throw RecourseError("quad local search: start has " +
                        std::to_string(start.indices.size()) +
                        " members, expected K=" + std::to_string(problem.K));
  }
  const int n = problem.size();
  const double w = problem.weight;
  IndexSet current = start.indices;
  std::sort(current.begin(), current.end());
  std::vector<char> chosen(n, 0);
  Vector row_sum = Vector::Zero(n);
  for (int j : current) {
    chosen[j] = 1;
    row_sum += problem.S.col(j);
  }
  double value = QuadObjective(problem, current);
  int moves = 0;
  while (true) {
    // Contribution of each member; dropping the largest lowers the objective
    // the most.
    std::vector<std::pair<double, int>> removals;
    for (int j : current) {
      removals.emplace_back(
          w * (2.0 * row_sum[j] - problem.S(j, j)) + (1.0 - w) * problem.d[j],
          j);
    }
    std::stable_sort(
        removals.begin(), removals.end(),
        [](const auto& a, const auto& b) { return a.first > b.first; });
    bool improved = false;
    for (const auto& [contribution, removed] : removals) {
      int best = -1;
      double best_gain = kInf;
      for (int i = 0; i < n; ++i) {
        if (chosen[i] && i != removed) continue;
        const double gain =
            w * (problem.S(i, i) + 2.0 * (row_sum[i] - problem.S(i, removed))) +
            (1.0 - w) * problem.d[i];
        if (gain < best_gain) {
          best_gain = gain;
          best = i;
        }
      }
      if (best == removed) continue;
      if (!(value - contribution + best_gain <
            value - kQuadImprovementTolerance)) {
        continue;
      }
      IndexSet next = current;
      next.erase(std::find(next.begin(), next.end(), removed));
      next.insert(std::upper_bound(next.begin(), next.end(), best), best);
      const double next_value = QuadObjective(problem, next);
      if (!(next_value < value)) continue;
      chosen[removed] = 0;
      chosen[best] = 1;
      row_sum += problem.S.col(best) - problem.S.col(removed);
      current = std::move(next);
      value = next_value;
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

IndexSet KNearest(const Vector& d, int K) { return KSmallest(d, K); }

}  // namespace recourse
