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

// Independent reference implementations shared by the unit and acceptance
// tests. Each one is deliberately naive.

#ifndef RECOURSE_TESTS_ORACLES_H_
#define RECOURSE_TESTS_ORACLES_H_

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "recourse/action_graph.h"
#include "recourse/classifier.h"
#include "test_util.h"

namespace recourse::testing {

// Top-M truncation of S from a dense symmetric eigensolver.
inline Eigen::MatrixXd DenseTruncation(const Eigen::MatrixXd& S, int M) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const int n = static_cast<int>(S.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < M; ++m) {
    const Eigen::VectorXd v = eig.eigenvectors().col(n - 1 - m);
    out += eig.eigenvalues()[n - 1 - m] * v * v.transpose();
  }
  return out;
}

// Minimum of w z'Sz + (1-w) d'z over K-subsets of `pool` (all if empty);
// first minimizer in lexicographic order.
inline std::pair<std::vector<int>, double> EnumerateQuad(
    const Eigen::MatrixXd& S, const Eigen::VectorXd& d, double w, int K,
    std::vector<int> pool = {}) {
  if (pool.empty()) {
    for (int i = 0; i < d.size(); ++i) pool.push_back(i);
  }
  std::vector<int> best;
  double best_value = std::numeric_limits<double>::infinity();
  ForEachSubset(static_cast<int>(pool.size()), K,
                [&](const std::vector<int>& idx) {
                  std::vector<int> z;
                  for (int i : idx) z.push_back(pool[i]);
                  const double v = NaiveQuadObjective(S, d, w, z);
                  if (v < best_value) {
                    best_value = v;
                    best = z;
                  }
                });
  return {best, best_value};
}

// Maximum log det over K-subsets; first maximizer in lexicographic order.
inline std::pair<std::vector<int>, double> EnumerateLogDet(
    const Eigen::MatrixXd& L, int K) {
  std::vector<int> best;
  double best_value = -std::numeric_limits<double>::infinity();
  ForEachSubset(static_cast<int>(L.rows()), K, [&](const std::vector<int>& J) {
    const double v = NaiveLogDet(L, J);
    if (best.empty() || v > best_value) {
      best_value = v;
      best = J;
    }
  });
  return {best, best_value};
}

inline std::vector<double> BellmanFord(const ActionGraph& g, int source) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.num_nodes(), inf);
  dist[source] = 0.0;
  for (int round = 0; round < g.num_nodes(); ++round) {
    bool changed = false;
    for (int u = 0; u < g.num_nodes(); ++u) {
      if (dist[u] == inf) continue;
      for (const GraphEdge& e : g.out_edges(u)) {
        if (dist[u] + e.weight < dist[e.to]) {
          dist[e.to] = dist[u] + e.weight;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return dist;
}

// Path edit distance by plain recursion on prefix lengths l and h.
inline double NaiveLevenshtein(const Eigen::MatrixXd& P, int l,
                               const Eigen::MatrixXd& Q, int h) {
  auto step = [](const Eigen::MatrixXd& X, int n) {
    return n >= 2 ? (X.row(n - 1) - X.row(n - 2)).norm() : 0.0;
  };
  if (h == 0) {
    double s = 0.0;
    for (int i = 1; i < l; ++i) s += (P.row(i) - P.row(i - 1)).norm();
    return s;
  }
  if (l == 0) return NaiveLevenshtein(Q, h, P, 0);
  return std::min({step(Q, h) + NaiveLevenshtein(P, l, Q, h - 1),
                   step(P, l) + NaiveLevenshtein(P, l - 1, Q, h),
                   (P.row(l - 1) - Q.row(h - 1)).norm() +
                       NaiveLevenshtein(P, l - 1, Q, h - 1)});
}

// Central differences of the training loss, one parameter at a time.
inline Gradient FiniteDifferences(const MlpModel& model,
                                  const Eigen::MatrixXd& X,
                                  const std::vector<int>& y, double l2,
                                  double step) {
  MlpModel probe = model;
  auto central = [&](double* param) {
    const double saved = *param;
    *param = saved + step;
    const double up = LossAndGradient(probe, X, y, l2, nullptr);
    *param = saved - step;
    const double down = LossAndGradient(probe, X, y, l2, nullptr);
    *param = saved;
    return (up - down) / (2 * step);
  };
  Gradient g;
  for (size_t l = 0; l < model.layers().size(); ++l) {
    DenseLayer& layer = probe.mutable_layers()[l];
    Eigen::MatrixXd gw(layer.weights.rows(), layer.weights.cols());
    for (Eigen::Index i = 0; i < gw.size(); ++i) {
      gw(i) = central(&layer.weights(i));
    }
    Eigen::VectorXd gb(layer.bias.size());
    for (Eigen::Index i = 0; i < gb.size(); ++i)
      gb[i] = central(&layer.bias[i]);
    g.weights.push_back(gw);
    g.biases.push_back(gb);
  }
  return g;
}

// Largest elementwise |a - n| / max(|a|, |n|, 1e-6) over all parameters.
inline double MaxRelativeError(const Gradient& a, const Gradient& n) {
  double worst = 0.0;
  auto visit = [&](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double scale = std::max({std::abs(x(i)), std::abs(y(i)), 1e-6});
      worst = std::max(worst, std::abs(x(i) - y(i)) / scale);
    }
  };
  for (size_t l = 0; l < a.weights.size(); ++l) {
    visit(a.weights[l], n.weights[l]);
    visit(a.biases[l], n.biases[l]);
  }
  return worst;
}

}  // namespace recourse::testing

#endif  // RECOURSE_TESTS_ORACLES_H_
