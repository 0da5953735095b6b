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

#include "recourse/evaluation.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <utility>

namespace recourse {
namespace {

using EdgeKey = std::pair<int, int>;

std::map<EdgeKey, double> EdgeLengths(const Path& path) {
  if (path.points.rows() != static_cast<Eigen::Index>(path.nodes.size())) {
    throw RecourseError("path: node coordinates missing");
  }
  std::map<EdgeKey, double> out;
  for (size_t k = 1; k < path.nodes.size(); ++k) {
    const int u = path.nodes[k - 1];
    const int v = path.nodes[k];
    const auto i = static_cast<Eigen::Index>(k);
    out[{std::min(u, v), std::max(u, v)}] =
        (path.points.row(i) - path.points.row(i - 1)).norm();
  }
  return out;
}

template <typename Fn>
std::optional<double> PairwiseMean(const std::vector<Path>& paths, Fn fn) {
  if (paths.size() < 2) return std::nullopt;
  double total = 0.0;
  int pairs = 0;
  for (size_t a = 0; a < paths.size(); ++a) {
    for (size_t b = a + 1; b < paths.size(); ++b) {
      total += fn(paths[a], paths[b]);
      ++pairs;
    }
  }
  return total / pairs;
}

}  // namespace

double Cost(const Matrix& recourses, const Eigen::Ref<const Vector>& x0) {
  if (recourses.rows() == 0) throw RecourseError("cost: empty plan");
  double total = 0.0;
  for (Eigen::Index k = 0; k < recourses.rows(); ++k) {
    total += (recourses.row(k).transpose() - x0).norm();
  }
  return total / static_cast<double>(recourses.rows());
}

bool PlanValid(const Matrix& recourses, const MlpModel& model) {
  for (Eigen::Index k = 0; k < recourses.rows(); ++k) {
    if (PredictLabel(model, recourses.row(k).transpose()) != 1) return false;
  }
  return true;
}

std::optional<double> Validity(const std::vector<Matrix>& plans,
                               const MlpModel& model) {
  if (plans.empty()) return std::nullopt;
  int valid = 0;
  for (const Matrix& plan : plans) valid += PlanValid(plan, model) ? 1 : 0;
  return static_cast<double>(valid) / static_cast<double>(plans.size());
}

double AntiDiversityMetric(const Matrix& recourses,
                           const Eigen::Ref<const Vector>& x0) {
  const Eigen::Index K = recourses.rows();
  Matrix U(x0.size(), K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Vector dir = recourses.row(k).transpose() - x0;
    const double norm = dir.norm();
    if (!(norm > 0.0)) {
      throw RecourseError("anti-diversity: recourse " + std::to_string(k) +
                          " coincides with the input");
    }
    U.col(k) = dir / norm;
  }
  double total = 0.0;
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) {
      if (a != b) total += U.col(a).dot(U.col(b));
    }
  }
  return total;
}

double DppMetric(const Matrix& recourses) {
  const Eigen::Index K = recourses.rows();
  if (K == 0) throw RecourseError("dpp metric: empty plan");
  Matrix Q(K, K);
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) {
      Q(a, b) = 1.0 / (1.0 + (recourses.row(a) - recourses.row(b)).norm());
    }
  }
  return Q.determinant();
}

double ManifoldDistance(const Matrix& recourses, const Matrix& positives) {
  if (positives.rows() == 0) {
    throw RecourseError("manifold distance: no favorable samples");
  }
  double worst = 0.0;
  for (Eigen::Index k = 0; k < recourses.rows(); ++k) {
    const double nearest =
        (positives.rowwise() - recourses.row(k)).rowwise().norm().minCoeff();
    worst = std::max(worst, nearest);
  }
  return worst;
}

double PathLevenshtein(const Matrix& P, const Matrix& Q) {
  const Eigen::Index n = P.rows();
  const Eigen::Index m = Q.rows();
  if (n > 0 && m > 0 && P.cols() != Q.cols()) {
    throw RecourseError("levenshtein: paths live in different dimensions");
  }
  auto del_p = [&](Eigen::Index j) {
    return j == 0 ? 0.0 : (P.row(j) - P.row(j - 1)).norm();
  };
  auto del_q = [&](Eigen::Index j) {
    return j == 0 ? 0.0 : (Q.row(j) - Q.row(j - 1)).norm();
  };
  // D(i, j): distance between the first i nodes of P and first j of Q.
  Matrix D(n + 1, m + 1);
  D(0, 0) = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i) D(i, 0) = D(i - 1, 0) + del_p(i - 1);
  for (Eigen::Index j = 1; j <= m; ++j) D(0, j) = D(0, j - 1) + del_q(j - 1);
  for (Eigen::Index i = 1; i <= n; ++i) {
    for (Eigen::Index j = 1; j <= m; ++j) {
      const double sub = D(i - 1, j - 1) + (P.row(i - 1) - Q.row(j - 1)).norm();
      const double drop_q = D(i, j - 1) + del_q(j - 1);
      const double drop_p = D(i - 1, j) + del_p(i - 1);
      D(i, j) = std::min({drop_q, drop_p, sub});
    }
  }
  return D(n, m);
}

std::optional<double> PathDiversity(const std::vector<Path>& paths) {
  return PairwiseMean(paths, [](const Path& a, const Path& b) {
    return PathLevenshtein(a.points, b.points);
  });
}

double PathJaccard(const Path& a, const Path& b) {
  const auto ea = EdgeLengths(a);
  const auto eb = EdgeLengths(b);
  double shared = 0.0;
  double total = 0.0;
  for (const auto& [key, length] : ea) {
    total += length;
    if (eb.count(key)) shared += length;
  }
  for (const auto& [key, length] : eb) {
    if (!ea.count(key)) total += length;
  }
  if (total == 0.0) {
    bool same = ea.size() == eb.size();
    for (const auto& entry : ea) same = same && eb.count(entry.first) > 0;
    return same ? 1.0 : 0.0;
  }
  return shared / total;
}

std::optional<double> PathAntiDiversity(const std::vector<Path>& paths) {
  return PairwiseMean(paths, PathJaccard);
}

PlanMetrics EvaluatePlan(const RecoursePlan& plan, const MlpModel& model,
                         const Matrix& positives) {
  const Matrix R = plan.Recourses();
  PlanMetrics out;
  out.cost = Cost(R, plan.x0);
  out.valid = PlanValid(R, model);
  out.anti_diversity = AntiDiversityMetric(R, plan.x0);
  out.dpp = DppMetric(R);
  out.manifold_distance = ManifoldDistance(R, positives);
  return out;
}

PathMetrics EvaluatePaths(const RecoursePlan& plan) {
  const std::vector<Path> paths = plan.Paths();
  if (paths.empty()) throw RecourseError("path metrics: plan has no paths");
  PathMetrics out;
  for (const Path& p : paths) out.shortest_path_cost += p.weight;
  out.shortest_path_cost /= static_cast<double>(paths.size());
  out.path_diversity = PathDiversity(paths);
  out.path_anti_diversity = PathAntiDiversity(paths);
  return out;
}

std::string FormatMetric(std::optional<double> value) {
  if (!value) return kUndefined;
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), *value);
  return std::string(buf, ptr);
}

}  // namespace recourse
