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

// Plan and path metrics. Plan metrics read the recourses as rows of a K x p
// matrix; path metrics use node ids for edge identity and node coordinates
// for lengths.

#ifndef RECOURSE_EVALUATION_H_
#define RECOURSE_EVALUATION_H_

#include <optional>
#include <string>
#include <vector>

#include "recourse/action_graph.h"
#include "recourse/classifier.h"
#include "recourse/common.h"
#include "recourse/interpolation.h"

namespace recourse {

// Mean Euclidean distance from x0 to each recourse. Throws on an empty plan.
double Cost(const Matrix& recourses, const Eigen::Ref<const Vector>& x0);

// True when every recourse is labelled 1.
bool PlanValid(const Matrix& recourses, const MlpModel& model);

// Fraction of fully valid plans; nullopt for an empty collection.
std::optional<double> Validity(const std::vector<Matrix>& plans,
                               const MlpModel& model);

// Sum over ordered pairs k != k' of cos(r_k - x0, r_k' - x0). Throws when a
// recourse coincides with x0.
double AntiDiversityMetric(const Matrix& recourses,
                           const Eigen::Ref<const Vector>& x0);

// det(Q) with Q_ij = 1 / (1 + ||r_i - r_j||).
double DppMetric(const Matrix& recourses);

// max_k min_i ||r_k - positive_i||.
double ManifoldDistance(const Matrix& recourses, const Matrix& positives);

// Edit distance between point sequences (rows). Substituting u by v costs
// ||u - v||; deleting node j costs its incoming step ||x_j - x_{j-1}||, and
// the first node deletes for free.
double PathLevenshtein(const Matrix& P, const Matrix& Q);

// Mean pairwise Levenshtein; nullopt when fewer than two paths.
std::optional<double> PathDiversity(const std::vector<Path>& paths);

// Length-weighted Jaccard coefficient of the two edge sets, edges keyed by
// their unordered endpoint ids. When the union has zero length the result is
// 1 for equal edge sets and 0 otherwise.
double PathJaccard(const Path& a, const Path& b);

// Mean pairwise Jaccard; nullopt when fewer than two paths.
std::optional<double> PathAntiDiversity(const std::vector<Path>& paths);

struct PlanMetrics {
  double cost = 0.0;
  bool valid = false;
  double anti_diversity = 0.0;
  double dpp = 0.0;
  double manifold_distance = 0.0;
};

struct PathMetrics {
  double shortest_path_cost = 0.0;  // mean path weight
  std::optional<double> path_diversity;
  std::optional<double> path_anti_diversity;
};

PlanMetrics EvaluatePlan(const RecoursePlan& plan, const MlpModel& model,
                         const Matrix& positives);
PathMetrics EvaluatePaths(const RecoursePlan& plan);

// Missing values print as this marker.
inline constexpr const char* kUndefined = "NA";

std::string FormatMetric(std::optional<double> value);

}  // namespace recourse

#endif  // RECOURSE_EVALUATION_H_
