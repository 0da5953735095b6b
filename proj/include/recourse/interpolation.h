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

// Turns selected prototypes into recourses, either by walking the segment
// from the input to each prototype until the classifier flips, or by taking
// the shortest actionability path to the prototype.

#ifndef RECOURSE_INTERPOLATION_H_
#define RECOURSE_INTERPOLATION_H_

#include <optional>
#include <string>
#include <vector>

#include "recourse/action_graph.h"
#include "recourse/classifier.h"
#include "recourse/common.h"
#include "recourse/data.h"
#include "recourse/quad.h"

namespace recourse {

enum class SelectorKind {
  kDppGreedy,
  kDppLocalSearch,
  kQuadBestResponse,
  kQuadDualAscent,
  kQuadGreedy,
  kQuadLocalSearch,
  kExact,
};

// "dpp-greedy", "dpp-ls", "quad-br", "quad-da", "quad-greedy", "quad-ls",
// "exact".
std::string SelectorName(SelectorKind kind);
SelectorKind ParseSelector(const std::string& name);
const std::vector<SelectorKind>& AllSelectors();

struct PlanParams {
  int K = 3;
  double theta = 0.9;  // DPP theta and QUAD weight alike
  double h = 1.0;
  int M = 0;  // <= 0 picks DefaultEigenRank
  int T = 50;
  int tau = 10;
  double lambda = 0.1;
  int grid = 100;
  double tol = 1e-6;
};

// Per-input matrices consumed by the selectors. L is filled only for the DPP
// selectors with theta > 0.
struct SelectionInputs {
  Matrix A;             // p x N, unit columns
  QuadProblem problem;  // S = A^T A, d, theta, K
  Matrix L;
};

SelectionInputs PrepareSelection(const Matrix& A, const Vector& d,
                                 SelectorKind selector,
                                 const PlanParams& params);

// Runs the selector on prepared inputs.
Selection SolveSelection(const SelectionInputs& inputs, SelectorKind selector,
                         const PlanParams& params);

// PrepareSelection followed by SolveSelection. Picks K of the N candidates. A
// is p x N with unit columns, d holds the matching distances. theta = 0 returns
// the K nearest for every selector.
Selection SelectPrototypes(const Matrix& A, const Vector& d,
                           SelectorKind selector, const PlanParams& params);

struct LinearRecourseResult {
  Vector recourse;
  double lambda = 1.0;
};

// Earliest grid point on the segment x0 -> prototype with label 1, refined by
// bisection against its predecessor until the bracket is <= tol. Returns the
// prototype itself when the bracket never leaves lambda = 1.
LinearRecourseResult LinearRecourse(const Eigen::Ref<const Vector>& x0,
                                    const Eigen::Ref<const Vector>& prototype,
                                    const MlpModel& model, int grid = 100,
                                    double tol = 1e-6);

struct PlanEntry {
  int prototype_index = -1;  // training row
  int node = -1;             // graph node id, graph mode only
  Vector prototype;
  Vector recourse;
  double lambda = 1.0;
  std::optional<Path> path;
};

struct RecoursePlan {
  Vector x0;
  std::string method;
  std::string mode;  // "linear" or "graph"
  std::vector<PlanEntry> entries;
  std::string report;

  int size() const { return static_cast<int>(entries.size()); }
  Matrix Recourses() const;   // K x p
  Matrix Prototypes() const;  // K x p
  std::vector<Path> Paths() const;
};

// Candidates are the training rows the model labels 1.
RecoursePlan PlanLinear(const Eigen::Ref<const Vector>& x0,
                        const Dataset& train, const MlpModel& model,
                        SelectorKind selector, const PlanParams& params);

// Attaches x0 to `graph`; candidates are reachable nodes labelled 1. d holds
// shortest-path distances, S the feature-space direction cosines.
RecoursePlan PlanGraph(const Eigen::Ref<const Vector>& x0,
                       const ActionGraph& graph, const MlpModel& model,
                       SelectorKind selector, const PlanParams& params);

// One JSON object per plan, on a single line.
std::string PlanToJson(const RecoursePlan& plan);
RecoursePlan PlanFromJson(const std::string& text);

}  // namespace recourse

#endif  // RECOURSE_INTERPOLATION_H_
