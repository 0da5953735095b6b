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

#include "recourse/interpolation.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <utility>

#include "json.hpp"
#include "recourse/dpp.h"
#include "recourse/geometry.h"
#include "recourse/quad.h"

namespace recourse {
namespace {

using Json = nlohmann::json;

struct NamedSelector {
  SelectorKind kind;
  const char* name;
};

constexpr NamedSelector kSelectorNames[] = {
    {SelectorKind::kDppGreedy, "dpp-greedy"},
    {SelectorKind::kDppLocalSearch, "dpp-ls"},
    {SelectorKind::kQuadBestResponse, "quad-br"},
    {SelectorKind::kQuadDualAscent, "quad-da"},
    {SelectorKind::kQuadGreedy, "quad-greedy"},
    {SelectorKind::kQuadLocalSearch, "quad-ls"},
    {SelectorKind::kExact, "exact"},
};

// Greedy MAP may stop early on a rank-deficient kernel; the remaining slots
// go to the nearest unused candidates so that the plan still has K entries.
Selection CompleteWithNearest(Selection selection, const Vector& d, int K) {
  if (static_cast<int>(selection.indices.size()) >= K) return selection;
  std::vector<int> order(d.size());
  for (int i = 0; i < d.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return d[a] < d[b]; });
  for (int i : order) {
    if (static_cast<int>(selection.indices.size()) == K) break;
    if (std::find(selection.indices.begin(), selection.indices.end(), i) ==
        selection.indices.end()) {
      selection.indices.push_back(i);
    }
  }
  std::sort(selection.indices.begin(), selection.indices.end());
  selection.report += (selection.report.empty() ? "" : "; ");
  selection.report += "completed with nearest candidates";
  return selection;
}

Selection QuadPipeline(const QuadProblem& problem, const Matrix& A,
                       bool dual_ascent, const PlanParams& params) {
  const int M = params.M > 0 ? params.M : DefaultEigenRank(A);
  const EigenBasis basis = EigenBasisFromDirections(A, M);
  const IterateTrace trace =
      dual_ascent ? DualAscent(problem, basis, params.T, params.lambda)
                  : BestResponse(problem, basis, params.T);
  const ScreeningSet screen = Screen(trace, params.tau, problem.K);
  const IndexSet& best = trace.z[trace.BestIterate()];
  // The best iterate may predate the window; keep it reachable so the
  // reduced solve never does worse than the trace.
  IndexSet allowed;
  std::set_union(screen.members.begin(), screen.members.end(), best.begin(),
                 best.end(), std::back_inserter(allowed));
  Selection out = SolveReduced(problem, allowed, &best);
  if (!basis.report.empty()) {
    out.report += (out.report.empty() ? "" : "; ") + basis.report;
  }
  return out;
}

Json VectorToJson(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector VectorFromJson(const Json& j, const char* field) {
  if (!j.is_array()) {
    throw RecourseError(std::string("plan: field '") + field +
                        "' must be an array");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw RecourseError(std::string("plan: field '") + field +
                          "' must hold numbers");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix StackRows(const std::vector<const Vector*>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix out(static_cast<Eigen::Index>(rows.size()), rows.front()->size());
  for (size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = rows[k]->transpose();
  }
  return out;
}

}  // namespace

std::string SelectorName(SelectorKind kind) {
  for (const NamedSelector& s : kSelectorNames) {
    if (s.kind == kind) return s.name;
  }
  throw RecourseError("unknown selector kind");
}

SelectorKind ParseSelector(const std::string& name) {
  for (const NamedSelector& s : kSelectorNames) {
    if (name == s.name) return s.kind;
  }
  throw RecourseError("unknown method '" + name + "'");
}

const std::vector<SelectorKind>& AllSelectors() {
  static const std::vector<SelectorKind> kAll = [] {
    std::vector<SelectorKind> all;
    for (const NamedSelector& s : kSelectorNames) all.push_back(s.kind);
    return all;
  }();
  return kAll;
}

namespace {

bool IsDpp(SelectorKind selector) {
  return selector == SelectorKind::kDppGreedy ||
         selector == SelectorKind::kDppLocalSearch;
}

void CheckSelectionArgs(int n, const PlanParams& params) {
  if (params.K < 1 || params.K > n) {
    throw RecourseError("select: need K in [1, " + std::to_string(n) +
                        "], got " + std::to_string(params.K));
  }
  if (!(params.theta >= 0.0 && params.theta <= 1.0)) {
    throw RecourseError("select: theta must lie in [0, 1]");
  }
}

}  // namespace

SelectionInputs PrepareSelection(const Matrix& A, const Vector& d,
                                 SelectorKind selector,
                                 const PlanParams& params) {
  const int n = static_cast<int>(d.size());
  if (A.cols() != n) {
    throw RecourseError("select: direction and distance counts differ");
  }
  CheckSelectionArgs(n, params);
  SelectionInputs inputs;
  inputs.A = A;
  inputs.problem.d = d;
  inputs.problem.weight = params.theta;
  inputs.problem.K = params.K;
  if (params.theta == 0.0) return inputs;
  inputs.problem.S = Similarity(A);
  if (IsDpp(selector)) {
    inputs.L =
        DppKernel(inputs.problem.S, LocalityDiag(d, params.h), params.theta);
    inputs.problem.S.resize(0, 0);
  }
  return inputs;
}

Selection SolveSelection(const SelectionInputs& inputs, SelectorKind selector,
                         const PlanParams& params) {
  const QuadProblem& problem = inputs.problem;
  const int n = problem.size();
  CheckSelectionArgs(n, params);
  if (problem.K != params.K || problem.weight != params.theta) {
    throw RecourseError("select: inputs were prepared for other parameters");
  }
  if (params.theta == 0.0) return {KNearest(problem.d, params.K), ""};

  if (IsDpp(selector)) {
    if (inputs.L.rows() != n) {
      throw RecourseError("select: DPP kernel was not prepared");
    }
    Selection greedy = GreedyMap(inputs.L, params.K);
    if (selector == SelectorKind::kDppGreedy ||
        static_cast<int>(greedy.indices.size()) < params.K) {
      return CompleteWithNearest(std::move(greedy), problem.d, params.K);
    }
    return LocalSearchMap(inputs.L, params.K, greedy);
  }

  problem.Validate();
  switch (selector) {
    case SelectorKind::kQuadBestResponse:
      return QuadPipeline(problem, inputs.A, false, params);
    case SelectorKind::kQuadDualAscent:
      return QuadPipeline(problem, inputs.A, true, params);
    case SelectorKind::kQuadGreedy:
      return QuadGreedy(problem);
    case SelectorKind::kQuadLocalSearch:
      return QuadLocalSearch(problem, QuadGreedy(problem));
    case SelectorKind::kExact: {
      IndexSet all(n);
      for (int i = 0; i < n; ++i) all[i] = i;
      const Selection seed = QuadLocalSearch(problem, QuadGreedy(problem));
      return SolveReduced(problem, all, &seed.indices);
    }
    default:
      throw RecourseError("select: unhandled selector");
  }
}

Selection SelectPrototypes(const Matrix& A, const Vector& d,
                           SelectorKind selector, const PlanParams& params) {
  return SolveSelection(PrepareSelection(A, d, selector, params), selector,
                        params);
}

LinearRecourseResult LinearRecourse(const Eigen::Ref<const Vector>& x0,
                                    const Eigen::Ref<const Vector>& prototype,
                                    const MlpModel& model, int grid,
                                    double tol) {
  if (grid < 1) throw RecourseError("interpolate: grid must be >= 1");
  if (!(tol > 0.0)) throw RecourseError("interpolate: tol must be > 0");
  if (x0.size() != prototype.size()) {
    throw RecourseError("interpolate: x0 and prototype dimensions differ");
  }
  if (PredictLabel(model, prototype) != 1) {
    throw RecourseError("interpolate: invalid prototype (label 0)");
  }
  const Vector step = prototype - x0;
  auto point = [&](double lambda) -> Vector {
    if (lambda == 1.0) return prototype;
    return x0 + lambda * step;
  };

  int first = grid;
  for (int g = 1; g < grid; ++g) {
    if (PredictLabel(model, point(static_cast<double>(g) / grid)) == 1) {
      first = g;
      break;
    }
  }
  double lo = static_cast<double>(first - 1) / grid;
  double hi = first == grid ? 1.0 : static_cast<double>(first) / grid;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (PredictLabel(model, point(mid)) == 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {point(hi), hi};
}

Matrix RecoursePlan::Recourses() const {
  std::vector<const Vector*> rows;
  for (const PlanEntry& e : entries) rows.push_back(&e.recourse);
  return StackRows(rows);
}

Matrix RecoursePlan::Prototypes() const {
  std::vector<const Vector*> rows;
  for (const PlanEntry& e : entries) rows.push_back(&e.prototype);
  return StackRows(rows);
}

std::vector<Path> RecoursePlan::Paths() const {
  std::vector<Path> out;
  for (const PlanEntry& e : entries) {
    if (e.path) out.push_back(*e.path);
  }
  return out;
}

RecoursePlan PlanLinear(const Eigen::Ref<const Vector>& x0,
                        const Dataset& train, const MlpModel& model,
                        SelectorKind selector, const PlanParams& params) {
  if (x0.size() != train.dim()) {
    throw RecourseError("plan: input dimension does not match the dataset");
  }
  if (PredictLabel(model, x0) != 0) {
    throw RecourseError("plan: input is already labelled favorably");
  }
  const std::vector<int> labels = PredictLabels(model, train.X);
  std::vector<int> rows;
  for (int r = 0; r < train.size(); ++r) {
    if (labels[r] == 1) rows.push_back(r);
  }
  Matrix samples(static_cast<Eigen::Index>(rows.size()), train.dim());
  for (size_t k = 0; k < rows.size(); ++k) {
    samples.row(static_cast<Eigen::Index>(k)) = train.X.row(rows[k]);
  }
  const DirectionMatrix directions = ComputeDirections(x0, samples);
  const int n = static_cast<int>(directions.sample_index.size());
  if (n < params.K) {
    throw RecourseError("plan: fewer than K candidates (" + std::to_string(n) +
                        " favorable samples, K=" + std::to_string(params.K) +
                        ")");
  }
  Vector d(n);
  for (int i = 0; i < n; ++i) {
    d[i] = (samples.row(directions.sample_index[i]).transpose() - x0).norm();
  }
  const Selection selection =
      SelectPrototypes(directions.A, d, selector, params);

  RecoursePlan plan;
  plan.x0 = x0;
  plan.method = SelectorName(selector);
  plan.mode = "linear";
  plan.report = selection.report;
  for (int i : selection.indices) {
    PlanEntry entry;
    entry.prototype_index = rows[directions.sample_index[i]];
    entry.prototype = train.X.row(entry.prototype_index).transpose();
    const LinearRecourseResult r =
        LinearRecourse(x0, entry.prototype, model, params.grid, params.tol);
    entry.recourse = r.recourse;
    entry.lambda = r.lambda;
    plan.entries.push_back(std::move(entry));
  }
  return plan;
}

RecoursePlan PlanGraph(const Eigen::Ref<const Vector>& x0,
                       const ActionGraph& graph, const MlpModel& model,
                       SelectorKind selector, const PlanParams& params) {
  if (PredictLabel(model, x0) != 0) {
    throw RecourseError("plan: input is already labelled favorably");
  }
  const ActionGraph attached = AttachInput(graph, x0, model);
  const int input = attached.input_node();
  const ShortestPathTree tree = ShortestPaths(attached, input);
  std::vector<int> candidates;
  for (int v = 0; v < attached.num_nodes(); ++v) {
    if (v != input && attached.node(v).label == 1) candidates.push_back(v);
  }
  if (candidates.empty()) {
    throw RecourseError("plan: no reachable favorable nodes (0 < K=" +
                        std::to_string(params.K) + ")");
  }
  const DistanceVector reach = GraphDistanceVector(tree, candidates);
  Matrix samples(static_cast<Eigen::Index>(reach.kept.size()), x0.size());
  for (size_t k = 0; k < reach.kept.size(); ++k) {
    samples.row(static_cast<Eigen::Index>(k)) =
        attached.node(reach.kept[k]).x.transpose();
  }
  const DirectionMatrix directions = ComputeDirections(x0, samples);
  const int n = static_cast<int>(directions.sample_index.size());
  if (n < params.K) {
    throw RecourseError(
        "plan: only " + std::to_string(n) +
        " reachable favorable nodes, K=" + std::to_string(params.K));
  }
  Vector d(n);
  for (int i = 0; i < n; ++i) d[i] = reach.d[directions.sample_index[i]];
  const Selection selection =
      SelectPrototypes(directions.A, d, selector, params);

  RecoursePlan plan;
  plan.x0 = x0;
  plan.method = SelectorName(selector);
  plan.mode = "graph";
  plan.report = selection.report;
  for (int i : selection.indices) {
    PlanEntry entry;
    entry.node = reach.kept[directions.sample_index[i]];
    entry.prototype_index = attached.node(entry.node).origin;
    entry.prototype = attached.node(entry.node).x;
    entry.recourse = entry.prototype;
    entry.lambda = 1.0;
    entry.path = ExtractPath(attached, tree, entry.node);
    plan.entries.push_back(std::move(entry));
  }
  return plan;
}

std::string PlanToJson(const RecoursePlan& plan) {
  Json j;
  j["method"] = plan.method;
  j["mode"] = plan.mode;
  j["x0"] = VectorToJson(plan.x0);
  if (!plan.report.empty()) j["report"] = plan.report;
  Json entries = Json::array();
  for (const PlanEntry& e : plan.entries) {
    Json je;
    je["prototype_index"] = e.prototype_index;
    je["prototype"] = VectorToJson(e.prototype);
    je["recourse"] = VectorToJson(e.recourse);
    if (e.path) {
      je["node"] = e.node;
      je["path"] = e.path->nodes;
      je["path_weight"] = e.path->weight;
    } else {
      je["lambda"] = e.lambda;
    }
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j.dump();
}

RecoursePlan PlanFromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw RecourseError(std::string("plan: malformed JSON: ") + e.what());
  }
  try {
    RecoursePlan plan;
    plan.method = j.at("method").get<std::string>();
    plan.mode = j.at("mode").get<std::string>();
    plan.x0 = VectorFromJson(j.at("x0"), "x0");
    if (j.contains("report")) plan.report = j["report"].get<std::string>();
    for (const Json& je : j.at("entries")) {
      PlanEntry e;
      e.prototype_index = je.at("prototype_index").get<int>();
      e.prototype = VectorFromJson(je.at("prototype"), "prototype");
      e.recourse = VectorFromJson(je.at("recourse"), "recourse");
      if (je.contains("path")) {
        e.node = je.at("node").get<int>();
        Path path;
        path.nodes = je["path"].get<std::vector<int>>();
        path.weight = je.at("path_weight").get<double>();
        e.path = std::move(path);
      } else {
        e.lambda = je.at("lambda").get<double>();
      }
      plan.entries.push_back(std::move(e));
    }
    return plan;
  } catch (const Json::exception& e) {
    throw RecourseError(std::string("plan: ") + e.what());
  }
}

}  // namespace recourse
