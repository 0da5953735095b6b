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

// Experiment harness shared by the command line tool and the acceptance
// suite: run configuration, data preparation, per-instance plan runs and the
// weight, K and timing sweeps.

#ifndef RECOURSE_EXPERIMENTS_H_
#define RECOURSE_EXPERIMENTS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "recourse/action_graph.h"
#include "recourse/classifier.h"
#include "recourse/data.h"
#include "recourse/evaluation.h"
#include "recourse/interpolation.h"

namespace recourse {

enum class InterpolationMode { kLinear, kGraph };

std::string ModeName(InterpolationMode mode);
InterpolationMode ParseMode(const std::string& name);

struct RunConfig {
  std::string name = "synthetic";
  // CSV input; when csv is empty a synthetic 2-D dataset is generated.
  std::filesystem::path csv;
  std::filesystem::path schema;
  std::string label_column = "label";
  int synthetic_size = 1000;
  std::uint64_t synthetic_seed = 0;

  SplitConfig split;
  std::vector<int> hidden = {20, 50, 20};
  TrainConfig train;
  // Optional pre-trained model and pre-built graph.
  std::filesystem::path model;
  std::filesystem::path graph;

  SelectorKind method = SelectorKind::kQuadDualAscent;
  PlanParams params;
  InterpolationMode mode = InterpolationMode::kLinear;
  GraphOptions graph_options;
  int max_instances = 100;

  std::vector<double> weights = {0.1, 0.2, 0.3, 0.4, 0.5,
                                 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<int> k_values = {2, 3, 4, 5, 6};
  std::vector<int> bench_sizes = {1000, 2000, 5000};
  std::vector<SelectorKind> bench_methods = {SelectorKind::kDppGreedy,
                                             SelectorKind::kDppLocalSearch,
                                             SelectorKind::kQuadDualAscent};
  int bench_replications = 5;
  // Negative inputs timed per replication.
  int bench_instances = 10;

  std::filesystem::path out = "out";
};

// JSON config; absent keys keep their defaults and unknown keys are errors.
RunConfig LoadRunConfig(const std::filesystem::path& path);
RunConfig RunConfigFromJson(const std::string& text);

struct PreparedData {
  FeatureSchema schema;
  Scaler scaler;
  Dataset train;
  Dataset test;
};

PreparedData PrepareData(const RunConfig& config);

// Loads config.model when set, otherwise trains on the training split.
MlpModel ObtainModel(const RunConfig& config, const PreparedData& data);

// Loads config.graph when set, otherwise builds it over the training split.
ActionGraph ObtainGraph(const RunConfig& config, const PreparedData& data,
                        const MlpModel& model);

struct InstanceResult {
  int test_row = -1;
  std::optional<RecoursePlan> plan;
  std::string skip_reason;  // set when plan is empty
  PlanMetrics metrics;
  std::optional<PathMetrics> path_metrics;
};

// Test rows the model labels 0, in test order, at most max_instances.
std::vector<int> NegativeTestRows(const PreparedData& data,
                                  const MlpModel& model, int max_instances);

// Training rows the model labels 1, as a matrix.
Matrix FavorableTrainRows(const PreparedData& data, const MlpModel& model);

// One plan per negative test row; failures become skipped rows.
std::vector<InstanceResult> RunPlans(
    const PreparedData& data, const MlpModel& model, const ActionGraph* graph,
    InterpolationMode mode, SelectorKind method, const PlanParams& params,
    int max_instances);

struct Aggregate {
  int planned = 0;
  int skipped = 0;
  double cost = 0.0;
  std::optional<double> validity;
  double anti_diversity = 0.0;
  double dpp = 0.0;
  double manifold_distance = 0.0;
  std::optional<double> shortest_path_cost;
  std::optional<double> path_diversity;
  std::optional<double> path_anti_diversity;
};

Aggregate Summarize(const std::vector<InstanceResult>& results);

// Spearman rank correlation with mid-ranks; nullopt when either side is
// constant.
std::optional<double> Spearman(const std::vector<double>& a,
                               const std::vector<double>& b);

struct SweepRow {
  double key = 0.0;  // weight or K
  Aggregate aggregate;
  std::string reason;  // non-empty when no instance could be planned
};

std::vector<SweepRow> ParetoSweep(const PreparedData& data,
                                  const MlpModel& model,
                                  const ActionGraph* graph,
                                  const RunConfig& config);
std::vector<SweepRow> KSweep(const PreparedData& data, const MlpModel& model,
                             const ActionGraph* graph, const RunConfig& config);

struct BenchRow {
  SelectorKind method;
  int n = 0;
  double mean_seconds = 0.0;
};

// Mean per-input selection time on fresh synthetic samples labelled by the
// ground-truth function, for every (method, size) pair. Geometry and kernel
// construction are excluded from the timing.
std::vector<BenchRow> Benchmark(const RunConfig& config);

// CSV writers; each truncates its file.
void WriteTrainReport(const RunConfig& config, const EvalReport& report,
                      const std::filesystem::path& path);
void WriteInstanceCsv(const std::vector<InstanceResult>& results,
                      InterpolationMode mode,
                      const std::filesystem::path& path);
void WriteSummaryCsv(const RunConfig& config, SelectorKind method,
                     InterpolationMode mode, const Aggregate& aggregate,
                     const std::filesystem::path& path);
void WritePlansJsonl(const std::vector<InstanceResult>& results,
                     const std::filesystem::path& path);
void WriteParetoCsv(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& path);
void WriteKSweepCsv(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& path);
void WriteBenchCsv(const std::vector<BenchRow>& rows,
                   const std::filesystem::path& path);

}  // namespace recourse

#endif  // RECOURSE_EXPERIMENTS_H_
