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

// recourse: command line front end for training, graph construction, plan
// generation and the weight, K and timing sweeps.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "recourse/action_graph.h"
#include "recourse/classifier.h"
#include "recourse/data.h"
#include "recourse/experiments.h"
#include "recourse/interpolation.h"

namespace {

using recourse::RunConfig;

struct Overrides {
  std::string config;
  std::string method;
  std::optional<int> k;
  std::optional<double> theta;
  std::optional<double> h;
  std::string mode;
  std::string out;
  std::string model;
  std::string graph;
  std::optional<int> instances;
};

RunConfig ResolveConfig(const Overrides& o) {
  RunConfig c;
  if (!o.config.empty()) c = recourse::LoadRunConfig(o.config);
  if (!o.method.empty()) c.method = recourse::ParseSelector(o.method);
  if (o.k) c.params.K = *o.k;
  if (o.theta) c.params.theta = *o.theta;
  if (o.h) c.params.h = *o.h;
  if (!o.mode.empty()) c.mode = recourse::ParseMode(o.mode);
  if (!o.out.empty()) c.out = o.out;
  if (!o.model.empty()) c.model = o.model;
  if (!o.graph.empty()) c.graph = o.graph;
  if (o.instances) c.max_instances = *o.instances;
  return c;
}

std::optional<recourse::ActionGraph> GraphIfNeeded(
    const RunConfig& c, const recourse::PreparedData& data,
    const recourse::MlpModel& model) {
  if (c.mode != recourse::InterpolationMode::kGraph) return std::nullopt;
  return recourse::ObtainGraph(c, data, model);
}

void CmdTrain(const RunConfig& c) {
  const recourse::PreparedData data = recourse::PrepareData(c);
  RunConfig fresh = c;
  fresh.model.clear();
  const recourse::MlpModel model = recourse::ObtainModel(fresh, data);
  const recourse::EvalReport report = recourse::Evaluate(model, data.test);
  recourse::SaveModel(model, c.out / "model.json");
  recourse::WriteTrainReport(c, report, c.out / "train_report.csv");
  std::cout << "accuracy " << report.accuracy << " auc "
            << recourse::FormatMetric(report.auc) << "\n"
            << "wrote " << (c.out / "model.json").string() << "\n";
}

void CmdSynth(const RunConfig& c) {
  const recourse::RawDataset raw =
      recourse::Synth2d(c.synthetic_size, c.synthetic_seed);
  std::filesystem::create_directories(c.out);
  recourse::WriteCsv(raw, "label", c.out / "synth.csv");
  std::ofstream schema(c.out / "synth_schema.json");
  schema << raw.schema.ToJsonText("label") << "\n";
  std::cout << "wrote " << raw.size() << " rows to "
            << (c.out / "synth.csv").string() << "\n";
}

void CmdGraph(const RunConfig& c) {
  const recourse::PreparedData data = recourse::PrepareData(c);
  const recourse::MlpModel model = recourse::ObtainModel(c, data);
  RunConfig fresh = c;
  fresh.graph.clear();
  const recourse::ActionGraph graph = recourse::ObtainGraph(fresh, data, model);
  std::filesystem::create_directories(c.out);
  recourse::SaveGraph(graph, c.out / "graph.txt");
  std::cout << "nodes " << graph.num_nodes() << " edges " << graph.num_edges()
            << " epsilon " << graph.epsilon() << "\n";
}

void CmdPlan(const RunConfig& c) {
  const recourse::PreparedData data = recourse::PrepareData(c);
  const recourse::MlpModel model = recourse::ObtainModel(c, data);
  const auto graph = GraphIfNeeded(c, data, model);
  const auto results =
      recourse::RunPlans(data, model, graph ? &*graph : nullptr, c.mode,
                         c.method, c.params, c.max_instances);
  const recourse::Aggregate aggregate = recourse::Summarize(results);
  recourse::WritePlansJsonl(results, c.out / "plans.jsonl");
  recourse::WriteInstanceCsv(results, c.mode, c.out / "instances.csv");
  recourse::WriteSummaryCsv(c, c.method, c.mode, aggregate,
                            c.out / "summary.csv");
  std::cout << "planned " << aggregate.planned << " skipped "
            << aggregate.skipped << " validity "
            << recourse::FormatMetric(aggregate.validity) << "\n";
}

void CmdPareto(const RunConfig& c) {
  const recourse::PreparedData data = recourse::PrepareData(c);
  const recourse::MlpModel model = recourse::ObtainModel(c, data);
  const auto graph = GraphIfNeeded(c, data, model);
  const auto rows =
      recourse::ParetoSweep(data, model, graph ? &*graph : nullptr, c);
  recourse::WriteParetoCsv(rows, c.out / "pareto.csv");
  std::cout << "wrote " << rows.size() << " rows to "
            << (c.out / "pareto.csv").string() << "\n";
}

void CmdSweepK(const RunConfig& c) {
  const recourse::PreparedData data = recourse::PrepareData(c);
  const recourse::MlpModel model = recourse::ObtainModel(c, data);
  const auto graph = GraphIfNeeded(c, data, model);
  const auto rows = recourse::KSweep(data, model, graph ? &*graph : nullptr, c);
  recourse::WriteKSweepCsv(rows, c.out / "sweep_k.csv");
  std::cout << "wrote " << rows.size() << " rows to "
            << (c.out / "sweep_k.csv").string() << "\n";
}

void CmdBench(const RunConfig& c) {
  const auto rows = recourse::Benchmark(c);
  recourse::WriteBenchCsv(rows, c.out / "bench.csv");
  for (const auto& r : rows) {
    std::cout << recourse::SelectorName(r.method) << " N=" << r.n << " "
              << r.mean_seconds << "s\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diverse recourse plans for binary classifiers"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--method", o.method,
                 "dpp-greedy, dpp-ls, quad-br, quad-da, quad-greedy, "
                 "quad-ls or exact");
  app.add_option("--k", o.k, "plan size K");
  app.add_option("--theta", o.theta, "diversity weight in [0, 1]");
  app.add_option("--h", o.h, "locality bandwidth of the DPP kernel");
  app.add_option("--mode", o.mode, "linear or graph");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--model", o.model, "pre-trained model file");
  app.add_option("--graph", o.graph, "pre-built graph file");
  app.add_option("--instances", o.instances, "maximum test instances");

  int synth_n = 1000;
  std::uint64_t synth_seed = 0;
  std::vector<double> weights;
  std::vector<int> k_values;

  auto* train = app.add_subcommand("train", "train the classifier");
  auto* synth = app.add_subcommand("synth", "write a synthetic 2-D dataset");
  synth->add_option("--n", synth_n, "number of samples");
  synth->add_option("--seed", synth_seed, "generator seed");
  auto* graph = app.add_subcommand("graph", "build the actionability graph");
  auto* plan = app.add_subcommand("plan", "generate and evaluate plans");
  auto* pareto = app.add_subcommand("pareto", "sweep the diversity weight");
  pareto->add_option("--weights", weights, "weight grid");
  auto* sweep = app.add_subcommand("sweep-k", "sweep the plan size");
  sweep->add_option("--k-values", k_values, "plan sizes");
  auto* bench = app.add_subcommand("bench", "time the selectors");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig c = ResolveConfig(o);
    if (!weights.empty()) c.weights = weights;
    if (!k_values.empty()) c.k_values = k_values;
    std::filesystem::create_directories(c.out);
    if (*train) {
      CmdTrain(c);
    } else if (*synth) {
      if (synth->count("--n")) c.synthetic_size = synth_n;
      if (synth->count("--seed")) c.synthetic_seed = synth_seed;
      CmdSynth(c);
    } else if (*graph) {
      CmdGraph(c);
    } else if (*plan) {
      CmdPlan(c);
    } else if (*pareto) {
      CmdPareto(c);
    } else if (*sweep) {
      CmdSweepK(c);
    } else if (*bench) {
      CmdBench(c);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
