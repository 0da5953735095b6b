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

#include "recourse/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "recourse/geometry.h"

namespace recourse {
namespace {

using Json = nlohmann::json;

void CheckKeys(const Json& object, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!object.is_object()) {
    throw RecourseError("config: '" + where + "' must be an object");
  }
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) {
      throw RecourseError("config: unknown key '" + item.key() + "' in " +
                          where);
    }
  }
}

template <typename T>
void Assign(const Json& object, const char* key, T* target) {
  if (!object.contains(key)) return;
  try {
    *target = object.at(key).get<T>();
  } catch (const Json::exception&) {
    throw RecourseError(std::string("config: bad value for '") + key + "'");
  }
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& value) {
  std::filesystem::path p(value);
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw RecourseError("cannot write " + path.string());
  return out;
}

std::string Num(double v) { return FormatMetric(v); }

RunConfig ParseConfig(const Json& j, const std::filesystem::path& base) {
  CheckKeys(j, {"name",     "dataset", "split",       "classifier", "model",
                "graph",    "method",  "mode",        "K",          "theta",
                "h",        "M",       "T",           "tau",        "lambda",
                "grid",     "tol",     "graph_build", "instances",  "weights",
                "k_values", "bench",   "out"},
            "config");
  RunConfig c;
  Assign(j, "name", &c.name);
  if (j.contains("dataset")) {
    const Json& ds = j["dataset"];
    CheckKeys(ds, {"csv", "schema", "label", "synthetic"}, "dataset");
    if (ds.contains("csv")) {
      c.csv = Resolve(base, ds["csv"].get<std::string>());
      if (!ds.contains("schema")) {
        throw RecourseError("config: dataset.csv needs dataset.schema");
      }
      c.schema = Resolve(base, ds["schema"].get<std::string>());
      c.label_column.clear();
      Assign(ds, "label", &c.label_column);
    }
    if (ds.contains("synthetic")) {
      const Json& syn = ds["synthetic"];
      CheckKeys(syn, {"n", "seed"}, "dataset.synthetic");
      Assign(syn, "n", &c.synthetic_size);
      Assign(syn, "seed", &c.synthetic_seed);
    }
  }
  if (j.contains("split")) {
    CheckKeys(j["split"], {"train_fraction", "seed"}, "split");
    Assign(j["split"], "train_fraction", &c.split.train_fraction);
    Assign(j["split"], "seed", &c.split.seed);
  }
  if (j.contains("classifier")) {
    const Json& cl = j["classifier"];
    CheckKeys(cl,
              {"hidden", "learning_rate", "epochs", "batch_size", "seed",
               "l2_penalty"},
              "classifier");
    Assign(cl, "hidden", &c.hidden);
    Assign(cl, "learning_rate", &c.train.learning_rate);
    Assign(cl, "epochs", &c.train.epochs);
    Assign(cl, "batch_size", &c.train.batch_size);
    Assign(cl, "seed", &c.train.seed);
    Assign(cl, "l2_penalty", &c.train.l2_penalty);
  }
  if (j.contains("model"))
    c.model = Resolve(base, j["model"].get<std::string>());
  if (j.contains("graph"))
    c.graph = Resolve(base, j["graph"].get<std::string>());
  if (j.contains("method"))
    c.method = ParseSelector(j["method"].get<std::string>());
  if (j.contains("mode")) c.mode = ParseMode(j["mode"].get<std::string>());
  Assign(j, "K", &c.params.K);
  Assign(j, "theta", &c.params.theta);
  Assign(j, "h", &c.params.h);
  Assign(j, "M", &c.params.M);
  Assign(j, "T", &c.params.T);
  Assign(j, "tau", &c.params.tau);
  Assign(j, "lambda", &c.params.lambda);
  Assign(j, "grid", &c.params.grid);
  Assign(j, "tol", &c.params.tol);
  if (j.contains("graph_build")) {
    const Json& g = j["graph_build"];
    CheckKeys(g, {"epsilon", "quantile", "monotone"}, "graph_build");
    Assign(g, "epsilon", &c.graph_options.epsilon);
    Assign(g, "quantile", &c.graph_options.quantile);
    Assign(g, "monotone", &c.graph_options.monotone_coordinates);
  }
  Assign(j, "instances", &c.max_instances);
  Assign(j, "weights", &c.weights);
  Assign(j, "k_values", &c.k_values);
  if (j.contains("bench")) {
    const Json& b = j["bench"];
    CheckKeys(b, {"sizes", "methods", "replications", "instances"}, "bench");
    Assign(b, "sizes", &c.bench_sizes);
    Assign(b, "instances", &c.bench_instances);
    Assign(b, "replications", &c.bench_replications);
    if (b.contains("methods")) {
      c.bench_methods.clear();
      for (const auto& m : b["methods"]) {
        c.bench_methods.push_back(ParseSelector(m.get<std::string>()));
      }
    }
  }
  if (j.contains("out")) c.out = Resolve(base, j["out"].get<std::string>());
  return c;
}

std::string SchemaLabel(const std::filesystem::path& schema_path) {
  std::ifstream in(schema_path);
  if (!in) throw RecourseError("cannot open schema " + schema_path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    const Json doc = Json::parse(buffer.str());
    if (doc.contains("label") && doc["label"].is_string()) {
      return doc["label"].get<std::string>();
    }
  } catch (const Json::exception&) {
    // The schema loader reports malformed files with more detail.
  }
  return "label";
}

template <typename Field>
double Mean(const std::vector<const InstanceResult*>& rows, Field field) {
  double total = 0.0;
  for (const InstanceResult* r : rows) total += field(*r);
  return total / static_cast<double>(rows.size());
}

std::vector<double> MidRanks(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::string ModeName(InterpolationMode mode) {
  return mode == InterpolationMode::kLinear ? "linear" : "graph";
}

InterpolationMode ParseMode(const std::string& name) {
  if (name == "linear") return InterpolationMode::kLinear;
  if (name == "graph") return InterpolationMode::kGraph;
  throw RecourseError("unknown mode '" + name + "' (linear or graph)");
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RecourseError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buffer.str());
  } catch (const Json::exception& e) {
    throw RecourseError("config: malformed JSON: " + std::string(e.what()));
  }
  return ParseConfig(j, path.parent_path());
}

RunConfig RunConfigFromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw RecourseError("config: malformed JSON: " + std::string(e.what()));
  }
  return ParseConfig(j, {});
}

PreparedData PrepareData(const RunConfig& config) {
  RawDataset raw;
  if (config.csv.empty()) {
    raw = Synth2d(config.synthetic_size, config.synthetic_seed);
  } else {
    const FeatureSchema schema = FeatureSchema::Load(config.schema);
    const std::string label = config.label_column.empty()
                                  ? SchemaLabel(config.schema)
                                  : config.label_column;
    raw = LoadCsv(config.csv, schema, label);
  }
  auto [train_raw, test_raw] = Split(raw, config.split);
  PreparedData out;
  out.schema = raw.schema;
  out.scaler = FitScaler(train_raw);
  out.train = EncodeAll(train_raw, out.scaler);
  out.test = EncodeAll(test_raw, out.scaler);
  return out;
}

MlpModel ObtainModel(const RunConfig& config, const PreparedData& data) {
  if (!config.model.empty()) {
    MlpModel model = LoadModel(config.model);
    if (model.input_dim() != data.train.dim()) {
      throw RecourseError("model input dimension " +
                          std::to_string(model.input_dim()) +
                          " does not match the data (" +
                          std::to_string(data.train.dim()) + ")");
    }
    return model;
  }
  std::vector<int> dims = {data.train.dim()};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(1);
  return Train(data.train, dims, config.train);
}

ActionGraph ObtainGraph(const RunConfig& config, const PreparedData& data,
                        const MlpModel& model) {
  if (!config.graph.empty()) return LoadGraph(config.graph);
  return BuildGraph(data.train, model, config.graph_options);
}

std::vector<int> NegativeTestRows(const PreparedData& data,
                                  const MlpModel& model, int max_instances) {
  std::vector<int> rows;
  const std::vector<int> labels = PredictLabels(model, data.test.X);
  for (int r = 0; r < data.test.size(); ++r) {
    if (static_cast<int>(rows.size()) >= max_instances) break;
    if (labels[r] == 0) rows.push_back(r);
  }
  return rows;
}

Matrix FavorableTrainRows(const PreparedData& data, const MlpModel& model) {
  const std::vector<int> labels = PredictLabels(model, data.train.X);
  std::vector<int> rows;
  for (int r = 0; r < data.train.size(); ++r) {
    if (labels[r] == 1) rows.push_back(r);
  }
  Matrix out(static_cast<Eigen::Index>(rows.size()), data.train.dim());
  for (size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = data.train.X.row(rows[k]);
  }
  return out;
}

std::vector<InstanceResult> RunPlans(
    const PreparedData& data, const MlpModel& model, const ActionGraph* graph,
    InterpolationMode mode, SelectorKind method, const PlanParams& params,
    int max_instances) {
  if (mode == InterpolationMode::kGraph && graph == nullptr) {
    throw RecourseError("graph mode needs an actionability graph");
  }
  const Matrix positives = FavorableTrainRows(data, model);
  std::vector<InstanceResult> results;
  for (int row : NegativeTestRows(data, model, max_instances)) {
    InstanceResult result;
    result.test_row = row;
    const Vector x0 = data.test.X.row(row).transpose();
    try {
      RecoursePlan plan =
          mode == InterpolationMode::kLinear
              ? PlanLinear(x0, data.train, model, method, params)
              : PlanGraph(x0, *graph, model, method, params);
      result.metrics = EvaluatePlan(plan, model, positives);
      if (mode == InterpolationMode::kGraph) {
        result.path_metrics = EvaluatePaths(plan);
      }
      result.plan = std::move(plan);
    } catch (const RecourseError& e) {
      result.skip_reason = e.what();
    }
    results.push_back(std::move(result));
  }
  return results;
}

Aggregate Summarize(const std::vector<InstanceResult>& results) {
  Aggregate out;
  std::vector<const InstanceResult*> planned;
  for (const InstanceResult& r : results) {
    if (r.plan) {
      planned.push_back(&r);
    } else {
      ++out.skipped;
    }
  }
  out.planned = static_cast<int>(planned.size());
  if (planned.empty()) return out;
  out.cost = Mean(planned, [](const auto& r) { return r.metrics.cost; });
  out.validity =
      Mean(planned, [](const auto& r) { return r.metrics.valid ? 1.0 : 0.0; });
  out.anti_diversity =
      Mean(planned, [](const auto& r) { return r.metrics.anti_diversity; });
  out.dpp = Mean(planned, [](const auto& r) { return r.metrics.dpp; });
  out.manifold_distance =
      Mean(planned, [](const auto& r) { return r.metrics.manifold_distance; });
  if (planned.front()->path_metrics) {
    out.shortest_path_cost = Mean(planned, [](const auto& r) {
      return r.path_metrics->shortest_path_cost;
    });
    // Path-set metrics need K >= 2; average over the plans where defined.
    double div = 0.0, anti = 0.0;
    int defined = 0;
    for (const InstanceResult* r : planned) {
      if (r->path_metrics->path_diversity) {
        div += *r->path_metrics->path_diversity;
        anti += *r->path_metrics->path_anti_diversity;
        ++defined;
      }
    }
    if (defined > 0) {
      out.path_diversity = div / defined;
      out.path_anti_diversity = anti / defined;
    }
  }
  return out;
}

std::optional<double> Spearman(const std::vector<double>& a,
                               const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const std::vector<double> ra = MidRanks(a);
  const std::vector<double> rb = MidRanks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return std::nullopt;
  return cov / std::sqrt(va * vb);
}

std::vector<SweepRow> ParetoSweep(const PreparedData& data,
                                  const MlpModel& model,
                                  const ActionGraph* graph,
                                  const RunConfig& config) {
  std::vector<SweepRow> rows;
  for (double w : config.weights) {
    PlanParams params = config.params;
    params.theta = w;
    SweepRow row;
    row.key = w;
    const auto results = RunPlans(data, model, graph, config.mode,
                                  config.method, params, config.max_instances);
    row.aggregate = Summarize(results);
    if (row.aggregate.planned == 0) {
      row.reason = results.empty() ? "no negative test instances"
                                   : results.front().skip_reason;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> KSweep(const PreparedData& data, const MlpModel& model,
                             const ActionGraph* graph,
                             const RunConfig& config) {
  std::vector<SweepRow> rows;
  for (int k : config.k_values) {
    PlanParams params = config.params;
    params.K = k;
    SweepRow row;
    row.key = k;
    const auto results = RunPlans(data, model, graph, config.mode,
                                  config.method, params, config.max_instances);
    row.aggregate = Summarize(results);
    if (row.aggregate.planned == 0) {
      row.reason = results.empty() ? "no negative test instances"
                                   : results.front().skip_reason;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BenchRow> Benchmark(const RunConfig& config) {
  if (config.bench_replications < 1 || config.bench_instances < 1) {
    throw RecourseError("bench: replications and instances must be >= 1");
  }
  std::vector<BenchRow> rows;
  for (int n : config.bench_sizes) {
    for (SelectorKind method : config.bench_methods) {
      double total = 0.0;
      for (int rep = 0; rep < config.bench_replications; ++rep) {
        const RawDataset raw =
            Synth2d(n, config.synthetic_seed + static_cast<std::uint64_t>(rep));
        const Dataset data = EncodeAll(raw, FitScaler(raw));
        std::vector<int> inputs;
        std::vector<int> favorable;
        for (int r = 0; r < data.size(); ++r) {
          if (data.y[r] == 1) {
            favorable.push_back(r);
          } else if (static_cast<int>(inputs.size()) < config.bench_instances) {
            inputs.push_back(r);
          }
        }
        if (inputs.empty() ||
            static_cast<int>(favorable.size()) < config.params.K) {
          throw RecourseError("bench: synthetic sample of size " +
                              std::to_string(n) + " lacks both classes");
        }
        Matrix samples(static_cast<Eigen::Index>(favorable.size()), data.dim());
        for (size_t k = 0; k < favorable.size(); ++k) {
          samples.row(static_cast<Eigen::Index>(k)) = data.X.row(favorable[k]);
        }
        double elapsed = 0.0;
        for (int input : inputs) {
          const Vector x0 = data.X.row(input).transpose();
          const DirectionMatrix dirs = ComputeDirections(x0, samples);
          Vector d(static_cast<Eigen::Index>(dirs.sample_index.size()));
          for (Eigen::Index i = 0; i < d.size(); ++i) {
            d[i] = (samples.row(dirs.sample_index[i]).transpose() - x0).norm();
          }
          // Similarity and kernel construction are shared by every selector
          // and stay outside the timed region.
          const SelectionInputs prepared =
              PrepareSelection(dirs.A, d, method, config.params);
          const auto start = std::chrono::steady_clock::now();
          const Selection s = SolveSelection(prepared, method, config.params);
          const auto stop = std::chrono::steady_clock::now();
          if (static_cast<int>(s.indices.size()) != config.params.K) {
            throw RecourseError("bench: selector returned the wrong size");
          }
          elapsed += std::chrono::duration<double>(stop - start).count();
        }
        total += elapsed / static_cast<double>(inputs.size());
      }
      rows.push_back({method, n, total / config.bench_replications});
    }
  }
  return rows;
}

void WriteTrainReport(const RunConfig& config, const EvalReport& report,
                      const std::filesystem::path& path) {
  std::ofstream out = OpenOutput(path);
  out << "dataset,accuracy,auc\n";
  out << CsvField(config.name) << ',' << Num(report.accuracy) << ','
      << FormatMetric(report.auc) << '\n';
}

void WriteInstanceCsv(const std::vector<InstanceResult>& results,
                      InterpolationMode mode,
                      const std::filesystem::path& path) {
  const bool graph = mode == InterpolationMode::kGraph;
  std::ofstream out = OpenOutput(path);
  out << "instance,status,reason,cost,valid,anti_diversity,dpp,"
         "manifold_distance";
  if (graph) out << ",shortest_path_cost,path_diversity,path_anti_diversity";
  out << '\n';
  for (const InstanceResult& r : results) {
    out << r.test_row << ',';
    if (!r.plan) {
      out << "skipped," << CsvField(r.skip_reason) << ",,,,,";
      if (graph) out << ",,,";
      out << '\n';
      continue;
    }
    const PlanMetrics& m = r.metrics;
    out << "ok,," << Num(m.cost) << ',' << (m.valid ? 1 : 0) << ','
        << Num(m.anti_diversity) << ',' << Num(m.dpp) << ','
        << Num(m.manifold_distance);
    if (graph) {
      out << ',' << Num(r.path_metrics->shortest_path_cost) << ','
          << FormatMetric(r.path_metrics->path_diversity) << ','
          << FormatMetric(r.path_metrics->path_anti_diversity);
    }
    out << '\n';
  }
  const Aggregate a = Summarize(results);
  out << "aggregate,planned=" << a.planned << ",skipped=" << a.skipped << ','
      << Num(a.cost) << ',' << FormatMetric(a.validity) << ','
      << Num(a.anti_diversity) << ',' << Num(a.dpp) << ','
      << Num(a.manifold_distance);
  if (graph) {
    out << ',' << FormatMetric(a.shortest_path_cost) << ','
        << FormatMetric(a.path_diversity) << ','
        << FormatMetric(a.path_anti_diversity);
  }
  out << '\n';
}

void WriteSummaryCsv(const RunConfig& config, SelectorKind method,
                     InterpolationMode mode, const Aggregate& a,
                     const std::filesystem::path& path) {
  const bool graph = mode == InterpolationMode::kGraph;
  std::ofstream out = OpenOutput(path);
  out << "dataset,method,cost,validity,anti_diversity,dpp,manifold_distance";
  if (graph) out << ",shortest_path_cost,path_diversity,path_anti_diversity";
  out << '\n';
  out << CsvField(config.name) << ',' << SelectorName(method) << ','
      << Num(a.cost) << ',' << FormatMetric(a.validity) << ','
      << Num(a.anti_diversity) << ',' << Num(a.dpp) << ','
      << Num(a.manifold_distance);
  if (graph) {
    out << ',' << FormatMetric(a.shortest_path_cost) << ','
        << FormatMetric(a.path_diversity) << ','
        << FormatMetric(a.path_anti_diversity);
  }
  out << '\n';
}

void WritePlansJsonl(const std::vector<InstanceResult>& results,
                     const std::filesystem::path& path) {
  std::ofstream out = OpenOutput(path);
  for (const InstanceResult& r : results) {
    if (r.plan) out << PlanToJson(*r.plan) << '\n';
  }
}

void WriteParetoCsv(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& path) {
  std::ofstream out = OpenOutput(path);
  out << "weight,mean_cost,mean_anti_diversity,mean_dpp,instances,reason\n";
  for (const SweepRow& r : rows) {
    out << Num(r.key) << ',';
    if (r.aggregate.planned == 0) {
      out << kUndefined << ',' << kUndefined << ',' << kUndefined;
    } else {
      out << Num(r.aggregate.cost) << ',' << Num(r.aggregate.anti_diversity)
          << ',' << Num(r.aggregate.dpp);
    }
    out << ',' << r.aggregate.planned << ',' << CsvField(r.reason) << '\n';
  }
}

void WriteKSweepCsv(const std::vector<SweepRow>& rows,
                    const std::filesystem::path& path) {
  std::ofstream out = OpenOutput(path);
  out << "K,mean_anti_diversity,mean_dpp,instances,reason\n";
  for (const SweepRow& r : rows) {
    out << static_cast<int>(r.key) << ',';
    if (r.aggregate.planned == 0) {
      out << kUndefined << ',' << kUndefined;
    } else {
      out << Num(r.aggregate.anti_diversity) << ',' << Num(r.aggregate.dpp);
    }
    out << ',' << r.aggregate.planned << ',' << CsvField(r.reason) << '\n';
  }
}

void WriteBenchCsv(const std::vector<BenchRow>& rows,
                   const std::filesystem::path& path) {
  std::ofstream out = OpenOutput(path);
  out << "method,N,mean_seconds\n";
  for (const BenchRow& r : rows) {
    out << SelectorName(r.method) << ',' << r.n << ',' << Num(r.mean_seconds)
        << '\n';
  }
}

}  // namespace recourse
