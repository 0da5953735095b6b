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

#include "recourse/action_graph.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>

namespace recourse {
namespace {

constexpr double kPathTolerance = 1e-9;
constexpr const char* kMagic = "recourse-action-graph";

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Line-oriented reader that reports the line number on failure.
class GraphReader {
 public:
  explicit GraphReader(std::istream& in) : in_(in) {}

  std::istringstream Next(const std::string& what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line[0] != '#') return std::istringstream(line);
    }
    ++line_no_;  // the missing line
    Fail("unexpected end of file, expected " + what);
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw RecourseError("graph file line " + std::to_string(line_no_) + ": " +
                        message);
  }

  template <typename T>
  T Read(std::istringstream& line, const std::string& what) {
    std::string token;
    if (!(line >> token)) Fail("missing " + what);
    T value{};
    auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      Fail("malformed " + what + " '" + token + "'");
    }
    return value;
  }

  void Expect(std::istringstream& line, const std::string& keyword) {
    std::string token;
    if (!(line >> token) || token != keyword) {
      Fail("expected '" + keyword + "'");
    }
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

double ActionGraph::EdgeWeight(int u, int v) const {
  double best = kInf;
  for (const GraphEdge& e : edges_[u]) {
    if (e.to == v) best = std::min(best, e.weight);
  }
  return best;
}

int ActionGraph::AddNode(GraphNode node) {
  nodes_.push_back(std::move(node));
  edges_.emplace_back();
  return num_nodes() - 1;
}

void ActionGraph::AddEdge(int from, int to, double weight) {
  if (from < 0 || from >= num_nodes() || to < 0 || to >= num_nodes()) {
    throw RecourseError("graph: edge endpoint out of range");
  }
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw RecourseError("graph: edge weights must be finite and nonnegative");
  }
  edges_[from].push_back({to, weight});
  ++num_edges_;
}

bool SameOnBlocks(const Eigen::Ref<const Vector>& a,
                  const Eigen::Ref<const Vector>& b,
                  const std::vector<EncodedBlock>& blocks) {
  for (const EncodedBlock& block : blocks) {
    for (int c = block.offset; c < block.offset + block.width; ++c) {
      if (a[c] != b[c]) return false;
    }
  }
  return true;
}

bool ActionGraph::Admissible(const Eigen::Ref<const Vector>& u,
                             const Eigen::Ref<const Vector>& v,
                             double distance) const {
  if (!(distance <= epsilon_)) return false;
  if (!SameOnBlocks(u, v, immutable_blocks_)) return false;
  for (int c : monotone_coordinates_) {
    if (v[c] < u[c]) return false;
  }
  return true;
}

double PairwiseDistanceQuantile(const Matrix& X, double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw RecourseError("graph: quantile must lie in [0, 1]");
  }
  const Eigen::Index n = X.rows();
  if (n < 2) throw RecourseError("graph: need at least two samples");
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dists.push_back((X.row(i) - X.row(j)).norm());
    }
  }
  const double position = q * static_cast<double>(dists.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(position));
  const size_t hi = std::min(lo + 1, dists.size() - 1);
  std::nth_element(dists.begin(), dists.begin() + lo, dists.end());
  const double lo_value = dists[lo];
  double hi_value = lo_value;
  if (hi != lo) {
    hi_value = *std::min_element(dists.begin() + lo + 1, dists.end());
  }
  return lo_value +
         (position - static_cast<double>(lo)) * (hi_value - lo_value);
}

ActionGraph BuildGraph(const Dataset& train, const MlpModel& model,
                       const GraphOptions& options) {
  ActionGraph graph;
  const double epsilon = options.epsilon > 0.0 ? options.epsilon
                                               : PairwiseDistanceQuantile(
                                                     train.X, options.quantile);
  if (!(epsilon > 0.0)) {
    throw RecourseError("graph: epsilon must be > 0 (got " +
                        FormatDouble(epsilon) + ")");
  }
  graph.set_epsilon(epsilon);
  graph.set_immutable_blocks(train.schema.ImmutableBlocks());
  graph.set_monotone_coordinates(options.monotone_coordinates);
  for (int r = 0; r < train.size(); ++r) {
    const Vector x = train.X.row(r).transpose();
    graph.AddNode({x, PredictLabel(model, x), r});
  }
  for (int u = 0; u < graph.num_nodes(); ++u) {
    for (int v = 0; v < graph.num_nodes(); ++v) {
      if (u == v) continue;
      const double distance = (graph.node(u).x - graph.node(v).x).norm();
      if (graph.Admissible(graph.node(u).x, graph.node(v).x, distance)) {
        graph.AddEdge(u, v, distance);
      }
    }
  }
  return graph;
}

ActionGraph AttachInput(const ActionGraph& graph,
                        const Eigen::Ref<const Vector>& x0,
                        const MlpModel& model) {
  ActionGraph out = graph;
  const int n = graph.num_nodes();
  const int input = out.AddNode({x0, PredictLabel(model, x0), kInputOrigin});
  out.set_input_node(input);
  for (int v = 0; v < n; ++v) {
    if (graph.node(v).origin == kInputOrigin) continue;
    const double distance = (x0 - graph.node(v).x).norm();
    if (out.Admissible(x0, graph.node(v).x, distance)) {
      out.AddEdge(input, v, distance);
    }
  }
  if (out.out_edges(input).empty()) {
    throw RecourseError(
        "graph: isolated input (no admissible edge within "
        "epsilon=" +
        FormatDouble(graph.epsilon()) + ")");
  }
  return out;
}

ShortestPathTree ShortestPaths(const ActionGraph& graph, int source) {
  const int n = graph.num_nodes();
  if (source < 0 || source >= n) {
    throw RecourseError("graph: source out of range");
  }
  ShortestPathTree tree;
  tree.source = source;
  tree.dist.assign(n, kInf);
  tree.pred.assign(n, -1);
  std::vector<char> done(n, 0);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  tree.dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [dist, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (const GraphEdge& e : graph.out_edges(u)) {
      const double candidate = dist + e.weight;
      if (candidate < tree.dist[e.to]) {
        tree.dist[e.to] = candidate;
        tree.pred[e.to] = u;
        heap.push({candidate, e.to});
      }
    }
  }
  return tree;
}

Path ExtractPath(const ActionGraph& graph, const ShortestPathTree& tree,
                 int target) {
  if (target < 0 || target >= static_cast<int>(tree.dist.size()) ||
      tree.dist[target] == kInf) {
    throw RecourseError("graph: target " + std::to_string(target) +
                        " is unreachable");
  }
  Path path;
  for (int v = target; v != -1; v = tree.pred[v]) {
    path.nodes.push_back(v);
    if (v == tree.source) break;
  }
  std::reverse(path.nodes.begin(), path.nodes.end());
  if (path.nodes.front() != tree.source) {
    throw RecourseError("graph: predecessor chain does not reach the source");
  }
  path.points.resize(static_cast<Eigen::Index>(path.nodes.size()),
                     graph.node(target).x.size());
  for (size_t k = 0; k < path.nodes.size(); ++k) {
    path.points.row(static_cast<Eigen::Index>(k)) =
        graph.node(path.nodes[k]).x.transpose();
  }
  for (size_t k = 1; k < path.nodes.size(); ++k) {
    path.weight += graph.EdgeWeight(path.nodes[k - 1], path.nodes[k]);
  }
  if (std::abs(path.weight - tree.dist[target]) > kPathTolerance) {
    throw RecourseError("graph: path weight " + FormatDouble(path.weight) +
                        " disagrees with distance " +
                        FormatDouble(tree.dist[target]));
  }
  return path;
}

DistanceVector GraphDistanceVector(const ShortestPathTree& tree,
                                   const std::vector<int>& candidates) {
  DistanceVector out;
  out.kind = DistanceKind::kGraph;
  std::vector<double> values;
  for (int node : candidates) {
    if (tree.dist[node] == kInf) {
      out.dropped.push_back(node);
    } else {
      out.kept.push_back(node);
      values.push_back(tree.dist[node]);
    }
  }
  if (out.kept.empty()) {
    throw RecourseError("graph: no reachable favorable nodes");
  }
  out.d = Eigen::Map<Vector>(values.data(),
                             static_cast<Eigen::Index>(values.size()));
  return out;
}

void SaveGraph(const ActionGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RecourseError("graph: cannot write " + path.string());
  const int dim =
      graph.num_nodes() > 0 ? static_cast<int>(graph.node(0).x.size()) : 0;
  out << kMagic << " 1\n";
  out << "epsilon " << FormatDouble(graph.epsilon()) << '\n';
  out << "dim " << dim << '\n';
  out << "immutable " << graph.immutable_blocks().size();
  for (const EncodedBlock& b : graph.immutable_blocks()) {
    out << ' ' << b.offset << ' ' << b.width;
  }
  out << '\n';
  out << "monotone " << graph.monotone_coordinates().size();
  for (int c : graph.monotone_coordinates()) out << ' ' << c;
  out << '\n';
  out << "input " << graph.input_node() << '\n';
  out << "nodes " << graph.num_nodes() << '\n';
  for (int i = 0; i < graph.num_nodes(); ++i) {
    const GraphNode& node = graph.node(i);
    out << i << ' ' << node.origin << ' ' << node.label;
    for (Eigen::Index c = 0; c < node.x.size(); ++c) {
      out << ' ' << FormatDouble(node.x[c]);
    }
    out << '\n';
  }
  out << "edges " << graph.num_edges() << '\n';
  for (int u = 0; u < graph.num_nodes(); ++u) {
    for (const GraphEdge& e : graph.out_edges(u)) {
      out << u << ' ' << e.to << ' ' << FormatDouble(e.weight) << '\n';
    }
  }
}

ActionGraph LoadGraph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RecourseError("graph: cannot open " + path.string());
  GraphReader reader(in);
  ActionGraph graph;

  auto header = reader.Next("header");
  reader.Expect(header, kMagic);
  if (reader.Read<int>(header, "version") != 1) {
    reader.Fail("unsupported version");
  }
  auto eps_line = reader.Next("epsilon");
  reader.Expect(eps_line, "epsilon");
  graph.set_epsilon(reader.Read<double>(eps_line, "epsilon"));
  auto dim_line = reader.Next("dim");
  reader.Expect(dim_line, "dim");
  const int dim = reader.Read<int>(dim_line, "dim");
  if (dim < 0) reader.Fail("negative dim");

  auto imm_line = reader.Next("immutable");
  reader.Expect(imm_line, "immutable");
  const int num_blocks = reader.Read<int>(imm_line, "block count");
  std::vector<EncodedBlock> blocks;
  for (int b = 0; b < num_blocks; ++b) {
    EncodedBlock block;
    block.offset = reader.Read<int>(imm_line, "block offset");
    block.width = reader.Read<int>(imm_line, "block width");
    if (block.offset < 0 || block.width < 1 ||
        block.offset + block.width > dim) {
      reader.Fail("immutable block out of range");
    }
    blocks.push_back(block);
  }
  graph.set_immutable_blocks(std::move(blocks));

  auto mono_line = reader.Next("monotone");
  reader.Expect(mono_line, "monotone");
  const int num_mono = reader.Read<int>(mono_line, "monotone count");
  std::vector<int> mono;
  for (int m = 0; m < num_mono; ++m) {
    mono.push_back(reader.Read<int>(mono_line, "monotone coordinate"));
  }
  graph.set_monotone_coordinates(std::move(mono));

  auto input_line = reader.Next("input");
  reader.Expect(input_line, "input");
  const int input = reader.Read<int>(input_line, "input node");

  auto nodes_line = reader.Next("nodes");
  reader.Expect(nodes_line, "nodes");
  const int num_nodes = reader.Read<int>(nodes_line, "node count");
  if (num_nodes < 0) reader.Fail("negative node count");
  for (int i = 0; i < num_nodes; ++i) {
    auto line = reader.Next("node " + std::to_string(i));
    if (reader.Read<int>(line, "node id") != i)
      reader.Fail("node ids out of order");
    GraphNode node;
    node.origin = reader.Read<int>(line, "node origin");
    node.label = reader.Read<int>(line, "node label");
    node.x.resize(dim);
    for (int c = 0; c < dim; ++c)
      node.x[c] = reader.Read<double>(line, "coordinate");
    graph.AddNode(std::move(node));
  }
  if (input < -1 || input >= num_nodes) reader.Fail("input node out of range");
  graph.set_input_node(input);

  auto edges_line = reader.Next("edges");
  reader.Expect(edges_line, "edges");
  const int num_edges = reader.Read<int>(edges_line, "edge count");
  if (num_edges < 0) reader.Fail("negative edge count");
  for (int e = 0; e < num_edges; ++e) {
    auto line = reader.Next("edge " + std::to_string(e));
    const int u = reader.Read<int>(line, "edge source");
    const int v = reader.Read<int>(line, "edge target");
    const double w = reader.Read<double>(line, "edge weight");
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes) {
      reader.Fail("edge endpoint out of range");
    }
    if (!(w >= 0.0) || !std::isfinite(w)) reader.Fail("invalid edge weight");
    graph.AddEdge(u, v, w);
  }
  return graph;
}

}  // namespace recourse
