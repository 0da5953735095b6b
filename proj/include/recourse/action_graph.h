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

// Actionability graph over training samples: a directed edge u -> v exists
// when moving from u to v costs at most epsilon and leaves every immutable
// feature unchanged. Shortest paths from the attached input give graph
// distances and sequential recourses.

#ifndef RECOURSE_ACTION_GRAPH_H_
#define RECOURSE_ACTION_GRAPH_H_

#include <filesystem>
#include <utility>
#include <vector>

#include "recourse/classifier.h"
#include "recourse/common.h"
#include "recourse/data.h"
#include "recourse/geometry.h"

namespace recourse {

inline constexpr int kInputOrigin = -1;

struct GraphNode {
  Vector x;
  int label = 0;
  int origin = kInputOrigin;  // training row, or kInputOrigin
};

struct GraphEdge {
  int to = 0;
  double weight = 0.0;
};

class ActionGraph {
 public:
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return num_edges_; }
  const GraphNode& node(int i) const { return nodes_[i]; }
  const std::vector<GraphEdge>& out_edges(int i) const { return edges_[i]; }
  // Weight of u -> v, or kInf when absent.
  double EdgeWeight(int u, int v) const;

  double epsilon() const { return epsilon_; }
  const std::vector<EncodedBlock>& immutable_blocks() const {
    return immutable_blocks_;
  }
  const std::vector<int>& monotone_coordinates() const {
    return monotone_coordinates_;
  }
  int input_node() const { return input_node_; }
  // True when u -> v passes the cost, immutability and monotonicity rules.
  bool Admissible(const Eigen::Ref<const Vector>& u,
                  const Eigen::Ref<const Vector>& v, double distance) const;

  int AddNode(GraphNode node);
  void AddEdge(int from, int to, double weight);

  void set_epsilon(double epsilon) { epsilon_ = epsilon; }
  void set_immutable_blocks(std::vector<EncodedBlock> blocks) {
    immutable_blocks_ = std::move(blocks);
  }
  void set_monotone_coordinates(std::vector<int> coordinates) {
    monotone_coordinates_ = std::move(coordinates);
  }
  void set_input_node(int node) { input_node_ = node; }

 private:
  std::vector<GraphNode> nodes_;
  std::vector<std::vector<GraphEdge>> edges_;
  int num_edges_ = 0;
  double epsilon_ = 0.0;
  std::vector<EncodedBlock> immutable_blocks_;
  std::vector<int> monotone_coordinates_;
  int input_node_ = -1;
};

struct GraphOptions {
  double epsilon = 0.0;  // <= 0 selects the distance quantile below
  double quantile = 0.1;
  // Encoded coordinates that may only increase along an edge. Off by default.
  std::vector<int> monotone_coordinates;
};

// q-quantile (linear interpolation) of all pairwise Euclidean distances
// between rows of X.
double PairwiseDistanceQuantile(const Matrix& X, double q);

// True when a and b agree exactly on every block.
bool SameOnBlocks(const Eigen::Ref<const Vector>& a,
                  const Eigen::Ref<const Vector>& b,
                  const std::vector<EncodedBlock>& blocks);

// Edge u -> v for every ordered pair within epsilon (inclusive) that agrees
// on the immutable blocks; nodes carry the model's predicted label.
ActionGraph BuildGraph(const Dataset& train, const MlpModel& model,
                       const GraphOptions& options);

// Copy of `graph` with x0 appended as a source-only node. Throws "isolated
// input" when x0 has no outgoing edge.
ActionGraph AttachInput(const ActionGraph& graph,
                        const Eigen::Ref<const Vector>& x0,
                        const MlpModel& model);

struct ShortestPathTree {
  int source = 0;
  std::vector<double> dist;  // kInf when unreachable
  std::vector<int> pred;     // -1 for the source and unreachable nodes
};

// Dijkstra with a binary heap; equal keys pop in node-id order.
ShortestPathTree ShortestPaths(const ActionGraph& graph, int source);

struct Path {
  std::vector<int> nodes;  // source first
  Matrix points;           // row k holds the coordinates of nodes[k]
  double weight = 0.0;
};

// Walks predecessors back from `target`. Throws when unreachable, or when the
// summed edge weights disagree with the tree distance by more than 1e-9.
Path ExtractPath(const ActionGraph& graph, const ShortestPathTree& tree,
                 int target);

// Graph distances of `candidates` (node ids); unreachable ones are dropped
// and listed. Throws "no reachable favorable nodes" when none remain.
DistanceVector GraphDistanceVector(const ShortestPathTree& tree,
                                   const std::vector<int>& candidates);

void SaveGraph(const ActionGraph& graph, const std::filesystem::path& path);
ActionGraph LoadGraph(const std::filesystem::path& path);

}  // namespace recourse

#endif  // RECOURSE_ACTION_GRAPH_H_
