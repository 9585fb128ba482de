// Copyright 2026 The LGSG Authors.
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

#ifndef LGSG_GRAPH_H_
#define LGSG_GRAPH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgsg/matrix.h"

namespace lgsg {

using NodeId = int32_t;

// Undirected edge. Canonical form has u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable undirected simple graph over dense node ids 0..n-1, stored in
// CSR form, with an optional n x f feature matrix.
class Graph {
 public:
  Graph() = default;

  // Self-loops and repeated pairs (in either orientation) are dropped.
  // Throws std::out_of_range if an endpoint is outside [0, num_nodes).
  Graph(NodeId num_nodes, std::span<const Edge> edges);

  NodeId num_nodes() const { return num_nodes_; }
  int64_t num_edges() const { return static_cast<int64_t>(edges_.size()); }

  // Sorted canonical edge list.
  const std::vector<Edge>& edges() const { return edges_; }

  // Sorted neighbor list of v.
  std::span<const NodeId> Neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v],
            adjacency_.data() + offsets_[v + 1]};
  }
  int Degree(NodeId v) const {
    return static_cast<int>(offsets_[v + 1] - offsets_[v]);
  }
  std::vector<int> Degrees() const;
  bool HasEdge(NodeId u, NodeId v) const;

  bool has_features() const { return features_.has_value(); }
  const RowMatrix& features() const { return *features_; }

  // Returns a copy carrying `features`. Throws std::invalid_argument if the
  // row count differs from num_nodes(), there are zero columns, or any entry
  // is non-finite.
  Graph WithFeatures(RowMatrix features) const;

 private:
  NodeId num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<int64_t> offsets_{0};
  std::vector<NodeId> adjacency_;
  std::optional<RowMatrix> features_;
};

struct LoadOptions {
  std::optional<std::filesystem::path> features_path;
  // Re-index the distinct ids that occur in the file densely (in increasing
  // order). The original ids are returned in EdgeListFile::original_ids.
  bool compact_ids = false;
};

struct EdgeListFile {
  Graph graph;
  int64_t self_loops_dropped = 0;
  int64_t duplicates_dropped = 0;
  // original_ids[v] is the file id of node v. Empty unless compact_ids.
  std::vector<int64_t> original_ids;
};

// Reads a whitespace-separated edge list. Lines starting with '#' are
// comments, except a "# nodes: N" header which declares the node count.
// Without a header n = 1 + max id. Throws std::runtime_error on I/O or
// format errors and std::invalid_argument on bad feature files.
EdgeListFile LoadEdgeList(const std::filesystem::path& path,
                          const LoadOptions& options = {});

// Parses edge-list text; same rules as LoadEdgeList without features.
EdgeListFile ParseEdgeList(const std::string& text, bool compact_ids = false);

// Reads a headerless CSV with one row per node.
RowMatrix LoadFeatureCsv(const std::filesystem::path& path);

// Writes "# nodes: N" followed by one "u v" line per canonical edge.
void SaveEdgeList(const Graph& g, const std::filesystem::path& path);
std::string FormatEdgeList(const Graph& g);

// Writes one "dense_id original_id" line per node.
void SaveIdMapping(std::span<const int64_t> original_ids,
                   const std::filesystem::path& path);

// Subgraph over `nodes`, relabeled by list position. Feature rows follow the
// list order. Throws std::invalid_argument on duplicates and
// std::out_of_range on ids >= g.num_nodes().
Graph InducedSubgraph(const Graph& g, std::span<const NodeId> nodes);

// Block-diagonal union: graph i occupies ids [offset_i, offset_i + n_i).
// Features are kept only if every input has features of equal width.
// Throws std::invalid_argument on an empty list.
Graph DisjointUnion(std::span<const Graph> graphs);

// Number of connected components (isolated nodes count as components).
int CountComponents(const Graph& g);

}  // namespace lgsg

#endif  // LGSG_GRAPH_H_
