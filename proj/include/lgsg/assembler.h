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

// Merging generated subgraphs into a single output graph.

#ifndef LGSG_ASSEMBLER_H_
#define LGSG_ASSEMBLER_H_

#include <utility>
#include <vector>

#include "lgsg/diffusion.h"
#include "lgsg/graph.h"
#include "lgsg/matrix.h"

namespace lgsg {

// Generated subgraphs with their nodes numbered globally in input order:
// subgraph 0 holds ids [0, size_0), subgraph 1 the next size_1 ids, and so on.
class AssemblyInput {
 public:
  // Throws std::invalid_argument if embeddings are non-finite or their widths
  // differ.
  explicit AssemblyInput(std::vector<GeneratedSubgraph> samples);

  const std::vector<GeneratedSubgraph>& samples() const { return samples_; }
  int total_nodes() const { return static_cast<int>(provenance_.size()); }
  int dim() const { return static_cast<int>(embeddings_.cols()); }
  // Subgraph index of each global node.
  const std::vector<int>& provenance() const { return provenance_; }
  // First global id of each subgraph, plus total_nodes() at the end.
  const std::vector<int>& offsets() const { return offsets_; }
  // Stacked embedding rows (total_nodes x d).
  const RowMatrix& embeddings() const { return embeddings_; }
  // All generated edges in global ids, u < v.
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  std::vector<GeneratedSubgraph> samples_;
  std::vector<int> provenance_;
  std::vector<int> offsets_;
  RowMatrix embeddings_;
  std::vector<Edge> edges_;
};

struct AssembledGraph {
  Graph graph;
  RowMatrix node_embeddings;               // one row per output node
  std::vector<std::vector<int>> members;   // sorted global ids per output node
  // Node Aggregation only: the global pairs whose pop linked two supernodes,
  // in merge order.
  std::vector<std::pair<int, int>> merges;
};

// Greedy merge of the closest cross-subgraph pairs (L2 over the original
// embeddings) until `target_nodes` supernodes remain. Ties are broken by the
// global pair (u, v). Output nodes are ordered by smallest member and carry
// the mean embedding of their members.
//
// Throws std::invalid_argument if target_nodes < 1 or > total_nodes, and
// std::runtime_error if only intra-subgraph pairs are left before the target
// is reached.
AssembledGraph NodeAggregation(const AssemblyInput& input, int target_nodes);

// Adds subgraphs in order; each node is mapped to the closest node already in
// the output when within `threshold`, against the state before its own
// subgraph was added. Ties go to the earliest inserted node. Matched nodes
// keep the existing embedding. A negative threshold yields the disjoint union.
AssembledGraph ThresholdMatching(const AssemblyInput& input, double threshold);

// Number of subgraphs to draw for a target size: ceil(headroom * nu /
// mean_size).
int SubgraphsForTarget(int target_nodes, double mean_size, double headroom = 1.5);

}  // namespace lgsg

#endif  // LGSG_ASSEMBLER_H_
