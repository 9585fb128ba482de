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

#ifndef LGSG_SAMPLER_H_
#define LGSG_SAMPLER_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lgsg/embedding.h"
#include "lgsg/graph.h"
#include "lgsg/matrix.h"

namespace lgsg {

// A random-walk subgraph padded to a fixed capacity m. Real nodes occupy the
// first `size` slots; padded slots have zero mask, adjacency and embedding.
struct SubgraphSample {
  int capacity = 0;
  int size = 0;
  std::vector<uint8_t> adj;   // m x m, row-major, symmetric, zero diagonal
  RowMatrix emb;              // m x d
  std::vector<uint8_t> mask;  // m
  // Original node ids (diagnostic only). Empty for generated samples.
  std::vector<NodeId> origin_ids;

  uint8_t Adj(int i, int j) const { return adj[static_cast<size_t>(i) * capacity + j]; }
  int dim() const { return static_cast<int>(emb.cols()); }
  int64_t NumEdges() const;

  // Throws std::invalid_argument if any SubgraphSample invariant fails.
  void Validate() const;
};

// Uniform random walk from `start` recording distinct nodes in first-visit
// order; stops at m distinct nodes or after 10 * m steps.
std::vector<NodeId> RandomWalk(const Graph& g, NodeId start, int m, Rng& rng);

// Packs the induced subgraph over `nodes` (and their embedding rows) into a
// capacity-m sample.
SubgraphSample MakeSample(const Graph& g, const EmbeddingMatrix& z,
                          std::span<const NodeId> nodes, int m);

// l walks from every node; sample (v, j) sits at index v * l + j and uses
// substream DeriveSeed(seed, {v, j}).
std::vector<SubgraphSample> BuildSubgraphDataset(const Graph& g,
                                                 const EmbeddingMatrix& z,
                                                 int walks_per_node, int m,
                                                 uint64_t seed);

// Little-endian sample file:
//   "LGSGDST\0", u32 version (1), u32 flags (bit 0: origin ids present),
//   u64 count, u32 m, u32 d,
//   per sample: u32 size, [u32 origin_ids[size] if flag], u8 mask[m],
//   u8 adjacency[ceil(m*m/8)] (row-major bits, LSB first), f64 emb[m*d].
void SaveSamples(const std::vector<SubgraphSample>& samples,
                 const std::filesystem::path& path);
std::vector<SubgraphSample> LoadSamples(const std::filesystem::path& path);

// Bytes per sample record, excluding the file header.
size_t SampleRecordBytes(int m, int d, int size, bool with_origin_ids);

}  // namespace lgsg

#endif  // LGSG_SAMPLER_H_
