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

#include "lgsg/sampler.h"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "lgsg/binary_io.h"

namespace lgsg {
namespace {

constexpr char kSampleMagic[] = {'L', 'G', 'S', 'G', 'D', 'S', 'T', '\0'};
constexpr uint32_t kSampleVersion = 1;
constexpr uint32_t kHasOriginIds = 1;

}  // namespace

int64_t SubgraphSample::NumEdges() const {
  int64_t count = 0;
  for (int i = 0; i < capacity; ++i) {
    for (int j = i + 1; j < capacity; ++j) count += Adj(i, j);
  }
  return count;
}

void SubgraphSample::Validate() const {
  const auto m = static_cast<size_t>(capacity);
  if (capacity < 1 || adj.size() != m * m || mask.size() != m ||
      emb.rows() != capacity) {
    throw std::invalid_argument("sample shapes do not match capacity");
  }
  int count = 0;
  for (int i = 0; i < capacity; ++i) {
    if (mask[i] > 1) throw std::invalid_argument("mask must be binary");
    count += mask[i];
    if (Adj(i, i) != 0) throw std::invalid_argument("sample adjacency has a self-loop");
    for (int j = 0; j < capacity; ++j) {
      if (Adj(i, j) > 1 || Adj(i, j) != Adj(j, i)) {
        throw std::invalid_argument("sample adjacency not symmetric binary");
      }
      if (Adj(i, j) && !(mask[i] && mask[j])) {
        throw std::invalid_argument("edge touches a padded slot");
      }
    }
    if (mask[i] ? !emb.row(i).allFinite() : !emb.row(i).isZero(0.0)) {
      throw std::invalid_argument("embedding row violates mask");
    }
  }
  if (count != size) throw std::invalid_argument("size != number of real slots");
  if (!origin_ids.empty()) {
    if (origin_ids.size() != static_cast<size_t>(size)) {
      throw std::invalid_argument("origin_ids length != size");
    }
    std::set<NodeId> distinct(origin_ids.begin(), origin_ids.end());
    if (distinct.size() != origin_ids.size()) {
      throw std::invalid_argument("origin_ids not distinct");
    }
  }
}

std::vector<NodeId> RandomWalk(const Graph& g, NodeId start, int m, Rng& rng) {
  if (start < 0 || start >= g.num_nodes()) throw std::out_of_range("walk start out of range");
  if (m < 1) throw std::invalid_argument("walk capacity must be >= 1");
  std::vector<NodeId> nodes{start};
  NodeId current = start;
  const int budget = 10 * m;
  for (int step = 0; step < budget && static_cast<int>(nodes.size()) < m; ++step) {
    const auto nbrs = g.Neighbors(current);
    if (nbrs.empty()) break;
    current = nbrs[UniformIndex(rng, static_cast<int64_t>(nbrs.size()))];
    if (std::find(nodes.begin(), nodes.end(), current) == nodes.end()) {
      nodes.push_back(current);
    }
  }
  return nodes;
}

SubgraphSample MakeSample(const Graph& g, const EmbeddingMatrix& z,
                          std::span<const NodeId> nodes, int m) {
  if (static_cast<int>(nodes.size()) > m) throw std::invalid_argument("more nodes than capacity");
  const Graph sub = InducedSubgraph(g, nodes);
  SubgraphSample s;
  s.capacity = m;
  s.size = static_cast<int>(nodes.size());
  s.adj.assign(static_cast<size_t>(m) * m, 0);
  s.mask.assign(m, 0);
  s.emb = RowMatrix::Zero(m, z.dim());
  for (int i = 0; i < s.size; ++i) {
    s.mask[i] = 1;
    s.emb.row(i) = z.z.row(nodes[i]);
  }
  for (const Edge& e : sub.edges()) {
    s.adj[static_cast<size_t>(e.u) * m + e.v] = 1;
    s.adj[static_cast<size_t>(e.v) * m + e.u] = 1;
  }
  s.origin_ids.assign(nodes.begin(), nodes.end());
  return s;
}

std::vector<SubgraphSample> BuildSubgraphDataset(const Graph& g,
                                                 const EmbeddingMatrix& z,
                                                 int walks_per_node, int m,
                                                 uint64_t seed) {
  if (z.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("embedding rows (" + std::to_string(z.num_nodes()) +
                                ") != graph nodes (" + std::to_string(g.num_nodes()) + ")");
  }
  if (walks_per_node < 1) throw std::invalid_argument("walks_per_node must be >= 1");
  if (m < 2) throw std::invalid_argument("capacity must be >= 2");
  std::vector<SubgraphSample> samples;
  samples.reserve(static_cast<size_t>(g.num_nodes()) * walks_per_node);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (int j = 0; j < walks_per_node; ++j) {
      Rng rng = MakeRng(seed, {static_cast<uint64_t>(v), static_cast<uint64_t>(j)});
      const auto walk = RandomWalk(g, v, m, rng);
      samples.push_back(MakeSample(g, z, walk, m));
    }
  }
  return samples;
}

size_t SampleRecordBytes(int m, int d, int size, bool with_origin_ids) {
  const size_t mm = static_cast<size_t>(m) * m;
  return sizeof(uint32_t) + (with_origin_ids ? sizeof(uint32_t) * size : 0) + m +
         (mm + 7) / 8 + sizeof(double) * static_cast<size_t>(m) * d;
}

void SaveSamples(const std::vector<SubgraphSample>& samples,
                 const std::filesystem::path& path) {
  const int m = samples.empty() ? 0 : samples.front().capacity;
  const int d = samples.empty() ? 0 : samples.front().dim();
  const bool with_ids = !samples.empty() && !samples.front().origin_ids.empty();
  ByteWriter w;
  w.PutBytes({kSampleMagic, sizeof(kSampleMagic)});
  w.Put<uint32_t>(kSampleVersion);
  w.Put<uint32_t>(with_ids ? kHasOriginIds : 0);
  w.Put<uint64_t>(samples.size());
  w.Put<uint32_t>(static_cast<uint32_t>(m));
  w.Put<uint32_t>(static_cast<uint32_t>(d));
  std::vector<uint8_t> bits;
  for (const SubgraphSample& s : samples) {
    if (s.capacity != m || s.dim() != d) {
      throw std::invalid_argument("samples in one file must share m and d");
    }
    if (with_ids != !s.origin_ids.empty()) {
      throw std::invalid_argument("origin ids must be present on all samples or none");
    }
    w.Put<uint32_t>(static_cast<uint32_t>(s.size));
    for (NodeId id : s.origin_ids) w.Put<uint32_t>(static_cast<uint32_t>(id));
    w.PutSpan(std::span<const uint8_t>(s.mask));
    bits.assign((s.adj.size() + 7) / 8, 0);
    for (size_t k = 0; k < s.adj.size(); ++k) {
      if (s.adj[k]) bits[k / 8] |= static_cast<uint8_t>(1u << (k % 8));
    }
    w.PutSpan(std::span<const uint8_t>(bits));
    w.PutSpan(std::span<const double>(s.emb.data(), static_cast<size_t>(s.emb.size())));
  }
  w.WriteTo(path);
}

std::vector<SubgraphSample> LoadSamples(const std::filesystem::path& path) {
  ByteReader r = ByteReader::FromFile(path);
  r.ExpectMagic({kSampleMagic, sizeof(kSampleMagic)});
  const auto version = r.Get<uint32_t>();
  if (version != kSampleVersion) {
    throw std::runtime_error(path.string() + ": unsupported sample file version");
  }
  const bool with_ids = (r.Get<uint32_t>() & kHasOriginIds) != 0;
  const auto count = r.Get<uint64_t>();
  const int m = static_cast<int>(r.Get<uint32_t>());
  const int d = static_cast<int>(r.Get<uint32_t>());
  std::vector<SubgraphSample> samples;
  samples.reserve(count);
  std::vector<uint8_t> bits((static_cast<size_t>(m) * m + 7) / 8);
  for (uint64_t i = 0; i < count; ++i) {
    SubgraphSample s;
    s.capacity = m;
    s.size = static_cast<int>(r.Get<uint32_t>());
    if (s.size > m) throw std::runtime_error(path.string() + ": sample larger than capacity");
    if (with_ids) {
      for (int k = 0; k < s.size; ++k) s.origin_ids.push_back(static_cast<NodeId>(r.Get<uint32_t>()));
    }
    s.mask.resize(m);
    r.GetSpan(std::span<uint8_t>(s.mask));
    r.GetSpan(std::span<uint8_t>(bits));
    s.adj.assign(static_cast<size_t>(m) * m, 0);
    for (size_t k = 0; k < s.adj.size(); ++k) s.adj[k] = (bits[k / 8] >> (k % 8)) & 1u;
    s.emb.resize(m, d);
    r.GetSpan(std::span<double>(s.emb.data(), static_cast<size_t>(s.emb.size())));
    s.Validate();
    samples.push_back(std::move(s));
  }
  if (!r.AtEnd()) throw std::runtime_error(path.string() + ": trailing bytes");
  return samples;
}

}  // namespace lgsg
