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

#include "lgsg/assembler.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>

#include "lgsg/disjoint_set.h"

namespace lgsg {
namespace {

struct PairKey {
  double dist;
  int u;
  int v;

  bool operator>(const PairKey& o) const {
    return std::tie(dist, u, v) > std::tie(o.dist, o.u, o.v);
  }
};

// Maps every input edge through `node_of`, dropping self-loops; the Graph
// constructor collapses duplicates.
Graph MapEdges(const AssemblyInput& input, const std::vector<int>& node_of, int num_nodes) {
  std::vector<Edge> out;
  out.reserve(input.edges().size());
  for (const Edge& e : input.edges()) {
    const int a = node_of[e.u];
    const int b = node_of[e.v];
    if (a != b) out.emplace_back(a, b);
  }
  return Graph(num_nodes, out);
}

}  // namespace

AssemblyInput::AssemblyInput(std::vector<GeneratedSubgraph> samples)
    : samples_(std::move(samples)) {
  int total = 0;
  const int d = samples_.empty() ? 0 : static_cast<int>(samples_.front().emb.cols());
  offsets_.push_back(0);
  for (const auto& s : samples_) {
    if (s.emb.rows() != s.size || s.emb.cols() != d) {
      throw std::invalid_argument("subgraph embeddings have inconsistent shape");
    }
    if (!s.emb.allFinite()) throw std::invalid_argument("subgraph embeddings must be finite");
    total += s.size;
    offsets_.push_back(total);
  }
  embeddings_.resize(total, d);
  provenance_.reserve(total);
  for (size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    const int base = offsets_[i];
    embeddings_.middleRows(base, s.size) = s.emb;
    for (int a = 0; a < s.size; ++a) {
      provenance_.push_back(static_cast<int>(i));
      for (int b = a + 1; b < s.size; ++b) {
        if (s.Adj(a, b)) edges_.emplace_back(base + a, base + b);
      }
    }
  }
}

AssembledGraph NodeAggregation(const AssemblyInput& input, int target_nodes) {
  const int n = input.total_nodes();
  if (target_nodes < 1) throw std::invalid_argument("target node count must be >= 1");
  if (target_nodes > n) {
    throw std::invalid_argument("cannot split nodes: target " + std::to_string(target_nodes) +
                                " exceeds " + std::to_string(n) + " generated nodes");
  }
  const auto& emb = input.embeddings();
  const auto& prov = input.provenance();

  std::vector<PairKey> heap;
  if (target_nodes < n) {
    for (int u = 0; u < n; ++u) {
      for (int v = input.offsets()[prov[u] + 1]; v < n; ++v) {
        heap.push_back({(emb.row(u) - emb.row(v)).norm(), u, v});
      }
    }
    std::make_heap(heap.begin(), heap.end(), std::greater<>());
  }

  AssembledGraph out;
  DisjointSetUnion dsu(n);
  while (dsu.groups() > target_nodes) {
    if (heap.empty()) {
      throw std::runtime_error("target of " + std::to_string(target_nodes) +
                               " nodes unreachable: only intra-subgraph pairs remain");
    }
    std::pop_heap(heap.begin(), heap.end(), std::greater<>());
    const PairKey top = heap.back();
    heap.pop_back();
    if (dsu.Link(top.u, top.v)) out.merges.emplace_back(top.u, top.v);
  }

  // Iterating in id order makes each supernode's first visit its smallest
  // member.
  std::vector<int> label_of_root(n, -1);
  std::vector<int> node_of(n);
  for (int v = 0; v < n; ++v) {
    const int root = dsu.Find(v);
    if (label_of_root[root] < 0) {
      label_of_root[root] = static_cast<int>(out.members.size());
      out.members.emplace_back();
    }
    node_of[v] = label_of_root[root];
    out.members[node_of[v]].push_back(v);
  }
  out.node_embeddings = RowMatrix::Zero(target_nodes, input.dim());
  for (int k = 0; k < target_nodes; ++k) {
    for (int v : out.members[k]) out.node_embeddings.row(k) += emb.row(v);
    out.node_embeddings.row(k) /= static_cast<double>(out.members[k].size());
  }
  out.graph = MapEdges(input, node_of, target_nodes);
  return out;
}

AssembledGraph ThresholdMatching(const AssemblyInput& input, double threshold) {
  if (input.samples().empty()) throw std::invalid_argument("no subgraphs to assemble");
  const int n = input.total_nodes();
  const auto& emb = input.embeddings();
  AssembledGraph out;
  std::vector<int> node_of(n);
  std::vector<int> representative;  // global id whose embedding an output node keeps

  for (size_t i = 0; i + 1 < input.offsets().size(); ++i) {
    const int begin = input.offsets()[i];
    const int end = input.offsets()[i + 1];
    const int existing = static_cast<int>(representative.size());
    for (int v = begin; v < end; ++v) {
      int best = -1;
      double best_dist = 0.0;
      for (int k = 0; k < existing; ++k) {
        const double dist = (emb.row(v) - emb.row(representative[k])).norm();
        if (dist <= threshold && (best < 0 || dist < best_dist)) {
          best = k;
          best_dist = dist;
        }
      }
      node_of[v] = best;
    }
    for (int v = begin; v < end; ++v) {
      if (node_of[v] < 0) {
        node_of[v] = static_cast<int>(representative.size());
        representative.push_back(v);
        out.members.emplace_back();
      }
      out.members[node_of[v]].push_back(v);
    }
  }

  const int count = static_cast<int>(representative.size());
  out.node_embeddings.resize(count, input.dim());
  for (int k = 0; k < count; ++k) out.node_embeddings.row(k) = emb.row(representative[k]);
  out.graph = MapEdges(input, node_of, count);
  return out;
}

int SubgraphsForTarget(int target_nodes, double mean_size, double headroom) {
  if (target_nodes < 1 || !(mean_size > 0.0) || !(headroom > 0.0)) {
    throw std::invalid_argument("subgraph count needs positive target, mean size and headroom");
  }
  return static_cast<int>(std::ceil(headroom * target_nodes / mean_size));
}

}  // namespace lgsg
