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

// Self-supervised GraphSAGE embeddings with a mean aggregator and the
// random-walk / negative-sampling objective.

#ifndef LGSG_EMBEDDING_H_
#define LGSG_EMBEDDING_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lgsg/graph.h"
#include "lgsg/matrix.h"
#include "lgsg/random.h"

namespace lgsg {

enum class Activation { kIdentity, kRelu, kTanh };

struct SageLayer {
  // out x (2 * in): applied to [h_self || h_neighbors].
  RowMatrix weight;
  Activation activation = Activation::kIdentity;

  int in_dim() const { return static_cast<int>(weight.cols() / 2); }
  int out_dim() const { return static_cast<int>(weight.rows()); }
};

struct SageParams {
  std::vector<SageLayer> layers;
  int neighbor_sample_size = 10;

  int input_dim() const { return layers.front().in_dim(); }
  int output_dim() const { return layers.back().out_dim(); }

  // Throws std::invalid_argument if the layer chain is empty, inconsistent
  // or holds non-finite weights.
  void Validate() const;

  // Glorot-uniform weights; hidden layers use tanh, the last layer is linear.
  static SageParams Init(int input_dim, int hidden_dim, int output_dim,
                         int num_layers, int neighbor_sample_size, Rng& rng);
};

struct EmbeddingMatrix {
  RowMatrix z;  // N x d

  int64_t num_nodes() const { return z.rows(); }
  int dim() const { return static_cast<int>(z.cols()); }
};

struct ContextBatch {
  std::vector<std::pair<NodeId, NodeId>> positives;
  int num_negatives = 1;
  // Row-major |positives| x num_negatives.
  std::vector<NodeId> negatives;
};

// Intermediate values of one forward pass, kept for the backward pass.
struct SageTape {
  // nodes[k] holds the (sorted, unique) nodes whose layer-k state is needed;
  // nodes.back() is the unique batch.
  std::vector<std::vector<NodeId>> nodes;
  // For k >= 1: row of each nodes[k] entry inside nodes[k - 1].
  std::vector<std::vector<int>> self_row;
  // For k >= 1: sampled neighbor rows into nodes[k - 1], S per node (or none
  // for isolated nodes), with offsets.
  std::vector<std::vector<int>> neighbor_rows;
  std::vector<std::vector<int>> neighbor_offsets;
  std::vector<RowMatrix> h;       // h[k]: |nodes[k]| x d_k
  std::vector<RowMatrix> inputs;  // inputs[k]: concat fed to layer k (k >= 1)
  std::vector<RowMatrix> pre;     // pre[k]: pre-activation of layer k
  // Row of each original batch entry in h.back().
  std::vector<int> batch_rows;
};

// h^k_v = act(W^k [h^{k-1}_v || mean of S sampled neighbor states]); the
// neighbor sample of (v, k) is drawn from substream DeriveSeed(seed, {k, v})
// with replacement, and an isolated node aggregates to the zero vector.
// Returns |batch| x d. Requires g.has_features().
RowMatrix SageForward(const SageParams& params, const Graph& g,
                      std::span<const NodeId> batch, uint64_t seed,
                      SageTape* tape = nullptr);

// Gradient of a loss w.r.t. every W^k, given dL/dh^K for the rows of
// tape.h.back().
std::vector<RowMatrix> SageBackward(const SageParams& params,
                                    const SageTape& tape,
                                    const RowMatrix& grad_output);

// For each non-isolated node u, runs `pairs_per_node` uniform walks of
// `walk_length` steps and pairs u with a node (other than u) visited on each
// walk. Node u uses substream DeriveSeed(seed, {u}).
std::vector<std::pair<NodeId, NodeId>> SampleContextPairs(const Graph& g,
                                                          int walk_length,
                                                          int pairs_per_node,
                                                          uint64_t seed);

// Draws num_negatives nodes per positive pair with probability proportional
// to degree^0.75.
ContextBatch AttachNegatives(const Graph& g,
                             std::vector<std::pair<NodeId, NodeId>> positives,
                             int num_negatives, Rng& rng);

// Mean over positive pairs of
//   -log sig(z_u . z_v) - sum_n log sig(-z_u . z_n),
// with log arguments clamped below by 1e-12. Batch indices are rows of z.
// If grad is non-null it receives dL/dz (same shape as z).
double SageLoss(const RowMatrix& z, const ContextBatch& batch,
                RowMatrix* grad = nullptr);

// Structural fallback for featureless graphs:
// x_v = [log(1 + deg v), 1, r_v] with r_v ~ N(0, I) of width random_dims.
RowMatrix FallbackFeatures(const Graph& g, int random_dims, uint64_t seed);

struct EmbeddingConfig {
  int dim = 32;
  int hidden_dim = 32;
  int num_layers = 2;
  int neighbor_samples = 10;
  int negatives = 5;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 20;
  int batch_size = 64;
  int walk_length = 3;
  int pairs_per_node = 10;
  int fallback_random_dims = 32;
  double grad_clip = 1.0;  // global L2 norm per step; <= 0 disables
  uint64_t seed = 0;
};

struct EmbeddingResult {
  EmbeddingMatrix embeddings;
  SageParams params;
  std::vector<double> losses;  // one entry per optimizer step
};

// Mini-batch SGD with momentum on SageLoss. Graphs without features get
// FallbackFeatures. Throws std::invalid_argument on an edgeless graph and
// std::runtime_error if the loss or the weights become non-finite.
EmbeddingResult TrainEmbeddings(const Graph& g, const EmbeddingConfig& config);

// Little-endian file: "LGSGEMB\0", u32 version (1), u64 N, u64 d, then N*d
// f64 row-major.
void SaveEmbeddings(const EmbeddingMatrix& z, const std::filesystem::path& path);
EmbeddingMatrix LoadEmbeddings(const std::filesystem::path& path);

}  // namespace lgsg

#endif  // LGSG_EMBEDDING_H_
