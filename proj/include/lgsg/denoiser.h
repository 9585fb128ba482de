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

#ifndef LGSG_DENOISER_H_
#define LGSG_DENOISER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lgsg/matrix.h"
#include "lgsg/random.h"

namespace lgsg {

struct DenoiserShape {
  int capacity = 12;  // m
  int dim = 32;       // d, node-track width
  int hidden = 32;
  int layers = 4;
  int num_steps = 100;  // T, sets the timestep embedding

  friend bool operator==(const DenoiserShape&, const DenoiserShape&) = default;
};

// Noise-prediction network over one padded subgraph state.
//
// Node states h (m x H) and pair states g (m*m x H, row i*m+j) are updated
// by `layers` residual blocks:
//   msg_i = mean_{j != i real} sigmoid(Wg g_ij + bg) * (Wm h_j)
//   h_i  += MLP([h_i, msg_i, mean_j h_j, tau(t)])
//   g_ij += MLP([h_i + h_j, h_i * h_j, g_ij])
// and linear heads read out the node noise (m x d) and the two-channel edge
// noise (m*m x 2), the latter averaged over (i, j) and (j, i). Every
// operation is permutation-equivariant in the node order; padded rows and
// the diagonal are forced to zero.
class Denoiser {
 public:
  Denoiser() = default;
  // Glorot-uniform weights, zero biases, output heads scaled down by 10.
  Denoiser(const DenoiserShape& shape, Rng& rng);

  const DenoiserShape& shape() const { return shape_; }

  // Parameter tensors in their fixed serialization order. Biases are 1 x n.
  std::vector<RowMatrix>& params() { return params_; }
  const std::vector<RowMatrix>& params() const { return params_; }
  std::vector<std::string> ParamNames() const;
  size_t NumScalars() const;
  bool AllFinite() const;

  // Sinusoidal embedding of timestep t (1 x hidden).
  RowVector TimeEmbedding(int t) const;

  struct Output {
    RowMatrix eps_z;  // m x d
    RowMatrix eps_e;  // m*m x 2
  };

  // Opaque forward cache for Backward().
  struct Cache;

  // Throws std::invalid_argument on shape mismatch.
  Output Forward(const RowMatrix& z, const RowMatrix& e,
                 const std::vector<uint8_t>& mask, int t,
                 Cache* cache = nullptr) const;

  // Accumulates dL/dparams into `grads` (resized and zeroed if empty).
  void Backward(const Cache& cache, const RowMatrix& grad_eps_z,
                const RowMatrix& grad_eps_e,
                std::vector<RowMatrix>& grads) const;

 private:
  DenoiserShape shape_;
  std::vector<RowMatrix> params_;
};

struct Denoiser::Cache {
  RowMatrix x0;  // [z | tau]
  RowMatrix e;
  std::vector<double> node_mask;
  std::vector<double> pair_mask;
  std::vector<double> inv_degree;
  double inv_count = 0.0;
  RowVector tau;
  struct Block {
    RowMatrix h_in, g_in;
    RowMatrix m, gate, u, a1, r1;
    RowMatrix h_mid;
    RowMatrix v, b1, q1;
  };
  std::vector<Block> blocks;
  RowMatrix h_out, g_out;
};

}  // namespace lgsg

#endif  // LGSG_DENOISER_H_
