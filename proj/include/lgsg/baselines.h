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

// Classical random graph generators fitted to an input graph.

#ifndef LGSG_BASELINES_H_
#define LGSG_BASELINES_H_

#include <array>
#include <vector>

#include "lgsg/graph.h"
#include "lgsg/random.h"

namespace lgsg {

// Edge density |E| / C(n, 2). Throws std::invalid_argument if n < 2.
double FitEdgeProbability(const Graph& g);

// G(n, p). Throws std::invalid_argument for n < 1 or p outside [0, 1].
Graph ErdosRenyi(NodeId n, double p, Rng& rng);
// G(n_out, FitEdgeProbability(g_in)).
Graph ErdosRenyiFit(const Graph& g_in, NodeId n_out, Rng& rng);

// max(1, floor(avg_degree / 2 + 0.5)).
int FitAttachment(const Graph& g);

// Preferential attachment from a star seed on `attachment` nodes (node 0 is
// the hub). Every later node links to `attachment` distinct earlier nodes
// drawn proportionally to degree, giving
//   attachment - 1 + attachment * (n - attachment)
// edges. Throws std::invalid_argument unless n > attachment >= 1.
Graph BarabasiAlbert(NodeId n, int attachment, Rng& rng);
Graph BarabasiAlbertFit(const Graph& g_in, NodeId n_out, Rng& rng);

struct KroneckerInitiator {
  std::array<std::array<double, 2>, 2> theta{{{0.5, 0.5}, {0.5, 0.5}}};
  int k = 1;

  NodeId num_nodes() const { return NodeId{1} << k; }
  // Throws std::invalid_argument unless entries are in [0, 1] and
  // 1 <= k <= 30.
  void Validate() const;
};

// Product of theta over the bit levels of (u, v), averaged with (v, u).
double KroneckerEdgeProbability(const KroneckerInitiator& init, NodeId u, NodeId v);

// Stochastic Kronecker graph on 2^k nodes, truncated to the first n_out
// nodes when 0 < n_out < 2^k.
Graph KroneckerGenerate(const KroneckerInitiator& init, Rng& rng, NodeId n_out = 0);

struct KronFitConfig {
  int iterations = 50;
  int swaps_per_step = 30;
  double learning_rate = 0.5;  // applied to the gradient per directed edge
  double max_step = 0.05;      // per-entry clamp of one update
  std::array<std::array<double, 2>, 2> initial{{{0.5, 0.5}, {0.5, 0.5}}};
};

struct KronFitResult {
  KroneckerInitiator initiator;
  // permutation[v] = Kronecker index of node v (size 2^k; ids >= n are
  // padding).
  std::vector<NodeId> permutation;
  // Approximate log-likelihood of the current theta after each iteration.
  std::vector<double> trace;
  // On the final permutation: the starting theta and the returned theta.
  double initial_log_likelihood = 0.0;
  double final_log_likelihood = 0.0;
};

// Second-order approximation of the log-likelihood of g under a permutation:
//   -(sum theta)^k - (sum theta^2)^k / 2
//   + sum over directed edges of [log p + p + p^2 / 2].
double KronLogLikelihood(const std::array<std::array<double, 2>, 2>& theta, int k,
                         const Graph& g, const std::vector<NodeId>& permutation);

// Gradient ascent on theta with Metropolis node-swap sampling of the
// permutation. k = ceil(log2 n). The returned theta is clipped to
// [0.001, 0.999] and is the best visited one on the final permutation.
// Throws std::invalid_argument for n < 4 and std::runtime_error if the
// likelihood turns non-finite.
KronFitResult KronFit(const Graph& g, const KronFitConfig& config, Rng& rng);

// Stochastic block model with equal-size blocks (the last absorbs the
// remainder).
Graph StochasticBlockModel(NodeId n, int blocks, double p_in, double p_out, Rng& rng);

}  // namespace lgsg

#endif  // LGSG_BASELINES_H_
