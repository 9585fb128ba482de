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

#include "lgsg/baselines.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lgsg {
namespace {

using Theta = std::array<std::array<double, 2>, 2>;

constexpr double kThetaMin = 0.001;
constexpr double kThetaMax = 0.999;

// Probability of the directed index pair (a, b) and the per-entry level
// counts.
double DirectedProbability(const Theta& theta, int k, NodeId a, NodeId b,
                           std::array<std::array<int, 2>, 2>* counts = nullptr) {
  double p = 1.0;
  for (int level = 0; level < k; ++level) {
    const int i = (a >> level) & 1;
    const int j = (b >> level) & 1;
    p *= theta[i][j];
    if (counts) ++(*counts)[i][j];
  }
  return p;
}

double EdgeTerm(const Theta& theta, int k, NodeId a, NodeId b) {
  const double p = DirectedProbability(theta, k, a, b);
  return std::log(p) + p + 0.5 * p * p;
}

// Both orientations of every edge incident to x, skipping `skip`.
double IncidentTerms(const Theta& theta, int k, const Graph& g,
                     const std::vector<NodeId>& perm, NodeId x, NodeId skip) {
  if (x >= g.num_nodes()) return 0.0;
  double sum = 0.0;
  for (NodeId w : g.Neighbors(x)) {
    if (w == skip) continue;
    sum += EdgeTerm(theta, k, perm[x], perm[w]) + EdgeTerm(theta, k, perm[w], perm[x]);
  }
  return sum;
}

double SwapTerms(const Theta& theta, int k, const Graph& g, const std::vector<NodeId>& perm,
                 NodeId x, NodeId y) {
  return IncidentTerms(theta, k, g, perm, x, -1) + IncidentTerms(theta, k, g, perm, y, x);
}

Theta Clip(Theta theta) {
  for (auto& row : theta) {
    for (double& t : row) t = std::clamp(t, kThetaMin, kThetaMax);
  }
  return theta;
}

Theta Gradient(const Theta& theta, int k, const Graph& g, const std::vector<NodeId>& perm) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& row : theta) {
    for (double t : row) {
      sum += t;
      sum_sq += t * t;
    }
  }
  Theta grad;
  const double a = k * std::pow(sum, k - 1);
  const double b = k * std::pow(sum_sq, k - 1);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) grad[i][j] = -a - b * theta[i][j];
  }
  for (const Edge& e : g.edges()) {
    for (int dir = 0; dir < 2; ++dir) {
      const NodeId from = dir == 0 ? perm[e.u] : perm[e.v];
      const NodeId to = dir == 0 ? perm[e.v] : perm[e.u];
      std::array<std::array<int, 2>, 2> counts{};
      const double p = DirectedProbability(theta, k, from, to, &counts);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          if (counts[i][j]) grad[i][j] += counts[i][j] / theta[i][j] * (1.0 + p + p * p);
        }
      }
    }
  }
  return grad;
}

}  // namespace

double FitEdgeProbability(const Graph& g) {
  if (g.num_nodes() < 2) throw std::invalid_argument("edge density needs at least 2 nodes");
  const double n = g.num_nodes();
  return static_cast<double>(g.num_edges()) / (n * (n - 1) / 2.0);
}

Graph ErdosRenyi(NodeId n, double p, Rng& rng) {
  if (n < 1) throw std::invalid_argument("ER needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("ER probability outside [0, 1]");
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  return Graph(n, edges);
}

Graph ErdosRenyiFit(const Graph& g_in, NodeId n_out, Rng& rng) {
  return ErdosRenyi(n_out, FitEdgeProbability(g_in), rng);
}

int FitAttachment(const Graph& g) {
  const double avg = g.num_nodes() > 0 ? 2.0 * g.num_edges() / g.num_nodes() : 0.0;
  return std::max(1, static_cast<int>(std::floor(avg / 2.0 + 0.5)));
}

Graph BarabasiAlbert(NodeId n, int attachment, Rng& rng) {
  if (attachment < 1 || n <= attachment) {
    throw std::invalid_argument("BA needs n > attachment >= 1 (n=" + std::to_string(n) +
                                ", attachment=" + std::to_string(attachment) + ")");
  }
  std::vector<Edge> edges;
  std::vector<NodeId> endpoints;  // each node repeated deg times
  for (NodeId v = 1; v < attachment; ++v) {
    edges.emplace_back(0, v);
    endpoints.push_back(0);
    endpoints.push_back(v);
  }
  std::vector<NodeId> targets;
  for (NodeId v = attachment; v < n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < attachment) {
      const NodeId pick = endpoints.empty()
                              ? static_cast<NodeId>(UniformIndex(rng, v))
                              : endpoints[UniformIndex(rng, static_cast<int64_t>(endpoints.size()))];
      if (std::find(targets.begin(), targets.end(), pick) == targets.end()) {
        targets.push_back(pick);
      }
    }
    for (NodeId t : targets) {
      edges.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return Graph(n, edges);
}

Graph BarabasiAlbertFit(const Graph& g_in, NodeId n_out, Rng& rng) {
  return BarabasiAlbert(n_out, FitAttachment(g_in), rng);
}

void KroneckerInitiator::Validate() const {
  if (k < 1 || k > 30) throw std::invalid_argument("Kronecker power must be in [1, 30]");
  for (const auto& row : theta) {
    for (double t : row) {
      if (!(t >= 0.0 && t <= 1.0)) {
        throw std::invalid_argument("initiator entries must be in [0, 1]");
      }
    }
  }
}

double KroneckerEdgeProbability(const KroneckerInitiator& init, NodeId u, NodeId v) {
  return 0.5 * (DirectedProbability(init.theta, init.k, u, v) +
                DirectedProbability(init.theta, init.k, v, u));
}

Graph KroneckerGenerate(const KroneckerInitiator& init, Rng& rng, NodeId n_out) {
  init.Validate();
  const NodeId full = init.num_nodes();
  const NodeId n = (n_out > 0 && n_out < full) ? n_out : full;
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (Uniform01(rng) < KroneckerEdgeProbability(init, u, v)) edges.emplace_back(u, v);
    }
  }
  return Graph(n, edges);
}

double KronLogLikelihood(const Theta& theta, int k, const Graph& g,
                         const std::vector<NodeId>& permutation) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& row : theta) {
    for (double t : row) {
      sum += t;
      sum_sq += t * t;
    }
  }
  double ll = -std::pow(sum, k) - 0.5 * std::pow(sum_sq, k);
  for (const Edge& e : g.edges()) {
    ll += EdgeTerm(theta, k, permutation[e.u], permutation[e.v]) +
          EdgeTerm(theta, k, permutation[e.v], permutation[e.u]);
  }
  return ll;
}

KronFitResult KronFit(const Graph& g, const KronFitConfig& config, Rng& rng) {
  if (g.num_nodes() < 4) throw std::invalid_argument("KronFit needs at least 4 nodes");
  if (config.iterations < 0 || config.swaps_per_step < 0) {
    throw std::invalid_argument("KronFit iterations and swaps must be >= 0");
  }
  const int k = static_cast<int>(std::bit_width(static_cast<uint32_t>(g.num_nodes() - 1)));
  const NodeId full = NodeId{1} << k;

  // Highest degree first onto the indices with the fewest 1 bits.
  std::vector<NodeId> by_degree(full);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  auto degree = [&](NodeId v) { return v < g.num_nodes() ? g.Degree(v) : 0; };
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](NodeId a, NodeId b) { return degree(a) > degree(b); });
  std::vector<NodeId> by_popcount(full);
  std::iota(by_popcount.begin(), by_popcount.end(), 0);
  std::stable_sort(by_popcount.begin(), by_popcount.end(), [](NodeId a, NodeId b) {
    return std::popcount(static_cast<uint32_t>(a)) < std::popcount(static_cast<uint32_t>(b));
  });
  KronFitResult result;
  result.permutation.resize(full);
  for (NodeId r = 0; r < full; ++r) result.permutation[by_degree[r]] = by_popcount[r];
  auto& perm = result.permutation;

  const Theta initial = Clip(config.initial);
  Theta theta = initial;
  std::vector<Theta> history{initial};
  const double directed_edges = std::max<double>(1.0, 2.0 * g.num_edges());

  for (int it = 0; it < config.iterations; ++it) {
    for (int s = 0; s < config.swaps_per_step; ++s) {
      const auto x = static_cast<NodeId>(UniformIndex(rng, full));
      const auto y = static_cast<NodeId>(UniformIndex(rng, full));
      if (x == y) continue;
      const double before = SwapTerms(theta, k, g, perm, x, y);
      std::swap(perm[x], perm[y]);
      const double delta = SwapTerms(theta, k, g, perm, x, y) - before;
      if (!(delta >= 0.0 || std::log(Uniform01(rng)) < delta)) std::swap(perm[x], perm[y]);
    }
    const Theta grad = Gradient(theta, k, g, perm);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        theta[i][j] += std::clamp(config.learning_rate * grad[i][j] / directed_edges,
                                  -config.max_step, config.max_step);
      }
    }
    theta = Clip(theta);
    const double ll = KronLogLikelihood(theta, k, g, perm);
    if (!std::isfinite(ll)) {
      throw std::runtime_error("KronFit diverged at iteration " + std::to_string(it));
    }
    result.trace.push_back(ll);
    history.push_back(theta);
  }

  result.initial_log_likelihood = KronLogLikelihood(initial, k, g, perm);
  Theta best = initial;
  double best_ll = result.initial_log_likelihood;
  for (const Theta& t : history) {
    const double ll = KronLogLikelihood(t, k, g, perm);
    if (ll > best_ll) {
      best_ll = ll;
      best = t;
    }
  }
  result.initiator.theta = best;
  result.initiator.k = k;
  result.final_log_likelihood = best_ll;
  return result;
}

Graph StochasticBlockModel(NodeId n, int blocks, double p_in, double p_out, Rng& rng) {
  if (n < 1 || blocks < 1 || blocks > n) throw std::invalid_argument("SBM needs 1 <= blocks <= n");
  const NodeId block_size = n / blocks;
  auto block_of = [&](NodeId v) { return std::min<NodeId>(v / block_size, blocks - 1); };
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      const double p = block_of(u) == block_of(v) ? p_in : p_out;
      if (Uniform01(rng) < p) edges.emplace_back(u, v);
    }
  }
  return Graph(n, edges);
}

}  // namespace lgsg
