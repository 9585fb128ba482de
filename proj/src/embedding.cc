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

#include "lgsg/embedding.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lgsg/binary_io.h"

namespace lgsg {
namespace {

constexpr char kEmbeddingMagic[] = {'L', 'G', 'S', 'G', 'E', 'M', 'B', '\0'};
constexpr uint32_t kEmbeddingVersion = 1;
constexpr double kLogFloor = 1e-12;

double Sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

void ApplyActivation(Activation act, const RowMatrix& pre, RowMatrix& out) {
  switch (act) {
    case Activation::kIdentity:
      out = pre;
      break;
    case Activation::kRelu:
      out = pre.cwiseMax(0.0);
      break;
    case Activation::kTanh:
      out = pre.array().tanh().matrix();
      break;
  }
}

// dL/dpre given dL/dout, the pre-activation and the activation output.
RowMatrix ActivationGrad(Activation act, const RowMatrix& grad_out,
                         const RowMatrix& pre, const RowMatrix& out) {
  switch (act) {
    case Activation::kIdentity:
      return grad_out;
    case Activation::kRelu:
      return (pre.array() > 0.0).select(grad_out, 0.0);
    case Activation::kTanh:
      return (grad_out.array() * (1.0 - out.array().square())).matrix();
  }
  return grad_out;
}

int RowOf(const std::vector<NodeId>& sorted, NodeId v) {
  return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) -
                          sorted.begin());
}

}  // namespace

void SageParams::Validate() const {
  if (layers.empty()) throw std::invalid_argument("SAGE model has no layers");
  if (neighbor_sample_size < 1) {
    throw std::invalid_argument("neighbor sample size must be >= 1");
  }
  for (size_t k = 0; k < layers.size(); ++k) {
    const RowMatrix& w = layers[k].weight;
    if (w.rows() < 1 || w.cols() < 2 || w.cols() % 2 != 0) {
      throw std::invalid_argument("layer " + std::to_string(k + 1) +
                                  " has an invalid weight shape");
    }
    if (k > 0 && layers[k].in_dim() != layers[k - 1].out_dim()) {
      throw std::invalid_argument("layer " + std::to_string(k + 1) +
                                  " input width does not match layer " +
                                  std::to_string(k) + " output");
    }
    if (!w.allFinite()) throw std::invalid_argument("non-finite SAGE weight");
  }
}

SageParams SageParams::Init(int input_dim, int hidden_dim, int output_dim,
                            int num_layers, int neighbor_sample_size,
                            Rng& rng) {
  if (num_layers < 1) throw std::invalid_argument("num_layers must be >= 1");
  SageParams params;
  params.neighbor_sample_size = neighbor_sample_size;
  int in = input_dim;
  for (int k = 0; k < num_layers; ++k) {
    const bool last = k + 1 == num_layers;
    const int out = last ? output_dim : hidden_dim;
    const double limit = std::sqrt(6.0 / (2.0 * in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    SageLayer layer;
    layer.weight.resize(out, 2 * in);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = dist(rng);
    }
    layer.activation = last ? Activation::kIdentity : Activation::kTanh;
    params.layers.push_back(std::move(layer));
    in = out;
  }
  params.Validate();
  return params;
}

RowMatrix SageForward(const SageParams& params, const Graph& g,
                      std::span<const NodeId> batch, uint64_t seed,
                      SageTape* tape) {
  params.Validate();
  if (!g.has_features()) {
    throw std::invalid_argument("SAGE forward needs node features");
  }
  if (g.features().cols() != params.input_dim()) {
    throw std::invalid_argument(
        "feature width " + std::to_string(g.features().cols()) +
        " does not match first layer input " +
        std::to_string(params.input_dim()));
  }
  if (batch.empty()) throw std::invalid_argument("empty SAGE batch");
  for (NodeId v : batch) {
    if (v < 0 || v >= g.num_nodes()) throw std::out_of_range("batch node out of range");
  }

  SageTape local;
  SageTape& t = tape ? *tape : local;
  const int num_layers = static_cast<int>(params.layers.size());
  const int samples = params.neighbor_sample_size;
  t = SageTape{};
  t.nodes.resize(num_layers + 1);
  t.self_row.resize(num_layers + 1);
  t.neighbor_rows.resize(num_layers + 1);
  t.neighbor_offsets.resize(num_layers + 1);
  t.h.resize(num_layers + 1);
  t.inputs.resize(num_layers + 1);
  t.pre.resize(num_layers + 1);

  t.nodes[num_layers].assign(batch.begin(), batch.end());
  std::sort(t.nodes[num_layers].begin(), t.nodes[num_layers].end());
  t.nodes[num_layers].erase(
      std::unique(t.nodes[num_layers].begin(), t.nodes[num_layers].end()),
      t.nodes[num_layers].end());

  // Walk the layers top-down to find which states each layer needs.
  std::vector<std::vector<NodeId>> sampled(num_layers + 1);
  for (int k = num_layers; k >= 1; --k) {
    const auto& current = t.nodes[k];
    std::vector<NodeId>& ids = sampled[k];
    std::vector<int>& offsets = t.neighbor_offsets[k];
    offsets.assign(1, 0);
    for (NodeId v : current) {
      const auto nbrs = g.Neighbors(v);
      if (!nbrs.empty()) {
        Rng rng = MakeRng(seed, {static_cast<uint64_t>(k), static_cast<uint64_t>(v)});
        for (int s = 0; s < samples; ++s) {
          ids.push_back(nbrs[UniformIndex(rng, static_cast<int64_t>(nbrs.size()))]);
        }
      }
      offsets.push_back(static_cast<int>(ids.size()));
    }
    std::vector<NodeId> below = current;
    below.insert(below.end(), ids.begin(), ids.end());
    std::sort(below.begin(), below.end());
    below.erase(std::unique(below.begin(), below.end()), below.end());
    t.nodes[k - 1] = std::move(below);
  }
  for (int k = 1; k <= num_layers; ++k) {
    const auto& below = t.nodes[k - 1];
    for (NodeId v : t.nodes[k]) t.self_row[k].push_back(RowOf(below, v));
    for (NodeId v : sampled[k]) t.neighbor_rows[k].push_back(RowOf(below, v));
  }

  const auto& x = g.features();
  t.h[0].resize(static_cast<Eigen::Index>(t.nodes[0].size()), x.cols());
  for (size_t i = 0; i < t.nodes[0].size(); ++i) t.h[0].row(i) = x.row(t.nodes[0][i]);

  for (int k = 1; k <= num_layers; ++k) {
    const SageLayer& layer = params.layers[k - 1];
    const int d_in = layer.in_dim();
    const auto rows = static_cast<Eigen::Index>(t.nodes[k].size());
    RowMatrix& in = t.inputs[k];
    in.setZero(rows, 2 * d_in);
    const auto& offsets = t.neighbor_offsets[k];
    for (Eigen::Index i = 0; i < rows; ++i) {
      in.row(i).head(d_in) = t.h[k - 1].row(t.self_row[k][i]);
      const int begin = offsets[i];
      const int end = offsets[i + 1];
      if (end > begin) {
        RowVector acc = RowVector::Zero(d_in);
        for (int s = begin; s < end; ++s) acc += t.h[k - 1].row(t.neighbor_rows[k][s]);
        in.row(i).tail(d_in) = acc / static_cast<double>(end - begin);
      }
    }
    t.pre[k] = in * layer.weight.transpose();
    ApplyActivation(layer.activation, t.pre[k], t.h[k]);
  }

  t.batch_rows.clear();
  RowMatrix out(static_cast<Eigen::Index>(batch.size()), params.output_dim());
  for (size_t i = 0; i < batch.size(); ++i) {
    const int row = RowOf(t.nodes[num_layers], batch[i]);
    t.batch_rows.push_back(row);
    out.row(i) = t.h[num_layers].row(row);
  }
  return out;
}

std::vector<RowMatrix> SageBackward(const SageParams& params,
                                    const SageTape& tape,
                                    const RowMatrix& grad_output) {
  const int num_layers = static_cast<int>(params.layers.size());
  std::vector<RowMatrix> grads(num_layers);
  RowMatrix grad_h = grad_output;
  for (int k = num_layers; k >= 1; --k) {
    const SageLayer& layer = params.layers[k - 1];
    const int d_in = layer.in_dim();
    const RowMatrix grad_pre =
        ActivationGrad(layer.activation, grad_h, tape.pre[k], tape.h[k]);
    grads[k - 1] = grad_pre.transpose() * tape.inputs[k];
    if (k == 1) break;
    const RowMatrix grad_in = grad_pre * layer.weight;
    RowMatrix grad_below =
        RowMatrix::Zero(static_cast<Eigen::Index>(tape.nodes[k - 1].size()), d_in);
    const auto& offsets = tape.neighbor_offsets[k];
    for (Eigen::Index i = 0; i < grad_in.rows(); ++i) {
      grad_below.row(tape.self_row[k][i]) += grad_in.row(i).head(d_in);
      const int begin = offsets[i];
      const int end = offsets[i + 1];
      if (end > begin) {
        const RowVector share = grad_in.row(i).tail(d_in) / static_cast<double>(end - begin);
        for (int s = begin; s < end; ++s) grad_below.row(tape.neighbor_rows[k][s]) += share;
      }
    }
    grad_h = std::move(grad_below);
  }
  return grads;
}

std::vector<std::pair<NodeId, NodeId>> SampleContextPairs(const Graph& g,
                                                          int walk_length,
                                                          int pairs_per_node,
                                                          uint64_t seed) {
  if (walk_length < 1) throw std::invalid_argument("walk_length must be >= 1");
  if (pairs_per_node < 1) throw std::invalid_argument("pairs_per_node must be >= 1");
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::vector<NodeId> visited;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (g.Degree(u) == 0) continue;
    Rng rng = MakeRng(seed, {static_cast<uint64_t>(u)});
    for (int p = 0; p < pairs_per_node; ++p) {
      visited.clear();
      NodeId current = u;
      for (int step = 0; step < walk_length; ++step) {
        const auto nbrs = g.Neighbors(current);
        current = nbrs[UniformIndex(rng, static_cast<int64_t>(nbrs.size()))];
        if (current != u) visited.push_back(current);
      }
      // The first step always leaves u, so visited is never empty.
      pairs.emplace_back(u, visited[UniformIndex(rng, static_cast<int64_t>(visited.size()))]);
    }
  }
  return pairs;
}

ContextBatch AttachNegatives(const Graph& g,
                             std::vector<std::pair<NodeId, NodeId>> positives,
                             int num_negatives, Rng& rng) {
  if (num_negatives < 1) throw std::invalid_argument("need at least one negative");
  std::vector<double> weights(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) weights[v] = std::pow(g.Degree(v), 0.75);
  std::discrete_distribution<NodeId> noise(weights.begin(), weights.end());
  ContextBatch batch;
  batch.num_negatives = num_negatives;
  batch.negatives.reserve(positives.size() * num_negatives);
  for (size_t i = 0; i < positives.size() * num_negatives; ++i) {
    batch.negatives.push_back(noise(rng));
  }
  batch.positives = std::move(positives);
  return batch;
}

double SageLoss(const RowMatrix& z, const ContextBatch& batch, RowMatrix* grad) {
  if (batch.positives.empty()) throw std::invalid_argument("empty context batch");
  const int q = batch.num_negatives;
  if (q < 1 || batch.negatives.size() != batch.positives.size() * q) {
    throw std::invalid_argument("context batch negatives malformed");
  }
  auto check = [&](NodeId v) {
    if (v < 0 || v >= z.rows()) throw std::out_of_range("batch index without an embedding row");
  };
  if (grad) grad->setZero(z.rows(), z.cols());
  const double scale = 1.0 / static_cast<double>(batch.positives.size());
  double total = 0.0;
  for (size_t p = 0; p < batch.positives.size(); ++p) {
    const auto [u, v] = batch.positives[p];
    check(u);
    check(v);
    const double s = z.row(u).dot(z.row(v));
    const double sig = Sigmoid(s);
    total += -std::log(std::max(sig, kLogFloor));
    if (grad && sig > kLogFloor) {
      const double ds = (sig - 1.0) * scale;
      grad->row(u) += ds * z.row(v);
      grad->row(v) += ds * z.row(u);
    }
    for (int j = 0; j < q; ++j) {
      const NodeId n = batch.negatives[p * q + j];
      check(n);
      const double sn = z.row(u).dot(z.row(n));
      const double sig_neg = Sigmoid(-sn);
      total += -std::log(std::max(sig_neg, kLogFloor));
      if (grad && sig_neg > kLogFloor) {
        const double ds = (1.0 - sig_neg) * scale;
        grad->row(u) += ds * z.row(n);
        grad->row(n) += ds * z.row(u);
      }
    }
  }
  return total * scale;
}

RowMatrix FallbackFeatures(const Graph& g, int random_dims, uint64_t seed) {
  if (random_dims < 0) throw std::invalid_argument("negative random feature width");
  RowMatrix x(g.num_nodes(), 2 + random_dims);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    x(v, 0) = std::log1p(static_cast<double>(g.Degree(v)));
    x(v, 1) = 1.0;
    Rng rng = MakeRng(seed, {static_cast<uint64_t>(v)});
    for (int j = 0; j < random_dims; ++j) x(v, 2 + j) = normal(rng);
  }
  // Standardized log-degree, so that no column dominates every dot product.
  const double mean = x.col(0).mean();
  const double sd = std::sqrt((x.col(0).array() - mean).square().mean());
  x.col(0) = (x.col(0).array() - mean) / (sd > 1e-12 ? sd : 1.0);
  return x;
}

EmbeddingResult TrainEmbeddings(const Graph& g, const EmbeddingConfig& config) {
  if (g.num_edges() == 0) {
    throw std::invalid_argument("cannot train embeddings on an edgeless graph");
  }
  if (config.batch_size < 1 || config.epochs < 1) {
    throw std::invalid_argument("batch_size and epochs must be >= 1");
  }
  const Graph work =
      g.has_features()
          ? g
          : g.WithFeatures(FallbackFeatures(g, config.fallback_random_dims,
                                            DeriveSeed(config.seed, {1})));
  Rng init_rng = MakeRng(config.seed, {2});
  EmbeddingResult result;
  result.params = SageParams::Init(static_cast<int>(work.features().cols()),
                                   config.hidden_dim, config.dim,
                                   config.num_layers, config.neighbor_samples,
                                   init_rng);
  SageParams& params = result.params;
  std::vector<RowMatrix> velocity;
  for (const auto& layer : params.layers) {
    velocity.push_back(RowMatrix::Zero(layer.weight.rows(), layer.weight.cols()));
  }

  auto positives = SampleContextPairs(work, config.walk_length,
                                      config.pairs_per_node,
                                      DeriveSeed(config.seed, {3}));
  Rng rng = MakeRng(config.seed, {4});
  SageTape tape;
  RowMatrix grad_z;
  uint64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(positives.begin(), positives.end(), rng);
    for (size_t start = 0; start < positives.size(); start += config.batch_size) {
      const size_t end = std::min(positives.size(), start + config.batch_size);
      ContextBatch batch = AttachNegatives(
          work, {positives.begin() + start, positives.begin() + end},
          config.negatives, rng);

      // Re-index the batch onto the unique nodes it touches.
      std::vector<NodeId> unique;
      for (const auto& [u, v] : batch.positives) {
        unique.push_back(u);
        unique.push_back(v);
      }
      unique.insert(unique.end(), batch.negatives.begin(), batch.negatives.end());
      std::sort(unique.begin(), unique.end());
      unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
      for (auto& [u, v] : batch.positives) {
        u = RowOf(unique, u);
        v = RowOf(unique, v);
      }
      for (NodeId& n : batch.negatives) n = RowOf(unique, n);

      const RowMatrix z = SageForward(params, work, unique,
                                      DeriveSeed(config.seed, {5, step}), &tape);
      const double loss = SageLoss(z, batch, &grad_z);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("embedding loss became non-finite at step " +
                                 std::to_string(step) +
                                 " (learning rate too high?)");
      }
      result.losses.push_back(loss);
      auto grads = SageBackward(params, tape, grad_z);
      if (config.grad_clip > 0.0) {
        double sq = 0.0;
        for (const auto& gk : grads) sq += gk.squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > config.grad_clip) {
          for (auto& gk : grads) gk *= config.grad_clip / norm;
        }
      }
      for (size_t k = 0; k < params.layers.size(); ++k) {
        velocity[k] = config.momentum * velocity[k] - config.learning_rate * grads[k];
        params.layers[k].weight += velocity[k];
        if (!params.layers[k].weight.allFinite()) {
          throw std::runtime_error("embedding weights became non-finite at step " +
                                   std::to_string(step));
        }
      }
      ++step;
    }
  }

  std::vector<NodeId> all(work.num_nodes());
  for (NodeId v = 0; v < work.num_nodes(); ++v) all[v] = v;
  result.embeddings.z = SageForward(params, work, all, DeriveSeed(config.seed, {6}));
  if (!result.embeddings.z.allFinite()) {
    throw std::runtime_error("non-finite embedding rows");
  }
  return result;
}

void SaveEmbeddings(const EmbeddingMatrix& z, const std::filesystem::path& path) {
  ByteWriter w;
  w.PutBytes({kEmbeddingMagic, sizeof(kEmbeddingMagic)});
  w.Put<uint32_t>(kEmbeddingVersion);
  w.Put<uint64_t>(static_cast<uint64_t>(z.z.rows()));
  w.Put<uint64_t>(static_cast<uint64_t>(z.z.cols()));
  w.PutSpan(std::span<const double>(z.z.data(), static_cast<size_t>(z.z.size())));
  w.WriteTo(path);
}

EmbeddingMatrix LoadEmbeddings(const std::filesystem::path& path) {
  ByteReader r = ByteReader::FromFile(path);
  r.ExpectMagic({kEmbeddingMagic, sizeof(kEmbeddingMagic)});
  const auto version = r.Get<uint32_t>();
  if (version != kEmbeddingVersion) {
    throw std::runtime_error(path.string() + ": unsupported embedding version " +
                             std::to_string(version));
  }
  const auto n = r.Get<uint64_t>();
  const auto d = r.Get<uint64_t>();
  EmbeddingMatrix z;
  z.z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  r.GetSpan(std::span<double>(z.z.data(), static_cast<size_t>(z.z.size())));
  if (!r.AtEnd()) throw std::runtime_error(path.string() + ": trailing bytes");
  return z;
}

}  // namespace lgsg
