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

// Continuous Gaussian diffusion over (node embedding, two-channel edge)
// subgraph states.

#ifndef LGSG_DIFFUSION_H_
#define LGSG_DIFFUSION_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lgsg/denoiser.h"
#include "lgsg/matrix.h"
#include "lgsg/random.h"
#include "lgsg/sampler.h"

namespace lgsg {

// Variance-preserving schedule: alpha[t]^2 + sigma[t]^2 = 1 for t = 0..T.
struct NoiseSchedule {
  int num_steps = 0;  // T
  std::vector<double> alpha;
  std::vector<double> sigma;

  // alpha^{t|t-1} = alpha^t / alpha^{t-1}.
  double AlphaTransition(int t) const { return alpha[t] / alpha[t - 1]; }
  // (sigma^{t|t-1})^2 = (sigma^t)^2 - (alpha^{t|t-1})^2 (sigma^{t-1})^2.
  double SigmaTransitionSq(int t) const;
};

// Cosine schedule alpha^t = cos(pi/2 * t / (T (1 + offset))), so alpha^0 = 1
// and alpha^T = sin(pi/2 * offset / (1 + offset)) > 0; sigma^t = sin(same).
// Throws std::invalid_argument for T < 1.
NoiseSchedule MakeSchedule(int num_steps, double offset = 0.008);

// One padded subgraph state. Edges are stored as m*m rows of two channels
// (absent, present), row i*m+j.
struct NoisedSample {
  RowMatrix z;  // m x d
  RowMatrix e;  // m*m x 2
  std::vector<uint8_t> mask;
  int t = 0;

  int capacity() const { return static_cast<int>(mask.size()); }
};

// Per-dimension affine standardization of the node track.
struct EmbeddingScaler {
  RowVector mean;
  RowVector scale;

  static EmbeddingScaler Fit(const std::vector<SubgraphSample>& samples);
  static EmbeddingScaler Identity(int dim);
  RowVector Apply(const RowVector& x) const;
  RowVector Invert(const RowVector& x) const;
};

// Clean state of a sample: standardized embeddings and one-hot edges on
// real off-diagonal pairs; padded rows and the diagonal are zero.
NoisedSample EncodeSample(const SubgraphSample& sample, const EmbeddingScaler& scaler);

struct ForwardNoiseResult {
  NoisedSample noised;
  RowMatrix eps_z;
  RowMatrix eps_e;
};

// Closed-form marginal z^t = alpha^t z^0 + sigma^t eps. Edge noise is
// symmetric with a zero diagonal; padded positions stay zero. t = 0 returns
// the input unchanged. Throws std::out_of_range for t outside [0, T].
ForwardNoiseResult ForwardNoise(const NoisedSample& clean, int t,
                                const NoiseSchedule& schedule, Rng& rng);

struct CleanEstimate {
  RowMatrix z;
  RowMatrix e;
};

// x_hat = (x^t - sigma^t eps_hat) / alpha^t per track. Throws
// std::invalid_argument for t < 1 and std::domain_error if alpha^t < 1e-8.
CleanEstimate DenoiseEstimate(const NoisedSample& noised, const RowMatrix& eps_z,
                              const RowMatrix& eps_e, const NoiseSchedule& schedule);

// Samples x^{t-1} ~ N(mu, s^2 I) with
//   mu = alpha^{t|t-1} (sigma^{t-1})^2 / (sigma^t)^2 x^t
//      + alpha^{t-1} (sigma^{t|t-1})^2 / (sigma^t)^2 x_hat,
//   s  = sigma^{t|t-1} sigma^{t-1} / sigma^t,
// then re-applies edge symmetry and masking. Throws std::invalid_argument
// for t = 0.
NoisedSample PosteriorStep(const NoisedSample& noised, const CleanEstimate& estimate,
                           const NoiseSchedule& schedule, Rng& rng);

enum class Optimizer { kSgdMomentum, kAdam };

struct DiffusionConfig {
  int num_steps = 100;  // T
  int hidden = 32;
  int layers = 4;
  int train_steps = 3000;
  int batch_size = 16;
  double learning_rate = 0.002;
  double momentum = 0.9;  // SGD only
  Optimizer optimizer = Optimizer::kAdam;
  double edge_weight = 1.0;  // node-track loss weight is 1
  double grad_clip = 1.0;    // global L2 norm; <= 0 disables
  bool standardize = true;
  uint64_t seed = 0;
};

// Denoiser plus everything needed to sample from it.
struct DiffusionModel {
  Denoiser denoiser;
  NoiseSchedule schedule;
  EmbeddingScaler scaler;
  // size_histogram[s] = number of training samples with s real nodes.
  std::vector<uint64_t> size_histogram;

  int capacity() const { return denoiser.shape().capacity; }
  int dim() const { return denoiser.shape().dim; }
};

// Node noise prediction sigma^t z^t + net(state): the skip term is the exact
// noise estimate for standard normal embeddings, so the network only models
// the residual. Edge noise is the network output alone.
Denoiser::Output PredictNoise(const Denoiser& denoiser, const NoiseSchedule& schedule,
                              const NoisedSample& state, Denoiser::Cache* cache = nullptr);

// Equal-weight masked MSE: mean over real node entries plus edge_weight
// times mean over real off-diagonal pair entries. Fills the output
// gradients when non-null.
double NoiseLoss(const Denoiser::Output& predicted, const RowMatrix& eps_z,
                 const RowMatrix& eps_e, const std::vector<uint8_t>& mask,
                 double edge_weight, RowMatrix* grad_z = nullptr,
                 RowMatrix* grad_e = nullptr);

// Loss of one (sample, t, noise) triple and its parameter gradient.
double DiffusionLossAndGradient(const Denoiser& denoiser, const NoisedSample& clean,
                                int t, const NoiseSchedule& schedule, Rng& rng,
                                double edge_weight, std::vector<RowMatrix>* grads);

struct DiffusionTrainResult {
  DiffusionModel model;
  std::vector<double> losses;  // mean minibatch loss per step
};

// Throws std::invalid_argument on an empty or ragged dataset and
// std::runtime_error on a non-finite loss.
DiffusionTrainResult TrainDiffusion(const std::vector<SubgraphSample>& dataset,
                                    const DiffusionConfig& config);

struct GeneratedSubgraph {
  int size = 0;
  RowMatrix emb;              // size x d
  std::vector<uint8_t> adj;   // size x size

  uint8_t Adj(int i, int j) const { return adj[static_cast<size_t>(i) * size + j]; }
  int64_t NumEdges() const;
};

// Runs the reverse chain from pure noise for one sample of the given size and
// discretizes edges by channel argmax. Uses the substream of `rng`.
GeneratedSubgraph SampleOne(const DiffusionModel& model, int size, Rng& rng);

// Draws `count` subgraphs; sample k uses DeriveSeed(seed, {k}) and a size
// drawn from the training-size histogram.
std::vector<GeneratedSubgraph> SampleSubgraphs(const DiffusionModel& model, int count,
                                               uint64_t seed);

// Mean of the training-size histogram.
double MeanSampleSize(const DiffusionModel& model);

// Converts generated subgraphs to the sample-file representation (no
// origin ids) and back.
std::vector<SubgraphSample> ToSamples(const std::vector<GeneratedSubgraph>& generated,
                                      int capacity);
std::vector<GeneratedSubgraph> FromSamples(const std::vector<SubgraphSample>& samples);

// Little-endian checkpoint:
//   "LGSGMDL\0", u32 version (1), u32 m, u32 d, u32 hidden, u32 layers, u32 T,
//   then per parameter tensor in Denoiser::ParamNames() order:
//     u32 rows, u32 cols, f64 values row-major,
//   then the scaler (u32 d, f64 mean[d], f64 scale[d]) and the size
//   histogram (u32 m + 1, u64 counts). The schedule is re-derived from T.
void SaveModel(const DiffusionModel& model, const std::filesystem::path& path);
DiffusionModel LoadModel(const std::filesystem::path& path);
std::vector<char> SerializeModel(const DiffusionModel& model);

}  // namespace lgsg

#endif  // LGSG_DIFFUSION_H_
