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

#include "lgsg/diffusion.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lgsg/binary_io.h"

namespace lgsg {
namespace {

constexpr char kModelMagic[] = {'L', 'G', 'S', 'G', 'M', 'D', 'L', '\0'};
constexpr uint32_t kModelVersion = 1;
constexpr double kMinAlpha = 1e-8;

RowMatrix NodeNoise(int m, int d, const std::vector<uint8_t>& mask, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix eps = RowMatrix::Zero(m, d);
  for (int i = 0; i < m; ++i) {
    if (!mask[i]) continue;
    for (int k = 0; k < d; ++k) eps(i, k) = normal(rng);
  }
  return eps;
}

RowMatrix EdgeNoise(int m, const std::vector<uint8_t>& mask, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix eps = RowMatrix::Zero(static_cast<Eigen::Index>(m) * m, 2);
  for (int i = 0; i < m; ++i) {
    if (!mask[i]) continue;
    for (int j = i + 1; j < m; ++j) {
      if (!mask[j]) continue;
      for (int c = 0; c < 2; ++c) {
        const double x = normal(rng);
        eps(i * m + j, c) = x;
        eps(j * m + i, c) = x;
      }
    }
  }
  return eps;
}

// Zeroes padded node rows, padded pairs and the diagonal.
void ApplyMasks(NoisedSample& s) {
  const int m = s.capacity();
  for (int i = 0; i < m; ++i) {
    if (!s.mask[i]) s.z.row(i).setZero();
    for (int j = 0; j < m; ++j) {
      if (i == j || !s.mask[i] || !s.mask[j]) s.e.row(i * m + j).setZero();
    }
  }
}

}  // namespace

Denoiser::Output PredictNoise(const Denoiser& denoiser, const NoiseSchedule& schedule,
                              const NoisedSample& state, Denoiser::Cache* cache) {
  Denoiser::Output out = denoiser.Forward(state.z, state.e, state.mask, state.t, cache);
  out.eps_z += schedule.sigma[state.t] * state.z;
  return out;
}

EmbeddingScaler EmbeddingScaler::Fit(const std::vector<SubgraphSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("cannot fit scaler on no samples");
  const int d = samples.front().dim();
  RowVector sum = RowVector::Zero(d);
  RowVector sq = RowVector::Zero(d);
  double count = 0;
  for (const auto& s : samples) {
    for (int i = 0; i < s.capacity; ++i) {
      if (!s.mask[i]) continue;
      sum += s.emb.row(i);
      sq += s.emb.row(i).cwiseAbs2();
      count += 1;
    }
  }
  EmbeddingScaler scaler;
  scaler.mean = sum / std::max(count, 1.0);
  scaler.scale.resize(d);
  for (int k = 0; k < d; ++k) {
    const double var = sq(k) / std::max(count, 1.0) - scaler.mean(k) * scaler.mean(k);
    const double sd = std::sqrt(std::max(var, 0.0));
    scaler.scale(k) = sd > 1e-8 ? sd : 1.0;
  }
  return scaler;
}

EmbeddingScaler EmbeddingScaler::Identity(int dim) {
  return {RowVector::Zero(dim), RowVector::Ones(dim)};
}

RowVector EmbeddingScaler::Apply(const RowVector& x) const {
  return (x - mean).cwiseQuotient(scale);
}

RowVector EmbeddingScaler::Invert(const RowVector& x) const {
  return x.cwiseProduct(scale) + mean;
}

NoisedSample EncodeSample(const SubgraphSample& sample, const EmbeddingScaler& scaler) {
  const int m = sample.capacity;
  NoisedSample s;
  s.mask = sample.mask;
  s.z = RowMatrix::Zero(m, sample.dim());
  s.e = RowMatrix::Zero(static_cast<Eigen::Index>(m) * m, 2);
  for (int i = 0; i < m; ++i) {
    if (!sample.mask[i]) continue;
    s.z.row(i) = scaler.Apply(sample.emb.row(i));
    for (int j = 0; j < m; ++j) {
      if (i == j || !sample.mask[j]) continue;
      s.e(i * m + j, sample.Adj(i, j) ? 1 : 0) = 1.0;
    }
  }
  return s;
}

ForwardNoiseResult ForwardNoise(const NoisedSample& clean, int t,
                                const NoiseSchedule& schedule, Rng& rng) {
  if (t < 0 || t > schedule.num_steps) {
    throw std::out_of_range("timestep " + std::to_string(t) + " outside [0, " +
                            std::to_string(schedule.num_steps) + "]");
  }
  const int m = clean.capacity();
  ForwardNoiseResult r;
  if (t == 0) {
    r.noised = clean;
    r.eps_z = RowMatrix::Zero(clean.z.rows(), clean.z.cols());
    r.eps_e = RowMatrix::Zero(clean.e.rows(), 2);
    return r;
  }
  r.eps_z = NodeNoise(m, static_cast<int>(clean.z.cols()), clean.mask, rng);
  r.eps_e = EdgeNoise(m, clean.mask, rng);
  r.noised.mask = clean.mask;
  r.noised.t = t;
  r.noised.z = schedule.alpha[t] * clean.z + schedule.sigma[t] * r.eps_z;
  r.noised.e = schedule.alpha[t] * clean.e + schedule.sigma[t] * r.eps_e;
  ApplyMasks(r.noised);
  return r;
}

CleanEstimate DenoiseEstimate(const NoisedSample& noised, const RowMatrix& eps_z,
                              const RowMatrix& eps_e, const NoiseSchedule& schedule) {
  const int t = noised.t;
  if (t < 1 || t > schedule.num_steps) throw std::invalid_argument("estimate needs 1 <= t <= T");
  const double alpha = schedule.alpha[t];
  if (alpha < kMinAlpha) {
    throw std::domain_error("alpha^t below 1e-8; clean estimate is unstable");
  }
  const double sigma = schedule.sigma[t];
  return {(noised.z - sigma * eps_z) / alpha, (noised.e - sigma * eps_e) / alpha};
}

NoisedSample PosteriorStep(const NoisedSample& noised, const CleanEstimate& estimate,
                           const NoiseSchedule& schedule, Rng& rng) {
  const int t = noised.t;
  if (t < 1 || t > schedule.num_steps) throw std::invalid_argument("posterior step needs t >= 1");
  const double sigma_t2 = schedule.sigma[t] * schedule.sigma[t];
  const double sigma_prev2 = schedule.sigma[t - 1] * schedule.sigma[t - 1];
  const double trans2 = schedule.SigmaTransitionSq(t);
  const double coef_x = schedule.AlphaTransition(t) * sigma_prev2 / sigma_t2;
  const double coef_hat = schedule.alpha[t - 1] * trans2 / sigma_t2;
  const double stddev = std::sqrt(trans2) * schedule.sigma[t - 1] / schedule.sigma[t];

  const int m = noised.capacity();
  NoisedSample next;
  next.mask = noised.mask;
  next.t = t - 1;
  next.z = coef_x * noised.z + coef_hat * estimate.z;
  next.e = coef_x * noised.e + coef_hat * estimate.e;
  if (stddev > 0.0) {
    next.z += stddev * NodeNoise(m, static_cast<int>(noised.z.cols()), noised.mask, rng);
    next.e += stddev * EdgeNoise(m, noised.mask, rng);
  }
  // Symmetrize the estimate contribution as well as the noise.
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const RowVector avg = 0.5 * (next.e.row(i * m + j) + next.e.row(j * m + i));
      next.e.row(i * m + j) = avg;
      next.e.row(j * m + i) = avg;
    }
  }
  ApplyMasks(next);
  return next;
}

double NoiseLoss(const Denoiser::Output& predicted, const RowMatrix& eps_z,
                 const RowMatrix& eps_e, const std::vector<uint8_t>& mask,
                 double edge_weight, RowMatrix* grad_z, RowMatrix* grad_e) {
  const int m = static_cast<int>(mask.size());
  const int d = static_cast<int>(eps_z.cols());
  const int count = static_cast<int>(std::count(mask.begin(), mask.end(), 1));
  const double z_denom = static_cast<double>(count) * d;
  const double e_denom = static_cast<double>(count) * (count - 1) * 2.0;
  double z_loss = 0.0;
  double e_loss = 0.0;
  if (grad_z) grad_z->setZero(m, d);
  if (grad_e) grad_e->setZero(static_cast<Eigen::Index>(m) * m, 2);
  for (int i = 0; i < m; ++i) {
    if (!mask[i]) continue;
    const RowVector diff = predicted.eps_z.row(i) - eps_z.row(i);
    z_loss += diff.squaredNorm();
    if (grad_z) grad_z->row(i) = 2.0 * diff / z_denom;
    for (int j = 0; j < m; ++j) {
      if (i == j || !mask[j]) continue;
      const RowVector de = predicted.eps_e.row(i * m + j) - eps_e.row(i * m + j);
      e_loss += de.squaredNorm();
      if (grad_e) grad_e->row(i * m + j) = 2.0 * edge_weight * de / e_denom;
    }
  }
  double loss = count > 0 ? z_loss / z_denom : 0.0;
  if (count > 1) loss += edge_weight * e_loss / e_denom;
  return loss;
}

double DiffusionLossAndGradient(const Denoiser& denoiser, const NoisedSample& clean,
                                int t, const NoiseSchedule& schedule, Rng& rng,
                                double edge_weight, std::vector<RowMatrix>* grads) {
  const ForwardNoiseResult fwd = ForwardNoise(clean, t, schedule, rng);
  Denoiser::Cache cache;
  const Denoiser::Output out =
      PredictNoise(denoiser, schedule, fwd.noised, grads ? &cache : nullptr);
  RowMatrix gz;
  RowMatrix ge;
  const double loss = NoiseLoss(out, fwd.eps_z, fwd.eps_e, clean.mask, edge_weight,
                                grads ? &gz : nullptr, grads ? &ge : nullptr);
  if (grads) denoiser.Backward(cache, gz, ge, *grads);
  return loss;
}

DiffusionTrainResult TrainDiffusion(const std::vector<SubgraphSample>& dataset,
                                    const DiffusionConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("empty diffusion dataset");
  const int m = dataset.front().capacity;
  const int d = dataset.front().dim();
  for (const auto& s : dataset) {
    if (s.capacity != m || s.dim() != d) {
      throw std::invalid_argument("dataset samples differ in capacity or dimension");
    }
  }
  if (config.train_steps < 0 || config.batch_size < 1) {
    throw std::invalid_argument("train_steps must be >= 0 and batch_size >= 1");
  }

  DiffusionTrainResult result;
  DiffusionModel& model = result.model;
  model.schedule = MakeSchedule(config.num_steps);
  model.scaler = config.standardize ? EmbeddingScaler::Fit(dataset) : EmbeddingScaler::Identity(d);
  model.size_histogram.assign(m + 1, 0);
  for (const auto& s : dataset) ++model.size_histogram[s.size];

  std::vector<NoisedSample> encoded;
  encoded.reserve(dataset.size());
  for (const auto& s : dataset) encoded.push_back(EncodeSample(s, model.scaler));

  Rng init_rng = MakeRng(config.seed, {1});
  model.denoiser = Denoiser({m, d, config.hidden, config.layers, config.num_steps}, init_rng);
  auto& params = model.denoiser.params();

  std::vector<RowMatrix> first_moment;
  std::vector<RowMatrix> second_moment;
  for (const auto& p : params) {
    first_moment.push_back(RowMatrix::Zero(p.rows(), p.cols()));
    second_moment.push_back(RowMatrix::Zero(p.rows(), p.cols()));
  }
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kAdamEps = 1e-8;

  Rng rng = MakeRng(config.seed, {2});
  std::vector<RowMatrix> grads;
  for (int step = 0; step < config.train_steps; ++step) {
    for (auto& g : grads) g.setZero();
    double loss = 0.0;
    for (int b = 0; b < config.batch_size; ++b) {
      const auto index = UniformIndex(rng, static_cast<int64_t>(encoded.size()));
      const int t = 1 + static_cast<int>(UniformIndex(rng, config.num_steps));
      loss += DiffusionLossAndGradient(model.denoiser, encoded[index], t, model.schedule,
                                       rng, config.edge_weight, &grads);
    }
    loss /= config.batch_size;
    if (!std::isfinite(loss)) {
      throw std::runtime_error("diffusion loss became non-finite at step " +
                               std::to_string(step));
    }
    result.losses.push_back(loss);

    double norm2 = 0.0;
    for (auto& g : grads) {
      g /= config.batch_size;
      norm2 += g.squaredNorm();
    }
    const double norm = std::sqrt(norm2);
    const double clip = (config.grad_clip > 0.0 && norm > config.grad_clip)
                            ? config.grad_clip / norm
                            : 1.0;
    for (size_t k = 0; k < params.size(); ++k) {
      const RowMatrix g = grads[k] * clip;
      if (config.optimizer == Optimizer::kAdam) {
        first_moment[k] = kBeta1 * first_moment[k] + (1.0 - kBeta1) * g;
        second_moment[k] = kBeta2 * second_moment[k] + (1.0 - kBeta2) * g.cwiseAbs2();
        const double c1 = 1.0 - std::pow(kBeta1, step + 1);
        const double c2 = 1.0 - std::pow(kBeta2, step + 1);
        params[k].array() -= config.learning_rate * (first_moment[k].array() / c1) /
                             ((second_moment[k].array() / c2).sqrt() + kAdamEps);
      } else {
        first_moment[k] = config.momentum * first_moment[k] - config.learning_rate * g;
        params[k] += first_moment[k];
      }
    }
    if (!model.denoiser.AllFinite()) {
      throw std::runtime_error("denoiser parameters became non-finite at step " +
                               std::to_string(step));
    }
  }
  return result;
}

int64_t GeneratedSubgraph::NumEdges() const {
  int64_t count = 0;
  for (int i = 0; i < size; ++i) {
    for (int j = i + 1; j < size; ++j) count += Adj(i, j);
  }
  return count;
}

GeneratedSubgraph SampleOne(const DiffusionModel& model, int size, Rng& rng) {
  const int m = model.capacity();
  const int d = model.dim();
  if (size < 1 || size > m) throw std::invalid_argument("sample size outside [1, m]");
  NoisedSample state;
  state.mask.assign(m, 0);
  std::fill(state.mask.begin(), state.mask.begin() + size, 1);
  state.z = NodeNoise(m, d, state.mask, rng);
  state.e = EdgeNoise(m, state.mask, rng);
  state.t = model.schedule.num_steps;
  while (state.t > 0) {
    const auto out = PredictNoise(model.denoiser, model.schedule, state);
    const CleanEstimate estimate = DenoiseEstimate(state, out.eps_z, out.eps_e, model.schedule);
    state = PosteriorStep(state, estimate, model.schedule, rng);
  }

  GeneratedSubgraph g;
  g.size = size;
  g.emb.resize(size, d);
  g.adj.assign(static_cast<size_t>(size) * size, 0);
  for (int i = 0; i < size; ++i) {
    g.emb.row(i) = model.scaler.Invert(state.z.row(i));
    for (int j = i + 1; j < size; ++j) {
      const uint8_t edge = state.e(i * m + j, 1) > state.e(i * m + j, 0) ? 1 : 0;
      g.adj[static_cast<size_t>(i) * size + j] = edge;
      g.adj[static_cast<size_t>(j) * size + i] = edge;
    }
  }
  if (!g.emb.allFinite()) throw std::runtime_error("generated embedding is non-finite");
  return g;
}

std::vector<GeneratedSubgraph> SampleSubgraphs(const DiffusionModel& model, int count,
                                               uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  const auto& hist = model.size_histogram;
  if (std::accumulate(hist.begin(), hist.end(), uint64_t{0}) == 0) {
    throw std::invalid_argument("model has an empty size histogram");
  }
  std::vector<GeneratedSubgraph> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Rng rng = MakeRng(seed, {static_cast<uint64_t>(k)});
    std::discrete_distribution<int> sizes(hist.begin(), hist.end());
    const int size = sizes(rng);
    out.push_back(SampleOne(model, size, rng));
  }
  return out;
}

double MeanSampleSize(const DiffusionModel& model) {
  double total = 0.0;
  double weighted = 0.0;
  for (size_t s = 0; s < model.size_histogram.size(); ++s) {
    total += static_cast<double>(model.size_histogram[s]);
    weighted += static_cast<double>(s * model.size_histogram[s]);
  }
  return total > 0 ? weighted / total : 0.0;
}

std::vector<SubgraphSample> ToSamples(const std::vector<GeneratedSubgraph>& generated,
                                      int capacity) {
  std::vector<SubgraphSample> samples;
  for (const auto& g : generated) {
    if (g.size > capacity) throw std::invalid_argument("generated subgraph exceeds capacity");
    SubgraphSample s;
    s.capacity = capacity;
    s.size = g.size;
    s.mask.assign(capacity, 0);
    s.adj.assign(static_cast<size_t>(capacity) * capacity, 0);
    s.emb = RowMatrix::Zero(capacity, g.emb.cols());
    for (int i = 0; i < g.size; ++i) {
      s.mask[i] = 1;
      s.emb.row(i) = g.emb.row(i);
      for (int j = 0; j < g.size; ++j) s.adj[static_cast<size_t>(i) * capacity + j] = g.Adj(i, j);
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<GeneratedSubgraph> FromSamples(const std::vector<SubgraphSample>& samples) {
  std::vector<GeneratedSubgraph> out;
  for (const auto& s : samples) {
    std::vector<int> real;
    for (int i = 0; i < s.capacity; ++i) {
      if (s.mask[i]) real.push_back(i);
    }
    GeneratedSubgraph g;
    g.size = static_cast<int>(real.size());
    g.emb.resize(g.size, s.dim());
    g.adj.assign(static_cast<size_t>(g.size) * g.size, 0);
    for (int a = 0; a < g.size; ++a) {
      g.emb.row(a) = s.emb.row(real[a]);
      for (int b = 0; b < g.size; ++b) {
        g.adj[static_cast<size_t>(a) * g.size + b] = s.Adj(real[a], real[b]);
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<char> SerializeModel(const DiffusionModel& model) {
  const DenoiserShape& shape = model.denoiser.shape();
  ByteWriter w;
  w.PutBytes({kModelMagic, sizeof(kModelMagic)});
  w.Put<uint32_t>(kModelVersion);
  for (int v : {shape.capacity, shape.dim, shape.hidden, shape.layers, shape.num_steps}) {
    w.Put<uint32_t>(static_cast<uint32_t>(v));
  }
  for (const RowMatrix& p : model.denoiser.params()) {
    w.Put<uint32_t>(static_cast<uint32_t>(p.rows()));
    w.Put<uint32_t>(static_cast<uint32_t>(p.cols()));
    w.PutSpan(std::span<const double>(p.data(), static_cast<size_t>(p.size())));
  }
  w.Put<uint32_t>(static_cast<uint32_t>(model.scaler.mean.size()));
  w.PutSpan(std::span<const double>(model.scaler.mean.data(), model.scaler.mean.size()));
  w.PutSpan(std::span<const double>(model.scaler.scale.data(), model.scaler.scale.size()));
  w.Put<uint32_t>(static_cast<uint32_t>(model.size_histogram.size()));
  w.PutSpan(std::span<const uint64_t>(model.size_histogram));
  return w.bytes();
}

void SaveModel(const DiffusionModel& model, const std::filesystem::path& path) {
  ByteWriter w;
  const auto bytes = SerializeModel(model);
  w.PutBytes({bytes.data(), bytes.size()});
  w.WriteTo(path);
}

DiffusionModel LoadModel(const std::filesystem::path& path) {
  ByteReader r = ByteReader::FromFile(path);
  r.ExpectMagic({kModelMagic, sizeof(kModelMagic)});
  if (r.Get<uint32_t>() != kModelVersion) {
    throw std::runtime_error(path.string() + ": unsupported model version");
  }
  DenoiserShape shape;
  shape.capacity = static_cast<int>(r.Get<uint32_t>());
  shape.dim = static_cast<int>(r.Get<uint32_t>());
  shape.hidden = static_cast<int>(r.Get<uint32_t>());
  shape.layers = static_cast<int>(r.Get<uint32_t>());
  shape.num_steps = static_cast<int>(r.Get<uint32_t>());
  DiffusionModel model;
  Rng unused(0);
  model.denoiser = Denoiser(shape, unused);
  for (RowMatrix& p : model.denoiser.params()) {
    const auto rows = r.Get<uint32_t>();
    const auto cols = r.Get<uint32_t>();
    if (rows != p.rows() || cols != p.cols()) {
      throw std::runtime_error(path.string() + ": parameter shape mismatch");
    }
    r.GetSpan(std::span<double>(p.data(), static_cast<size_t>(p.size())));
  }
  const auto d = r.Get<uint32_t>();
  model.scaler.mean.resize(d);
  model.scaler.scale.resize(d);
  r.GetSpan(std::span<double>(model.scaler.mean.data(), d));
  r.GetSpan(std::span<double>(model.scaler.scale.data(), d));
  model.size_histogram.resize(r.Get<uint32_t>());
  r.GetSpan(std::span<uint64_t>(model.size_histogram));
  if (!r.AtEnd()) throw std::runtime_error(path.string() + ": trailing bytes");
  model.schedule = MakeSchedule(shape.num_steps);
  return model;
}

}  // namespace lgsg
