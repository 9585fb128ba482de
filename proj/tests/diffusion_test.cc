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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <stdexcept>

#include <gtest/gtest.h>

#include "lgsg/binary_io.h"
#include "lgsg/denoiser.h"
#include "lgsg/diffusion.h"
#include "lgsg/random.h"
#include "oracles.h"

namespace lgsg {
namespace {

// Path 0-1-2 with one padded slot, d = 2.
SubgraphSample SmallSample() {
  SubgraphSample s;
  s.capacity = 4;
  s.size = 3;
  s.mask = {1, 1, 1, 0};
  s.adj.assign(16, 0);
  s.adj[1] = s.adj[4] = 1;
  s.adj[6] = s.adj[9] = 1;
  s.emb = RowMatrix::Zero(4, 2);
  s.emb << 0.5, -1, 2, 0.25, -1.5, 1, 0, 0;
  return s;
}

void ExpectMasked(const NoisedSample& ns) {
  const int m = ns.capacity();
  for (int i = 0; i < m; ++i) {
    if (!ns.mask[i]) {
      EXPECT_EQ(ns.z.row(i).squaredNorm(), 0.0);
    }
    for (int j = 0; j < m; ++j) {
      const auto row = ns.e.row(i * m + j);
      if (i == j || !ns.mask[i] || !ns.mask[j]) {
        EXPECT_EQ(row.squaredNorm(), 0.0);
      }
      EXPECT_EQ(row, ns.e.row(j * m + i));
    }
  }
}

DenoiserShape TinyShape() {
  DenoiserShape s;
  s.capacity = 4;
  s.dim = 2;
  s.hidden = 8;
  s.layers = 2;
  s.num_steps = 10;
  return s;
}

TEST(ScheduleTest, Invariants) {
  for (int T : {10, 100, 1000}) {
    const NoiseSchedule s = MakeSchedule(T);
    ASSERT_EQ(s.alpha.size(), static_cast<size_t>(T + 1));
    EXPECT_EQ(s.alpha[0], 1.0);
    EXPECT_EQ(s.sigma[0], 0.0);
    EXPECT_LT(s.alpha[T], 0.05);
    EXPECT_GT(s.alpha[T], 0.0);
    for (int t = 0; t <= T; ++t) {
      EXPECT_NEAR(s.alpha[t] * s.alpha[t] + s.sigma[t] * s.sigma[t], 1.0, 1e-12);
      if (t == 0) continue;
      EXPECT_LT(s.alpha[t], s.alpha[t - 1]);
      EXPECT_GT(s.sigma[t], s.sigma[t - 1]);
      EXPECT_NEAR(s.AlphaTransition(t) * s.alpha[t - 1], s.alpha[t], 1e-12);
      const double direct = s.sigma[t] * s.sigma[t] -
                            s.AlphaTransition(t) * s.AlphaTransition(t) * s.sigma[t - 1] * s.sigma[t - 1];
      EXPECT_NEAR(s.SigmaTransitionSq(t), direct, 1e-12);
      EXPECT_GE(s.SigmaTransitionSq(t), 0.0);
    }
  }
  EXPECT_THROW(MakeSchedule(0), std::invalid_argument);
}

TEST(ForwardNoiseTest, EndpointsAndErrors) {
  const NoiseSchedule s = MakeSchedule(20);
  const NoisedSample clean = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
  Rng rng(1);
  const auto r0 = ForwardNoise(clean, 0, s, rng);
  EXPECT_EQ(r0.noised.z, clean.z);
  EXPECT_EQ(r0.noised.e, clean.e);
  EXPECT_THROW(ForwardNoise(clean, 21, s, rng), std::out_of_range);
  EXPECT_THROW(ForwardNoise(clean, -1, s, rng), std::out_of_range);
}

TEST(ForwardNoiseTest, SymmetricAndMasked) {
  const NoiseSchedule s = MakeSchedule(20);
  const NoisedSample clean = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
  ExpectMasked(clean);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto r = ForwardNoise(clean, 1 + static_cast<int>(seed), s, rng);
    ExpectMasked(r.noised);
    EXPECT_EQ(r.noised.t, 1 + static_cast<int>(seed));
    const RowMatrix expect = s.alpha[r.noised.t] * clean.z + s.sigma[r.noised.t] * r.eps_z;
    EXPECT_TRUE(r.noised.z.isApprox(expect, 1e-14));
  }
}

TEST(ForwardNoiseTest, TerminalMoments) {
  const NoiseSchedule s = MakeSchedule(100);
  const NoisedSample clean = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
  Rng rng(3);
  double sum = 0, sq = 0;
  int count = 0;
  for (int draw = 0; draw < 10000; ++draw) {
    const auto r = ForwardNoise(clean, 100, s, rng);
    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < 2; ++c) {
        sum += r.noised.z(i, c);
        sq += r.noised.z(i, c) * r.noised.z(i, c);
        ++count;
      }
    }
  }
  const double mean = sum / count;
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(sq / count - mean * mean, 1.0, 0.05);
}

TEST(DenoiseEstimateTest, InvertsForwardNoise) {
  const NoiseSchedule s = MakeSchedule(50);
  const NoisedSample clean = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
  for (int t : {1, 10, 50}) {
    Rng rng(t);
    const auto r = ForwardNoise(clean, t, s, rng);
    const auto est = DenoiseEstimate(r.noised, r.eps_z, r.eps_e, s);
    EXPECT_LT((est.z - clean.z).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((est.e - clean.e).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(DenoiseEstimateTest, MatchesDirectFormula) {
  const NoiseSchedule s = MakeSchedule(30);
  Rng rng(8);
  NoisedSample ns = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
  ns = ForwardNoise(ns, 17, s, rng).noised;
  RowMatrix ez = RowMatrix::Zero(4, 2), ee = RowMatrix::Zero(16, 2);
  auto zero = DenoiseEstimate(ns, ez, ee, s);
  EXPECT_TRUE(zero.z.isApprox(ns.z / s.alpha[17], 1e-15));
  for (int i = 0; i < ez.size(); ++i) ez.data()[i] = std::normal_distribution<double>()(rng);
  for (int i = 0; i < ee.size(); ++i) ee.data()[i] = std::normal_distribution<double>()(rng);
  const auto est = DenoiseEstimate(ns, ez, ee, s);
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 2; ++c) {
      EXPECT_NEAR(est.z(i, c), (ns.z(i, c) - s.sigma[17] * ez(i, c)) / s.alpha[17], 1e-12);
    }
  }
  for (int r = 0; r < 16; ++r) {
    EXPECT_NEAR(est.e(r, 1), (ns.e(r, 1) - s.sigma[17] * ee(r, 1)) / s.alpha[17], 1e-12);
  }
  ns.t = 0;
  EXPECT_THROW(DenoiseEstimate(ns, ez, ee, s), std::invalid_argument);
}

TEST(PosteriorStepTest, FinalStepReturnsEstimate) {
  for (int T : {10, 100, 1000}) {
    const NoiseSchedule s = MakeSchedule(T);
    Rng rng(T);
    NoisedSample ns = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
    ns = ForwardNoise(ns, 1, s, rng).noised;
    CleanEstimate est{RowMatrix::Zero(4, 2), RowMatrix::Zero(16, 2)};
    est.z.topRows(3).setRandom();
    const NoisedSample out = PosteriorStep(ns, est, s, rng);
    EXPECT_EQ(out.t, 0);
    EXPECT_LT((out.z - est.z).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PosteriorStepTest, MeanCoefficientsRecoverCleanPath) {
  for (int T : {10, 100, 1000}) {
    const NoiseSchedule s = MakeSchedule(T);
    for (int t = 1; t <= T; ++t) {
      const double st2 = s.sigma[t] * s.sigma[t];
      const double a = s.AlphaTransition(t) * s.sigma[t - 1] * s.sigma[t - 1] / st2;
      const double b = s.alpha[t - 1] * s.SigmaTransitionSq(t) / st2;
      // x^t = alpha^t x and x_hat = x give mu = alpha^{t-1} x.
      EXPECT_NEAR(a * s.alpha[t] + b, s.alpha[t - 1], 1e-12);
    }
  }
}

TEST(PosteriorStepTest, PreservesSymmetryAndMask) {
  const NoiseSchedule s = MakeSchedule(20);
  Rng rng(4);
  NoisedSample ns = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
  ns = ForwardNoise(ns, 12, s, rng).noised;
  CleanEstimate est{RowMatrix::Random(4, 2), RowMatrix::Random(16, 2)};
  const NoisedSample out = PosteriorStep(ns, est, s, rng);
  EXPECT_EQ(out.t, 11);
  ExpectMasked(out);
  ns.t = 0;
  EXPECT_THROW(PosteriorStep(ns, est, s, rng), std::invalid_argument);
}

TEST(DenoiserTest, ShapesMaskAndErrors) {
  Rng rng(1);
  const Denoiser d(TinyShape(), rng);
  Rng noise(2);
  NoisedSample ns = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
  ns = ForwardNoise(ns, 5, MakeSchedule(10), noise).noised;
  const auto out = d.Forward(ns.z, ns.e, ns.mask, 5);
  EXPECT_EQ(out.eps_z.rows(), 4);
  EXPECT_EQ(out.eps_z.cols(), 2);
  EXPECT_EQ(out.eps_e.rows(), 16);
  EXPECT_EQ(out.eps_e.cols(), 2);
  EXPECT_EQ(out.eps_z.row(3).squaredNorm(), 0.0);
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(out.eps_e.row(3 * 4 + j).squaredNorm(), 0.0);
    EXPECT_EQ(out.eps_e.row(j * 4 + j).squaredNorm(), 0.0);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(out.eps_e.row(i * 4 + j), out.eps_e.row(j * 4 + i));
  }
  EXPECT_THROW(d.Forward(RowMatrix::Zero(3, 2), ns.e, ns.mask, 5), std::invalid_argument);
  EXPECT_TRUE(d.AllFinite());
  EXPECT_EQ(d.ParamNames().size(), d.params().size());
}

TEST(DenoiserTest, PermutationEquivariant) {
  Rng rng(3);
  const Denoiser d(TinyShape(), rng);
  const NoiseSchedule s = MakeSchedule(10);
  for (int trial = 0; trial < 20; ++trial) {
    NoisedSample ns = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
    ns = ForwardNoise(ns, 1 + trial % 10, s, rng).noised;
    const auto perm = testing::RandomPermutation(4, rng);  // old i -> new perm[i]
    NoisedSample p = ns;
    for (int i = 0; i < 4; ++i) {
      p.z.row(perm[i]) = ns.z.row(i);
      p.mask[perm[i]] = ns.mask[i];
      for (int j = 0; j < 4; ++j) p.e.row(perm[i] * 4 + perm[j]) = ns.e.row(i * 4 + j);
    }
    const auto a = PredictNoise(d, s, ns);
    const auto b = PredictNoise(d, s, p);
    for (int i = 0; i < 4; ++i) {
      EXPECT_LT((b.eps_z.row(perm[i]) - a.eps_z.row(i)).norm(), 1e-12);
      for (int j = 0; j < 4; ++j) {
        EXPECT_LT((b.eps_e.row(perm[i] * 4 + perm[j]) - a.eps_e.row(i * 4 + j)).norm(), 1e-12);
      }
    }
  }
}

TEST(DiffusionGradientTest, MatchesCentralDifferences) {
  EXPECT_LT(testing::DiffusionGradientError(1e-5), 1e-4);
}

TEST(NoiseLossTest, EqualWeightMaskedMean) {
  const auto clean = EncodeSample(SmallSample(), EmbeddingScaler::Identity(2));
  Denoiser::Output pred{RowMatrix::Zero(4, 2), RowMatrix::Zero(16, 2)};
  RowMatrix ez = RowMatrix::Ones(4, 2), ee = RowMatrix::Ones(16, 2);
  // Masked positions are ignored: both means are 1.
  EXPECT_NEAR(NoiseLoss(pred, ez, ee, clean.mask, 1.0), 2.0, 1e-15);
  EXPECT_NEAR(NoiseLoss(pred, ez, ee, clean.mask, 0.5), 1.5, 1e-15);
}

std::vector<SubgraphSample> SmallDataset() {
  std::vector<SubgraphSample> ds;
  Rng rng(5);
  for (int k = 0; k < 8; ++k) {
    SubgraphSample s = SmallSample();
    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < 2; ++c) s.emb(i, c) += 0.1 * std::normal_distribution<double>()(rng);
    }
    if (k % 2) {  // drop node 2
      s.size = 2;
      s.mask[2] = 0;
      s.emb.row(2).setZero();
      s.adj[6] = s.adj[9] = 0;
    }
    ds.push_back(s);
  }
  return ds;
}

DiffusionConfig SmallConfig() {
  DiffusionConfig c;
  c.num_steps = 20;
  c.hidden = 8;
  c.layers = 2;
  c.train_steps = 300;
  c.batch_size = 4;
  c.learning_rate = 0.005;
  c.seed = 9;
  return c;
}

TEST(TrainDiffusionTest, LossDropsAndIsDeterministic) {
  const auto a = TrainDiffusion(SmallDataset(), SmallConfig());
  const auto b = TrainDiffusion(SmallDataset(), SmallConfig());
  ASSERT_EQ(a.losses.size(), 300u);
  EXPECT_EQ(a.losses, b.losses);
  EXPECT_EQ(SerializeModel(a.model), SerializeModel(b.model));
  const double head = std::accumulate(a.losses.begin(), a.losses.begin() + 30, 0.0) / 30;
  const double tail = std::accumulate(a.losses.end() - 30, a.losses.end(), 0.0) / 30;
  EXPECT_LT(tail, head);
  EXPECT_TRUE(std::isfinite(a.losses.front()));
  EXPECT_EQ(a.model.size_histogram, (std::vector<uint64_t>{0, 0, 4, 4, 0}));
}

TEST(TrainDiffusionTest, InitialLossNearTwo) {
  // Node and edge noise are standard normal and an untrained head outputs
  // roughly zero, so each mean squared term starts near 1.
  auto c = SmallConfig();
  c.train_steps = 50;
  c.learning_rate = 0.0;
  const auto r = TrainDiffusion(SmallDataset(), c);
  const double mean = std::accumulate(r.losses.begin(), r.losses.end(), 0.0) / r.losses.size();
  EXPECT_GT(mean, 1.0);
  EXPECT_LT(mean, 3.0);
}

TEST(TrainDiffusionTest, RejectsBadDatasets) {
  EXPECT_THROW(TrainDiffusion({}, SmallConfig()), std::invalid_argument);
  auto ds = SmallDataset();
  ds[1].emb = RowMatrix::Zero(4, 3);
  EXPECT_THROW(TrainDiffusion(ds, SmallConfig()), std::invalid_argument);
}

TEST(SampleTest, UntrainedOutputsAreWellFormed) {
  auto c = SmallConfig();
  c.train_steps = 0;
  const auto model = TrainDiffusion(SmallDataset(), c).model;
  const auto gen = SampleSubgraphs(model, 100, 4);
  int64_t edges = 0, pairs = 0;
  for (const auto& g : gen) {
    EXPECT_TRUE(g.size == 2 || g.size == 3);
    EXPECT_TRUE(g.emb.allFinite());
    EXPECT_EQ(g.emb.rows(), g.size);
    for (int i = 0; i < g.size; ++i) {
      EXPECT_EQ(g.Adj(i, i), 0);
      for (int j = 0; j < g.size; ++j) EXPECT_EQ(g.Adj(i, j), g.Adj(j, i));
    }
    edges += g.NumEdges();
    pairs += g.size * (g.size - 1) / 2;
  }
  const double density = static_cast<double>(edges) / pairs;
  EXPECT_GE(density, 0.2);
  EXPECT_LE(density, 0.8);
  EXPECT_NEAR(MeanSampleSize(model), 2.5, 1e-12);
  // Same seed, same draws.
  const auto again = SampleSubgraphs(model, 100, 4);
  for (size_t k = 0; k < gen.size(); ++k) {
    EXPECT_EQ(gen[k].adj, again[k].adj);
    EXPECT_EQ(gen[k].emb, again[k].emb);
  }
}

TEST(SampleTest, SampleConversionRoundTrip) {
  auto c = SmallConfig();
  c.train_steps = 10;
  const auto model = TrainDiffusion(SmallDataset(), c).model;
  const auto gen = SampleSubgraphs(model, 10, 1);
  const auto samples = ToSamples(gen, 4);
  for (const auto& s : samples) s.Validate();
  const auto back = FromSamples(samples);
  for (size_t k = 0; k < gen.size(); ++k) {
    EXPECT_EQ(back[k].adj, gen[k].adj);
    EXPECT_EQ(back[k].emb, gen[k].emb);
  }
}

TEST(ModelFileTest, RoundTripAndCorruption) {
  auto c = SmallConfig();
  c.train_steps = 20;
  const auto model = TrainDiffusion(SmallDataset(), c).model;
  const auto path = std::filesystem::temp_directory_path() / "lgsg_model_rt.bin";
  SaveModel(model, path);
  const auto back = LoadModel(path);
  EXPECT_EQ(SerializeModel(back), SerializeModel(model));
  EXPECT_EQ(back.schedule.alpha, model.schedule.alpha);
  const auto a = SampleSubgraphs(model, 3, 2);
  const auto b = SampleSubgraphs(back, 3, 2);
  for (size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].emb, b[k].emb);

  auto bytes = SerializeModel(model);
  bytes.push_back(0);
  ByteWriter w;
  w.PutBytes({bytes.data(), bytes.size()});
  w.WriteTo(path);
  EXPECT_THROW(LoadModel(path), std::runtime_error);
  bytes[0] = 'X';
  bytes.pop_back();
  ByteWriter w2;
  w2.PutBytes({bytes.data(), bytes.size()});
  w2.WriteTo(path);
  EXPECT_THROW(LoadModel(path), std::runtime_error);
}

}  // namespace
}  // namespace lgsg
