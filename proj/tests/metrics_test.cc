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

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "json.hpp"
#include "lgsg/graph.h"
#include "lgsg/metrics.h"
#include "lgsg/random.h"
#include "oracles.h"

namespace lgsg {
namespace {

Graph Make(int n, std::vector<Edge> edges) { return Graph(n, edges); }
Graph Star(int leaves) {
  std::vector<Edge> e;
  for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return Graph(leaves + 1, e);
}
Graph Cycle(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, e);
}
Graph Complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, e);
}

TEST(MetricsTest, AverageDegree) {
  EXPECT_DOUBLE_EQ(AverageDegree(Complete(3)), 2.0);
  EXPECT_DOUBLE_EQ(AverageDegree(Graph(4, std::vector<Edge>{})), 0.0);
  EXPECT_NEAR(2.0 * 5278 / 2708, 3.8981, 5e-5);
  EXPECT_THROW(AverageDegree(Graph()), std::invalid_argument);
}

TEST(MetricsTest, Entropy) {
  EXPECT_NEAR(EdgeDistributionEntropy(Cycle(7)), 1.0, 1e-12);
  const double star = -(0.5 * std::log(0.5) + 0.5 * std::log(1.0 / 6)) / std::log(4.0);
  EXPECT_NEAR(EdgeDistributionEntropy(Star(3)), star, 1e-12);
  EXPECT_NEAR(EdgeDistributionEntropy(Make(2, {{0, 1}})), 1.0, 1e-12);
  // Isolated nodes stay in the normalizer but add nothing to the sum.
  EXPECT_NEAR(EdgeDistributionEntropy(Make(4, {{0, 1}})), std::log(2.0) / std::log(4.0), 1e-12);
  EXPECT_THROW(EdgeDistributionEntropy(Graph(3, std::vector<Edge>{})), std::invalid_argument);
}

TEST(MetricsTest, GiniExamples) {
  EXPECT_NEAR(Gini(Cycle(5)), 0.0, 1e-15);
  EXPECT_NEAR(Gini(Star(3)), 0.25, 1e-12);
  EXPECT_NEAR(Gini(Make(3, {{0, 1}, {1, 2}})), 1.0 / 6.0, 1e-12);
  EXPECT_THROW(Gini(Graph(3, std::vector<Edge>{})), std::invalid_argument);
}

TEST(MetricsTest, ClusteringExamples) {
  EXPECT_DOUBLE_EQ(AverageClustering(Complete(3)), 1.0);
  EXPECT_DOUBLE_EQ(AverageClustering(Star(6)), 0.0);
  Graph k4_minus = Make(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
  EXPECT_NEAR(AverageClustering(k4_minus), (1 + 1 + 2.0 / 3 + 2.0 / 3) / 4, 1e-12);
  EXPECT_DOUBLE_EQ(AverageClustering(Graph(3, std::vector<Edge>{})), 0.0);
}

TEST(MetricsTest, AssortativityExamples) {
  EXPECT_FALSE(Assortativity(Cycle(6)).has_value());
  EXPECT_NEAR(*Assortativity(Star(5)), -1.0, 1e-12);
  EXPECT_NEAR(*Assortativity(Make(3, {{0, 1}, {1, 2}})), -1.0, 1e-12);
  EXPECT_THROW(Assortativity(Graph(2, std::vector<Edge>{})), std::invalid_argument);
}

// Reference values computed with networkx 3 (average_clustering and
// degree_assortativity_coefficient).
TEST(MetricsTest, KarateClubMatchesNetworkx) {
  const Graph g = LoadEdgeList(LGSG_SOURCE_DIR "/data/karate.edges").graph;
  ASSERT_EQ(g.num_nodes(), 34);
  ASSERT_EQ(g.num_edges(), 78);
  EXPECT_NEAR(AverageClustering(g), 0.5706384782076823, 1e-12);
  EXPECT_NEAR(*Assortativity(g), -0.47561309768461413, 1e-12);
}

TEST(MetricsTest, MatchesBruteForceOnRandomGraphs) {
  Rng rng(2024);
  int checked = 0;
  while (checked < 200) {
    const int n = 2 + static_cast<int>(UniformIndex(rng, 29));
    const Graph g = testing::CoinFlipGraph(n, Uniform01(rng), rng);
    if (g.num_edges() == 0) continue;
    const auto a = testing::ToDense(g);
    EXPECT_NEAR(AverageDegree(g), testing::OracleAverageDegree(a), 1e-9);
    EXPECT_NEAR(EdgeDistributionEntropy(g), testing::OracleEde(a), 1e-9);
    EXPECT_NEAR(Gini(g), testing::OracleGini(a), 1e-9);
    EXPECT_NEAR(AverageClustering(g), testing::OracleClustering(a), 1e-9);
    const auto r = Assortativity(g);
    const auto o = testing::OracleAssortativity(a);
    ASSERT_EQ(r.has_value(), o.has_value()) << "n=" << n;
    if (r) {
      EXPECT_NEAR(*r, *o, 1e-9);
    }
    ++checked;
  }
}

TEST(MetricsTest, InvariantUnderRelabeling) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = testing::CoinFlipGraph(20, 0.25, rng);
    if (g.num_edges() == 0) continue;
    const Graph h = testing::Relabel(g, testing::RandomPermutation(20, rng));
    const auto a = ComputeMetrics(g);
    const auto b = ComputeMetrics(h);
    EXPECT_NEAR(a.ede, b.ede, 1e-12);
    EXPECT_NEAR(a.gini, b.gini, 1e-12);
    EXPECT_NEAR(a.clustering, b.clustering, 1e-12);
    ASSERT_EQ(a.assortativity.has_value(), b.assortativity.has_value());
    if (a.assortativity) {
      EXPECT_NEAR(*a.assortativity, *b.assortativity, 1e-12);
    }
  }
}

TEST(MetricsTest, RangesHold) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(UniformIndex(rng, 40));
    const Graph g = testing::CoinFlipGraph(n, Uniform01(rng) * 0.5, rng);
    if (g.num_edges() == 0) continue;
    const auto m = ComputeMetrics(g);
    EXPECT_GT(m.ede, 0.0);
    EXPECT_LE(m.ede, 1.0 + 1e-12);
    EXPECT_GE(m.gini, 0.0);
    EXPECT_LT(m.gini, 1.0);
    EXPECT_GE(m.clustering, 0.0);
    EXPECT_LE(m.clustering, 1.0);
    if (m.assortativity) {
      EXPECT_GE(*m.assortativity, -1.0 - 1e-12);
      EXPECT_LE(*m.assortativity, 1.0 + 1e-12);
    }
  }
}

TEST(MetricsTest, TriangleFreeHasZeroClustering) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    // Bipartite graphs have no triangles.
    std::vector<Edge> e;
    for (int i = 0; i < 8; ++i)
      for (int j = 8; j < 16; ++j)
        if (Uniform01(rng) < 0.4) e.emplace_back(i, j);
    EXPECT_EQ(AverageClustering(Graph(16, e)), 0.0);
  }
}

TEST(MetricsTest, JsonHasFixedKeys) {
  auto j = nlohmann::ordered_json::parse(MetricsToJson(ComputeMetrics(Cycle(4))));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"avg_degree", "ede", "gini", "clustering",
                                            "assortativity", "n_nodes", "n_edges"}));
  EXPECT_TRUE(j["assortativity"].is_null());
  EXPECT_EQ(j["n_edges"], 4);
}

TEST(MetricsTest, RelativeDistances) {
  MetricsReport a;
  a.avg_degree = 4.0;
  a.ede = 0.9;
  a.gini = 0.2;
  a.clustering = 0.0;
  a.assortativity = 0.0;
  MetricsReport b = a;
  auto same = CompareMetrics(a, b);
  EXPECT_EQ(*same.avg_degree, 0.0);
  EXPECT_EQ(*same.ede, 0.0);
  EXPECT_EQ(*same.assortativity, 0.0);

  b.avg_degree = 3.0;
  b.assortativity = 0.05;
  b.clustering = 0.3;
  auto r = CompareMetrics(a, b);
  EXPECT_DOUBLE_EQ(*r.avg_degree, 0.25);
  EXPECT_NEAR(*r.assortativity, 5.0, 1e-12);
  EXPECT_FALSE(r.clustering.has_value());

  b.assortativity.reset();
  EXPECT_FALSE(CompareMetrics(a, b).assortativity.has_value());
}

}  // namespace
}  // namespace lgsg
