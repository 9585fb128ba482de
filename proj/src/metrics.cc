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

#include "lgsg/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace lgsg {
namespace {

void RequireEdges(const Graph& g, const char* what) {
  if (g.num_edges() == 0) {
    throw std::invalid_argument(std::string(what) + " is undefined for an edgeless graph");
  }
}

std::optional<double> Ratio(double orig, double gen, double floor = 0.0) {
  const double denom = std::max(std::abs(orig), floor);
  if (denom == 0.0) return std::nullopt;
  return std::abs(gen - orig) / denom;
}

}  // namespace

double AverageDegree(const Graph& g) {
  if (g.num_nodes() < 1) throw std::invalid_argument("average degree of an empty graph");
  return 2.0 * static_cast<double>(g.num_edges()) / g.num_nodes();
}

double EdgeDistributionEntropy(const Graph& g) {
  RequireEdges(g, "edge distribution entropy");
  const double total = 2.0 * static_cast<double>(g.num_edges());
  double h = 0.0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const int deg = g.Degree(v);
    if (deg == 0) continue;
    const double p = deg / total;
    h -= p * std::log(p);
  }
  return h / std::log(static_cast<double>(g.num_nodes()));
}

double Gini(const Graph& g) {
  RequireEdges(g, "gini");
  std::vector<int> deg = g.Degrees();
  std::sort(deg.begin(), deg.end());
  const double n = static_cast<double>(deg.size());
  // sum over ordered pairs |d_i - d_j| = 2 sum_i (2i - n + 1) d_(i).
  double pair_sum = 0.0;
  for (size_t i = 0; i < deg.size(); ++i) {
    pair_sum += 2.0 * (2.0 * static_cast<double>(i) - n + 1.0) * deg[i];
  }
  return pair_sum / (2.0 * n * n * AverageDegree(g));
}

double AverageClustering(const Graph& g) {
  const NodeId n = g.num_nodes();
  if (n < 1) return 0.0;
  std::vector<uint8_t> marked(n, 0);
  double sum = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const auto nbrs = g.Neighbors(v);
    const int64_t deg = static_cast<int64_t>(nbrs.size());
    if (deg < 2) continue;
    for (NodeId u : nbrs) marked[u] = 1;
    int64_t links = 0;
    for (NodeId u : nbrs) {
      for (NodeId w : g.Neighbors(u)) links += (w > u && marked[w]);
    }
    for (NodeId u : nbrs) marked[u] = 0;
    sum += 2.0 * static_cast<double>(links) / static_cast<double>(deg * (deg - 1));
  }
  return sum / n;
}

std::optional<double> Assortativity(const Graph& g) {
  RequireEdges(g, "assortativity");
  // Exact integer moments so that zero variance is detected exactly.
  __int128 s1 = 0, s2 = 0, s12 = 0;
  for (const Edge& e : g.edges()) {
    const __int128 a = g.Degree(e.u);
    const __int128 b = g.Degree(e.v);
    s1 += a + b;
    s2 += a * a + b * b;
    s12 += 2 * a * b;
  }
  const __int128 count = 2 * static_cast<__int128>(g.num_edges());
  const __int128 var = count * s2 - s1 * s1;
  if (var == 0) return std::nullopt;
  const __int128 cov = count * s12 - s1 * s1;
  return static_cast<double>(cov) / static_cast<double>(var);
}

MetricsReport ComputeMetrics(const Graph& g) {
  MetricsReport r;
  r.n_nodes = g.num_nodes();
  r.n_edges = g.num_edges();
  r.avg_degree = AverageDegree(g);
  r.ede = EdgeDistributionEntropy(g);
  r.gini = Gini(g);
  r.clustering = AverageClustering(g);
  r.assortativity = Assortativity(g);
  return r;
}

std::string MetricsToJson(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["avg_degree"] = report.avg_degree;
  j["ede"] = report.ede;
  j["gini"] = report.gini;
  j["clustering"] = report.clustering;
  j["assortativity"] =
      report.assortativity ? nlohmann::ordered_json(*report.assortativity) : nullptr;
  j["n_nodes"] = report.n_nodes;
  j["n_edges"] = report.n_edges;
  return j.dump();
}

RelativeDistances CompareMetrics(const MetricsReport& original,
                                 const MetricsReport& generated) {
  RelativeDistances d;
  d.avg_degree = Ratio(original.avg_degree, generated.avg_degree);
  d.ede = Ratio(original.ede, generated.ede);
  d.gini = Ratio(original.gini, generated.gini);
  d.clustering = Ratio(original.clustering, generated.clustering);
  if (original.assortativity && generated.assortativity) {
    d.assortativity = Ratio(*original.assortativity, *generated.assortativity, 0.01);
  }
  return d;
}

}  // namespace lgsg
