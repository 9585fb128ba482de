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

// Size-independent structural statistics.

#ifndef LGSG_METRICS_H_
#define LGSG_METRICS_H_

#include <cstdint>
#include <optional>
#include <string>

#include "lgsg/graph.h"

namespace lgsg {

// 2|E| / n. Throws std::invalid_argument for an empty graph.
double AverageDegree(const Graph& g);

// Degree entropy normalized by ln n, with p_v = deg(v) / 2|E|. Throws
// std::invalid_argument if the graph has no edges or fewer than 2 nodes.
double EdgeDistributionEntropy(const Graph& g);

// sum_u sum_v |deg u - deg v| / (2 n^2 mean_deg). Throws
// std::invalid_argument if the graph has no edges.
double Gini(const Graph& g);

// Mean local clustering; nodes of degree < 2 count as 0.
double AverageClustering(const Graph& g);

// Pearson correlation of endpoint degrees over both orientations of every
// edge. nullopt when the endpoint degree variance is zero. Throws
// std::invalid_argument if the graph has no edges.
std::optional<double> Assortativity(const Graph& g);

struct MetricsReport {
  int64_t n_nodes = 0;
  int64_t n_edges = 0;
  double avg_degree = 0.0;
  double ede = 0.0;
  double gini = 0.0;
  double clustering = 0.0;
  std::optional<double> assortativity;
};

// Throws std::invalid_argument if the graph has no edges.
MetricsReport ComputeMetrics(const Graph& g);

// Flat JSON object with keys avg_degree, ede, gini, clustering,
// assortativity, n_nodes, n_edges; undefined values are null.
std::string MetricsToJson(const MetricsReport& report);

struct RelativeDistances {
  std::optional<double> avg_degree;
  std::optional<double> ede;
  std::optional<double> gini;
  std::optional<double> clustering;
  std::optional<double> assortativity;
};

// |gen - orig| / |orig| per metric; the assortativity denominator is
// max(|orig|, 0.01). Undefined inputs or a zero original give nullopt.
RelativeDistances CompareMetrics(const MetricsReport& original,
                                 const MetricsReport& generated);

}  // namespace lgsg

#endif  // LGSG_METRICS_H_
