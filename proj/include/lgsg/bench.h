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

// End-to-end pipeline and the seeded benchmark grid.

#ifndef LGSG_BENCH_H_
#define LGSG_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lgsg/assembler.h"
#include "lgsg/baselines.h"
#include "lgsg/config.h"
#include "lgsg/diffusion.h"
#include "lgsg/graph.h"
#include "lgsg/metrics.h"

namespace lgsg {

// Everything the generative pipeline learns from one input graph.
struct TrainedPipeline {
  DiffusionModel model;
  std::string checkpoint_hash;  // HexDigest(Fingerprint(SerializeModel(model)))
  std::vector<double> embedding_losses;
  std::vector<double> diffusion_losses;
  size_t num_samples = 0;
};

// Embeds, samples and trains with substreams of config.base_seed. Stage
// errors are rethrown as std::runtime_error prefixed with the stage name.
TrainedPipeline TrainPipeline(const Graph& g, const RunConfig& config);

// Draws ceil(headroom * nu / mean size) subgraphs and merges them down to
// exactly nu nodes. Throws std::runtime_error if fewer than nu nodes were
// generated.
AssembledGraph GenerateNodeAggregation(const DiffusionModel& model, int target_nodes,
                                       double headroom, uint64_t seed);

// Draws as many subgraphs as for `reference_nodes` and merges them with
// threshold matching.
AssembledGraph GenerateThresholdMatching(const DiffusionModel& model, int reference_nodes,
                                         double threshold, double headroom, uint64_t seed);

// Per-cell seed: DeriveSeed(base_seed, {seed_index}).
uint64_t CellSeed(uint64_t base_seed, int seed_index);

struct BenchmarkRecord {
  std::string dataset;
  std::string method;
  double size_target = 0.0;  // multiplier, or delta for lgsg-threshold
  std::string seed;          // seed index, or "mean" / "std" for aggregates
  std::optional<MetricsReport> metrics;  // absent for failed cells
  // Aggregate rows carry real-valued means and deviations here.
  std::optional<double> n_nodes, n_edges, avg_degree, ede, gini, clustering, assortativity;
  RelativeDistances relative;
  std::optional<double> wall_time_s;
  std::string error;          // non-empty for failed cells
  std::string checkpoint_hash;  // lgsg methods only
};

struct BenchmarkResult {
  std::vector<BenchmarkRecord> rows;  // seed rows followed by mean and std rows per group
  bool all_succeeded = true;
  std::string manifest_json;
};

// Worker count from LGSG_WORKERS, else the hardware concurrency (min 1).
int WorkerCount();

// Runs the full grid. Cells run on `workers` threads (WorkerCount() if 0);
// output order does not depend on the worker count.
BenchmarkResult RunBenchmark(const RunConfig& config, int workers = 0);

// Header plus one line per row, columns:
//   dataset, method, size_target, seed, n_nodes, n_edges, avg_degree, ede,
//   gini, clustering, assortativity, rel_avg_degree, rel_ede, rel_gini,
//   rel_clustering, rel_assortativity, wall_time_s
// Undefined values are written as null.
std::string FormatCsv(const std::vector<BenchmarkRecord>& rows);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace lgsg

#endif  // LGSG_BENCH_H_
