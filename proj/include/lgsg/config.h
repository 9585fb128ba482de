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

// Benchmark run configuration.
//
// INI layout (all keys optional except run.datasets and run.methods):
//
//   [run]
//   datasets   = a.edges, b.edges      ; relative to the config file
//   methods    = lgsg-node-agg, lgsg-threshold, er, ba, kronecker, external:x
//   sizes      = 1.0, 1.5, 2.0         ; multipliers of the input node count
//   thresholds = 0.5, 1.0              ; delta sweep for lgsg-threshold
//   seeds      = 5
//   base_seed  = 0
//   timing     = false                 ; record wall_time_s
//   output_dir =                       ; write every emitted graph here
//   cache_dir  =                       ; persist trained models here
//   [embedding] dim, hidden, layers, neighbor_samples, negatives,
//               learning_rate, momentum, epochs, batch_size, walk_length,
//               pairs_per_node, fallback_random_dims, grad_clip
//   [sampler]   walks_per_node, capacity
//   [diffusion] steps, hidden, layers, train_steps, batch_size,
//               learning_rate, momentum, optimizer (sgd|adam), edge_weight,
//               grad_clip, standardize
//   [assembler] headroom
//   [kronfit]   iterations, swaps_per_step, learning_rate, max_step
//   [external]  <name> = pattern with {dataset}, {size} and {seed}

#ifndef LGSG_CONFIG_H_
#define LGSG_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lgsg/baselines.h"
#include "lgsg/diffusion.h"
#include "lgsg/embedding.h"

namespace lgsg {

struct SamplerConfig {
  int walks_per_node = 8;  // l
  int capacity = 12;       // m
};

struct AssemblerConfig {
  double headroom = 1.5;
};

struct RunConfig {
  std::vector<std::filesystem::path> datasets;
  std::vector<std::string> methods;
  std::vector<double> sizes{1.0, 1.5, 2.0};
  std::vector<double> thresholds;
  int seeds = 5;
  uint64_t base_seed = 0;
  bool timing = false;
  std::filesystem::path output_dir;
  std::filesystem::path cache_dir;
  std::map<std::string, std::string> external;

  EmbeddingConfig embedding;
  SamplerConfig sampler;
  DiffusionConfig diffusion;
  AssemblerConfig assembler;
  KronFitConfig kronfit;

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;
};

bool IsKnownMethod(const std::string& method);

// Sets `section.key` from its text form. Relative paths are resolved against
// `base_dir`. Throws std::invalid_argument for unknown keys or bad values.
void SetConfigValue(RunConfig& config, const std::string& section, const std::string& key,
                    const std::string& value, const std::filesystem::path& base_dir = {});

// Applies "section.key=value".
void ApplyOverride(RunConfig& config, const std::string& assignment);

RunConfig ParseRunConfig(const std::string& text, const std::filesystem::path& base_dir = {});
// Throws std::runtime_error if the file cannot be read.
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Canonical "section.key=value" lines for the settings that affect a trained
// model; used as a cache key.
std::string ModelSettingsText(const RunConfig& config);

}  // namespace lgsg

#endif  // LGSG_CONFIG_H_
