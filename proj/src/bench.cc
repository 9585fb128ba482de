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

#include "lgsg/bench.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "lgsg/binary_io.h"
#include "lgsg/embedding.h"
#include "lgsg/random.h"
#include "lgsg/sampler.h"

namespace lgsg {
namespace {

// Substream tags under the base seed.
enum : uint64_t { kEmbedTag = 1, kSampleTag = 2, kTrainTag = 3, kKronFitTag = 4 };

uint64_t TextFingerprint(const std::string& text) {
  return Fingerprint({text.data(), text.size()});
}

template <typename F>
auto Stage(const char* name, F&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

struct DatasetState {
  std::string name;
  Graph graph;
  std::optional<MetricsReport> original;
  std::string error;  // fatal for every cell of the dataset
  std::optional<TrainedPipeline> pipeline;
  std::string pipeline_error;
  std::string model_key;
  std::optional<KronFitResult> kronfit;
  std::string kronfit_error;
};

struct Cell {
  size_t dataset = 0;
  std::string method;
  size_t size_index = 0;
  double size_target = 0.0;
  int seed = 0;
};

std::string SizeLabel(double v) {
  std::string s = FormatDouble(v);
  return s;
}

std::string Substitute(std::string pattern, const std::string& key, const std::string& value) {
  for (size_t pos = pattern.find(key); pos != std::string::npos;
       pos = pattern.find(key, pos + value.size())) {
    pattern.replace(pos, key.size(), value);
  }
  return pattern;
}

Graph GenerateCell(const RunConfig& config, const DatasetState& ds, const Cell& cell) {
  const Graph& g = ds.graph;
  const uint64_t seed =
      DeriveSeed(CellSeed(config.base_seed, cell.seed),
                 {TextFingerprint(cell.method), static_cast<uint64_t>(cell.size_index)});
  Rng rng(seed);
  const bool threshold = cell.method == "lgsg-threshold";
  const auto n_out = static_cast<NodeId>(
      threshold ? g.num_nodes()
                : std::max<long>(1, std::lround(cell.size_target * g.num_nodes())));

  if (cell.method == "er") return ErdosRenyiFit(g, n_out, rng);
  if (cell.method == "ba") return BarabasiAlbertFit(g, n_out, rng);
  if (cell.method == "kronecker") {
    if (!ds.kronfit) throw std::runtime_error(ds.kronfit_error);
    KroneckerInitiator init = ds.kronfit->initiator;
    init.k = std::max(1, static_cast<int>(std::bit_width(static_cast<uint32_t>(n_out - 1))));
    return KroneckerGenerate(init, rng, n_out);
  }
  if (cell.method.starts_with("lgsg-")) {
    if (!ds.pipeline) throw std::runtime_error(ds.pipeline_error);
    const auto& model = ds.pipeline->model;
    if (threshold) {
      return Stage("assemble", [&] {
        return GenerateThresholdMatching(model, n_out, cell.size_target,
                                         config.assembler.headroom, seed).graph;
      });
    }
    return Stage("assemble", [&] {
      return GenerateNodeAggregation(model, n_out, config.assembler.headroom, seed).graph;
    });
  }
  // external:<name>
  std::string path = config.external.at(cell.method.substr(9));
  path = Substitute(path, "{dataset}", ds.name);
  path = Substitute(path, "{size}", SizeLabel(cell.size_target));
  path = Substitute(path, "{seed}", std::to_string(cell.seed));
  return Stage("load", [&] { return LoadEdgeList(path).graph; });
}

BenchmarkRecord RunCell(const RunConfig& config, const DatasetState& ds, const Cell& cell) {
  BenchmarkRecord r;
  r.dataset = ds.name;
  r.method = cell.method;
  r.size_target = cell.size_target;
  r.seed = std::to_string(cell.seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!ds.error.empty()) throw std::runtime_error(ds.error);
    const Graph out = GenerateCell(config, ds, cell);
    const MetricsReport m = Stage("metrics", [&] { return ComputeMetrics(out); });
    r.metrics = m;
    r.n_nodes = static_cast<double>(m.n_nodes);
    r.n_edges = static_cast<double>(m.n_edges);
    r.avg_degree = m.avg_degree;
    r.ede = m.ede;
    r.gini = m.gini;
    r.clustering = m.clustering;
    r.assortativity = m.assortativity;
    r.relative = CompareMetrics(*ds.original, m);
    if (ds.pipeline && cell.method.starts_with("lgsg-")) {
      r.checkpoint_hash = ds.pipeline->checkpoint_hash;
    }
    if (!config.output_dir.empty()) {
      std::string method = cell.method;
      std::replace(method.begin(), method.end(), ':', '_');
      SaveEdgeList(out, config.output_dir / (ds.name + "__" + method + "__" +
                                             SizeLabel(cell.size_target) + "__" +
                                             std::to_string(cell.seed) + ".edges"));
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  if (config.timing) {
    r.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

// Mean and sample standard deviation over the defined values; nullopt when
// none are defined.
std::pair<std::optional<double>, std::optional<double>> Summarize(
    const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  int count = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++count;
    }
  }
  if (count == 0) return {std::nullopt, std::nullopt};
  const double mean = sum / count;
  double sq = 0.0;
  for (const auto& v : values) {
    if (v) sq += (*v - mean) * (*v - mean);
  }
  return {mean, count > 1 ? std::sqrt(sq / (count - 1)) : 0.0};
}

std::vector<BenchmarkRecord> Aggregate(const std::vector<BenchmarkRecord>& group) {
  BenchmarkRecord mean = group.front();
  mean.seed = "mean";
  mean.metrics.reset();
  mean.error.clear();
  BenchmarkRecord sd = mean;
  sd.seed = "std";
  using Field = std::optional<double> BenchmarkRecord::*;
  for (Field f : {&BenchmarkRecord::n_nodes, &BenchmarkRecord::n_edges,
                  &BenchmarkRecord::avg_degree, &BenchmarkRecord::ede, &BenchmarkRecord::gini,
                  &BenchmarkRecord::clustering, &BenchmarkRecord::assortativity,
                  &BenchmarkRecord::wall_time_s}) {
    std::vector<std::optional<double>> values;
    for (const auto& r : group) values.push_back(r.error.empty() ? r.*f : std::nullopt);
    std::tie(mean.*f, sd.*f) = Summarize(values);
  }
  using RelField = std::optional<double> RelativeDistances::*;
  for (RelField f : {&RelativeDistances::avg_degree, &RelativeDistances::ede,
                     &RelativeDistances::gini, &RelativeDistances::clustering,
                     &RelativeDistances::assortativity}) {
    std::vector<std::optional<double>> values;
    for (const auto& r : group) values.push_back(r.relative.*f);
    std::tie(mean.relative.*f, sd.relative.*f) = Summarize(values);
  }
  return {mean, sd};
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

uint64_t CellSeed(uint64_t base_seed, int seed_index) {
  return DeriveSeed(base_seed, {static_cast<uint64_t>(seed_index)});
}

TrainedPipeline TrainPipeline(const Graph& g, const RunConfig& config) {
  TrainedPipeline out;
  EmbeddingConfig ec = config.embedding;
  ec.seed = DeriveSeed(config.base_seed, {kEmbedTag});
  EmbeddingResult emb = Stage("embed", [&] { return TrainEmbeddings(g, ec); });
  out.embedding_losses = std::move(emb.losses);

  const auto samples = Stage("sample", [&] {
    return BuildSubgraphDataset(g, emb.embeddings, config.sampler.walks_per_node,
                                config.sampler.capacity,
                                DeriveSeed(config.base_seed, {kSampleTag}));
  });
  out.num_samples = samples.size();

  DiffusionConfig dc = config.diffusion;
  dc.seed = DeriveSeed(config.base_seed, {kTrainTag});
  DiffusionTrainResult trained = Stage("train", [&] { return TrainDiffusion(samples, dc); });
  out.diffusion_losses = std::move(trained.losses);
  out.model = std::move(trained.model);
  const auto bytes = SerializeModel(out.model);
  out.checkpoint_hash = HexDigest(Fingerprint(bytes));
  return out;
}

AssembledGraph GenerateNodeAggregation(const DiffusionModel& model, int target_nodes,
                                       double headroom, uint64_t seed) {
  const int count = SubgraphsForTarget(target_nodes, MeanSampleSize(model), headroom);
  AssemblyInput input(SampleSubgraphs(model, count, seed));
  if (input.total_nodes() < target_nodes) {
    throw std::runtime_error("generated " + std::to_string(input.total_nodes()) +
                             " nodes, fewer than the target " + std::to_string(target_nodes));
  }
  return NodeAggregation(input, target_nodes);
}

AssembledGraph GenerateThresholdMatching(const DiffusionModel& model, int reference_nodes,
                                         double threshold, double headroom, uint64_t seed) {
  const int count = SubgraphsForTarget(reference_nodes, MeanSampleSize(model), headroom);
  AssemblyInput input(SampleSubgraphs(model, count, seed));
  return ThresholdMatching(input, threshold);
}

int WorkerCount() {
  if (const char* env = std::getenv("LGSG_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BenchmarkResult RunBenchmark(const RunConfig& config, int workers) {
  config.Validate();
  if (workers <= 0) workers = WorkerCount();
  const bool wants_lgsg = std::any_of(config.methods.begin(), config.methods.end(),
                                      [](const auto& m) { return m.starts_with("lgsg-"); });
  const bool wants_kron = std::find(config.methods.begin(), config.methods.end(),
                                    "kronecker") != config.methods.end();
  if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);
  if (!config.cache_dir.empty()) std::filesystem::create_directories(config.cache_dir);

  nlohmann::ordered_json manifest;
  manifest["base_seed"] = config.base_seed;
  manifest["seeds"] = config.seeds;
  manifest["methods"] = config.methods;

  std::vector<DatasetState> datasets;
  for (const auto& path : config.datasets) {
    DatasetState ds;
    ds.name = path.stem().string();
    nlohmann::ordered_json entry;
    entry["path"] = path.string();
    try {
      ds.graph = Stage("load", [&] { return LoadEdgeList(path).graph; });
      ds.original = Stage("metrics", [&] { return ComputeMetrics(ds.graph); });
      entry["metrics"] = nlohmann::ordered_json::parse(MetricsToJson(*ds.original));
    } catch (const std::exception& e) {
      ds.error = e.what();
    }
    if (ds.error.empty()) {
      if (wants_lgsg) {
        ds.model_key = HexDigest(TextFingerprint(FormatEdgeList(ds.graph) + "\n" +
                                                 ModelSettingsText(config)));
        const auto cached = config.cache_dir.empty()
                                ? std::filesystem::path()
                                : config.cache_dir / (ds.model_key + ".lgsgmdl");
        try {
          if (!cached.empty() && std::filesystem::exists(cached)) {
            TrainedPipeline p;
            p.model = LoadModel(cached);
            p.checkpoint_hash = HexDigest(Fingerprint(SerializeModel(p.model)));
            ds.pipeline = std::move(p);
          } else {
            ds.pipeline = TrainPipeline(ds.graph, config);
            if (!cached.empty()) SaveModel(ds.pipeline->model, cached);
          }
          entry["model_key"] = ds.model_key;
          entry["checkpoint_hash"] = ds.pipeline->checkpoint_hash;
        } catch (const std::exception& e) {
          ds.pipeline_error = e.what();
          entry["model_error"] = ds.pipeline_error;
        }
      }
      try {
        entry["er_p"] = FitEdgeProbability(ds.graph);
        entry["ba_attachment"] = FitAttachment(ds.graph);
      } catch (const std::exception& e) {
        entry["fit_error"] = e.what();
      }
      if (wants_kron) {
        try {
          Rng rng = MakeRng(config.base_seed, {kKronFitTag});
          ds.kronfit = Stage("kronfit", [&] { return KronFit(ds.graph, config.kronfit, rng); });
          const auto& t = ds.kronfit->initiator.theta;
          entry["kronecker"] = {{"theta", {{t[0][0], t[0][1]}, {t[1][0], t[1][1]}}},
                                {"k", ds.kronfit->initiator.k},
                                {"initial_log_likelihood", ds.kronfit->initial_log_likelihood},
                                {"final_log_likelihood", ds.kronfit->final_log_likelihood}};
        } catch (const std::exception& e) {
          ds.kronfit_error = e.what();
          entry["kronfit_error"] = ds.kronfit_error;
        }
      }
    } else {
      entry["error"] = ds.error;
    }
    manifest["datasets"][ds.name] = entry;
    datasets.push_back(std::move(ds));
  }

  std::vector<Cell> cells;
  std::vector<size_t> group_start;
  for (size_t d = 0; d < datasets.size(); ++d) {
    for (const auto& method : config.methods) {
      const auto& targets = method == "lgsg-threshold" ? config.thresholds : config.sizes;
      for (size_t s = 0; s < targets.size(); ++s) {
        group_start.push_back(cells.size());
        for (int seed = 0; seed < config.seeds; ++seed) {
          cells.push_back({d, method, s, targets[s], seed});
        }
      }
    }
  }
  if (cells.empty()) throw std::invalid_argument("empty benchmark grid");

  std::vector<BenchmarkRecord> records(cells.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) {
      records[i] = RunCell(config, datasets[cells[i].dataset], cells[i]);
    }
  };
  const int threads = std::min<int>(workers, static_cast<int>(cells.size()));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  BenchmarkResult result;
  group_start.push_back(cells.size());
  for (size_t gi = 0; gi + 1 < group_start.size(); ++gi) {
    std::vector<BenchmarkRecord> group(records.begin() + group_start[gi],
                                       records.begin() + group_start[gi + 1]);
    for (const auto& r : group) {
      if (!r.error.empty()) result.all_succeeded = false;
      result.rows.push_back(r);
    }
    for (auto& r : Aggregate(group)) result.rows.push_back(std::move(r));
  }
  result.manifest_json = manifest.dump(2);
  return result;
}

std::string FormatCsv(const std::vector<BenchmarkRecord>& rows) {
  std::string out =
      "dataset,method,size_target,seed,n_nodes,n_edges,avg_degree,ede,gini,clustering,"
      "assortativity,rel_avg_degree,rel_ede,rel_gini,rel_clustering,rel_assortativity,"
      "wall_time_s\n";
  auto put = [&out](const std::optional<double>& v) {
    out += ',';
    out += v ? FormatDouble(*v) : "null";
  };
  for (const auto& r : rows) {
    out += r.dataset + "," + r.method + "," + FormatDouble(r.size_target) + "," + r.seed;
    for (const auto& v : {r.n_nodes, r.n_edges, r.avg_degree, r.ede, r.gini, r.clustering,
                          r.assortativity, r.relative.avg_degree, r.relative.ede,
                          r.relative.gini, r.relative.clustering, r.relative.assortativity,
                          r.wall_time_s}) {
      put(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace lgsg
