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

// lgsg: command-line front end. Every pipeline stage is a subcommand reading
// and writing explicit artifact files.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lgsg/assembler.h"
#include "lgsg/bench.h"
#include "lgsg/binary_io.h"
#include "lgsg/config.h"
#include "lgsg/diffusion.h"
#include "lgsg/embedding.h"
#include "lgsg/graph.h"
#include "lgsg/metrics.h"
#include "lgsg/sampler.h"

namespace {

using nlohmann::ordered_json;

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string FileHash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
  return lgsg::HexDigest(lgsg::Fingerprint(bytes));
}

struct EmbedArgs {
  std::string graph, features, out, id_map;
  bool compact = false;
  lgsg::EmbeddingConfig config;
};

int RunEmbed(const EmbedArgs& a) {
  lgsg::LoadOptions options;
  if (!a.features.empty()) options.features_path = a.features;
  options.compact_ids = a.compact;
  const lgsg::EdgeListFile file = lgsg::LoadEdgeList(a.graph, options);
  if (file.self_loops_dropped || file.duplicates_dropped) {
    std::cerr << "dropped " << file.self_loops_dropped << " self-loops and "
              << file.duplicates_dropped << " duplicate edges\n";
  }
  if (a.compact && !a.id_map.empty()) lgsg::SaveIdMapping(file.original_ids, a.id_map);
  const lgsg::EmbeddingResult result = lgsg::TrainEmbeddings(file.graph, a.config);
  lgsg::SaveEmbeddings(result.embeddings, a.out);

  const auto& c = a.config;
  ordered_json manifest;
  manifest["graph"] = a.graph;
  manifest["features"] = a.features.empty() ? ordered_json(nullptr) : ordered_json(a.features);
  manifest["n_nodes"] = file.graph.num_nodes();
  manifest["n_edges"] = file.graph.num_edges();
  manifest["config"] = {{"dim", c.dim},
                        {"hidden", c.hidden_dim},
                        {"layers", c.num_layers},
                        {"neighbor_samples", c.neighbor_samples},
                        {"negatives", c.negatives},
                        {"learning_rate", c.learning_rate},
                        {"momentum", c.momentum},
                        {"epochs", c.epochs},
                        {"batch_size", c.batch_size},
                        {"walk_length", c.walk_length},
                        {"pairs_per_node", c.pairs_per_node},
                        {"fallback_random_dims", c.fallback_random_dims},
                        {"grad_clip", c.grad_clip},
                        {"seed", c.seed}};
  manifest["final_loss"] = result.losses.empty() ? 0.0 : result.losses.back();
  manifest["embeddings_hash"] = FileHash(a.out);
  WriteText(a.out + ".json", manifest.dump(2) + "\n");
  std::cout << "wrote " << a.out << " (" << result.embeddings.num_nodes() << " x "
            << result.embeddings.dim() << ")\n";
  return 0;
}

void AddEmbeddingFlags(CLI::App* cmd, lgsg::EmbeddingConfig& c) {
  cmd->add_option("--dim", c.dim, "embedding width")->capture_default_str();
  cmd->add_option("--hidden", c.hidden_dim, "hidden layer width")->capture_default_str();
  cmd->add_option("--layers", c.num_layers, "aggregation layers")->capture_default_str();
  cmd->add_option("--neighbor-samples", c.neighbor_samples)->capture_default_str();
  cmd->add_option("--negatives", c.negatives)->capture_default_str();
  cmd->add_option("--lr", c.learning_rate)->capture_default_str();
  cmd->add_option("--momentum", c.momentum)->capture_default_str();
  cmd->add_option("--epochs", c.epochs)->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size)->capture_default_str();
  cmd->add_option("--walk-length", c.walk_length)->capture_default_str();
  cmd->add_option("--pairs-per-node", c.pairs_per_node)->capture_default_str();
  cmd->add_option("--fallback-random-dims", c.fallback_random_dims)->capture_default_str();
  cmd->add_option("--grad-clip", c.grad_clip, "global gradient norm; <= 0 disables")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed)->capture_default_str();
}

void AddDiffusionFlags(CLI::App* cmd, lgsg::DiffusionConfig& c, std::string& optimizer) {
  cmd->add_option("--steps", c.num_steps, "diffusion timesteps T")->capture_default_str();
  cmd->add_option("--hidden", c.hidden)->capture_default_str();
  cmd->add_option("--layers", c.layers)->capture_default_str();
  cmd->add_option("--train-steps", c.train_steps)->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size)->capture_default_str();
  cmd->add_option("--lr", c.learning_rate)->capture_default_str();
  cmd->add_option("--momentum", c.momentum)->capture_default_str();
  cmd->add_option("--optimizer", optimizer)->check(CLI::IsMember({"sgd", "adam"}))
      ->capture_default_str();
  cmd->add_option("--edge-weight", c.edge_weight)->capture_default_str();
  cmd->add_option("--grad-clip", c.grad_clip)->capture_default_str();
  cmd->add_option("--standardize", c.standardize)->capture_default_str();
  cmd->add_option("--seed", c.seed)->capture_default_str();
}

ordered_json MembersJson(const lgsg::AssembledGraph& g) {
  ordered_json j = ordered_json::array();
  for (const auto& m : g.members) j.push_back(m);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent graph generation by subgraph diffusion and assembly"};
  app.require_subcommand(1);

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "train node embeddings");
  embed_cmd->add_option("--graph", embed.graph, "edge-list file")->required();
  embed_cmd->add_option("--features", embed.features, "node feature CSV");
  embed_cmd->add_flag("--compact-ids", embed.compact, "re-index sparse node ids densely");
  embed_cmd->add_option("--id-map", embed.id_map, "write the id mapping here");
  embed_cmd->add_option("--out", embed.out, "embedding matrix file")->required();
  AddEmbeddingFlags(embed_cmd, embed.config);

  std::string sample_graph, sample_emb, sample_out;
  int walks = 8, capacity = 12;
  uint64_t sample_seed = 0;
  bool compact_sample = false;
  auto* sample_cmd = app.add_subcommand("sample", "build the random-walk subgraph dataset");
  sample_cmd->add_option("--graph", sample_graph)->required();
  sample_cmd->add_flag("--compact-ids", compact_sample);
  sample_cmd->add_option("--embeddings", sample_emb)->required();
  sample_cmd->add_option("--out", sample_out)->required();
  sample_cmd->add_option("--walks-per-node", walks)->capture_default_str();
  sample_cmd->add_option("--capacity", capacity)->capture_default_str();
  sample_cmd->add_option("--seed", sample_seed)->capture_default_str();

  std::string train_samples, train_out, optimizer = "adam", loss_log;
  lgsg::DiffusionConfig diffusion;
  auto* train_cmd = app.add_subcommand("train", "train the subgraph diffusion model");
  train_cmd->add_option("--samples", train_samples)->required();
  train_cmd->add_option("--out", train_out)->required();
  train_cmd->add_option("--loss-log", loss_log, "write per-step losses here");
  AddDiffusionFlags(train_cmd, diffusion, optimizer);

  std::string gen_model, gen_out;
  int gen_count = 0;
  uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("generate", "sample subgraphs from a trained model");
  gen_cmd->add_option("--model", gen_model)->required();
  gen_cmd->add_option("--count", gen_count)->required();
  gen_cmd->add_option("--seed", gen_seed)->capture_default_str();
  gen_cmd->add_option("--out", gen_out)->required();

  std::string asm_samples, asm_out, asm_members, asm_method = "node-agg";
  std::optional<int> asm_nodes;
  std::optional<double> asm_threshold;
  auto* asm_cmd = app.add_subcommand("assemble", "merge generated subgraphs into one graph");
  asm_cmd->add_option("--samples", asm_samples)->required();
  asm_cmd->add_option("--method", asm_method)->check(CLI::IsMember({"node-agg", "threshold"}))
      ->capture_default_str();
  asm_cmd->add_option("--nodes", asm_nodes, "target node count (node-agg)");
  asm_cmd->add_option("--threshold", asm_threshold, "distance threshold (threshold)");
  asm_cmd->add_option("--out", asm_out, "edge-list output")->required();
  asm_cmd->add_option("--members", asm_members, "members JSON output");

  std::string metrics_graph, metrics_ref;
  auto* metrics_cmd = app.add_subcommand("metrics", "print structural metrics as JSON");
  metrics_cmd->add_option("--graph", metrics_graph)->required();
  metrics_cmd->add_option("--reference", metrics_ref, "also print relative distances");

  std::string bench_config, bench_out;
  std::vector<std::string> overrides;
  int bench_workers = 0;
  auto* bench_cmd = app.add_subcommand("benchmark", "run the seeded benchmark grid");
  bench_cmd->add_option("--config", bench_config)->required();
  bench_cmd->add_option("--out", bench_out, "CSV output")->required();
  bench_cmd->add_option("--set", overrides, "override section.key=value");
  bench_cmd->add_option("--workers", bench_workers, "worker threads (default LGSG_WORKERS)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*embed_cmd) return RunEmbed(embed);

    if (*sample_cmd) {
      lgsg::LoadOptions options;
      options.compact_ids = compact_sample;
      const auto g = lgsg::LoadEdgeList(sample_graph, options).graph;
      const auto z = lgsg::LoadEmbeddings(sample_emb);
      const auto samples = lgsg::BuildSubgraphDataset(g, z, walks, capacity, sample_seed);
      lgsg::SaveSamples(samples, sample_out);
      std::cout << "wrote " << samples.size() << " samples to " << sample_out << "\n";
      return 0;
    }

    if (*train_cmd) {
      diffusion.optimizer =
          optimizer == "adam" ? lgsg::Optimizer::kAdam : lgsg::Optimizer::kSgdMomentum;
      const auto samples = lgsg::LoadSamples(train_samples);
      const auto result = lgsg::TrainDiffusion(samples, diffusion);
      lgsg::SaveModel(result.model, train_out);
      if (!loss_log.empty()) {
        std::string text;
        for (double l : result.losses) text += lgsg::FormatDouble(l) + "\n";
        WriteText(loss_log, text);
      }
      std::cout << "final loss "
                << (result.losses.empty() ? 0.0 : result.losses.back()) << ", wrote "
                << train_out << "\n";
      return 0;
    }

    if (*gen_cmd) {
      const auto model = lgsg::LoadModel(gen_model);
      const auto generated = lgsg::SampleSubgraphs(model, gen_count, gen_seed);
      lgsg::SaveSamples(lgsg::ToSamples(generated, model.capacity()), gen_out);
      std::cout << "wrote " << generated.size() << " subgraphs to " << gen_out << "\n";
      return 0;
    }

    if (*asm_cmd) {
      lgsg::AssemblyInput input(lgsg::FromSamples(lgsg::LoadSamples(asm_samples)));
      lgsg::AssembledGraph out;
      if (asm_method == "node-agg") {
        if (!asm_nodes) throw std::invalid_argument("--nodes is required for node-agg");
        out = lgsg::NodeAggregation(input, *asm_nodes);
      } else {
        if (!asm_threshold) throw std::invalid_argument("--threshold is required");
        out = lgsg::ThresholdMatching(input, *asm_threshold);
      }
      lgsg::SaveEdgeList(out.graph, asm_out);
      if (!asm_members.empty()) WriteText(asm_members, MembersJson(out).dump() + "\n");
      std::cout << "assembled " << out.graph.num_nodes() << " nodes, "
                << out.graph.num_edges() << " edges\n";
      return 0;
    }

    if (*metrics_cmd) {
      const auto g = lgsg::LoadEdgeList(metrics_graph).graph;
      const auto report = lgsg::ComputeMetrics(g);
      if (metrics_ref.empty()) {
        std::cout << lgsg::MetricsToJson(report) << "\n";
        return 0;
      }
      const auto ref = lgsg::ComputeMetrics(lgsg::LoadEdgeList(metrics_ref).graph);
      const auto rel = lgsg::CompareMetrics(ref, report);
      auto opt = [](const std::optional<double>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
      };
      ordered_json j;
      j["metrics"] = ordered_json::parse(lgsg::MetricsToJson(report));
      j["reference"] = ordered_json::parse(lgsg::MetricsToJson(ref));
      j["relative"] = {{"avg_degree", opt(rel.avg_degree)},
                       {"ede", opt(rel.ede)},
                       {"gini", opt(rel.gini)},
                       {"clustering", opt(rel.clustering)},
                       {"assortativity", opt(rel.assortativity)}};
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (*bench_cmd) {
      lgsg::RunConfig config = lgsg::LoadRunConfig(bench_config);
      for (const auto& o : overrides) lgsg::ApplyOverride(config, o);
      const auto result = lgsg::RunBenchmark(config, bench_workers);
      WriteText(bench_out, lgsg::FormatCsv(result.rows));
      WriteText(bench_out + ".manifest.json", result.manifest_json + "\n");
      for (const auto& r : result.rows) {
        if (!r.error.empty()) {
          std::cerr << "FAILED " << r.dataset << " " << r.method << " "
                    << lgsg::FormatDouble(r.size_target) << " seed " << r.seed << ": "
                    << r.error << "\n";
        }
      }
      return result.all_succeeded ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
