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

#include "lgsg/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace lgsg {
namespace {

std::string Trim(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

[[noreturn]] void Bad(const std::string& name, const std::string& value, const char* want) {
  throw std::invalid_argument("config " + name + ": expected " + want + ", got '" + value + "'");
}

template <typename T>
T ParseNumber(const std::string& name, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) Bad(name, value, "a number");
  return out;
}

bool ParseBool(const std::string& name, const std::string& value) {
  const std::string v = boost::algorithm::to_lower_copy(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  Bad(name, value, "a boolean");
}

std::vector<std::string> SplitList(const std::string& value) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, value, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    std::string t = Trim(p);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> ParseDoubles(const std::string& name, const std::string& value) {
  std::vector<double> out;
  for (const auto& p : SplitList(value)) {
    if (p == "inf") {
      out.push_back(std::numeric_limits<double>::infinity());
    } else {
      out.push_back(ParseNumber<double>(name, p));
    }
  }
  return out;
}

std::filesystem::path Resolve(const std::string& value, const std::filesystem::path& base) {
  if (value.empty()) return {};
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

bool IsKnownMethod(const std::string& method) {
  if (method.starts_with("external:")) return method.size() > 9;
  return method == "lgsg-node-agg" || method == "lgsg-threshold" || method == "er" ||
         method == "ba" || method == "kronecker";
}

void RunConfig::Validate() const {
  if (datasets.empty()) throw std::invalid_argument("config: run.datasets is empty");
  if (methods.empty()) throw std::invalid_argument("config: run.methods is empty");
  if (seeds < 1) throw std::invalid_argument("config: run.seeds must be >= 1");
  bool needs_sizes = false;
  for (const auto& m : methods) {
    if (!IsKnownMethod(m)) throw std::invalid_argument("config: unknown method '" + m + "'");
    if (m == "lgsg-threshold") {
      if (thresholds.empty()) {
        throw std::invalid_argument("config: lgsg-threshold needs run.thresholds");
      }
    } else {
      needs_sizes = true;
    }
    if (m.starts_with("external:") && !external.contains(m.substr(9))) {
      throw std::invalid_argument("config: no [external] pattern for '" + m + "'");
    }
  }
  if (needs_sizes && sizes.empty()) throw std::invalid_argument("config: run.sizes is empty");
  for (double s : sizes) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("config: size multipliers must be positive");
    }
  }
  if (sampler.capacity < 2 || sampler.walks_per_node < 1) {
    throw std::invalid_argument("config: sampler.capacity >= 2 and walks_per_node >= 1");
  }
  if (!(assembler.headroom >= 1.0)) {
    throw std::invalid_argument("config: assembler.headroom must be >= 1");
  }
}

void SetConfigValue(RunConfig& c, const std::string& section, const std::string& key,
                    const std::string& raw, const std::filesystem::path& base_dir) {
  const std::string name = section + "." + key;
  const std::string value = Trim(raw.substr(0, raw.find(';')));
  auto as_int = [&] { return ParseNumber<int>(name, value); };
  auto as_double = [&] { return ParseNumber<double>(name, value); };

  if (section == "run") {
    if (key == "datasets") {
      c.datasets.clear();
      for (const auto& p : SplitList(value)) c.datasets.push_back(Resolve(p, base_dir));
    } else if (key == "methods") {
      c.methods = SplitList(value);
    } else if (key == "sizes") {
      c.sizes = ParseDoubles(name, value);
    } else if (key == "thresholds") {
      c.thresholds = ParseDoubles(name, value);
    } else if (key == "seeds") {
      c.seeds = as_int();
    } else if (key == "base_seed") {
      c.base_seed = ParseNumber<uint64_t>(name, value);
    } else if (key == "timing") {
      c.timing = ParseBool(name, value);
    } else if (key == "output_dir") {
      c.output_dir = Resolve(value, base_dir);
    } else if (key == "cache_dir") {
      c.cache_dir = Resolve(value, base_dir);
    } else {
      throw std::invalid_argument("config: unknown key " + name);
    }
  } else if (section == "embedding") {
    auto& e = c.embedding;
    if (key == "dim") e.dim = as_int();
    else if (key == "hidden") e.hidden_dim = as_int();
    else if (key == "layers") e.num_layers = as_int();
    else if (key == "neighbor_samples") e.neighbor_samples = as_int();
    else if (key == "negatives") e.negatives = as_int();
    else if (key == "learning_rate") e.learning_rate = as_double();
    else if (key == "momentum") e.momentum = as_double();
    else if (key == "epochs") e.epochs = as_int();
    else if (key == "batch_size") e.batch_size = as_int();
    else if (key == "walk_length") e.walk_length = as_int();
    else if (key == "pairs_per_node") e.pairs_per_node = as_int();
    else if (key == "fallback_random_dims") e.fallback_random_dims = as_int();
    else if (key == "grad_clip") e.grad_clip = as_double();
    else throw std::invalid_argument("config: unknown key " + name);
  } else if (section == "sampler") {
    if (key == "walks_per_node") c.sampler.walks_per_node = as_int();
    else if (key == "capacity") c.sampler.capacity = as_int();
    else throw std::invalid_argument("config: unknown key " + name);
  } else if (section == "diffusion") {
    auto& d = c.diffusion;
    if (key == "steps") d.num_steps = as_int();
    else if (key == "hidden") d.hidden = as_int();
    else if (key == "layers") d.layers = as_int();
    else if (key == "train_steps") d.train_steps = as_int();
    else if (key == "batch_size") d.batch_size = as_int();
    else if (key == "learning_rate") d.learning_rate = as_double();
    else if (key == "momentum") d.momentum = as_double();
    else if (key == "edge_weight") d.edge_weight = as_double();
    else if (key == "grad_clip") d.grad_clip = as_double();
    else if (key == "standardize") d.standardize = ParseBool(name, value);
    else if (key == "optimizer") {
      if (value == "sgd") d.optimizer = Optimizer::kSgdMomentum;
      else if (value == "adam") d.optimizer = Optimizer::kAdam;
      else Bad(name, value, "sgd or adam");
    } else {
      throw std::invalid_argument("config: unknown key " + name);
    }
  } else if (section == "assembler") {
    if (key == "headroom") c.assembler.headroom = as_double();
    else throw std::invalid_argument("config: unknown key " + name);
  } else if (section == "kronfit") {
    auto& k = c.kronfit;
    if (key == "iterations") k.iterations = as_int();
    else if (key == "swaps_per_step") k.swaps_per_step = as_int();
    else if (key == "learning_rate") k.learning_rate = as_double();
    else if (key == "max_step") k.max_step = as_double();
    else throw std::invalid_argument("config: unknown key " + name);
  } else if (section == "external") {
    c.external[key] = value;
  } else {
    throw std::invalid_argument("config: unknown section [" + section + "]");
  }
}

void ApplyOverride(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw std::invalid_argument("override must look like section.key=value: " + assignment);
  }
  SetConfigValue(config, Trim(assignment.substr(0, dot)),
                 Trim(assignment.substr(dot + 1, eq - dot - 1)), assignment.substr(eq + 1),
                 std::filesystem::current_path());
}

RunConfig ParseRunConfig(const std::string& text, const std::filesystem::path& base_dir) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  RunConfig config;
  for (const auto& [section, keys] : tree) {
    if (keys.empty()) {
      throw std::invalid_argument("config: key '" + section + "' outside a section");
    }
    for (const auto& [key, node] : keys) {
      SetConfigValue(config, section, key, node.data(), base_dir);
    }
  }
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseRunConfig(buffer.str(), path.parent_path());
}

std::string ModelSettingsText(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  const auto& e = c.embedding;
  const auto& d = c.diffusion;
  out << "run.base_seed=" << c.base_seed << "\n"
      << "embedding=" << e.dim << "," << e.hidden_dim << "," << e.num_layers << ","
      << e.neighbor_samples << "," << e.negatives << "," << e.learning_rate << ","
      << e.momentum << "," << e.epochs << "," << e.batch_size << "," << e.walk_length << ","
      << e.pairs_per_node << "," << e.fallback_random_dims << "," << e.grad_clip << "\n"
      << "sampler=" << c.sampler.walks_per_node << "," << c.sampler.capacity << "\n"
      << "diffusion=" << d.num_steps << "," << d.hidden << "," << d.layers << ","
      << d.train_steps << "," << d.batch_size << "," << d.learning_rate << "," << d.momentum
      << "," << static_cast<int>(d.optimizer) << "," << d.edge_weight << "," << d.grad_clip
      << "," << d.standardize << "\n";
  return out.str();
}

}  // namespace lgsg
