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

#include "lgsg/graph.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

#include "lgsg/disjoint_set.h"

namespace lgsg {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitWhitespace(std::string_view s) {
  std::vector<std::string_view> tokens;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) tokens.push_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

int64_t ParseId(std::string_view token, int line_number) {
  int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value < 0) {
    throw std::runtime_error("line " + std::to_string(line_number) +
                             ": expected a non-negative integer, got '" +
                             std::string(token) + "'");
  }
  return value;
}

// Recognizes "# nodes: N" (colon optional).
std::optional<int64_t> ParseNodeHeader(std::string_view comment) {
  comment = Trim(comment.substr(1));
  constexpr std::string_view kKey = "nodes";
  if (comment.substr(0, kKey.size()) != kKey) return std::nullopt;
  comment = Trim(comment.substr(kKey.size()));
  if (!comment.empty() && comment.front() == ':') comment = Trim(comment.substr(1));
  int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(comment.data(), comment.data() + comment.size(), value);
  if (ec != std::errc() || ptr != comment.data() + comment.size() || value < 0) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

Graph::Graph(NodeId num_nodes, std::span<const Edge> edges)
    : num_nodes_(num_nodes) {
  if (num_nodes < 0) throw std::invalid_argument("negative node count");
  edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes) {
      throw std::out_of_range("edge endpoint outside node range");
    }
    if (e.u == e.v) continue;
    edges_.emplace_back(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  offsets_.assign(static_cast<size_t>(num_nodes) + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[cursor[e.u]++] = e.v;
    adjacency_[cursor[e.v]++] = e.u;
  }
  for (NodeId v = 0; v < num_nodes; ++v) {
    std::sort(adjacency_.begin() + offsets_[v],
              adjacency_.begin() + offsets_[v + 1]);
  }
}

std::vector<int> Graph::Degrees() const {
  std::vector<int> degrees(num_nodes_);
  for (NodeId v = 0; v < num_nodes_; ++v) degrees[v] = Degree(v);
  return degrees;
}

bool Graph::HasEdge(NodeId u, NodeId v) const {
  if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_) return false;
  const auto nbrs = Neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

Graph Graph::WithFeatures(RowMatrix features) const {
  if (features.rows() != num_nodes_) {
    throw std::invalid_argument("feature rows (" +
                                std::to_string(features.rows()) +
                                ") != node count (" +
                                std::to_string(num_nodes_) + ")");
  }
  if (features.cols() < 1) throw std::invalid_argument("empty feature rows");
  if (!features.allFinite()) {
    throw std::invalid_argument("non-finite feature value");
  }
  Graph out = *this;
  out.features_ = std::move(features);
  return out;
}

EdgeListFile ParseEdgeList(const std::string& text, bool compact_ids) {
  std::vector<std::pair<int64_t, int64_t>> raw;
  std::optional<int64_t> declared;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '#') {
      if (auto n = ParseNodeHeader(trimmed)) declared = n;
      continue;
    }
    const auto tokens = SplitWhitespace(trimmed);
    if (tokens.size() != 2) {
      throw std::runtime_error("line " + std::to_string(line_number) +
                               ": expected two node ids");
    }
    raw.emplace_back(ParseId(tokens[0], line_number),
                     ParseId(tokens[1], line_number));
  }

  EdgeListFile result;
  int64_t n = 0;
  if (compact_ids) {
    std::vector<int64_t> ids;
    ids.reserve(2 * raw.size());
    for (const auto& [a, b] : raw) {
      ids.push_back(a);
      ids.push_back(b);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::unordered_map<int64_t, int64_t> index;
    for (size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int64_t>(i);
    for (auto& [a, b] : raw) {
      a = index[a];
      b = index[b];
    }
    n = static_cast<int64_t>(ids.size());
    result.original_ids = std::move(ids);
  } else {
    for (const auto& [a, b] : raw) n = std::max({n, a + 1, b + 1});
    if (declared) {
      if (*declared < n) {
        throw std::runtime_error("declared node count " +
                                 std::to_string(*declared) +
                                 " is smaller than max id + 1");
      }
      n = *declared;
    }
  }
  if (n > std::numeric_limits<NodeId>::max()) {
    throw std::runtime_error("node count exceeds supported range");
  }

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [a, b] : raw) {
    if (a == b) {
      ++result.self_loops_dropped;
      continue;
    }
    edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  result.graph = Graph(static_cast<NodeId>(n), edges);
  result.duplicates_dropped =
      static_cast<int64_t>(edges.size()) - result.graph.num_edges();
  return result;
}

EdgeListFile LoadEdgeList(const std::filesystem::path& path,
                          const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read edge list " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  EdgeListFile result;
  try {
    result = ParseEdgeList(buffer.str(), options.compact_ids);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  if (options.features_path) {
    result.graph =
        result.graph.WithFeatures(LoadFeatureCsv(*options.features_path));
  }
  return result;
}

RowMatrix LoadFeatureCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read feature file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    std::vector<double> row;
    std::string cell;
    std::istringstream cells{std::string(trimmed)};
    while (std::getline(cells, cell, ',')) {
      const std::string_view c = Trim(cell);
      size_t consumed = 0;
      double value = 0.0;
      try {
        value = std::stod(std::string(c), &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      if (consumed != c.size() || c.empty()) {
        throw std::invalid_argument("feature file " + path.string() +
                                    ": bad value '" + std::string(c) + "'");
      }
      if (!std::isfinite(value)) {
        throw std::invalid_argument("feature file " + path.string() +
                                    ": non-finite value");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("feature file " + path.string() +
                                  ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  RowMatrix x(static_cast<Eigen::Index>(rows.size()), cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) x(r, c) = rows[r][c];
  }
  return x;
}

std::string FormatEdgeList(const Graph& g) {
  std::string out = "# nodes: " + std::to_string(g.num_nodes()) + "\n";
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += '\n';
  }
  return out;
}

void SaveEdgeList(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << FormatEdgeList(g);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void SaveIdMapping(std::span<const int64_t> original_ids,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (size_t i = 0; i < original_ids.size(); ++i) {
    out << i << ' ' << original_ids[i] << '\n';
  }
}

Graph InducedSubgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::unordered_map<NodeId, NodeId> position;
  position.reserve(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    if (v < 0 || v >= g.num_nodes()) {
      throw std::out_of_range("node " + std::to_string(v) + " out of range");
    }
    if (!position.emplace(v, static_cast<NodeId>(i)).second) {
      throw std::invalid_argument("duplicate node " + std::to_string(v));
    }
  }
  std::vector<Edge> edges;
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (NodeId w : g.Neighbors(nodes[i])) {
      auto it = position.find(w);
      if (it != position.end() && static_cast<size_t>(it->second) > i) {
        edges.emplace_back(static_cast<NodeId>(i), it->second);
      }
    }
  }
  Graph sub(static_cast<NodeId>(nodes.size()), edges);
  if (g.has_features() && !nodes.empty()) {
    RowMatrix x(static_cast<Eigen::Index>(nodes.size()), g.features().cols());
    for (size_t i = 0; i < nodes.size(); ++i) x.row(i) = g.features().row(nodes[i]);
    sub = sub.WithFeatures(std::move(x));
  }
  return sub;
}

Graph DisjointUnion(std::span<const Graph> graphs) {
  if (graphs.empty()) throw std::invalid_argument("disjoint union of nothing");
  int64_t total = 0;
  bool all_features = true;
  for (const Graph& g : graphs) {
    total += g.num_nodes();
    all_features = all_features && g.has_features() &&
                   g.features().cols() == graphs.front().features().cols();
  }
  std::vector<Edge> edges;
  NodeId offset = 0;
  for (const Graph& g : graphs) {
    for (const Edge& e : g.edges()) edges.emplace_back(e.u + offset, e.v + offset);
    offset += g.num_nodes();
  }
  Graph out(static_cast<NodeId>(total), edges);
  if (all_features && total > 0) {
    RowMatrix x(total, graphs.front().features().cols());
    Eigen::Index row = 0;
    for (const Graph& g : graphs) {
      x.middleRows(row, g.num_nodes()) = g.features();
      row += g.num_nodes();
    }
    out = out.WithFeatures(std::move(x));
  }
  return out;
}

int CountComponents(const Graph& g) {
  DisjointSetUnion dsu(g.num_nodes());
  for (const Edge& e : g.edges()) dsu.Link(e.u, e.v);
  return dsu.groups();
}

}  // namespace lgsg
