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

// Acceptance gate. Prints one PASS or FAIL line per criterion and exits
// non-zero if any criterion outside --allow-fail failed.
//
//   lgsg_acceptance [--only 1,4,9] [--allow-fail 7] [--cli path]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lgsg/assembler.h"
#include "lgsg/baselines.h"
#include "lgsg/bench.h"
#include "lgsg/diffusion.h"
#include "lgsg/embedding.h"
#include "lgsg/metrics.h"
#include "lgsg/random.h"
#include "oracles.h"

namespace lgsg {
namespace {

namespace fs = std::filesystem;
using testing::EdgePairs;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects failed checks; the first few are reported.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 3) failures_.push_back(what);
    failed_ += !ok;
  }
  bool ok() const { return failed_ == 0; }
  std::string Summary() const {
    std::ostringstream out;
    out << checks_ - failed_ << "/" << checks_ << " checks";
    for (const auto& f : failures_) out << "; " << f;
    return out.str();
  }

 private:
  int checks_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Fmt(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

Outcome MetricOracles() {
  const auto start = std::chrono::steady_clock::now();
  Checker c;
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(UniformIndex(rng, 29));
    const double p = 0.05 + 0.85 * Uniform01(rng);
    const Graph g = testing::CoinFlipGraph(n, p, rng);
    if (g.num_edges() == 0) {  // EDE and Gini are undefined; checked by unit tests
      --trial;
      continue;
    }
    const auto a = testing::ToDense(g);
    const MetricsReport m = ComputeMetrics(g);
    const double diffs[] = {std::abs(m.avg_degree - testing::OracleAverageDegree(a)),
                            std::abs(m.ede - testing::OracleEde(a)),
                            std::abs(m.gini - testing::OracleGini(a)),
                            std::abs(m.clustering - testing::OracleClustering(a))};
    for (double d : diffs) worst = std::max(worst, d);
    const auto want = testing::OracleAssortativity(a);
    c.Expect(want.has_value() == m.assortativity.has_value(),
             "assortativity definedness, trial " + std::to_string(trial));
    if (want && m.assortativity) worst = std::max(worst, std::abs(*want - *m.assortativity));
    c.Expect(*std::max_element(std::begin(diffs), std::end(diffs)) <= 1e-9,
             "metric mismatch, trial " + std::to_string(trial));
  }
  const double elapsed = Seconds(start);
  c.Expect(elapsed < 10.0, "runtime " + Fmt(elapsed) + " s");
  return {c.ok(), "100 graphs, worst deviation " + Fmt(worst, 3) + ", " + c.Summary()};
}

GeneratedSubgraph Path3(double x0, double x1, double x2) {
  GeneratedSubgraph g;
  g.size = 3;
  g.emb.resize(3, 1);
  g.emb << x0, x1, x2;
  g.adj = {0, 1, 0, 1, 0, 1, 0, 1, 0};
  return g;
}

using Pairs = std::vector<std::pair<int, int>>;
using Members = std::vector<std::vector<int>>;

Outcome AssemblyFixtures() {
  Checker c;
  // A = path a1-a2-a3 at 0, 1, 2; B = path b1-b2-b3 at 0.05, 5, 6.
  const AssemblyInput in({Path3(0.0, 1.0, 2.0), Path3(0.05, 5.0, 6.0)});
  const double inf = std::numeric_limits<double>::infinity();

  auto six = NodeAggregation(in, 6);
  c.Expect(EdgePairs(six.graph) == Pairs{{0, 1}, {1, 2}, {3, 4}, {4, 5}}, "nu=6 edges");
  auto five = NodeAggregation(in, 5);
  c.Expect(five.members == Members{{0, 3}, {1}, {2}, {4}, {5}}, "nu=5 members");
  c.Expect(EdgePairs(five.graph) == Pairs{{0, 1}, {0, 3}, {1, 2}, {3, 4}}, "nu=5 edges");
  auto four = NodeAggregation(in, 4);
  c.Expect(four.members == Members{{0, 1, 3}, {2}, {4}, {5}}, "nu=4 members");
  c.Expect(EdgePairs(four.graph) == Pairs{{0, 1}, {0, 2}, {2, 3}}, "nu=4 edges");

  auto neg = ThresholdMatching(in, -1.0);
  c.Expect(neg.graph.num_nodes() == 6 && EdgePairs(neg.graph) == EdgePairs(six.graph),
           "delta=-1 union");
  auto small = ThresholdMatching(in, 0.1);
  c.Expect(small.members == Members{{0, 3}, {1}, {2}, {4}, {5}}, "delta=0.1 members");
  c.Expect(EdgePairs(small.graph) == Pairs{{0, 1}, {0, 3}, {1, 2}, {3, 4}}, "delta=0.1 edges");
  auto all = ThresholdMatching(in, inf);
  c.Expect(all.members == Members{{0, 3}, {1}, {2, 4, 5}}, "delta=inf members");
  c.Expect(EdgePairs(all.graph) == Pairs{{0, 1}, {0, 2}, {1, 2}}, "delta=inf edges");

  Rng rng(4711);
  for (int trial = 0; trial < 50; ++trial) {
    const auto samples = testing::RandomAssemblyInput(rng, 12);
    const AssemblyInput input(samples);
    const std::string tag = "random input " + std::to_string(trial);
    for (int nu = input.total_nodes(); nu >= 1; --nu) {
      const auto want = testing::OracleNodeAggregation(samples, nu);
      if (want.num_nodes != nu) break;
      const auto got = NodeAggregation(input, nu);
      c.Expect(got.members == want.members && EdgePairs(got.graph) == want.edges &&
                   got.merges == want.merges,
               tag + " nu " + std::to_string(nu));
    }
    for (double delta : {-1.0, 0.0, 1.0, 2.0, inf}) {
      const auto want = testing::OracleThresholdMatching(samples, delta);
      const auto got = ThresholdMatching(input, delta);
      c.Expect(got.members == want.members && EdgePairs(got.graph) == want.edges,
               tag + " delta " + Fmt(delta));
    }
  }
  return {c.ok(), "fixtures and 50 random inputs, " + c.Summary()};
}

Outcome NodeAggregationContract() {
  Checker c;
  Rng rng(99);
  int feasible = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto samples = testing::RandomAssemblyInput(rng, 20, 3);
    const AssemblyInput input(samples);
    const int n = input.total_nodes();
    const int reachable = testing::OracleNodeAggregation(samples, 1).num_nodes;
    const std::string tag = "input " + std::to_string(trial);
    for (int nu = reachable; nu <= n; ++nu) {
      c.Expect(NodeAggregation(input, nu).graph.num_nodes() == nu,
               tag + " nu " + std::to_string(nu));
      ++feasible;
    }
    auto throws = [&](int nu, auto type_tag) {
      try {
        NodeAggregation(input, nu);
      } catch (const decltype(type_tag)&) {
        return true;
      } catch (...) {
      }
      return false;
    };
    c.Expect(throws(0, std::invalid_argument("")), tag + " nu 0");
    c.Expect(throws(n + 1, std::invalid_argument("")), tag + " nu n+1");
    if (reachable > 1) {
      c.Expect(throws(reachable - 1, std::runtime_error("")), tag + " unreachable nu");
    }
  }
  // One subgraph has no cross pairs.
  const auto lone = testing::RandomAssemblyInput(rng, 5);
  const AssemblyInput one({lone.front()});
  if (one.total_nodes() > 1) {
    bool threw = false;
    try {
      NodeAggregation(one, one.total_nodes() - 1);
    } catch (const std::runtime_error&) {
      threw = true;
    }
    c.Expect(threw, "single subgraph");
  }
  return {c.ok(), std::to_string(feasible) + " feasible targets on 20 inputs, " + c.Summary()};
}

Outcome ScheduleIdentities() {
  Checker c;
  double worst = 0.0;
  for (int T : {10, 100, 1000}) {
    const NoiseSchedule s = MakeSchedule(T);
    const std::string tag = "T=" + std::to_string(T);
    c.Expect(s.alpha[0] == 1.0 && s.sigma[0] == 0.0, tag + " endpoints");
    for (int t = 0; t <= T; ++t) {
      const double vp = std::abs(s.alpha[t] * s.alpha[t] + s.sigma[t] * s.sigma[t] - 1.0);
      worst = std::max(worst, vp);
      c.Expect(vp <= 1e-12, tag + " variance at t=" + std::to_string(t));
      if (t == 0) continue;
      c.Expect(s.alpha[t] < s.alpha[t - 1] && s.sigma[t] > s.sigma[t - 1],
               tag + " monotone at t=" + std::to_string(t));
      const double at = s.alpha[t] / s.alpha[t - 1];
      const double st2 = s.sigma[t] * s.sigma[t] - at * at * s.sigma[t - 1] * s.sigma[t - 1];
      const double d1 = std::abs(s.AlphaTransition(t) - at);
      const double d2 = std::abs(s.SigmaTransitionSq(t) - st2);
      worst = std::max({worst, d1, d2});
      c.Expect(d1 <= 1e-12 && d2 <= 1e-12 && s.SigmaTransitionSq(t) >= 0.0,
               tag + " transition at t=" + std::to_string(t));
    }
    c.Expect(s.alpha[T] > 0.0, tag + " alpha_T positive");

    // The t = 1 posterior step returns the clean estimate exactly.
    SubgraphSample sample = testing::OverfitSample(3, 17);
    const NoisedSample clean = EncodeSample(sample, EmbeddingScaler::Identity(3));
    Rng rng(T);
    const NoisedSample x1 = ForwardNoise(clean, 1, s, rng).noised;
    CleanEstimate estimate{clean.z, clean.e};
    std::normal_distribution<double> normal;
    for (int i = 0; i < estimate.z.size(); ++i) estimate.z.data()[i] += normal(rng);
    for (int i = 0; i < 6; ++i) {
      for (int j = i + 1; j < 6; ++j) {
        for (int ch = 0; ch < 2; ++ch) {
          const double v = normal(rng);
          estimate.e(i * 6 + j, ch) = v;
          estimate.e(j * 6 + i, ch) = v;
        }
      }
    }
    const NoisedSample x0 = PosteriorStep(x1, estimate, s, rng);
    const double dz = (x0.z - estimate.z).cwiseAbs().maxCoeff();
    const double de = (x0.e - estimate.e).cwiseAbs().maxCoeff();
    worst = std::max({worst, dz, de});
    c.Expect(x0.t == 0 && dz <= 1e-12 && de <= 1e-12, tag + " t=1 posterior");
  }
  return {c.ok(), "T in {10, 100, 1000}, worst deviation " + Fmt(worst, 3) + ", " +
                      c.Summary()};
}

Outcome GradientChecks() {
  const auto start = std::chrono::steady_clock::now();
  const double emb = testing::EmbeddingGradientError();
  const double diff = testing::DiffusionGradientError();
  const double elapsed = Seconds(start);
  const bool ok = emb < 1e-4 && diff < 1e-4 && elapsed < 60.0;
  return {ok, "embedding rel err " + Fmt(emb, 3) + ", diffusion rel err " + Fmt(diff, 3) +
                  ", " + Fmt(elapsed, 3) + " s"};
}

Outcome OverfitRecovery() {
  const auto start = std::chrono::steady_clock::now();
  const SubgraphSample target = testing::OverfitSample(4, 3);
  DiffusionConfig config;
  config.train_steps = 5000;
  config.seed = 5;
  const DiffusionTrainResult trained = TrainDiffusion({target}, config);
  const auto generated = SampleSubgraphs(trained.model, 50, 11);
  int matched = 0;
  for (const auto& g : generated) matched += testing::AlignedMatch(g, target);
  const double elapsed = Seconds(start);
  const bool ok = matched >= 40 && elapsed < 300.0;
  return {ok, std::to_string(matched) + "/50 samples reproduce the adjacency after " +
                  std::to_string(config.train_steps) + " steps, " + Fmt(elapsed, 3) + " s"};
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Seeded 200-node, 3-block SBM shared by the end-to-end criteria.
struct EndToEnd {
  bool ran = false;
  std::string error;
  BenchmarkResult result;
  double seconds = 0.0;
};

EndToEnd& SbmRun() {
  static EndToEnd run;
  if (run.ran) return run;
  run.ran = true;
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = fs::temp_directory_path() / "lgsg_acceptance_sbm";
  fs::create_directories(dir);
  Rng rng(42);
  SaveEdgeList(StochasticBlockModel(200, 3, 0.2, 0.01, rng), dir / "sbm.edges");
  RunConfig config;
  config.datasets = {dir / "sbm.edges"};
  config.methods = {"lgsg-node-agg", "er"};
  config.sizes = {1.0, 1.5, 2.0};
  config.seeds = 5;
  try {
    run.result = RunBenchmark(config);
    if (!run.result.all_succeeded) run.error = "some benchmark cells failed";
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  run.seconds = Seconds(start);
  fs::remove_all(dir);
  return run;
}

std::vector<const BenchmarkRecord*> SeedRows(const BenchmarkResult& r, const std::string& method,
                                             double size) {
  std::vector<const BenchmarkRecord*> rows;
  for (const auto& row : r.rows) {
    if (row.method == method && row.size_target == size && row.seed != "mean" &&
        row.seed != "std") {
      rows.push_back(&row);
    }
  }
  return rows;
}

Outcome ClusteringBeatsEr() {
  const EndToEnd& run = SbmRun();
  if (!run.error.empty()) return {false, run.error};
  const auto lgsg = SeedRows(run.result, "lgsg-node-agg", 1.0);
  const auto er = SeedRows(run.result, "er", 1.0);
  int wins = 0;
  std::string values;
  for (size_t i = 0; i < lgsg.size() && i < er.size(); ++i) {
    const double a = *lgsg[i]->relative.clustering;
    const double b = *er[i]->relative.clustering;
    wins += a < b;
    values += (i ? ", " : "") + Fmt(a, 3) + " vs " + Fmt(b, 3);
  }
  const bool ok = wins >= 4 && lgsg.size() == 5 && run.seconds < 1800.0;
  return {ok, std::to_string(wins) + "/5 seeds beat ER on relative clustering distance (" +
                  values + "), pipeline " + Fmt(run.seconds, 3) + " s"};
}

Outcome SizeConsistency() {
  const EndToEnd& run = SbmRun();
  if (!run.error.empty()) return {false, run.error};
  std::vector<double> ede, gini;
  for (double size : {1.0, 1.5, 2.0}) {
    double e = 0.0, g = 0.0;
    const auto rows = SeedRows(run.result, "lgsg-node-agg", size);
    for (const auto* r : rows) {
      e += *r->ede / rows.size();
      g += *r->gini / rows.size();
    }
    ede.push_back(e);
    gini.push_back(g);
  }
  auto spread = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
  };
  const bool ok = spread(ede) < 0.15 && spread(gini) < 0.15;
  return {ok, "EDE " + Fmt(ede[0], 3) + "/" + Fmt(ede[1], 3) + "/" + Fmt(ede[2], 3) +
                  ", Gini " + Fmt(gini[0], 3) + "/" + Fmt(gini[1], 3) + "/" +
                  Fmt(gini[2], 3) + " at 1.0/1.5/2.0x, spreads " + Fmt(spread(ede), 3) +
                  " and " + Fmt(spread(gini), 3)};
}

Outcome BaselineFits() {
  Checker c;
  const Graph karate = LoadEdgeList(fs::path(LGSG_SOURCE_DIR) / "data" / "karate.edges").graph;
  const double p = FitEdgeProbability(karate);
  const NodeId n = 1000;
  const double pairs = n * (n - 1) / 2.0;
  double mean = 0.0;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng = MakeRng(seed, {1});
    mean += FitEdgeProbability(ErdosRenyiFit(karate, n, rng)) / 50;
  }
  const double se = std::sqrt(p * (1 - p) / (pairs * 50));
  const double z = std::abs(mean - p) / se;
  c.Expect(z <= 3.0, "ER density off by " + Fmt(z, 3) + " standard errors");

  const int attach = FitAttachment(karate);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    for (NodeId size : {NodeId{34}, NodeId{100}, NodeId{1000}}) {
      Rng rng = MakeRng(seed, {2});
      const Graph g = BarabasiAlbertFit(karate, size, rng);
      c.Expect(g.num_edges() == attach - 1 + int64_t{attach} * (size - attach),
               "BA edge count at n=" + std::to_string(size));
    }
  }

  KroneckerInitiator truth;
  truth.theta = {{{0.9, 0.6}, {0.6, 0.2}}};
  truth.k = 8;
  int improved = 0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = MakeRng(seed, {3});
    const Graph g = KroneckerGenerate(truth, rng);
    const KronFitResult fit = KronFit(g, KronFitConfig{}, rng);
    const bool ok = fit.final_log_likelihood >= fit.initial_log_likelihood;
    improved += ok;
    c.Expect(ok, "KronFit seed " + std::to_string(seed));
  }
  return {c.ok(), "ER z = " + Fmt(z, 3) + ", BA edge counts exact, KronFit improved " +
                      std::to_string(improved) + "/10, " + c.Summary()};
}

Outcome BenchmarkDeterminism(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / "lgsg_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::copy_file(fs::path(LGSG_SOURCE_DIR) / "data" / "karate.edges", dir / "karate.edges");
  std::ofstream(dir / "run.ini") << "[run]\n"
                                    "datasets = karate.edges\n"
                                    "methods = lgsg-node-agg, lgsg-threshold, er, ba, kronecker\n"
                                    "sizes = 1.0, 2.0\n"
                                    "thresholds = 0.5, 1.0\n"
                                    "seeds = 3\n"
                                    "[embedding]\nepochs = 5\n"
                                    "[diffusion]\ntrain_steps = 300\n"
                                    "[kronfit]\niterations = 10\n";
  auto run = [&](const std::string& out, int workers) {
    const std::string cmd = cli + " benchmark --config " + (dir / "run.ini").string() +
                            " --workers " + std::to_string(workers) + " --out " +
                            (dir / out).string() + " > " + (dir / "log.txt").string() + " 2>&1";
    return std::system(cmd.c_str());
  };
  const int a = run("first.csv", 1);
  const int b = run("second.csv", 1);
  const int w = run("threaded.csv", 4);
  const std::string first = ReadFile(dir / "first.csv");
  const std::string second = ReadFile(dir / "second.csv");
  const std::string threaded = ReadFile(dir / "threaded.csv");
  fs::remove_all(dir);
  const bool ok = a == 0 && b == 0 && w == 0 && !first.empty() && first == second &&
                  first == threaded;
  return {ok, "two single-worker runs and a 4-worker run: " +
                  std::string(first == second ? "identical" : "different") + " / " +
                  std::string(first == threaded ? "identical" : "different") + ", " +
                  std::to_string(std::count(first.begin(), first.end(), '\n')) +
                  " CSV lines, exit codes " + std::to_string(a) + "," + std::to_string(b) +
                  "," + std::to_string(w)};
}

}  // namespace
}  // namespace lgsg

int main(int argc, char** argv) {
  CLI::App app{"acceptance gate"};
  std::vector<int> only;
  std::vector<int> allow_fail;
  std::string cli = LGSG_CLI_PATH;
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_option("--allow-fail", allow_fail, "report but do not gate on these")->delimiter(',');
  app.add_option("--cli", cli, "path of the lgsg tool");
  CLI11_PARSE(app, argc, argv);

  using lgsg::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric oracle suite", lgsg::MetricOracles},
      {"assembly fixtures and brute force", lgsg::AssemblyFixtures},
      {"node aggregation contract", lgsg::NodeAggregationContract},
      {"schedule and posterior identities", lgsg::ScheduleIdentities},
      {"gradient checks", lgsg::GradientChecks},
      {"overfit recovery", lgsg::OverfitRecovery},
      {"SBM clustering vs ER", lgsg::ClusteringBeatsEr},
      {"EDE and Gini across sizes", lgsg::SizeConsistency},
      {"baseline fits", lgsg::BaselineFits},
      {"benchmark determinism", [&] { return lgsg::BenchmarkDeterminism(cli); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  const std::set<int> tolerated(allow_fail.begin(), allow_fail.end());
  int gating_failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.contains(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = lgsg::Seconds(start);
    std::printf("AC%d %s  %s: %s [%.1f s]%s\n", id, outcome.pass ? "PASS" : "FAIL",
                criteria[i].first, outcome.detail.c_str(), elapsed,
                !outcome.pass && tolerated.contains(id) ? " (not gating)" : "");
    std::fflush(stdout);
    if (!outcome.pass && !tolerated.contains(id)) ++gating_failures;
  }
  return gating_failures == 0 ? 0 : 1;
}
