#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "fixgraph/alpha_ast.hpp"
#include "fixgraph/gat.hpp"
#include "fixgraph/matcher.hpp"
#include "fixgraph/parser.hpp"

namespace {

using namespace fixgraph;

std::string Unit(std::size_t functions, bool patched) {
  std::string src;
  for (std::size_t k = 0; k < functions; ++k) {
    const std::string n = std::to_string(k);
    const bool fix = patched && k % 7 == 3;
    src += "int f" + n + "(int *buf, int len) {\n  int i, total = 0;\n";
    src += std::string("  for (i = 0; i ") + (fix ? "<" : "<=") + " len; i++) { total += buf[i] * " +
           n + "; }\n";
    if (fix) src += "  if (len > 64) return -1;\n";
    src += "  return total;\n}\n";
  }
  return src;
}

void BM_Parse(benchmark::State& state) {
  const std::string src = Unit(static_cast<std::size_t>(state.range(0)), false);
  std::size_t nodes = 0;
  for (auto _ : state) {
    const Ast ast = parse_source(src);
    nodes = ast.size();
    benchmark::DoNotOptimize(nodes);
  }
  state.counters["nodes"] = static_cast<double>(nodes);
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_Parse)->Arg(10)->Arg(100)->Arg(500);

void BM_Diff(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const Ast a = parse_source(Unit(count, false));
  const Ast b = parse_source(Unit(count, true));
  std::size_t nodes = 0;
  for (auto _ : state) {
    const AlphaAst g = diff_asts(a, b);
    nodes = g.nodes.size();
    benchmark::DoNotOptimize(nodes);
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_Diff)->Arg(10)->Arg(100)->Arg(500);

Graph RandomGraph(std::size_t n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Graph g;
  g.features.resize(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < g.features.size(); ++i) g.features.data()[i] = u(rng);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(static_cast<NodeId>(rng() % i), static_cast<NodeId>(i));
  g.neighbors = Neighborhoods::from_edges(n, edges);
  return g;
}

void BM_GatForward(benchmark::State& state) {
  const GatModel model = init_model(GatConfig{}, 1);
  const Graph g = RandomGraph(static_cast<std::size_t>(state.range(0)), GatConfig{}.input_dim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(predict(model, g));
}
BENCHMARK(BM_GatForward)->Arg(100)->Arg(1000)->Arg(5000);

void BM_GatBackward(benchmark::State& state) {
  const GatModel model = init_model(GatConfig{}, 1);
  std::vector<Graph> graphs;
  for (int i = 0; i < 32; ++i) graphs.push_back(RandomGraph(static_cast<std::size_t>(state.range(0)), GatConfig{}.input_dim, 10 + i));
  GraphBatch batch;
  for (int i = 0; i < 32; ++i) {
    batch.graphs.push_back(&graphs[static_cast<std::size_t>(i)]);
    batch.labels.push_back(i % 2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradients(model, batch).loss);
}
BENCHMARK(BM_GatBackward)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
