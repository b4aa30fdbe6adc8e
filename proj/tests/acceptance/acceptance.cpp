// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fixgraph/alpha_ast.hpp"
#include "fixgraph/checkpoint.hpp"
#include "fixgraph/embedding.hpp"
#include "fixgraph/gat.hpp"
#include "fixgraph/matcher.hpp"
#include "fixgraph/metrics.hpp"
#include "fixgraph/parser.hpp"
#include "fixgraph/pipeline.hpp"
#include "support/support.hpp"

namespace fs = std::filesystem;
using namespace fixgraph;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int Cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run_cli(args, o, e);
  if (out) *out = o.str();
  if (code != 0) std::cerr << "  fixgraph exited " << code << ": " << e.str();
  return code;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome AlphaAstSuite() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  const int pairs = 1500;
  int bad = 0;
  for (int trial = 0; trial < pairs; ++trial) {
    testing::TreeSpec t = testing::RandomRoot(rng, 2 + static_cast<int>(rng() % 4));
    const Ast a = testing::ToAst(t);
    const int edits = 1 + static_cast<int>(rng() % 5);
    for (int e = 0; e < edits; ++e) testing::RandomEdit(t, rng);
    const Ast b = testing::ToAst(t);
    const NodeMapping m = match_nodes(a, b);
    const AlphaAst g = build_alpha_ast(a, b, m);
    bool ok = testing::SameOracle(testing::AsOracle(g), testing::BruteForceAlpha(a, b, m));
    const auto nc = g.node_counts();
    const auto ec = g.edge_counts();
    std::size_t old_edges = 0, new_edges = 0;
    for (const auto& c : a.children()) old_edges += c.size();
    for (const auto& c : b.children()) new_edges += c.size();
    ok = ok && nc.total() == g.nodes.size() && ec.total() == g.edges.size();
    ok = ok && nc.unchanged + nc.deleted == a.size() && nc.unchanged + nc.added == b.size();
    ok = ok && ec.unchanged + ec.deleted == old_edges && ec.unchanged + ec.added == new_edges;
    bad += ok ? 0 : 1;
  }
  const double secs = Seconds(start);
  return {bad == 0 && secs < 60.0,
          std::to_string(pairs) + " pairs, " + std::to_string(bad) + " mismatches, " +
              Fmt("%.2f s (limit 60 s)", secs)};
}

Outcome LoopBoundExample() {
  const Ast a = parse_source("for (i = 0; i < BUF_SIZE; i++) process(buf[i]);\n");
  const Ast b = parse_source("for (i = 0; i < 2 * BUF_SIZE; i++) process(buf[i]);\n");
  const AlphaAst g = diff_asts(a, b);
  auto name = [&](NodeId id) {
    const AlphaNode& n = g.nodes[static_cast<std::size_t>(id)];
    return display_name(n.kind, n.label) + ":" + n.label.value_or("");
  };
  std::multiset<std::string> added, deleted;
  for (const auto& n : g.nodes) {
    if (n.annotation == Annotation::Added) added.insert(name(n.id));
    if (n.annotation == Annotation::Deleted) deleted.insert(name(n.id));
  }
  using P = std::pair<std::string, std::string>;
  std::set<P> added_edges, deleted_edges;
  for (const auto& e : g.edges) {
    if (e.annotation == Annotation::Added) added_edges.insert({name(e.src), name(e.dst)});
    if (e.annotation == Annotation::Deleted) deleted_edges.insert({name(e.src), name(e.dst)});
  }
  const bool ok =
      added == std::multiset<std::string>{"MultiplyExpr:*", "Literal:2"} && deleted.empty() &&
      added_edges == std::set<P>{{"LessThanExpr:<", "MultiplyExpr:*"},
                                 {"MultiplyExpr:*", "Literal:2"},
                                 {"MultiplyExpr:*", "Identifier:BUF_SIZE"}} &&
      deleted_edges == std::set<P>{{"LessThanExpr:<", "Identifier:BUF_SIZE"}};
  return {ok, std::to_string(added.size()) + " added nodes, " + std::to_string(added_edges.size()) +
                  " added edges, " + std::to_string(deleted_edges.size()) + " deleted edge"};
}

Outcome GradientCheck() {
  const auto start = Clock::now();
  std::mt19937_64 rng(977);
  GatModel model = init_model(GatConfig{}, 977);
  const Graph g = testing::RandomGraph(rng, 6, GatConfig{}.input_dim, 1.5);
  const double err = testing::MaxGradientError(model, {{&g}, {1}, 1.0}, 1e-5);
  const double secs = Seconds(start);
  return {err < 1e-4 && secs < 30.0,
          std::to_string(model.parameter_count()) + " parameters, " +
              Fmt("max rel err %.3g (limit 1e-4), %.2f s (limit 30 s)", err, secs)};
}

Outcome AttentionInvariants() {
  std::mt19937_64 rng(4242);
  const GatModel model = init_model(GatConfig{}, 4242);
  double worst_sum = 0.0, worst_perm = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    const Graph g = testing::RandomGraph(rng, n, GatConfig{}.input_dim, 2.0);
    NodeMatrix h = g.features;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      const auto w = attention_weights(model.layers[l], h, g.neighbors);
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (NodeId j : g.neighbors.of(i)) sum += w.at(g.neighbors, i, j);
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      }
      h = gat_layer_forward(model.layers[l], h, g.neighbors,
                            l + 1 < model.layers.size() ? Activation::Relu : Activation::Identity);
    }
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Graph p;
    p.features.resize(g.features.rows(), g.features.cols());
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t i = 0; i < n; ++i) {
      p.features.row(perm[i]) = g.features.row(static_cast<Eigen::Index>(i));
      for (NodeId j : g.neighbors.of(i)) edges.emplace_back(perm[i], perm[j]);
    }
    p.neighbors = Neighborhoods::from_edges(n, edges);
    worst_perm = std::max(worst_perm, std::abs(predict(model, g) - predict(model, p)));
  }
  return {worst_sum <= 1e-9 && worst_perm < 1e-9,
          Fmt("100 graphs, max |sum-1| %.3g, max relabel delta %.3g (limit 1e-9)", worst_sum,
              worst_perm)};
}

Outcome MetricOracles() {
  std::mt19937_64 rng(777);
  int auc_bad = 0, ce_bad = 0, monotone_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::RandomScores(rng, 2 + rng() % 199, trial % 2 == 0);
    auc_bad += auc(s) == testing::BruteForceAuc(s) ? 0 : 1;
    double last = 0.0;
    for (double l = 1.0; l <= 100.0; l += 1.0) {
      const double ce = cost_effort_at(s, l);
      ce_bad += ce == testing::HandCostEffort(s, l) ? 0 : 1;
      monotone_bad += ce >= last ? 0 : 1;
      last = ce;
    }
  }
  return {auc_bad == 0 && ce_bad == 0 && monotone_bad == 0,
          "100 score sets: AUC mismatches " + std::to_string(auc_bad) + ", CE mismatches " +
              std::to_string(ce_bad) + ", monotonicity breaks " + std::to_string(monotone_bad)};
}

Outcome DeskScale(const fs::path& work) {
  const auto start = Clock::now();
  const std::string data = (work / "synth500.jsonl").string();
  const std::string run = (work / "desk").string();
  if (Cli({"--seed", "7", "synth", "--n", "500", "--signal", "mixed", "--out", data}) != 0 ||
      Cli({"--seed", "7", "--quiet", "train", data, "--out-dir", run, "--train-fraction", "0.8",
           "--dim", "64", "--layers", "2", "--epochs", "50"}) != 0 ||
      Cli({"predict", run + "/test.jsonl", "--checkpoint", run + "/model.ckpt", "--embeddings",
           run + "/embeddings.bin", "--out", run + "/scores.csv"}) != 0) {
    return {false, "pipeline failed"};
  }
  std::string json;
  if (Cli({"evaluate", run + "/scores.csv", "--effort", "5", "--format", "json"}, &json) != 0) {
    return {false, "evaluate failed"};
  }
  const double secs = Seconds(start);
  const auto j = nlohmann::json::parse(json);
  const double f1 = j.at("f1").get<double>();
  double ce5 = -1.0;
  for (const auto& [k, v] : j.at("ce_at").items()) {
    if (std::stod(k) == 5.0) ce5 = v.get<double>();
  }
  return {f1 >= 0.90 && ce5 >= 0.80 && secs < 600.0,
          Fmt("test F1 %.4f (>= 0.90), CE@5%% %.4f (>= 0.80), %.1f s (limit 600 s)", f1, ce5, secs) +
              ", " + std::to_string(j.at("samples").get<int>()) + " test commits"};
}

Outcome Sensitivity(const fs::path& work) {
  const std::string data = (work / "synth500.jsonl").string();
  std::string json;
  if (!fs::exists(data) ||
      Cli({"--seed", "7", "report", data, "--train-fraction", "0.8", "--folds", "5", "--epochs", "2"},
          &json) != 0) {
    return {false, "report failed"};
  }
  const auto j = nlohmann::json::parse(json);
  std::string f1s;
  for (const auto& f : j.at("folds")) {
    f1s += (f1s.empty() ? "" : " ") + Fmt("%.3f", f.at("metrics").at("f1").get<double>());
  }
  const double rho = j.at("f1_spearman").get<double>();
  return {rho > 0.0, Fmt("5 cumulative folds at 2 epochs, Spearman rho %.3f (> 0), F1 per fold ", rho) + f1s};
}

std::string SyntheticUnit(std::size_t count, bool patched) {
  std::string src;
  for (std::size_t k = 0; k < count; ++k) {
    const std::string n = std::to_string(k);
    const bool fix = patched && k + 1 == count;
    src += "int f" + n + "(int *buf, int len) {\n  int i, total = 0;\n";
    src += std::string("  for (i = 0; i ") + (fix ? "<" : "<=") + " len; i++) { total += buf[i] * " + n + "; }\n";
    if (fix) src += "  if (len > 64) return -1;\n";
    src += "  while (total > " + n + ") total = total / 2;\n  return total;\n}\n";
  }
  return src;
}

Outcome Latency(const fs::path& work) {
  const fs::path run = work / "desk";
  if (!fs::exists(run / "model.ckpt")) return {false, "no trained model"};
  const Checkpoint ckpt = load_checkpoint_file((run / "model.ckpt").string());
  const EmbeddingTable table = EmbeddingTable::load_file((run / "embeddings.bin").string());

  auto sample_of = [](std::size_t count) {
    CommitSample s;
    s.id = "large";
    s.project = "bench";
    s.files.push_back({"big.c", SyntheticUnit(count, false), SyntheticUnit(count, true)});
    return s;
  };
  std::size_t count = 1;
  while (commit_graph(sample_of(count + 1)).nodes.size() <= 5000) ++count;
  const CommitSample sample = sample_of(count);

  double worst = 0.0;
  std::size_t nodes = 0;
  double score = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto start = Clock::now();
    const PreparedCommit c = prepare_commit(sample);
    score = predict(ckpt.model, make_graph(c.graph, table));
    worst = std::max(worst, Seconds(start));
    nodes = c.graph.nodes.size();
  }
  return {worst <= 2.0 && nodes <= 5000,
          std::to_string(nodes) + "-node commit, parse+diff+score worst of 3 " +
              Fmt("%.3f s (limit 2 s), score %.3f", worst, score)};
}

Outcome Determinism(const fs::path& work) {
  const std::string data = (work / "synth120.jsonl").string();
  if (Cli({"--seed", "11", "synth", "--n", "120", "--out", data}) != 0) return {false, "synth failed"};
  for (const char* dir : {"det-a", "det-b"}) {
    if (Cli({"--seed", "11", "--quiet", "train", data, "--out-dir", (work / dir).string(), "--epochs",
             "10"}) != 0) {
      return {false, "train failed"};
    }
  }
  bool same = true;
  std::string detail;
  for (const char* f : {"model.ckpt", "history.csv", "embeddings.bin"}) {
    const bool eq = Slurp(work / "det-a" / f) == Slurp(work / "det-b" / f);
    same = same && eq;
    detail += std::string(detail.empty() ? "" : ", ") + f + (eq ? " identical" : " DIFFERS");
  }
  return {same, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "fixgraph-acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"alpha-ast-suite", AlphaAstSuite},
      {"loop-bound-example", LoopBoundExample},
      {"gradient-check", GradientCheck},
      {"attention-invariants", AttentionInvariants},
      {"metric-oracles", MetricOracles},
      {"desk-scale-learning", [&] { return DeskScale(work); }},
      {"sensitivity-harness", [&] { return Sensitivity(work); }},
      {"inference-latency", [&] { return Latency(work); }},
      {"determinism", [&] { return Determinism(work); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
