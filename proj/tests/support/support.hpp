// Shared fixtures and reference oracles for the unit and acceptance suites.
// The oracles are written from the definitions, without calling the code
// under test beyond its public inputs.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fixgraph/alpha_ast.hpp"
#include "fixgraph/ast.hpp"
#include "fixgraph/gat.hpp"
#include "fixgraph/metrics.hpp"

namespace fixgraph::testing {

// --- random trees ------------------------------------------------------------

struct TreeSpec {
  std::string kind;
  std::optional<std::string> label;
  std::vector<TreeSpec> kids;
};

inline const std::vector<std::string>& InnerKinds() {
  static const std::vector<std::string> k{"IfStmt", "ForStmt", "CompoundStmt", "BinaryExpr",
                                          "CallExpr", "ExprStmt"};
  return k;
}
inline const std::vector<std::string>& LeafLabels() {
  static const std::vector<std::string> l{"a", "b", "c", "n", "buf", "len", "0", "1", "2"};
  return l;
}

inline TreeSpec RandomLeaf(std::mt19937_64& rng) {
  const auto& labels = LeafLabels();
  const std::string& lab = labels[rng() % labels.size()];
  const bool literal = lab[0] >= '0' && lab[0] <= '9';
  return TreeSpec{literal ? "Literal" : "Identifier", lab, {}};
}

inline TreeSpec RandomTree(std::mt19937_64& rng, int depth) {
  if (depth == 0 || rng() % 4 == 0) return RandomLeaf(rng);
  const auto& kinds = InnerKinds();
  TreeSpec t{kinds[rng() % kinds.size()], std::nullopt, {}};
  if (t.kind == "BinaryExpr") t.label = (rng() % 2) ? "<" : "*";
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n; ++i) t.kids.push_back(RandomTree(rng, depth - 1));
  return t;
}

inline TreeSpec RandomRoot(std::mt19937_64& rng, int depth) {
  TreeSpec root{"TranslationUnit", std::nullopt, {}};
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n; ++i) root.kids.push_back(RandomTree(rng, depth));
  return root;
}

inline std::size_t CountNodes(const TreeSpec& t) {
  std::size_t n = 1;
  for (const auto& k : t.kids) n += CountNodes(k);
  return n;
}

// Pointer to the i-th node in preorder; i counts down while walking.
inline TreeSpec* NthNode(TreeSpec& t, std::size_t& i) {
  if (i == 0) return &t;
  --i;
  for (auto& k : t.kids) {
    if (TreeSpec* hit = NthNode(k, i)) return hit;
  }
  return nullptr;
}

inline TreeSpec* NodeAt(TreeSpec& t, std::size_t index) { return NthNode(t, index); }

/// Applies one random edit: relabel a leaf, insert a subtree, delete a
/// subtree, or wrap a subtree in a new parent.
inline void RandomEdit(TreeSpec& root, std::mt19937_64& rng) {
  const std::size_t n = CountNodes(root);
  switch (rng() % 4) {
    case 0: {  // relabel a leaf
      for (int tries = 0; tries < 20; ++tries) {
        TreeSpec* t = NodeAt(root, rng() % n);
        if (t->kids.empty() && t->label) {
          *t = RandomLeaf(rng);
          return;
        }
      }
      [[fallthrough]];
    }
    case 1: {  // insert
      TreeSpec* parent = NodeAt(root, rng() % n);
      if (parent->kind == "Identifier" || parent->kind == "Literal") parent = &root;
      const std::size_t pos = rng() % (parent->kids.size() + 1);
      parent->kids.insert(parent->kids.begin() + static_cast<long>(pos), RandomTree(rng, 2));
      return;
    }
    case 2: {  // delete
      if (n <= 2) return;
      for (int tries = 0; tries < 20; ++tries) {
        TreeSpec* parent = NodeAt(root, rng() % n);
        if (!parent->kids.empty()) {
          parent->kids.erase(parent->kids.begin() + static_cast<long>(rng() % parent->kids.size()));
          return;
        }
      }
      return;
    }
    default: {  // wrap
      for (int tries = 0; tries < 20; ++tries) {
        TreeSpec* parent = NodeAt(root, rng() % n);
        if (parent->kids.empty()) continue;
        auto& slot = parent->kids[rng() % parent->kids.size()];
        TreeSpec wrapper{"BinaryExpr", "*", {}};
        wrapper.kids.push_back(TreeSpec{"Literal", "2", {}});
        wrapper.kids.push_back(std::move(slot));
        slot = std::move(wrapper);
        return;
      }
    }
  }
}

inline void Flatten(const TreeSpec& t, std::vector<AstNode>& nodes,
                    std::vector<std::vector<NodeId>>& children) {
  const auto id = static_cast<NodeId>(nodes.size());
  nodes.push_back(AstNode{id, t.kind, t.label, std::nullopt});
  children.emplace_back();
  for (const auto& k : t.kids) {
    const auto kid = static_cast<NodeId>(nodes.size());
    children[static_cast<std::size_t>(id)].push_back(kid);
    Flatten(k, nodes, children);
  }
}

inline Ast ToAst(const TreeSpec& t, const std::string& path = "t.c") {
  std::vector<AstNode> nodes;
  std::vector<std::vector<NodeId>> children;
  Flatten(t, nodes, children);
  return Ast(path, std::move(nodes), std::move(children));
}

// --- brute-force annotated AST ----------------------------------------------

/// Node identity in the merged graph: ('o', old id) for old-side nodes, which
/// absorb their mapped partner, or ('n', new id) for unmapped new nodes.
using NodeKey = std::pair<char, NodeId>;

struct OracleGraph {
  std::map<NodeKey, Annotation> nodes;
  std::map<std::pair<NodeKey, NodeKey>, Annotation> edges;
};

/// Definition-level construction: set unions and differences of node and
/// edge sets under the mapping.
inline OracleGraph BruteForceAlpha(const Ast& o, const Ast& n, const NodeMapping& m) {
  std::map<NodeId, NodeId> n2o;
  for (auto [a, b] : m.pairs()) n2o[b] = a;
  auto key_new = [&](NodeId id) -> NodeKey {
    auto it = n2o.find(id);
    return it != n2o.end() ? NodeKey{'o', it->second} : NodeKey{'n', id};
  };
  std::set<NodeKey> old_nodes, new_nodes;
  for (NodeId i = 0; i < static_cast<NodeId>(o.size()); ++i) old_nodes.insert({'o', i});
  for (NodeId i = 0; i < static_cast<NodeId>(n.size()); ++i) new_nodes.insert(key_new(i));
  std::set<std::pair<NodeKey, NodeKey>> old_edges, new_edges;
  for (NodeId p = 0; p < static_cast<NodeId>(o.size()); ++p) {
    for (NodeId c : o.children(p)) old_edges.insert({{'o', p}, {'o', c}});
  }
  for (NodeId p = 0; p < static_cast<NodeId>(n.size()); ++p) {
    for (NodeId c : n.children(p)) new_edges.insert({key_new(p), key_new(c)});
  }
  OracleGraph g;
  for (const auto& k : old_nodes) {
    g.nodes[k] = new_nodes.count(k) ? Annotation::Unchanged : Annotation::Deleted;
  }
  for (const auto& k : new_nodes) {
    if (!old_nodes.count(k)) g.nodes[k] = Annotation::Added;
  }
  for (const auto& e : old_edges) {
    g.edges[e] = new_edges.count(e) ? Annotation::Unchanged : Annotation::Deleted;
  }
  for (const auto& e : new_edges) {
    if (!old_edges.count(e)) g.edges[e] = Annotation::Added;
  }
  return g;
}

/// Re-expresses an AlphaAst in oracle keys via node origins.
inline OracleGraph AsOracle(const AlphaAst& g) {
  OracleGraph out;
  std::vector<NodeKey> keys(g.nodes.size());
  for (const auto& nd : g.nodes) {
    keys[static_cast<std::size_t>(nd.id)] =
        nd.old_id ? NodeKey{'o', *nd.old_id} : NodeKey{'n', nd.new_id.value_or(-1)};
    out.nodes[keys[static_cast<std::size_t>(nd.id)]] = nd.annotation;
  }
  for (const auto& e : g.edges) {
    out.edges[{keys[static_cast<std::size_t>(e.src)], keys[static_cast<std::size_t>(e.dst)]}] =
        e.annotation;
  }
  return out;
}

inline bool SameOracle(const OracleGraph& a, const OracleGraph& b) {
  return a.nodes == b.nodes && a.edges == b.edges;
}

// --- random graphs for the network ------------------------------------------

inline Graph RandomGraph(std::mt19937_64& rng, std::size_t nodes, int dim, double edge_p = 0.3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Graph g;
  g.features.resize(static_cast<Eigen::Index>(nodes), dim);
  for (Eigen::Index r = 0; r < g.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.features.cols(); ++c) g.features(r, c) = u(rng);
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  // A random spanning tree keeps the graph connected, extra edges add cycles.
  for (std::size_t i = 1; i < nodes; ++i) {
    edges.emplace_back(static_cast<NodeId>(rng() % i), static_cast<NodeId>(i));
  }
  std::bernoulli_distribution extra(edge_p / static_cast<double>(std::max<std::size_t>(nodes, 1)));
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = i + 1; j < nodes; ++j) {
      if (extra(rng)) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
  }
  g.neighbors = Neighborhoods::from_edges(nodes, edges);
  return g;
}

/// Largest relative gap between analytic gradients and central differences
/// over every parameter. Gradients below `floor` in magnitude are compared
/// against the floor instead of their own size.
inline double MaxGradientError(const GatModel& model, const GraphBatch& batch, double eps,
                               double floor = 1e-6) {
  const Eigen::VectorXd analytic = loss_and_gradients(model, batch).gradients.flatten();
  Eigen::VectorXd p = model.flatten();
  GatModel probe = model;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + eps;
    probe.assign(p);
    const double up = loss_and_gradients(probe, batch).loss;
    p[i] = keep - eps;
    probe.assign(p);
    const double down = loss_and_gradients(probe, batch).loss;
    p[i] = keep;
    const double numeric = (up - down) / (2.0 * eps);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), floor});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  return worst;
}

// --- metric oracles ------------------------------------------------------------

/// Pair enumeration: (2 * wins + ties) / (2 * P * N).
inline double BruteForceAuc(const std::vector<ScoredCommit>& s) {
  unsigned long long doubled = 0, pos = 0, neg = 0;
  for (const auto& a : s) (a.label == 1 ? pos : neg) += 1;
  for (const auto& a : s) {
    if (a.label != 1) continue;
    for (const auto& b : s) {
      if (b.label == 1) continue;
      if (a.score > b.score) doubled += 2;
      if (a.score == b.score) doubled += 1;
    }
  }
  return static_cast<double>(doubled) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

/// Walks commits from the highest score (ties: smaller id) and stops at the
/// first commit whose inclusion would exceed L% of the total changed LOC.
inline double HandCostEffort(std::vector<ScoredCommit> s, double l) {
  std::sort(s.begin(), s.end(), [](const ScoredCommit& a, const ScoredCommit& b) {
    return std::tie(b.score, a.id) < std::tie(a.score, b.id);
  });
  std::size_t total = 0, fixing = 0;
  for (const auto& c : s) {
    total += c.changed_loc;
    fixing += c.label == 1 ? 1 : 0;
  }
  std::size_t used = 0, found = 0;
  for (const auto& c : s) {
    if (static_cast<double>(used + c.changed_loc) * 100.0 > l * static_cast<double>(total)) break;
    used += c.changed_loc;
    found += c.label == 1 ? 1 : 0;
  }
  return static_cast<double>(found) / static_cast<double>(fixing);
}

inline std::vector<ScoredCommit> RandomScores(std::mt19937_64& rng, std::size_t n, bool coarse) {
  std::vector<ScoredCommit> out;
  for (std::size_t i = 0; i < n; ++i) {
    ScoredCommit c;
    c.id = "c" + std::to_string(i);
    c.score = coarse ? static_cast<double>(rng() % 11) / 10.0
                     : static_cast<double>(rng() >> 11) * 0x1.0p-53;
    c.label = static_cast<int>(rng() % 2);
    c.changed_loc = 1 + rng() % 60;
    out.push_back(c);
  }
  out[0].label = 1;
  out[1].label = 0;
  return out;
}

}  // namespace fixgraph::testing
