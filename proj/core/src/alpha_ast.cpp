#include "fixgraph/alpha_ast.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "fixgraph/errors.hpp"
#include "fixgraph/line_diff.hpp"

namespace fixgraph {

std::array<double, 3> one_hot(Annotation a) {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  v[static_cast<std::size_t>(a)] = 1.0;
  return v;
}

char annotation_code(Annotation a) {
  switch (a) {
    case Annotation::Unchanged:
      return 'U';
    case Annotation::Added:
      return 'A';
    case Annotation::Deleted:
      return 'D';
  }
  return '?';
}

Annotation annotation_from_code(char c) {
  switch (c) {
    case 'U':
      return Annotation::Unchanged;
    case 'A':
      return Annotation::Added;
    case 'D':
      return Annotation::Deleted;
    default:
      throw SchemaError("ann", std::string("unknown annotation code '") + c + "'");
  }
}

namespace {

template <typename Range>
AnnotationCounts Count(const Range& items) {
  AnnotationCounts c;
  for (const auto& it : items) {
    switch (it.annotation) {
      case Annotation::Unchanged:
        ++c.unchanged;
        break;
      case Annotation::Added:
        ++c.added;
        break;
      case Annotation::Deleted:
        ++c.deleted;
        break;
    }
  }
  return c;
}

void ValidateMapping(const Ast& old_ast, const Ast& new_ast, const NodeMapping& mapping) {
  std::set<NodeId> seen_new;
  for (auto [o, n] : mapping.pairs()) {
    if (!old_ast.contains(o)) throw InvalidMapping("unknown old id " + std::to_string(o));
    if (!new_ast.contains(n)) throw InvalidMapping("unknown new id " + std::to_string(n));
    if (!seen_new.insert(n).second) {
      throw InvalidMapping("new id " + std::to_string(n) + " mapped twice");
    }
    if (old_ast.node(o).kind != new_ast.node(n).kind) {
      throw InvalidMapping("pair (" + std::to_string(o) + ", " + std::to_string(n) +
                           ") has different kinds");
    }
  }
}

// Changed lines approximated from spans when source text is unavailable:
// distinct start lines of deleted nodes plus those of added nodes.
std::size_t SpanChangedLines(const Ast& old_ast, const Ast& new_ast, const NodeMapping& mapping) {
  std::set<int> old_lines, new_lines;
  for (const AstNode& nd : old_ast.nodes()) {
    if (!mapping.has_old(nd.id) && nd.span) old_lines.insert(nd.span->start_line);
  }
  for (const AstNode& nd : new_ast.nodes()) {
    if (!mapping.has_new(nd.id) && nd.span) new_lines.insert(nd.span->start_line);
  }
  return old_lines.size() + new_lines.size();
}

}  // namespace

AnnotationCounts AlphaAst::node_counts() const { return Count(nodes); }
AnnotationCounts AlphaAst::edge_counts() const { return Count(edges); }

AlphaAst build_alpha_ast(const Ast& old_ast, const Ast& new_ast, const NodeMapping& mapping) {
  ValidateMapping(old_ast, new_ast, mapping);

  AlphaAst g;
  g.file_path = new_ast.file_path().empty() ? old_ast.file_path() : new_ast.file_path();

  std::vector<NodeId> old_to_graph(old_ast.size(), -1);
  std::vector<NodeId> new_to_graph(new_ast.size(), -1);

  for (NodeId o : old_ast.preorder()) {
    const auto gid = static_cast<NodeId>(g.nodes.size());
    old_to_graph[o] = gid;
    const AstNode& src = old_ast.node(o);
    AlphaNode node;
    node.id = gid;
    node.kind = src.kind;
    node.old_id = o;
    if (auto n = mapping.new_of(o)) {
      node.label = new_ast.node(*n).label;
      node.annotation = Annotation::Unchanged;
      node.new_id = *n;
      new_to_graph[*n] = gid;
    } else {
      node.label = src.label;
      node.annotation = Annotation::Deleted;
    }
    g.nodes.push_back(std::move(node));
  }
  for (NodeId n : new_ast.preorder()) {
    if (mapping.has_new(n)) continue;
    const auto gid = static_cast<NodeId>(g.nodes.size());
    new_to_graph[n] = gid;
    const AstNode& src = new_ast.node(n);
    AlphaNode node;
    node.id = gid;
    node.kind = src.kind;
    node.label = src.label;
    node.annotation = Annotation::Added;
    node.new_id = n;
    g.nodes.push_back(std::move(node));
  }

  // bit 0: edge exists in the old tree, bit 1: in the new tree.
  std::map<std::pair<NodeId, NodeId>, int> sides;
  for (NodeId p = 0; p < static_cast<NodeId>(old_ast.size()); ++p) {
    for (NodeId c : old_ast.children(p)) sides[{old_to_graph[p], old_to_graph[c]}] |= 1;
  }
  for (NodeId p = 0; p < static_cast<NodeId>(new_ast.size()); ++p) {
    for (NodeId c : new_ast.children(p)) sides[{new_to_graph[p], new_to_graph[c]}] |= 2;
  }
  g.edges.reserve(sides.size());
  for (const auto& [e, mask] : sides) {
    const Annotation a = mask == 3   ? Annotation::Unchanged
                         : mask == 2 ? Annotation::Added
                                     : Annotation::Deleted;
    g.edges.push_back(AlphaEdge{e.first, e.second, a});
  }

  if (old_ast.source() && new_ast.source()) {
    g.changed_loc = changed_line_count(*old_ast.source(), *new_ast.source());
  } else {
    g.changed_loc = SpanChangedLines(old_ast, new_ast, mapping);
  }
  return g;
}

AlphaAst diff_asts(const Ast& old_ast, const Ast& new_ast, const MatchOptions& options) {
  return build_alpha_ast(old_ast, new_ast, match_nodes(old_ast, new_ast, options));
}

AlphaAst merge_commit_graph(std::vector<AlphaAst> per_file, std::size_t node_cap) {
  if (per_file.empty()) throw EmptyCommit();
  std::stable_sort(per_file.begin(), per_file.end(),
                   [](const AlphaAst& a, const AlphaAst& b) { return a.file_path < b.file_path; });

  AlphaAst merged;
  AlphaNode root;
  root.id = 0;
  root.kind = kind::kCommitRoot;
  merged.nodes.push_back(root);

  for (AlphaAst& file : per_file) {
    const auto offset = static_cast<NodeId>(merged.nodes.size());
    std::vector<bool> has_parent(file.nodes.size(), false);
    for (const AlphaEdge& e : file.edges) has_parent[e.dst] = true;
    for (std::size_t i = 0; i < file.nodes.size(); ++i) {
      if (!has_parent[i]) {
        merged.edges.push_back(
            AlphaEdge{0, offset + static_cast<NodeId>(i), Annotation::Unchanged});
      }
    }
    for (AlphaNode& n : file.nodes) {
      n.id += offset;
      merged.nodes.push_back(std::move(n));
    }
    for (const AlphaEdge& e : file.edges) {
      merged.edges.push_back(AlphaEdge{e.src + offset, e.dst + offset, e.annotation});
    }
    merged.changed_loc += file.changed_loc;
  }
  std::sort(merged.edges.begin(), merged.edges.end(), [](const AlphaEdge& a, const AlphaEdge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  if (merged.nodes.size() > node_cap) truncate_graph(merged, node_cap);
  return merged;
}

void truncate_graph(AlphaAst& graph, std::size_t node_cap) {
  const std::size_t n = graph.nodes.size();
  if (n <= node_cap) return;

  std::vector<std::vector<NodeId>> adj(n);
  for (const AlphaEdge& e : graph.edges) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(n, kFar);
  std::deque<NodeId> queue;
  for (const AlphaNode& node : graph.nodes) {
    if (node.annotation != Annotation::Unchanged) {
      dist[node.id] = 0;
      queue.push_back(node.id);
    }
  }
  for (const AlphaEdge& e : graph.edges) {
    if (e.annotation == Annotation::Unchanged) continue;
    for (NodeId v : {e.src, e.dst}) {
      if (dist[v] != 0) {
        dist[v] = 0;
        queue.push_back(v);
      }
    }
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (NodeId w : adj[v]) {
      if (dist[w] == kFar) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }

  std::vector<NodeId> droppable;
  for (const AlphaNode& node : graph.nodes) {
    if (node.id != 0 && node.annotation == Annotation::Unchanged && dist[node.id] != 0) {
      droppable.push_back(node.id);
    }
  }
  // Farthest first; among equals, later ids first.
  std::sort(droppable.begin(), droppable.end(), [&](NodeId a, NodeId b) {
    return dist[a] != dist[b] ? dist[a] > dist[b] : a > b;
  });
  std::vector<bool> keep(n, true);
  std::size_t remaining = n;
  for (NodeId id : droppable) {
    if (remaining <= node_cap) break;
    keep[id] = false;
    --remaining;
  }

  std::vector<NodeId> remap(n, -1);
  std::vector<AlphaNode> nodes;
  nodes.reserve(remaining);
  for (AlphaNode& node : graph.nodes) {
    if (!keep[node.id]) continue;
    remap[node.id] = static_cast<NodeId>(nodes.size());
    node.id = remap[node.id];
    nodes.push_back(std::move(node));
  }
  std::vector<AlphaEdge> edges;
  for (const AlphaEdge& e : graph.edges) {
    if (remap[e.src] >= 0 && remap[e.dst] >= 0) {
      edges.push_back(AlphaEdge{remap[e.src], remap[e.dst], e.annotation});
    }
  }
  graph.nodes = std::move(nodes);
  graph.edges = std::move(edges);
}

}  // namespace fixgraph
