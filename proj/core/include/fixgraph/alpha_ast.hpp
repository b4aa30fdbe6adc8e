#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fixgraph/ast.hpp"
#include "fixgraph/matcher.hpp"

namespace fixgraph {

/// Change tag on αAST nodes and edges. The numeric value is the position of
/// the hot entry in the one-hot encoding (unchanged, added, deleted).
enum class Annotation : std::uint8_t { Unchanged = 0, Added = 1, Deleted = 2 };

std::array<double, 3> one_hot(Annotation a);
/// 'U', 'A' or 'D'.
char annotation_code(Annotation a);
Annotation annotation_from_code(char c);

struct AlphaNode {
  NodeId id = 0;
  std::string kind;
  std::optional<std::string> label;
  Annotation annotation = Annotation::Unchanged;
  /// Source ids in the old / new tree. Added nodes have no old id, deleted
  /// nodes no new id.
  std::optional<NodeId> old_id;
  std::optional<NodeId> new_id;
};

struct AlphaEdge {
  NodeId src = 0;
  NodeId dst = 0;
  Annotation annotation = Annotation::Unchanged;

  friend bool operator==(const AlphaEdge&, const AlphaEdge&) = default;
};

struct AnnotationCounts {
  std::size_t unchanged = 0;
  std::size_t added = 0;
  std::size_t deleted = 0;
  std::size_t total() const { return unchanged + added + deleted; }
};

/// Annotated AST: the union of the old and new trees of a change with every
/// node and edge tagged unchanged / added / deleted. Node ids are dense and
/// follow old-tree preorder, then the added nodes in new-tree preorder.
/// Edges are sorted by (src, dst).
struct AlphaAst {
  std::string file_path;
  std::vector<AlphaNode> nodes;
  std::vector<AlphaEdge> edges;
  std::size_t changed_loc = 0;

  AnnotationCounts node_counts() const;
  AnnotationCounts edge_counts() const;
};

/// Throws InvalidMapping when the mapping names unknown ids, is not
/// injective, or pairs nodes of different kinds.
AlphaAst build_alpha_ast(const Ast& old_ast, const Ast& new_ast, const NodeMapping& mapping);

/// match_nodes followed by build_alpha_ast.
AlphaAst diff_asts(const Ast& old_ast, const Ast& new_ast, const MatchOptions& options = {});

inline constexpr std::size_t kDefaultNodeCap = 50'000;

/// Joins per-file graphs (ordered by file path) under a fresh CommitRoot node
/// with unchanged edges to each file's root(s). changed_loc is summed. If the
/// result exceeds `node_cap` nodes it is truncated with truncate_graph.
/// Throws EmptyCommit on an empty list.
AlphaAst merge_commit_graph(std::vector<AlphaAst> per_file, std::size_t node_cap = kDefaultNodeCap);

/// Drops unchanged nodes farthest (undirected hop distance) from any changed
/// node until at most `node_cap` nodes remain. Node 0 is kept. Removing in
/// decreasing distance keeps every surviving node connected to a change.
void truncate_graph(AlphaAst& graph, std::size_t node_cap);

}  // namespace fixgraph
