#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fixgraph/ast.hpp"

namespace fixgraph {

/// One-to-one correspondence between old-version and new-version node ids.
class NodeMapping {
 public:
  /// Throws InvalidMapping if either id is already mapped.
  void add(NodeId old_id, NodeId new_id);

  bool has_old(NodeId old_id) const { return old_to_new_.count(old_id) > 0; }
  bool has_new(NodeId new_id) const { return new_to_old_.count(new_id) > 0; }
  std::optional<NodeId> new_of(NodeId old_id) const;
  std::optional<NodeId> old_of(NodeId new_id) const;

  std::size_t size() const { return old_to_new_.size(); }
  bool empty() const { return old_to_new_.empty(); }
  /// Sorted by old id.
  std::vector<std::pair<NodeId, NodeId>> pairs() const;
  NodeMapping transposed() const;

  friend bool operator==(const NodeMapping& a, const NodeMapping& b) {
    return a.old_to_new_ == b.old_to_new_;
  }

 private:
  std::map<NodeId, NodeId> old_to_new_;
  std::map<NodeId, NodeId> new_to_old_;
};

struct MatchOptions {
  /// Minimum Dice coefficient over matched children for the bottom-up phase.
  double min_dice = 0.5;
  bool bottom_up = true;
  /// Pair the two roots when both are still unmatched and agree on kind/label.
  bool match_roots = true;
};

/// Two-phase greedy matcher.
///
/// Top-down: heights are visited from tallest to shortest; at each height,
/// unmatched old nodes (in preorder) take the first unmatched new node (in
/// preorder) of the same height whose subtree is isomorphic, and the whole
/// subtree pair is matched at once.
///
/// Bottom-up: old nodes are visited in postorder. An unmatched old node is
/// paired with the unmatched new node of equal kind and label that maximises
/// 2*|shared matched children| / (|children_old| + |children_new|), provided
/// the value reaches `min_dice`; ties go to the smaller new preorder index.
NodeMapping match_nodes(const Ast& old_ast, const Ast& new_ast, const MatchOptions& options = {});

}  // namespace fixgraph
