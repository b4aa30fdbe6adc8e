#include "fixgraph/matcher.hpp"

#include <algorithm>
#include <unordered_map>

#include "fixgraph/errors.hpp"

namespace fixgraph {

void NodeMapping::add(NodeId old_id, NodeId new_id) {
  if (has_old(old_id)) {
    throw InvalidMapping("old node " + std::to_string(old_id) + " mapped twice");
  }
  if (has_new(new_id)) {
    throw InvalidMapping("new node " + std::to_string(new_id) + " mapped twice");
  }
  old_to_new_.emplace(old_id, new_id);
  new_to_old_.emplace(new_id, old_id);
}

std::optional<NodeId> NodeMapping::new_of(NodeId old_id) const {
  auto it = old_to_new_.find(old_id);
  if (it == old_to_new_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> NodeMapping::old_of(NodeId new_id) const {
  auto it = new_to_old_.find(new_id);
  if (it == new_to_old_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<NodeId, NodeId>> NodeMapping::pairs() const {
  return {old_to_new_.begin(), old_to_new_.end()};
}

NodeMapping NodeMapping::transposed() const {
  NodeMapping t;
  t.old_to_new_ = new_to_old_;
  t.new_to_old_ = old_to_new_;
  return t;
}

namespace {

void MatchSubtree(const Ast& old_ast, NodeId o, const Ast& new_ast, NodeId n,
                  NodeMapping& mapping) {
  std::vector<std::pair<NodeId, NodeId>> work{{o, n}};
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    mapping.add(a, b);
    const auto& ca = old_ast.children(a);
    const auto& cb = new_ast.children(b);
    for (std::size_t i = 0; i < ca.size(); ++i) work.emplace_back(ca[i], cb[i]);
  }
}

void TopDown(const Ast& old_ast, const Ast& new_ast, NodeMapping& mapping) {
  const int max_height = std::max(old_ast.height(0), new_ast.height(0));
  std::vector<std::vector<NodeId>> old_by_height(max_height + 1);
  std::vector<std::vector<NodeId>> new_by_height(max_height + 1);
  for (NodeId id : old_ast.preorder()) old_by_height[old_ast.height(id)].push_back(id);
  for (NodeId id : new_ast.preorder()) new_by_height[new_ast.height(id)].push_back(id);

  for (int h = max_height; h >= 1; --h) {
    if (old_by_height[h].empty() || new_by_height[h].empty()) continue;
    std::unordered_map<std::uint64_t, std::vector<NodeId>> buckets;
    for (NodeId n : new_by_height[h]) {
      if (!mapping.has_new(n)) buckets[new_ast.hash(n)].push_back(n);
    }
    for (NodeId o : old_by_height[h]) {
      if (mapping.has_old(o)) continue;
      auto it = buckets.find(old_ast.hash(o));
      if (it == buckets.end()) continue;
      for (NodeId n : it->second) {
        if (mapping.has_new(n)) continue;
        if (old_ast.isomorphic(o, new_ast, n)) {
          MatchSubtree(old_ast, o, new_ast, n, mapping);
          break;
        }
      }
    }
  }
}

std::vector<NodeId> Postorder(const Ast& ast) {
  std::vector<NodeId> out;
  out.reserve(ast.size());
  std::vector<std::pair<NodeId, bool>> stack{{0, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      out.push_back(id);
      continue;
    }
    stack.emplace_back(id, true);
    const auto& ch = ast.children(id);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.emplace_back(*it, false);
  }
  return out;
}

void BottomUp(const Ast& old_ast, const Ast& new_ast, double min_dice, NodeMapping& mapping) {
  for (NodeId o : Postorder(old_ast)) {
    if (mapping.has_old(o)) continue;
    const auto& old_children = old_ast.children(o);
    if (old_children.empty()) continue;
    const AstNode& on = old_ast.node(o);

    // Only parents of mapped partners can share children with o.
    std::vector<std::pair<NodeId, int>> shared;  // (new candidate, count)
    for (NodeId c : old_children) {
      auto partner = mapping.new_of(c);
      if (!partner) continue;
      const NodeId p = new_ast.parent(*partner);
      if (p < 0 || mapping.has_new(p)) continue;
      const AstNode& pn = new_ast.node(p);
      if (pn.kind != on.kind || pn.label != on.label) continue;
      auto it = std::find_if(shared.begin(), shared.end(),
                             [p](const auto& e) { return e.first == p; });
      if (it == shared.end()) {
        shared.emplace_back(p, 1);
      } else {
        ++it->second;
      }
    }

    NodeId best = -1;
    double best_dice = -1.0;
    for (auto [cand, count] : shared) {
      const double dice = 2.0 * count /
                          static_cast<double>(old_children.size() + new_ast.children(cand).size());
      if (dice > best_dice ||
          (dice == best_dice && new_ast.preorder_index(cand) < new_ast.preorder_index(best))) {
        best = cand;
        best_dice = dice;
      }
    }
    if (best >= 0 && best_dice >= min_dice) mapping.add(o, best);
  }
}

}  // namespace

NodeMapping match_nodes(const Ast& old_ast, const Ast& new_ast, const MatchOptions& options) {
  NodeMapping mapping;
  TopDown(old_ast, new_ast, mapping);
  if (options.bottom_up) BottomUp(old_ast, new_ast, options.min_dice, mapping);
  if (options.match_roots && !mapping.has_old(0) && !mapping.has_new(0)) {
    const AstNode& a = old_ast.node(0);
    const AstNode& b = new_ast.node(0);
    if (a.kind == b.kind && a.label == b.label) mapping.add(0, 0);
  }
  return mapping;
}

}  // namespace fixgraph
