#include "fixgraph/ast.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "fixgraph/errors.hpp"

namespace fixgraph {

bool Span::contains(const Span& other) const {
  auto before_or_at = [](int l1, int c1, int l2, int c2) {
    return l1 < l2 || (l1 == l2 && c1 <= c2);
  };
  return before_or_at(start_line, start_col, other.start_line, other.start_col) &&
         before_or_at(other.end_line, other.end_col, end_line, end_col);
}

std::string display_name(std::string_view kind, const std::optional<std::string>& label) {
  if (kind == kind::kBinaryExpr && label) {
    static const std::unordered_map<std::string, std::string> kNames = {
        {"+", "AddExpr"},          {"-", "SubtractExpr"},      {"*", "MultiplyExpr"},
        {"/", "DivideExpr"},       {"%", "ModuloExpr"},        {"<", "LessThanExpr"},
        {"<=", "LessEqualExpr"},   {">", "GreaterThanExpr"},   {">=", "GreaterEqualExpr"},
        {"==", "EqualExpr"},       {"!=", "NotEqualExpr"},     {"&&", "LogicalAndExpr"},
        {"||", "LogicalOrExpr"},   {"&", "BitAndExpr"},        {"|", "BitOrExpr"},
        {"^", "BitXorExpr"},       {"<<", "ShiftLeftExpr"},    {">>", "ShiftRightExpr"},
    };
    if (auto it = kNames.find(*label); it != kNames.end()) return it->second;
  }
  return std::string(kind);
}

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

struct Fnv1a {
  std::uint64_t state = kFnvOffset;
  void byte(unsigned char b) {
    state ^= b;
    state *= kFnvPrime;
  }
  void bytes(std::string_view s) {
    for (char c : s) byte(static_cast<unsigned char>(c));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));
  }
};

}  // namespace

Ast::Ast() {
  nodes_.push_back(AstNode{0, std::string(kind::kTranslationUnit), std::nullopt, std::nullopt});
  children_.resize(1);
  index();
}

Ast::Ast(std::string file_path, std::vector<AstNode> nodes,
         std::vector<std::vector<NodeId>> children, std::optional<std::string> source)
    : file_path_(std::move(file_path)),
      nodes_(std::move(nodes)),
      children_(std::move(children)),
      source_(std::move(source)) {
  if (nodes_.empty()) throw SchemaError("nodes", "tree must have a root node");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != static_cast<NodeId>(i)) {
      throw SchemaError("nodes[" + std::to_string(i) + "].id",
                        "ids must be dense 0..n-1 in order");
    }
  }
  if (children_.size() > nodes_.size()) {
    throw SchemaError("children", "more child lists than nodes");
  }
  children_.resize(nodes_.size());
  index();
}

void Ast::index() {
  const std::size_t n = nodes_.size();
  parent_.assign(n, -1);
  for (std::size_t p = 0; p < n; ++p) {
    for (NodeId c : children_[p]) {
      if (c < 0 || static_cast<std::size_t>(c) >= n) {
        throw SchemaError("children." + std::to_string(p), "unknown child id " + std::to_string(c));
      }
      if (c == 0) throw CycleError("root 0 listed as a child of " + std::to_string(p));
      if (parent_[c] != -1) {
        throw CycleError("node " + std::to_string(c) + " has parents " +
                         std::to_string(parent_[c]) + " and " + std::to_string(p));
      }
      parent_[c] = static_cast<NodeId>(p);
    }
  }

  preorder_.clear();
  preorder_.reserve(n);
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    preorder_.push_back(id);
    const auto& ch = children_[id];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  if (preorder_.size() != n) {
    throw CycleError(std::to_string(n - preorder_.size()) + " node(s) unreachable from root 0");
  }
  preorder_index_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) preorder_index_[preorder_[i]] = i;

  height_.assign(n, 1);
  hash_.assign(n, 0);
  for (auto it = preorder_.rbegin(); it != preorder_.rend(); ++it) {
    const NodeId id = *it;
    const AstNode& nd = nodes_[id];
    Fnv1a h;
    h.bytes(nd.kind);
    h.byte(0);
    h.byte(nd.label ? 1 : 0);
    if (nd.label) h.bytes(*nd.label);
    h.byte(0);
    h.u64(children_[id].size());
    int height = 1;
    for (NodeId c : children_[id]) {
      h.u64(hash_[c]);
      height = std::max(height, height_[c] + 1);
    }
    hash_[id] = h.state;
    height_[id] = height;
  }
}

const AstNode& Ast::node(NodeId id) const {
  if (!contains(id)) throw UnknownNode(id);
  return nodes_[id];
}

const std::vector<NodeId>& Ast::children(NodeId id) const {
  if (!contains(id)) throw UnknownNode(id);
  return children_[id];
}

NodeId Ast::parent(NodeId id) const {
  if (!contains(id)) throw UnknownNode(id);
  return parent_[id];
}

std::size_t Ast::preorder_index(NodeId id) const {
  if (!contains(id)) throw UnknownNode(id);
  return preorder_index_[id];
}

int Ast::height(NodeId id) const {
  if (!contains(id)) throw UnknownNode(id);
  return height_[id];
}

std::uint64_t Ast::hash(NodeId id) const {
  if (!contains(id)) throw UnknownNode(id);
  return hash_[id];
}

bool Ast::isomorphic(NodeId a, const Ast& other, NodeId b) const {
  std::vector<std::pair<NodeId, NodeId>> work{{a, b}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    const AstNode& nx = node(x);
    const AstNode& ny = other.node(y);
    if (nx.kind != ny.kind || nx.label != ny.label) return false;
    const auto& cx = children_[x];
    const auto& cy = other.children_[y];
    if (cx.size() != cy.size()) return false;
    for (std::size_t i = 0; i < cx.size(); ++i) work.emplace_back(cx[i], cy[i]);
  }
  return true;
}

std::uint64_t subtree_hash(const Ast& ast, NodeId node) { return ast.hash(node); }

}  // namespace fixgraph
