#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fixgraph {

using NodeId = std::int32_t;

/// Source range, 1-based. The end column is the column of the last character.
struct Span {
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  bool contains(const Span& other) const;
  friend bool operator==(const Span&, const Span&) = default;
};

/// Node categories produced by the built-in parser. Ingested trees may carry
/// kinds outside this list; those are kept verbatim as opaque strings.
namespace kind {
inline constexpr std::string_view kTranslationUnit = "TranslationUnit";
inline constexpr std::string_view kFunctionDef = "FunctionDef";
inline constexpr std::string_view kParamList = "ParamList";
inline constexpr std::string_view kParam = "Param";
inline constexpr std::string_view kTypeSpec = "TypeSpec";
inline constexpr std::string_view kDeclStmt = "DeclStmt";
inline constexpr std::string_view kVarDecl = "VarDecl";
inline constexpr std::string_view kArrayDim = "ArrayDim";
inline constexpr std::string_view kInitList = "InitList";
inline constexpr std::string_view kCompoundStmt = "CompoundStmt";
inline constexpr std::string_view kIfStmt = "IfStmt";
inline constexpr std::string_view kWhileStmt = "WhileStmt";
inline constexpr std::string_view kDoStmt = "DoStmt";
inline constexpr std::string_view kForStmt = "ForStmt";
inline constexpr std::string_view kReturnStmt = "ReturnStmt";
inline constexpr std::string_view kBreakStmt = "BreakStmt";
inline constexpr std::string_view kContinueStmt = "ContinueStmt";
inline constexpr std::string_view kExprStmt = "ExprStmt";
inline constexpr std::string_view kEmptyStmt = "EmptyStmt";
inline constexpr std::string_view kAssignExpr = "AssignExpr";
inline constexpr std::string_view kConditionalExpr = "ConditionalExpr";
inline constexpr std::string_view kBinaryExpr = "BinaryExpr";
inline constexpr std::string_view kUnaryExpr = "UnaryExpr";
inline constexpr std::string_view kPostfixExpr = "PostfixExpr";
inline constexpr std::string_view kCallExpr = "CallExpr";
inline constexpr std::string_view kIndexExpr = "IndexExpr";
inline constexpr std::string_view kMemberExpr = "MemberExpr";
inline constexpr std::string_view kCastExpr = "CastExpr";
inline constexpr std::string_view kIdentifier = "Identifier";
inline constexpr std::string_view kLiteral = "Literal";
inline constexpr std::string_view kCommitRoot = "CommitRoot";
}  // namespace kind

/// Human-readable name for a node, e.g. "MultiplyExpr" for BinaryExpr "*".
/// Falls back to the kind itself.
std::string display_name(std::string_view kind, const std::optional<std::string>& label);

struct AstNode {
  NodeId id = 0;
  std::string kind;
  std::optional<std::string> label;
  std::optional<Span> span;

  friend bool operator==(const AstNode&, const AstNode&) = default;
};

/// Ordered rooted tree for one version of one file. Immutable once built;
/// the constructor validates the tree shape and precomputes parent links,
/// preorder, subtree heights and subtree hashes.
class Ast {
 public:
  /// Single TranslationUnit root.
  Ast();

  /// Throws SchemaError when ids are not 0..n-1 or children reference unknown
  /// ids, CycleError when the children relation is not a tree rooted at 0.
  Ast(std::string file_path, std::vector<AstNode> nodes,
      std::vector<std::vector<NodeId>> children,
      std::optional<std::string> source = std::nullopt);

  const std::string& file_path() const { return file_path_; }
  /// Original text when the tree came from the parser.
  const std::optional<std::string>& source() const { return source_; }

  std::size_t size() const { return nodes_.size(); }
  bool contains(NodeId id) const { return id >= 0 && static_cast<std::size_t>(id) < nodes_.size(); }
  const AstNode& node(NodeId id) const;
  const std::vector<AstNode>& nodes() const { return nodes_; }
  const std::vector<NodeId>& children(NodeId id) const;
  const std::vector<std::vector<NodeId>>& children() const { return children_; }
  /// -1 for the root.
  NodeId parent(NodeId id) const;
  NodeId root() const { return 0; }

  /// Node ids in preorder (source order for parsed trees).
  const std::vector<NodeId>& preorder() const { return preorder_; }
  /// Position of a node in preorder().
  std::size_t preorder_index(NodeId id) const;
  /// Leaves have height 1.
  int height(NodeId id) const;
  std::uint64_t hash(NodeId id) const;

  /// Same shape, kinds and labels. Spans, ids and file paths are ignored.
  bool isomorphic(NodeId a, const Ast& other, NodeId b) const;

  /// Exact equality of path, nodes (including spans) and children lists.
  friend bool operator==(const Ast& a, const Ast& b) {
    return a.file_path_ == b.file_path_ && a.nodes_ == b.nodes_ && a.children_ == b.children_;
  }

 private:
  void index();

  std::string file_path_;
  std::vector<AstNode> nodes_;
  std::vector<std::vector<NodeId>> children_;
  std::optional<std::string> source_;

  std::vector<NodeId> parent_;
  std::vector<NodeId> preorder_;
  std::vector<std::size_t> preorder_index_;
  std::vector<int> height_;
  std::vector<std::uint64_t> hash_;
};

/// Deterministic 64-bit FNV-1a over (kind, label, ordered child hashes).
/// Throws UnknownNode.
std::uint64_t subtree_hash(const Ast& ast, NodeId node);

}  // namespace fixgraph
