#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "fixgraph/ast.hpp"
#include "fixgraph/ast_json.hpp"
#include "fixgraph/errors.hpp"
#include "fixgraph/parser.hpp"
#include "fixgraph/synth.hpp"
#include "support/support.hpp"

namespace fixgraph {
namespace {

// Ids of all nodes of the given kind, in id order.
std::vector<NodeId> OfKind(const Ast& ast, std::string_view k) {
  std::vector<NodeId> out;
  for (const auto& n : ast.nodes()) {
    if (n.kind == k) out.push_back(n.id);
  }
  return out;
}

bool IsAncestor(const Ast& ast, NodeId a, NodeId d) {
  for (NodeId p = ast.parent(d); p >= 0; p = ast.parent(p)) {
    if (p == a) return true;
  }
  return false;
}

const char* kProgram = R"(
/* sample */
struct point *origin;
int sum(int *buf, int n) {
  int i, total = 0;
  int table[4] = {1, 2, 3, 4};
  for (i = 0; i < n; i++) {
    if (buf[i] > 0 && !(i % 2)) total += buf[i] * 2;
    else continue;
  }
  while (n-- > 0) { total = total ? total - 1 : 0; }
  do { n++; } while (n < 3);
  log_msg("done", (long)total, sizeof(int), p->x, q.y);
  return total;  // trailing
}
)";

TEST(Parser, FunctionWithReturn) {
  const Ast ast = parse_source("int f(){return 0;}");
  EXPECT_EQ(ast.node(0).kind, kind::kTranslationUnit);
  ASSERT_EQ(ast.children(0).size(), 1u);
  const AstNode& fn = ast.node(ast.children(0)[0]);
  EXPECT_EQ(fn.kind, kind::kFunctionDef);
  EXPECT_EQ(fn.label, "f");
  const auto returns = OfKind(ast, kind::kReturnStmt);
  ASSERT_EQ(returns.size(), 1u);
  EXPECT_TRUE(IsAncestor(ast, fn.id, returns[0]));
  ASSERT_EQ(ast.children(returns[0]).size(), 1u);
  const AstNode& lit = ast.node(ast.children(returns[0])[0]);
  EXPECT_EQ(lit.kind, kind::kLiteral);
  EXPECT_EQ(lit.label, "0");
}

TEST(Parser, EmptyInput) {
  const Ast ast = parse_source("");
  EXPECT_EQ(ast.size(), 1u);
  EXPECT_EQ(ast.node(0).kind, kind::kTranslationUnit);
  EXPECT_TRUE(ast.children(0).empty());
}

TEST(Parser, LoopConditionIsLessThan) {
  const Ast ast = parse_source("for (i = 0; i < BUF_SIZE; i++) process(buf[i]);");
  const auto loops = OfKind(ast, kind::kForStmt);
  ASSERT_EQ(loops.size(), 1u);
  const auto& parts = ast.children(loops[0]);
  ASSERT_EQ(parts.size(), 4u);
  const AstNode& cond = ast.node(parts[1]);
  EXPECT_EQ(cond.kind, kind::kBinaryExpr);
  EXPECT_EQ(cond.label, "<");
  ASSERT_EQ(ast.children(cond.id).size(), 2u);
  const AstNode& lhs = ast.node(ast.children(cond.id)[0]);
  const AstNode& rhs = ast.node(ast.children(cond.id)[1]);
  EXPECT_EQ(lhs.kind, kind::kIdentifier);
  EXPECT_EQ(lhs.label, "i");
  EXPECT_EQ(rhs.kind, kind::kIdentifier);
  EXPECT_EQ(rhs.label, "BUF_SIZE");
}

TEST(Parser, PrecedenceMultiplicationBindsTighter) {
  const Ast ast = parse_source("x = a + b * c;");
  const auto bins = OfKind(ast, kind::kBinaryExpr);
  ASSERT_EQ(bins.size(), 2u);
  EXPECT_EQ(ast.node(bins[0]).label, "+");
  EXPECT_EQ(ast.node(bins[1]).label, "*");
  EXPECT_EQ(ast.parent(bins[1]), bins[0]);
}

TEST(Parser, SyntaxErrorReportsPosition) {
  try {
    parse_source("int f() {\n  return 1 +;\n}");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.col(), 13);
    EXPECT_FALSE(e.expected().empty());
    EXPECT_EQ(e.category(), ErrorCategory::Input);
  }
  EXPECT_THROW(parse_source("int f( {"), SyntaxError);
  EXPECT_THROW(parse_source("x = @;"), SyntaxError);
  EXPECT_THROW(parse_source("int f() { return 0;"), SyntaxError);
}

TEST(Parser, CoversGrammar) {
  const Ast ast = parse_source(kProgram, "prog.c");
  for (auto k : {kind::kDoStmt, kind::kWhileStmt, kind::kIfStmt, kind::kContinueStmt,
                 kind::kConditionalExpr, kind::kUnaryExpr, kind::kCastExpr, kind::kMemberExpr,
                 kind::kInitList, kind::kArrayDim, kind::kCallExpr, kind::kIndexExpr,
                 kind::kPostfixExpr, kind::kAssignExpr}) {
    EXPECT_FALSE(OfKind(ast, k).empty()) << k;
  }
  EXPECT_EQ(ast.file_path(), "prog.c");
  ASSERT_TRUE(ast.source().has_value());
  EXPECT_EQ(*ast.source(), kProgram);
}

TEST(Parser, Deterministic) {
  EXPECT_TRUE(parse_source(kProgram) == parse_source(kProgram));
}

TEST(Parser, SpansNestAndPreorderMatchesIds) {
  const Dataset ds = synthesize(20, FixSignal::Mixed, 5);
  std::vector<Ast> trees{parse_source(kProgram)};
  for (const auto& s : ds.samples) {
    trees.push_back(parse_source(std::get<std::string>(s.files[0].old_version)));
  }
  for (const Ast& ast : trees) {
    for (std::size_t i = 0; i < ast.preorder().size(); ++i) {
      EXPECT_EQ(ast.preorder()[i], static_cast<NodeId>(i));
    }
    for (const auto& n : ast.nodes()) {
      ASSERT_TRUE(n.span.has_value());
      NodeId prev_start_line = -1, prev_start_col = -1;
      for (NodeId c : ast.children(n.id)) {
        const Span& cs = *ast.node(c).span;
        EXPECT_TRUE(n.span->contains(cs)) << n.kind << " / " << ast.node(c).kind;
        // Children come in source order.
        EXPECT_TRUE(std::tie(cs.start_line, cs.start_col) >=
                    std::tie(prev_start_line, prev_start_col));
        prev_start_line = cs.start_line;
        prev_start_col = cs.start_col;
      }
      if (n.kind == kind::kIdentifier || n.kind == kind::kLiteral) {
        ASSERT_TRUE(n.label.has_value());
        EXPECT_FALSE(n.label->empty());
      }
    }
  }
}

TEST(Ast, RejectsMalformedTrees) {
  AstNode root{0, "TranslationUnit", std::nullopt, std::nullopt};
  AstNode leaf{1, "Identifier", "x", std::nullopt};
  EXPECT_THROW(Ast("p", {root, leaf}, {{1}, {0}}), CycleError);
  EXPECT_THROW(Ast("p", {root, leaf}, {{}, {}}), CycleError);
  EXPECT_THROW(Ast("p", {root, leaf}, {{1, 1}, {}}), CycleError);
  EXPECT_THROW(Ast("p", {root, leaf}, {{7}, {}}), SchemaError);
  EXPECT_THROW(Ast("p", {}, {}), SchemaError);
  const Ast ok("p", {root, leaf}, {{1}, {}});
  EXPECT_THROW(ok.node(2), UnknownNode);
  EXPECT_THROW(subtree_hash(ok, -1), UnknownNode);
}

TEST(AstJson, MinimalDocument) {
  const Ast ast = ingest_ast_json(R"({"nodes":[{"id":0,"kind":"TranslationUnit"}],"children":{"0":[]}})");
  EXPECT_EQ(ast.size(), 1u);
  EXPECT_EQ(ast.node(0).kind, "TranslationUnit");
  EXPECT_TRUE(ast.children(0).empty());
  EXPECT_TRUE(ast == Ast("", {AstNode{0, "TranslationUnit", std::nullopt, std::nullopt}}, {{}}));
}

TEST(AstJson, SharedChildIsRejected) {
  const char* doc = R"({"nodes":[{"id":0,"kind":"A"},{"id":1,"kind":"B"},{"id":2,"kind":"C"}],
                        "children":{"0":[1,2],"2":[1]}})";
  try {
    ingest_ast_json(doc);
    FAIL() << "expected a tree violation";
  } catch (const CycleError&) {
  } catch (const SchemaError&) {
  }
}

TEST(AstJson, SchemaErrorsNamePath) {
  auto path_of = [](const char* doc) {
    try {
      ingest_ast_json(doc);
    } catch (const SchemaError& e) {
      return e.path();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(path_of(R"({"nodes":[{"id":0}],"children":{}})"), "$.nodes[0].kind");
  EXPECT_EQ(path_of(R"({"nodes":[{"id":0,"kind":"T"},{"id":"x","kind":"T"}]})"), "$.nodes[1].id");
  EXPECT_EQ(path_of(R"({"nodes":[{"id":0,"kind":"Identifier","label":""}]})"), "$.nodes[0].label");
  EXPECT_EQ(path_of(R"({"nodes":{}})"), "$.nodes");
  EXPECT_EQ(path_of(R"({"nodes":[{"id":0,"kind":"T","span":[1,2]}]})"), "$.nodes[0].span");
  EXPECT_EQ(path_of("[1"), "$");
}

TEST(AstJson, UnknownKindsAndAnyNodeOrder) {
  const Ast ast = ingest_ast_json(
      R"({"file_path":"x.py","nodes":[{"id":1,"kind":"Lambda","label":null},{"id":0,"kind":"Module"}],
          "children":{"0":[1]}})");
  EXPECT_EQ(ast.file_path(), "x.py");
  EXPECT_EQ(ast.node(1).kind, "Lambda");
  EXPECT_EQ(ast.parent(1), 0);
}

TEST(AstJson, ParserRoundTrip) {
  const Ast parsed = parse_source(kProgram, "prog.c");
  const std::string doc = export_ast_json(parsed);
  const Ast again = ingest_ast_json(doc);
  EXPECT_TRUE(again == parsed);
  EXPECT_EQ(export_ast_json(again), doc);
  EXPECT_FALSE(again.source().has_value());
}

TEST(AstJson, ExportOrdersChildrenKeysNumerically) {
  std::string src;
  for (int i = 0; i < 12; ++i) src += "x" + std::to_string(i) + " = " + std::to_string(i) + ";\n";
  const std::string doc = export_ast_json(parse_source(src));
  EXPECT_LT(doc.find("\"2\":"), doc.find("\"10\":"));
}

TEST(SubtreeHash, EqualForRepeatedParses) {
  EXPECT_EQ(subtree_hash(parse_source(kProgram), 0), subtree_hash(parse_source(kProgram), 0));
}

TEST(SubtreeHash, DistinguishesLabels) {
  const Ast a = parse_source("x;");
  const Ast b = parse_source("y;");
  const NodeId ia = OfKind(a, kind::kIdentifier)[0];
  const NodeId ib = OfKind(b, kind::kIdentifier)[0];
  EXPECT_NE(subtree_hash(a, ia), subtree_hash(b, ib));
}

TEST(SubtreeHash, IgnoresSpans) {
  const Ast a = parse_source("x;");
  const Ast b = parse_source("\n\n      x   ;");
  EXPECT_NE(a.node(1).span, b.node(1).span);
  EXPECT_EQ(subtree_hash(a, 0), subtree_hash(b, 0));
}

// Structural equality written against the raw node data.
bool Iso(const Ast& a, NodeId x, const Ast& b, NodeId y) {
  if (a.node(x).kind != b.node(y).kind || a.node(x).label != b.node(y).label) return false;
  const auto& ca = a.children(x);
  const auto& cb = b.children(y);
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!Iso(a, ca[i], b, cb[i])) return false;
  }
  return true;
}

TEST(SubtreeHash, CongruentWithIsomorphism) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const Ast a = testing::ToAst(testing::RandomRoot(rng, 3));
    const Ast b = testing::ToAst(testing::RandomRoot(rng, 3));
    for (NodeId x = 0; x < static_cast<NodeId>(a.size()); ++x) {
      for (NodeId y = 0; y < static_cast<NodeId>(b.size()); ++y) {
        const bool iso = Iso(a, x, b, y);
        EXPECT_EQ(iso, a.isomorphic(x, b, y));
        if (iso) {
          EXPECT_EQ(subtree_hash(a, x), subtree_hash(b, y));
        } else {
          EXPECT_NE(subtree_hash(a, x), subtree_hash(b, y));
        }
      }
    }
  }
}

TEST(Ast, HeightsAndParents) {
  const Ast ast = parse_source("x = a + 1;");
  // TranslationUnit > ExprStmt > AssignExpr > BinaryExpr > Identifier
  EXPECT_EQ(ast.height(0), 5);
  EXPECT_EQ(ast.parent(0), -1);
  for (NodeId i = 1; i < static_cast<NodeId>(ast.size()); ++i) {
    const NodeId p = ast.parent(i);
    const auto& kids = ast.children(p);
    EXPECT_NE(std::find(kids.begin(), kids.end(), i), kids.end());
    EXPECT_LT(ast.height(i), ast.height(p));
  }
}

TEST(DisplayName, OperatorNames) {
  EXPECT_EQ(display_name("BinaryExpr", "*"), "MultiplyExpr");
  EXPECT_EQ(display_name("BinaryExpr", "<"), "LessThanExpr");
  EXPECT_EQ(display_name("Identifier", "x"), "Identifier");
  EXPECT_EQ(display_name("Custom", std::nullopt), "Custom");
}

}  // namespace
}  // namespace fixgraph
