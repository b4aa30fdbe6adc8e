#include "fixgraph/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <memory>
#include <unordered_set>

#include "fixgraph/errors.hpp"

namespace fixgraph {

namespace {

enum class Tok { Ident, Keyword, Number, String, Char, Punct, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
  int end_line = 1;
  int end_col = 1;
};

const std::unordered_set<std::string>& Keywords() {
  static const std::unordered_set<std::string> k = {
      "int",    "char",   "void",  "long",     "short",  "float",  "double",
      "bool",   "signed", "unsigned", "const", "static", "extern", "volatile",
      "struct", "if",     "else",  "while",    "do",     "for",    "return",
      "break",  "continue", "sizeof"};
  return k;
}

const std::unordered_set<std::string>& TypeWords() {
  static const std::unordered_set<std::string> k = {
      "int",    "char",     "void",  "long",   "short",  "float",   "double",
      "bool",   "signed",   "unsigned", "const", "static", "extern", "volatile", "struct"};
  return k;
}

bool IsTypeName(const std::string& ident) {
  return ident.size() > 2 && ident.compare(ident.size() - 2, 2, "_t") == 0;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= text_.size()) {
        t.type = Tok::End;
        t.end_line = line_;
        t.end_col = col_;
        out.push_back(std::move(t));
        return out;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          t.text += advance();
        }
        t.type = Keywords().count(t.text) ? Tok::Keyword : Tok::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < text_.size() &&
                  std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                text_[pos_] == '_')) {
          t.text += advance();
        }
        t.type = Tok::Number;
      } else if (c == '"' || c == '\'') {
        t.type = c == '"' ? Tok::String : Tok::Char;
        t.text += advance();
        for (;;) {
          if (pos_ >= text_.size() || text_[pos_] == '\n') {
            throw SyntaxError(t.line, t.col, {c == '"' ? "\"" : "'"},
                              "unterminated literal");
          }
          char d = advance();
          t.text += d;
          if (d == '\\' && pos_ < text_.size()) {
            t.text += advance();
          } else if (d == c) {
            break;
          }
        }
      } else {
        static const std::array<std::string_view, 21> kMulti = {
            "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
            "&&",  "||",  "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="};
        bool matched = false;
        for (auto m : kMulti) {
          if (text_.substr(pos_, m.size()) == m) {
            for (std::size_t i = 0; i < m.size(); ++i) t.text += advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          static const std::string_view kSingle = "+-*/%<>=!&|^~?:;,.()[]{}";
          if (kSingle.find(c) == std::string_view::npos) {
            throw SyntaxError(line_, col_, {}, std::string("character '") + c + "'");
          }
          t.text += advance();
        }
        t.type = Tok::Punct;
      }
      t.end_line = last_line_;
      t.end_col = last_col_;
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = text_[pos_++];
    last_line_ = line_;
    last_col_ = col_;
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        const int l = line_, cl = col_;
        advance();
        advance();
        for (;;) {
          if (pos_ + 1 >= text_.size()) throw SyntaxError(l, cl, {"*/"}, "unterminated comment");
          if (text_[pos_] == '*' && text_[pos_ + 1] == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int last_line_ = 1;
  int last_col_ = 1;
};

struct PNode {
  std::string kind;
  std::optional<std::string> label;
  Span span;
  std::vector<std::unique_ptr<PNode>> kids;
};
using PNodePtr = std::unique_ptr<PNode>;

const std::vector<std::string>& ExprStartSet() {
  static const std::vector<std::string> s = {"identifier", "literal", "(", "-", "!", "~",
                                             "*", "&", "++", "--", "sizeof"};
  return s;
}

int BinaryPrecedence(const std::string& op) {
  static const std::vector<std::pair<std::string, int>> kTable = {
      {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},  {"==", 6}, {"!=", 6},
      {"<", 7},  {">", 7},  {"<=", 7}, {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9},
      {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10}};
  for (const auto& [o, p] : kTable) {
    if (o == op) return p;
  }
  return -1;
}

bool IsAssignOp(const std::string& op) {
  static const std::unordered_set<std::string> k = {"=",  "+=", "-=", "*=",  "/=", "%=",
                                                    "&=", "|=", "^=", "<<=", ">>="};
  return k.count(op) > 0;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  PNodePtr translation_unit() {
    auto root = std::make_unique<PNode>();
    root->kind = kind::kTranslationUnit;
    while (peek().type != Tok::End) {
      // Bare statements are accepted at file scope so code fragments parse.
      if (is_type_start() || at("struct")) {
        root->kids.push_back(external_declaration());
      } else {
        root->kids.push_back(statement());
      }
    }
    root->span = Span{1, 1, std::max(1, prev_end_line_), std::max(1, prev_end_col_)};
    expect_end();
    return root;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(std::string_view punct_or_kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return (t.type == Tok::Punct || t.type == Tok::Keyword) && t.text == punct_or_kw;
  }
  const Token& take() {
    const Token& t = toks_[pos_];
    prev_end_line_ = t.end_line;
    prev_end_col_ = t.end_col;
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.type == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.line, t.col, std::move(expected), found);
  }
  const Token& expect(std::string_view punct) {
    if (!at(punct)) fail({std::string(punct)});
    return take();
  }
  void expect_end() const {
    if (peek().type != Tok::End) fail({"end of input"});
  }
  std::string expect_ident() {
    if (peek().type != Tok::Ident) fail({"identifier"});
    return take().text;
  }

  PNodePtr open(std::string_view kind, const Token& start,
                std::optional<std::string> label = std::nullopt) const {
    auto n = std::make_unique<PNode>();
    n->kind = kind;
    n->label = std::move(label);
    n->span.start_line = start.line;
    n->span.start_col = start.col;
    return n;
  }
  PNodePtr open_at(std::string_view kind, const Span& start,
                   std::optional<std::string> label = std::nullopt) const {
    auto n = std::make_unique<PNode>();
    n->kind = kind;
    n->label = std::move(label);
    n->span.start_line = start.start_line;
    n->span.start_col = start.start_col;
    return n;
  }
  PNodePtr close(PNodePtr n) const {
    n->span.end_line = prev_end_line_;
    n->span.end_col = prev_end_col_;
    return n;
  }
  // Placeholder for an omitted for-clause, positioned at the next token.
  PNodePtr empty_placeholder() const {
    auto n = std::make_unique<PNode>();
    n->kind = kind::kEmptyStmt;
    const Token& t = peek();
    n->span = Span{t.line, t.col, t.line, t.col};
    return n;
  }

  // --- types ---------------------------------------------------------------

  bool is_type_start(std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    if (t.type == Tok::Keyword) return TypeWords().count(t.text) > 0;
    if (t.type == Tok::Ident && IsTypeName(t.text)) {
      const Token& next = peek(ahead + 1);
      return next.type == Tok::Ident || (next.type == Tok::Punct &&
                                         (next.text == "*" || next.text == ")"));
    }
    return false;
  }

  // Returns the base type text (e.g. "const char") and its span.
  std::pair<std::string, Span> base_type() {
    const Token& start = peek();
    std::string text;
    bool have_base = false;
    auto append = [&](const std::string& w) {
      if (!text.empty()) text += ' ';
      text += w;
    };
    for (;;) {
      const Token& t = peek();
      if (t.type == Tok::Keyword && t.text == "struct") {
        take();
        append("struct " + expect_ident());
        have_base = true;
      } else if (t.type == Tok::Keyword && TypeWords().count(t.text)) {
        append(take().text);
        if (t.text != "const" && t.text != "static" && t.text != "extern" &&
            t.text != "volatile") {
          have_base = true;
        }
      } else if (!have_base && t.type == Tok::Ident && IsTypeName(t.text)) {
        append(take().text);
        have_base = true;
      } else {
        break;
      }
    }
    if (text.empty()) fail({"type"});
    return {text, Span{start.line, start.col, prev_end_line_, prev_end_col_}};
  }

  int pointer_stars() {
    int n = 0;
    while (at("*") || at("const")) {
      if (take().text == "*") ++n;
    }
    return n;
  }

  PNodePtr type_spec(const std::string& base, const Span& span, int stars) const {
    auto n = std::make_unique<PNode>();
    n->kind = kind::kTypeSpec;
    n->label = base + std::string(stars, '*');
    n->span = span;
    return n;
  }

  // --- declarations ----------------------------------------------------------

  PNodePtr external_declaration() {
    const Token& start = peek();
    auto [base, type_span] = base_type();
    const int stars = pointer_stars();
    const Span star_span{type_span.start_line, type_span.start_col, prev_end_line_,
                         prev_end_col_};
    if (peek().type == Tok::Ident && at("(", 1)) {
      auto fn = open(kind::kFunctionDef, start);
      fn->label = take().text;
      fn->kids.push_back(type_spec(base, star_span, stars));
      fn->kids.push_back(parameter_list());
      if (at(";")) {
        take();
      } else {
        fn->kids.push_back(compound());
      }
      return close(std::move(fn));
    }
    return declaration_rest(start, base, type_span, stars);
  }

  PNodePtr parameter_list() {
    auto list = open(kind::kParamList, peek());
    expect("(");
    if (at("void") && at(")", 1)) {
      take();
    } else if (!at(")")) {
      for (;;) {
        const Token& pstart = peek();
        auto param = open(kind::kParam, pstart);
        auto [base, span] = base_type();
        int stars = pointer_stars();
        const Span tspan{span.start_line, span.start_col, prev_end_line_, prev_end_col_};
        if (peek().type == Tok::Ident) param->label = take().text;
        while (at("[")) {
          take();
          if (!at("]")) assignment();
          expect("]");
          ++stars;
        }
        param->kids.push_back(type_spec(base, tspan, stars));
        list->kids.push_back(close(std::move(param)));
        if (!at(",")) break;
        take();
      }
    }
    expect(")");
    return close(std::move(list));
  }

  PNodePtr declaration() {
    const Token& start = peek();
    auto [base, span] = base_type();
    const int stars = pointer_stars();
    return declaration_rest(start, base, span, stars);
  }

  // Parses declarators after the base type (and the first declarator's stars).
  PNodePtr declaration_rest(const Token& start, const std::string& base, const Span& type_span,
                            int first_stars) {
    auto decl = open(kind::kDeclStmt, start);
    int stars = first_stars;
    for (bool first = true;; first = false) {
      if (!first) stars = pointer_stars();
      const Span tspan{type_span.start_line, type_span.start_col, prev_end_line_,
                       prev_end_col_};
      auto var = open_at(kind::kVarDecl, type_span);
      var->label = expect_ident();
      var->kids.push_back(type_spec(base, first ? tspan : type_span, stars));
      if (!first) var->kids.back()->label = base + std::string(stars, '*');
      while (at("[")) {
        auto dim = open(kind::kArrayDim, peek());
        take();
        if (!at("]")) dim->kids.push_back(assignment());
        expect("]");
        var->kids.push_back(close(std::move(dim)));
      }
      if (at("=")) {
        take();
        var->kids.push_back(at("{") ? init_list() : assignment());
      }
      decl->kids.push_back(close(std::move(var)));
      if (!at(",")) break;
      take();
    }
    if (!at(";")) fail({";", ",", "=", "["});
    take();
    return close(std::move(decl));
  }

  PNodePtr init_list() {
    auto list = open(kind::kInitList, peek());
    expect("{");
    while (!at("}")) {
      list->kids.push_back(at("{") ? init_list() : assignment());
      if (!at(",")) break;
      take();
    }
    expect("}");
    return close(std::move(list));
  }

  // --- statements ------------------------------------------------------------

  PNodePtr compound() {
    auto block = open(kind::kCompoundStmt, peek());
    expect("{");
    while (!at("}")) {
      if (peek().type == Tok::End) fail({"}"});
      block->kids.push_back(statement());
    }
    take();
    return close(std::move(block));
  }

  PNodePtr statement() {
    const Token& t = peek();
    if (at("{")) return compound();
    if (at(";")) {
      auto n = open(kind::kEmptyStmt, t);
      take();
      return close(std::move(n));
    }
    if (at("if")) {
      auto n = open(kind::kIfStmt, t);
      take();
      expect("(");
      n->kids.push_back(expression());
      expect(")");
      n->kids.push_back(statement());
      if (at("else")) {
        take();
        n->kids.push_back(statement());
      }
      return close(std::move(n));
    }
    if (at("while")) {
      auto n = open(kind::kWhileStmt, t);
      take();
      expect("(");
      n->kids.push_back(expression());
      expect(")");
      n->kids.push_back(statement());
      return close(std::move(n));
    }
    if (at("do")) {
      auto n = open(kind::kDoStmt, t);
      take();
      n->kids.push_back(statement());
      if (!at("while")) fail({"while"});
      take();
      expect("(");
      n->kids.push_back(expression());
      expect(")");
      expect(";");
      return close(std::move(n));
    }
    if (at("for")) {
      auto n = open(kind::kForStmt, t);
      take();
      expect("(");
      if (at(";")) {
        n->kids.push_back(empty_placeholder());
        take();
      } else if (is_type_start()) {
        n->kids.push_back(declaration());
      } else {
        n->kids.push_back(expression());
        expect(";");
      }
      n->kids.push_back(at(";") ? empty_placeholder() : expression());
      expect(";");
      n->kids.push_back(at(")") ? empty_placeholder() : expression());
      expect(")");
      n->kids.push_back(statement());
      return close(std::move(n));
    }
    if (at("return")) {
      auto n = open(kind::kReturnStmt, t);
      take();
      if (!at(";")) n->kids.push_back(expression());
      expect(";");
      return close(std::move(n));
    }
    if (at("break") || at("continue")) {
      auto n = open(at("break") ? kind::kBreakStmt : kind::kContinueStmt, t);
      take();
      expect(";");
      return close(std::move(n));
    }
    if (is_type_start()) return declaration();
    auto n = open(kind::kExprStmt, t);
    n->kids.push_back(expression());
    if (!at(";")) fail({";"});
    take();
    return close(std::move(n));
  }

  // --- expressions -----------------------------------------------------------

  PNodePtr expression() { return assignment(); }

  PNodePtr assignment() {
    auto lhs = conditional();
    if (peek().type == Tok::Punct && IsAssignOp(peek().text)) {
      auto n = open_at(kind::kAssignExpr, lhs->span, take().text);
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(assignment());
      return close(std::move(n));
    }
    return lhs;
  }

  PNodePtr conditional() {
    auto cond = binary(1);
    if (!at("?")) return cond;
    auto n = open_at(kind::kConditionalExpr, cond->span);
    take();
    n->kids.push_back(std::move(cond));
    n->kids.push_back(expression());
    expect(":");
    n->kids.push_back(conditional());
    return close(std::move(n));
  }

  PNodePtr binary(int min_prec) {
    auto lhs = unary();
    for (;;) {
      const Token& t = peek();
      if (t.type != Tok::Punct) break;
      const int prec = BinaryPrecedence(t.text);
      if (prec < min_prec) break;
      auto n = open_at(kind::kBinaryExpr, lhs->span, take().text);
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(binary(prec + 1));
      lhs = close(std::move(n));
    }
    return lhs;
  }

  bool is_cast() const { return at("(") && is_type_start(1); }

  PNodePtr unary() {
    const Token& t = peek();
    if (t.type == Tok::Punct && (t.text == "-" || t.text == "+" || t.text == "!" ||
                                 t.text == "~" || t.text == "*" || t.text == "&" ||
                                 t.text == "++" || t.text == "--")) {
      auto n = open(kind::kUnaryExpr, t, t.text);
      take();
      n->kids.push_back(unary());
      return close(std::move(n));
    }
    if (at("sizeof")) {
      auto n = open(kind::kUnaryExpr, t, std::string("sizeof"));
      take();
      if (is_cast()) {
        take();
        auto [base, span] = base_type();
        const int stars = pointer_stars();
        n->kids.push_back(type_spec(
            base, Span{span.start_line, span.start_col, prev_end_line_, prev_end_col_}, stars));
        expect(")");
      } else {
        n->kids.push_back(unary());
      }
      return close(std::move(n));
    }
    if (is_cast()) {
      auto n = open(kind::kCastExpr, t);
      take();
      auto [base, span] = base_type();
      const int stars = pointer_stars();
      n->kids.push_back(type_spec(
          base, Span{span.start_line, span.start_col, prev_end_line_, prev_end_col_}, stars));
      expect(")");
      n->kids.push_back(unary());
      return close(std::move(n));
    }
    return postfix();
  }

  PNodePtr postfix() {
    auto e = primary();
    for (;;) {
      if (at("[")) {
        auto n = open_at(kind::kIndexExpr, e->span);
        take();
        n->kids.push_back(std::move(e));
        n->kids.push_back(expression());
        expect("]");
        e = close(std::move(n));
      } else if (at("(")) {
        auto n = open_at(kind::kCallExpr, e->span);
        take();
        n->kids.push_back(std::move(e));
        if (!at(")")) {
          for (;;) {
            n->kids.push_back(assignment());
            if (!at(",")) break;
            take();
          }
        }
        if (!at(")")) fail({",", ")"});
        take();
        e = close(std::move(n));
      } else if (at(".") || at("->")) {
        auto n = open_at(kind::kMemberExpr, e->span, take().text);
        n->kids.push_back(std::move(e));
        const Token& f = peek();
        auto field = open(kind::kIdentifier, f);
        field->label = expect_ident();
        n->kids.push_back(close(std::move(field)));
        e = close(std::move(n));
      } else if (at("++") || at("--")) {
        auto n = open_at(kind::kPostfixExpr, e->span, take().text);
        n->kids.push_back(std::move(e));
        e = close(std::move(n));
      } else {
        return e;
      }
    }
  }

  PNodePtr primary() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::Ident: {
        auto n = open(kind::kIdentifier, t, t.text);
        take();
        return close(std::move(n));
      }
      case Tok::Number:
      case Tok::String:
      case Tok::Char: {
        auto n = open(kind::kLiteral, t, t.text);
        take();
        return close(std::move(n));
      }
      default:
        break;
    }
    if (at("(")) {
      take();
      auto e = expression();
      expect(")");
      return e;
    }
    fail(ExprStartSet());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int prev_end_line_ = 1;
  int prev_end_col_ = 1;
};

}  // namespace

Ast parse_source(std::string_view text, std::string path) {
  Parser parser(Lexer(text).run());
  PNodePtr root = parser.translation_unit();

  std::vector<AstNode> nodes;
  std::vector<std::vector<NodeId>> children;
  // Preorder flattening: a node's id is assigned before any of its children.
  struct Frame {
    const PNode* node;
    NodeId parent;
  };
  std::vector<Frame> stack{{root.get(), -1}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.push_back(AstNode{id, f.node->kind, f.node->label, f.node->span});
    children.emplace_back();
    if (f.parent >= 0) children[f.parent].push_back(id);
    for (auto it = f.node->kids.rbegin(); it != f.node->kids.rend(); ++it) {
      stack.push_back({it->get(), id});
    }
  }
  return Ast(std::move(path), std::move(nodes), std::move(children), std::string(text));
}

}  // namespace fixgraph
