#include <utility>

#include "cassim/cst.hpp"

namespace cassim::cst {

CstNode CstNode::internal(std::string rule, std::vector<CstNode> children) {
  CstNode n;
  n.kind = NodeKind::internal;
  n.rule = std::move(rule);
  n.children = std::move(children);
  if (!n.children.empty()) {
    n.span = Span{n.children.front().span.begin, n.children.back().span.end};
  }
  return n;
}

namespace {

struct SyntaxError {
  Span span;
  std::string message;
};

// Recursive-descent parser for the C subset. Statement conditions, call
// argument lists, and parenthesized expressions all become explicit group
// nodes so downstream configurations can tell the contexts apart.
class Parser {
 public:
  Parser(std::vector<Token> tokens, uint32_t eof_offset)
      : tokens_(std::move(tokens)), eof_(eof_offset) {}

  CstNode parse_translation_unit() {
    if (tokens_.empty()) fail("empty translation unit");
    std::vector<CstNode> items;
    while (!at_end()) items.push_back(parse_external_declaration());
    CstNode tu = CstNode::internal("translation_unit", std::move(items));
    if (tu.children.empty()) tu.span = Span{0, 0};
    else tu.span = Span{0, tu.children.back().span.end};
    return tu;
  }

 private:
  // --- token helpers -------------------------------------------------------
  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek(size_t ahead = 0) const {
    static const Token eof_token{};
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : eof_token;
  }
  bool check(std::string_view text) const { return !at_end() && peek().text == text; }
  bool check_category(TokenCategory cat) const { return !at_end() && peek().category == cat; }

  Span here() const {
    if (at_end()) return Span{eof_, eof_};
    return peek().span;
  }

  [[noreturn]] void fail(const std::string& message) { throw SyntaxError{here(), message}; }

  CstNode advance() {
    if (at_end()) fail("unexpected end of input");
    const Token& t = tokens_[pos_++];
    return CstNode::leaf(t.text, t.span);
  }

  CstNode expect(std::string_view text) {
    if (!check(text)) {
      fail("expected '" + std::string(text) + "'" +
           (at_end() ? " before end of input" : " before '" + peek().text + "'"));
    }
    return advance();
  }

  bool is_type_keyword(const Token& t) const {
    static const std::string_view kinds[] = {"int",   "float",    "double", "char",  "void",
                                             "long",  "short",    "unsigned", "signed", "const"};
    if (t.category != TokenCategory::keyword) return false;
    for (auto k : kinds)
      if (t.text == k) return true;
    return false;
  }

  // A declaration starts with a type keyword, or with `ident ident` (a named
  // type such as FILE). `ident *ident` is parsed as an expression; resolving
  // it properly would need a typedef table.
  bool at_declaration_start() const {
    if (at_end()) return false;
    if (is_type_keyword(peek())) return true;
    return peek().category == TokenCategory::identifier &&
           peek(1).category == TokenCategory::identifier;
  }

  // --- declarations --------------------------------------------------------

  // Type core: const/type-keyword run, or a single identifier type name,
  // followed by '*'s. Appended flat into the parent's children.
  void parse_type_tokens(std::vector<CstNode>& out) {
    bool saw_core = false;
    while (!at_end()) {
      if (is_type_keyword(peek())) {
        saw_core = saw_core || peek().text != "const";
        out.push_back(advance());
        continue;
      }
      break;
    }
    if (!saw_core) {
      if (!check_category(TokenCategory::identifier)) fail("expected type name");
      out.push_back(advance());
    }
    while (check("*") || check("const")) out.push_back(advance());
  }

  CstNode parse_external_declaration() {
    size_t snapshot = pos_;
    std::vector<CstNode> head;
    try {
      parse_type_tokens(head);
    } catch (const SyntaxError&) {
      pos_ = snapshot;
      fail("expected declaration or function definition");
    }
    if (check_category(TokenCategory::identifier) && peek(1).text == "(") {
      return parse_function_def(std::move(head));
    }
    pos_ = snapshot;
    return parse_declaration_stmt();
  }

  CstNode parse_function_def(std::vector<CstNode> children) {
    children.push_back(advance());  // function name
    children.push_back(expect("("));
    if (!check(")")) {
      children.push_back(parse_param_decl());
      while (check(",")) {
        children.push_back(advance());
        children.push_back(parse_param_decl());
      }
    }
    children.push_back(expect(")"));
    children.push_back(parse_compound());
    return CstNode::internal("function_def", std::move(children));
  }

  CstNode parse_param_decl() {
    std::vector<CstNode> children;
    parse_type_tokens(children);
    if (check_category(TokenCategory::identifier)) {
      children.push_back(advance());
      while (check("[")) {
        children.push_back(advance());
        if (!check("]")) children.push_back(parse_assignment());
        children.push_back(expect("]"));
      }
    }
    return CstNode::internal("param_decl", std::move(children));
  }

  CstNode parse_declaration_stmt() {
    std::vector<CstNode> children;
    parse_type_tokens(children);
    parse_init_declarator(children);
    while (check(",")) {
      children.push_back(advance());
      parse_init_declarator(children);
    }
    children.push_back(expect(";"));
    return CstNode::internal("decl_stmt", std::move(children));
  }

  // Declarator forms. A bare name stays a plain leaf; array suffixes wrap it
  // in a `declarator` node and an initializer wraps that in `init_decl`.
  void parse_init_declarator(std::vector<CstNode>& out) {
    while (check("*")) out.push_back(advance());
    if (!check_category(TokenCategory::identifier)) fail("expected declarator name");
    CstNode decl = advance();
    if (check("[")) {
      std::vector<CstNode> parts;
      parts.push_back(std::move(decl));
      while (check("[")) {
        parts.push_back(advance());
        if (!check("]")) parts.push_back(parse_assignment());
        parts.push_back(expect("]"));
      }
      decl = CstNode::internal("declarator", std::move(parts));
    }
    if (check("=")) {
      std::vector<CstNode> parts;
      parts.push_back(std::move(decl));
      parts.push_back(advance());
      parts.push_back(parse_assignment());
      decl = CstNode::internal("init_decl", std::move(parts));
    }
    out.push_back(std::move(decl));
  }

  // --- statements ----------------------------------------------------------

  CstNode parse_compound() {
    std::vector<CstNode> children;
    children.push_back(expect("{"));
    while (!check("}")) {
      if (at_end()) fail("expected '}' before end of input");
      children.push_back(parse_statement());
    }
    children.push_back(expect("}"));
    return CstNode::internal("compound", std::move(children));
  }

  CstNode parse_cond_group() {
    std::vector<CstNode> children;
    children.push_back(expect("("));
    children.push_back(parse_expression());
    children.push_back(expect(")"));
    return CstNode::internal("cond", std::move(children));
  }

  CstNode parse_statement() {
    if (check("{")) return parse_compound();
    if (check("if")) {
      std::vector<CstNode> children;
      children.push_back(advance());
      children.push_back(parse_cond_group());
      children.push_back(parse_statement());
      if (check("else")) {
        children.push_back(advance());
        children.push_back(parse_statement());
      }
      return CstNode::internal("if_stmt", std::move(children));
    }
    if (check("while")) {
      std::vector<CstNode> children;
      children.push_back(advance());
      children.push_back(parse_cond_group());
      children.push_back(parse_statement());
      return CstNode::internal("while_stmt", std::move(children));
    }
    if (check("for")) return parse_for();
    if (check("return")) {
      std::vector<CstNode> children;
      children.push_back(advance());
      if (!check(";")) children.push_back(parse_expression());
      children.push_back(expect(";"));
      return CstNode::internal("return_stmt", std::move(children));
    }
    if (check("break") || check("continue")) {
      std::string rule = peek().text == "break" ? "break_stmt" : "continue_stmt";
      std::vector<CstNode> children;
      children.push_back(advance());
      children.push_back(expect(";"));
      return CstNode::internal(rule, std::move(children));
    }
    if (check(";")) {
      std::vector<CstNode> children;
      children.push_back(advance());
      return CstNode::internal("null_stmt", std::move(children));
    }
    if (at_declaration_start()) return parse_declaration_stmt();
    std::vector<CstNode> children;
    children.push_back(parse_expression());
    children.push_back(expect(";"));
    return CstNode::internal("expr_stmt", std::move(children));
  }

  // The whole `(init; cond; step)` header is one group node so that the
  // condition-context prefix can attach to it.
  CstNode parse_for() {
    std::vector<CstNode> children;
    children.push_back(advance());  // for
    std::vector<CstNode> header;
    header.push_back(expect("("));
    if (at_declaration_start()) {
      header.push_back(parse_declaration_stmt());  // consumes its ';'
    } else {
      if (!check(";")) header.push_back(parse_expression());
      header.push_back(expect(";"));
    }
    if (!check(";")) header.push_back(parse_expression());
    header.push_back(expect(";"));
    if (!check(")")) header.push_back(parse_expression());
    header.push_back(expect(")"));
    children.push_back(CstNode::internal("cond", std::move(header)));
    children.push_back(parse_statement());
    return CstNode::internal("for_stmt", std::move(children));
  }

  // --- expressions ---------------------------------------------------------

  CstNode parse_expression() {
    CstNode lhs = parse_assignment();
    while (check(",")) {
      std::vector<CstNode> children;
      children.push_back(std::move(lhs));
      children.push_back(advance());
      children.push_back(parse_assignment());
      lhs = CstNode::internal("comma_expr", std::move(children));
    }
    return lhs;
  }

  bool at_assignment_op() const {
    static const std::string_view ops[] = {"=",  "+=", "-=", "*=",  "/=", "%=",
                                           "&=", "|=", "^=", "<<=", ">>="};
    if (at_end()) return false;
    for (auto op : ops)
      if (peek().text == op) return true;
    return false;
  }

  CstNode parse_assignment() {
    CstNode lhs = parse_ternary();
    if (at_assignment_op()) {
      std::vector<CstNode> children;
      children.push_back(std::move(lhs));
      children.push_back(advance());
      children.push_back(parse_assignment());
      return CstNode::internal("assign_expr", std::move(children));
    }
    return lhs;
  }

  CstNode parse_ternary() {
    CstNode cond = parse_binary(1);
    if (!check("?")) return cond;
    std::vector<CstNode> children;
    children.push_back(std::move(cond));
    children.push_back(advance());
    children.push_back(parse_assignment());
    children.push_back(expect(":"));
    children.push_back(parse_ternary());
    return CstNode::internal("ternary_expr", std::move(children));
  }

  static int binary_precedence(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 7;
    if (op == "<<" || op == ">>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return 0;
  }

  CstNode parse_binary(int min_prec) {
    CstNode lhs = parse_unary();
    while (!at_end()) {
      int prec = binary_precedence(peek().text);
      if (prec < min_prec || prec == 0) break;
      std::vector<CstNode> children;
      children.push_back(std::move(lhs));
      children.push_back(advance());
      children.push_back(parse_binary(prec + 1));
      lhs = CstNode::internal("binary_expr", std::move(children));
    }
    return lhs;
  }

  CstNode parse_unary() {
    static const std::string_view ops[] = {"++", "--", "!", "~", "-", "+", "*", "&"};
    for (auto op : ops) {
      if (check(op)) {
        std::vector<CstNode> children;
        children.push_back(advance());
        children.push_back(parse_unary());
        return CstNode::internal("unary_expr", std::move(children));
      }
    }
    return parse_postfix();
  }

  CstNode parse_postfix() {
    CstNode base = parse_primary();
    while (!at_end()) {
      if (check("(")) {
        std::vector<CstNode> args;
        args.push_back(advance());
        if (!check(")")) {
          args.push_back(parse_assignment());
          while (check(",")) {
            args.push_back(advance());
            args.push_back(parse_assignment());
          }
        }
        args.push_back(expect(")"));
        std::vector<CstNode> children;
        children.push_back(std::move(base));
        children.push_back(CstNode::internal("arg_list", std::move(args)));
        base = CstNode::internal("call_expr", std::move(children));
      } else if (check("[")) {
        std::vector<CstNode> children;
        children.push_back(std::move(base));
        children.push_back(advance());
        children.push_back(parse_expression());
        children.push_back(expect("]"));
        base = CstNode::internal("index_expr", std::move(children));
      } else if (check(".") || check("->")) {
        std::vector<CstNode> children;
        children.push_back(std::move(base));
        children.push_back(advance());
        if (!check_category(TokenCategory::identifier)) fail("expected member name");
        children.push_back(advance());
        base = CstNode::internal("member_expr", std::move(children));
      } else if (check("++") || check("--")) {
        std::vector<CstNode> children;
        children.push_back(std::move(base));
        children.push_back(advance());
        base = CstNode::internal("postfix_expr", std::move(children));
      } else {
        break;
      }
    }
    return base;
  }

  CstNode parse_primary() {
    if (check("(")) {
      std::vector<CstNode> children;
      children.push_back(advance());
      children.push_back(parse_expression());
      children.push_back(expect(")"));
      return CstNode::internal("paren_expr", std::move(children));
    }
    if (check_category(TokenCategory::identifier) || check_category(TokenCategory::literal)) {
      return advance();
    }
    if (at_end()) fail("unexpected end of input in expression");
    fail("unexpected token '" + peek().text + "'");
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
  uint32_t eof_;
};

}  // namespace

ParseResult parse_source(const SourceFile& file) {
  ParseDiagnostics diags;
  try {
    std::string stripped = preprocess(file.contents);
    std::vector<Token> tokens = lex(stripped);
    Parser parser(std::move(tokens), static_cast<uint32_t>(file.contents.size()));
    return parser.parse_translation_unit();
  } catch (const SyntaxError& e) {
    diags.errors.push_back(Diagnostic{e.span, e.message});
  } catch (const Error& e) {
    uint32_t end = static_cast<uint32_t>(file.contents.size());
    diags.errors.push_back(Diagnostic{Span{end, end}, e.what()});
  }
  return diags;
}

CstNode parse_or_throw(const SourceFile& file) {
  ParseResult result = parse_source(file);
  if (auto* tree = std::get_if<CstNode>(&result)) return std::move(*tree);
  const auto& diags = std::get<ParseDiagnostics>(result);
  std::string msg = file.path.empty() ? "parse error" : file.path;
  if (!diags.errors.empty()) {
    msg += ": " + diags.errors.front().message + " at byte " +
           std::to_string(diags.errors.front().span.begin);
  }
  throw Error(msg);
}

}  // namespace cassim::cst
