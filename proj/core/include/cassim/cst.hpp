#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cassim/common.hpp"

namespace cassim::cst {

enum class NodeKind { internal, leaf };

// Concrete syntax tree node. Leaves carry the verbatim token; internal nodes
// carry a grammar rule name and at least one child. Spans are byte offsets
// into the original (un-preprocessed) source.
struct CstNode {
  NodeKind kind = NodeKind::leaf;
  std::string rule;   // internal only
  std::string token;  // leaf only
  Span span;
  std::vector<CstNode> children;  // internal only

  bool is_leaf() const { return kind == NodeKind::leaf; }
  bool operator==(const CstNode&) const = default;

  static CstNode leaf(std::string token, Span span) {
    CstNode n;
    n.kind = NodeKind::leaf;
    n.token = std::move(token);
    n.span = span;
    return n;
  }
  static CstNode internal(std::string rule, std::vector<CstNode> children);
};

struct Diagnostic {
  Span span;
  std::string message;
};

struct ParseDiagnostics {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;
};

enum class Dialect { c_subset, external };

struct SourceFile {
  std::string path;
  std::string contents;
  Dialect dialect = Dialect::c_subset;
};

using ParseResult = std::variant<CstNode, ParseDiagnostics>;

// Parses the C-subset dialect. A tree is returned only when the source is
// syntactically valid; otherwise the diagnostics carry at least one error.
ParseResult parse_source(const SourceFile& file);

// Convenience wrapper that throws Error with the first diagnostic message.
CstNode parse_or_throw(const SourceFile& file);

// Canonical JSON serialization (sorted keys, stable child order). Equal trees
// serialize to identical bytes.
std::string dump_tree(const CstNode& tree);

// Inverse of dump_tree. Throws Error naming the offending field and its path
// on schema violations, e.g. `missing field: kind (at /children/1)`.
CstNode load_tree(std::string_view json_bytes);

// Structural invariants: leaf/internal field rules, span ordering and
// containment. Throws Error on the first violation.
void check_invariants(const CstNode& tree);

// --- lexing layer, exposed for tests and for the CASS builder -------------

enum class TokenCategory { keyword, identifier, literal, punct };

struct Token {
  std::string text;
  Span span;
  TokenCategory category = TokenCategory::punct;
};

// Replaces comments and preprocessor lines with spaces so byte offsets are
// preserved. Throws Error on an unterminated block comment.
std::string preprocess(std::string_view contents);

// Token stream of the preprocessed source. Throws Error on lexical errors
// (unterminated string/char literal, stray bytes).
std::vector<Token> lex(std::string_view contents);

bool is_keyword(std::string_view text);

// Category derived from token text alone; used when the producing lexer is
// unavailable (externally ingested trees).
TokenCategory classify_token(std::string_view text);

}  // namespace cassim::cst
