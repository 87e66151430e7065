#include <string>
#include <vector>

#include "cassim/cass.hpp"

namespace cassim::cass {

namespace {

using cst::CstNode;
using cst::TokenCategory;

std::string context_prefix(const std::string& rule) {
  if (rule == "cond") return "cond:";
  if (rule == "arg_list") return "args:";
  if (rule == "paren_expr") return "expr:";
  return "";
}

struct Builder {
  const CassConfig& cfg;
  const ScopeInfo& scope;
  const BuildOptions& options;

  CassNode make_leaf(const CstNode& leaf) const {
    CassNode out;
    out.leaf = true;
    TokenCategory cat = cst::classify_token(leaf.token);
    if (cat == TokenCategory::literal) {
      out.label = options.keep_literals ? escape_token(leaf.token) : "#LIT";
      return out;
    }
    IdClass cls = scope.classify(leaf.span);
    switch (cls) {
      case IdClass::local_var:
        out.label = "#VAR";
        out.var_id = scope.binding_id(leaf.span);
        break;
      case IdClass::global_var:
        switch (cfg.global_vars) {
          case 0: out.label = escape_token(leaf.token); break;
          case 1:
            out.label = escape_token(leaf.token);
            out.feature_suppressed = true;
            break;
          case 2: out.label = "#GVAR"; break;
          default: out.label = "#VAR"; break;  // 3: indistinguishable from locals
        }
        break;
      case IdClass::global_func:
        switch (cfg.global_funcs) {
          case 0: out.label = escape_token(leaf.token); break;
          case 1:
            out.label = escape_token(leaf.token);
            out.feature_suppressed = true;
            break;
          default: out.label = "#EXFUNC"; break;
        }
        break;
      case IdClass::unknown:
        out.label = escape_token(leaf.token);
        break;
    }
    return out;
  }

  // Internal nodes: keyword/operator/punctuation children are spliced into
  // the label verbatim; identifier and literal tokens, and subtrees, appear
  // as one `$` each and become child nodes.
  CassNode make_internal(const CstNode& node) const {
    CassNode out;
    std::string label;
    for (const CstNode& child : node.children) {
      if (child.is_leaf()) {
        TokenCategory cat = cst::classify_token(child.token);
        if (cat == TokenCategory::keyword || cat == TokenCategory::punct) {
          label += escape_token(child.token);
          continue;
        }
        label.push_back('$');
        out.children.push_back(make_leaf(child));
        continue;
      }
      label.push_back('$');
      out.children.push_back(make_internal(child));
    }
    out.label = std::move(label);
    if (node.rule == "compound") {
      if (cfg.compound_stmt == 1) out.feature_suppressed = true;
      if (cfg.compound_stmt == 2) out.label = "{#}";
    }
    if (cfg.node_prefix == 1) {
      out.prefix = escape_token(node.rule) + ":";
    } else if (cfg.node_prefix == 2) {
      out.prefix = context_prefix(node.rule);
    }
    return out;
  }
};

// Children of a function_def before the first '(' are the return type plus
// the function name (the name is the child directly before the paren).
GatEntry gat_entry(const CstNode& fn) {
  GatEntry entry;
  size_t paren = fn.children.size();
  for (size_t i = 0; i < fn.children.size(); ++i) {
    if (fn.children[i].is_leaf() && fn.children[i].token == "(") {
      paren = i;
      break;
    }
  }
  if (paren > 0 && paren < fn.children.size() && fn.children[paren - 1].is_leaf()) {
    entry.function_name = fn.children[paren - 1].token;
  }
  bool is_void = false;
  bool has_star = false;
  for (size_t i = 0; i + 1 < paren; ++i) {
    if (!fn.children[i].is_leaf()) continue;
    if (fn.children[i].token == "void") is_void = true;
    if (fn.children[i].token == "*") has_star = true;
  }
  entry.output_cardinality = (is_void && !has_star) ? 0 : 1;
  for (const CstNode& child : fn.children) {
    if (child.is_leaf() || child.rule != "param_decl") continue;
    bool lone_void = child.children.size() == 1 && child.children[0].is_leaf() &&
                     child.children[0].token == "void";
    if (!lone_void) ++entry.input_cardinality;
  }
  return entry;
}

std::string function_name_of(const CstNode& fn) { return gat_entry(fn).function_name; }

}  // namespace

std::string escape_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (c == '\\' || c == '>' || c == '~' || c == ':') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

NodeLabel node_label(const cst::CstNode& node, const CassConfig& cfg, const ScopeInfo& scope,
                     const BuildOptions& options) {
  Builder builder{cfg, scope, options};
  CassNode built = node.is_leaf() ? builder.make_leaf(node) : builder.make_internal(node);
  return NodeLabel{built.label, built.prefix, built.feature_suppressed};
}

Cass build_cass(const cst::CstNode& translation_unit, const CassConfig& cfg,
                const BuildOptions& options) {
  ScopeInfo scope = classify_identifiers(translation_unit);
  Builder builder{cfg, scope, options};

  Cass cass;
  cass.config = cfg;
  std::vector<GatEntry> gat;
  bool any_function = false;
  for (const CstNode& item : translation_unit.children) {
    if (!item.is_leaf() && item.rule == "function_def") {
      any_function = true;
      CassTree tree;
      tree.function_name = function_name_of(item);
      tree.root = builder.make_internal(item);
      cass.trees.push_back(std::move(tree));
      if (cfg.fn_io_cardinality == 1) gat.push_back(gat_entry(item));
    }
  }
  if (!any_function) {
    // Snippet-level input: one tree over the top-level statement list.
    CassTree tree;
    if (!translation_unit.children.empty()) {
      tree.root = builder.make_internal(translation_unit);
    }
    cass.trees.push_back(std::move(tree));
  }
  if (cfg.fn_io_cardinality == 1) cass.gat = std::move(gat);
  return cass;
}

}  // namespace cassim::cass
