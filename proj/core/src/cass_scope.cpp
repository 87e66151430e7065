#include <string>
#include <unordered_map>
#include <vector>

#include "cassim/cass.hpp"

namespace cassim::cass {

namespace {

using cst::CstNode;
using cst::TokenCategory;

struct Binding {
  IdClass cls = IdClass::unknown;
  int var_id = -1;
};

bool is_type_keyword(const CstNode& n) {
  static const std::string_view kinds[] = {"int",   "float",    "double", "char",  "void",
                                           "long",  "short",    "unsigned", "signed", "const"};
  if (!n.is_leaf() || cst::classify_token(n.token) != TokenCategory::keyword) return false;
  for (auto k : kinds)
    if (n.token == k) return true;
  return false;
}

bool is_identifier_leaf(const CstNode& n) {
  return n.is_leaf() && cst::classify_token(n.token) == TokenCategory::identifier;
}

// Walks the translation unit once, resolving every identifier occurrence
// against a scope stack. File-scope names are collected up front so calls to
// functions defined later in the file still classify as global functions.
class ScopeAnalyzer {
 public:
  ScopeInfo run(const CstNode& tu) {
    scopes_.emplace_back();  // file scope
    for (const CstNode& item : tu.children) {
      if (item.rule == "function_def") {
        if (const CstNode* name = definition_name(item)) {
          scopes_[0][name->token] = Binding{IdClass::global_func, -1};
        }
      } else if (item.rule == "decl_stmt") {
        for (const CstNode* name : declared_names(item)) {
          scopes_[0][name->token] = Binding{IdClass::global_var, -1};
        }
      }
    }
    for (const CstNode& item : tu.children) {
      if (item.rule == "function_def") {
        walk_function(item);
      } else {
        walk(item);
      }
    }
    return std::move(info_);
  }

 private:
  // --- structural helpers --------------------------------------------------

  // Index of the first child past the declaration's type tokens. When the
  // type core is a plain identifier (e.g. FILE) it is classified `unknown`
  // on the spot.
  size_t skip_type(const CstNode& node, bool classify_core) {
    size_t i = 0;
    bool saw_core = false;
    while (i < node.children.size() && is_type_keyword(node.children[i])) {
      if (node.children[i].token != "const") saw_core = true;
      ++i;
    }
    if (!saw_core && i < node.children.size() && is_identifier_leaf(node.children[i])) {
      if (classify_core) mark(node.children[i], IdClass::unknown, -1);
      ++i;
    }
    while (i < node.children.size() && node.children[i].is_leaf() &&
           (node.children[i].token == "*" || node.children[i].token == "const")) {
      ++i;
    }
    return i;
  }

  const CstNode* definition_name(const CstNode& fn) {
    size_t i = skip_type(fn, /*classify_core=*/false);
    if (i < fn.children.size() && is_identifier_leaf(fn.children[i])) return &fn.children[i];
    return nullptr;
  }

  // Declared identifier of a declarator item (plain leaf, `declarator`,
  // or `init_decl` wrapping either).
  const CstNode* declarator_name(const CstNode& item) {
    const CstNode* cur = &item;
    while (!cur->is_leaf()) {
      if (cur->children.empty()) return nullptr;
      cur = &cur->children.front();
    }
    return is_identifier_leaf(*cur) ? cur : nullptr;
  }

  std::vector<const CstNode*> declared_names(const CstNode& decl) {
    std::vector<const CstNode*> names;
    size_t i = skip_type(decl, /*classify_core=*/false);
    for (; i < decl.children.size(); ++i) {
      const CstNode& child = decl.children[i];
      if (child.is_leaf() &&
          (child.token == "," || child.token == ";" || child.token == "*")) {
        continue;
      }
      if (const CstNode* name = declarator_name(child)) names.push_back(name);
    }
    return names;
  }

  // --- scope stack ---------------------------------------------------------

  void mark(const CstNode& leaf, IdClass cls, int var_id) {
    info_.by_offset[leaf.span.begin] = cls;
    if (var_id >= 0) info_.binding_ids[leaf.span.begin] = var_id;
  }

  void resolve(const CstNode& leaf, bool call_position) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(leaf.token);
      if (found != it->end()) {
        mark(leaf, found->second.cls, found->second.var_id);
        return;
      }
    }
    mark(leaf, call_position ? IdClass::global_func : IdClass::global_var, -1);
  }

  void bind_local(const CstNode& name) {
    int id = next_binding_++;
    scopes_.back()[name.token] = Binding{IdClass::local_var, id};
    mark(name, IdClass::local_var, id);
  }

  // --- traversal -----------------------------------------------------------

  void walk_function(const CstNode& fn) {
    size_t i = skip_type(fn, /*classify_core=*/true);
    if (i < fn.children.size() && is_identifier_leaf(fn.children[i])) {
      mark(fn.children[i], IdClass::global_func, -1);
      ++i;
    }
    scopes_.emplace_back();
    for (; i < fn.children.size(); ++i) {
      const CstNode& child = fn.children[i];
      if (child.is_leaf()) continue;
      if (child.rule == "param_decl") {
        walk_param(child);
      } else {
        walk(child);  // body compound
      }
    }
    scopes_.pop_back();
  }

  void walk_param(const CstNode& param) {
    size_t i = skip_type(param, /*classify_core=*/true);
    if (i < param.children.size() && is_identifier_leaf(param.children[i])) {
      bind_local(param.children[i]);
      ++i;
    }
    for (; i < param.children.size(); ++i) walk(param.children[i]);
  }

  void walk_decl(const CstNode& decl, bool file_scope) {
    size_t i = skip_type(decl, /*classify_core=*/true);
    for (; i < decl.children.size(); ++i) {
      const CstNode& item = decl.children[i];
      if (item.is_leaf()) {
        if (item.token == "," || item.token == ";" || item.token == "*") continue;
        if (is_identifier_leaf(item)) declare(item, file_scope);
        continue;
      }
      // declarator or init_decl: declare the name first, then walk the
      // array-size and initializer expressions with the binding visible.
      if (const CstNode* name = declarator_name(item)) declare(*name, file_scope);
      walk_skipping_declared_name(item);
    }
  }

  void declare(const CstNode& name, bool file_scope) {
    if (file_scope) {
      scopes_[0][name.token] = Binding{IdClass::global_var, -1};
      mark(name, IdClass::global_var, -1);
    } else {
      bind_local(name);
    }
  }

  void walk_skipping_declared_name(const CstNode& item) {
    bool first = true;
    for (const CstNode& child : item.children) {
      if (first && (is_identifier_leaf(child) || child.rule == "declarator")) {
        if (is_identifier_leaf(child)) {
          first = false;
          continue;  // already declared
        }
        walk_skipping_declared_name(child);
        first = false;
        continue;
      }
      first = false;
      walk(child);
    }
  }

  void walk(const CstNode& node) {
    if (node.is_leaf()) {
      if (is_identifier_leaf(node)) resolve(node, /*call_position=*/false);
      return;
    }
    if (node.rule == "decl_stmt") {
      walk_decl(node, scopes_.size() == 1);
      return;
    }
    if (node.rule == "compound" || node.rule == "for_stmt") {
      scopes_.emplace_back();
      for (const CstNode& child : node.children) walk(child);
      scopes_.pop_back();
      return;
    }
    if (node.rule == "call_expr" && !node.children.empty()) {
      if (is_identifier_leaf(node.children.front())) {
        resolve(node.children.front(), /*call_position=*/true);
      } else {
        walk(node.children.front());
      }
      for (size_t i = 1; i < node.children.size(); ++i) walk(node.children[i]);
      return;
    }
    if (node.rule == "member_expr" && node.children.size() == 3) {
      walk(node.children[0]);
      if (is_identifier_leaf(node.children[2])) {
        mark(node.children[2], IdClass::unknown, -1);
      }
      return;
    }
    for (const CstNode& child : node.children) walk(child);
  }

  ScopeInfo info_;
  std::vector<std::unordered_map<std::string, Binding>> scopes_;
  int next_binding_ = 0;
};

}  // namespace

ScopeInfo classify_identifiers(const cst::CstNode& translation_unit) {
  ScopeAnalyzer analyzer;
  return analyzer.run(translation_unit);
}

}  // namespace cassim::cass
