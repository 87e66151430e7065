#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cassim/cst.hpp"

namespace cassim::cass {

// The five configuration axes. 3*3*4*3*2 = 216 distinct configurations;
// 0-0-0-0-0 reproduces the plain simplified parse tree.
struct CassConfig {
  int node_prefix = 0;        // A: 0 none, 1 rule name on every internal node,
                              //    2 context prefix on paren group nodes only
  int compound_stmt = 0;      // B: 0 keep, 1 suppress features, 2 label "{#}"
  int global_vars = 0;        // C: 0 keep, 1 suppress, 2 "#GVAR", 3 "#VAR"
  int global_funcs = 0;       // D: 0 keep, 1 suppress, 2 "#EXFUNC"
  int fn_io_cardinality = 0;  // E: 0 off, 1 record per-function I/O in the GAT

  bool operator==(const CassConfig&) const = default;
};

// Parses "A-B-C-D-E". Throws Error naming the axis and allowed range.
CassConfig parse_config_id(std::string_view id);
std::string config_id(const CassConfig& cfg);

// All 216 configurations in lexicographic order (A outermost).
std::vector<CassConfig> enumerate_configs();

struct CassNode {
  std::string label;
  std::string prefix;  // includes the trailing ':' when present
  bool leaf = false;
  bool feature_suppressed = false;
  int var_id = -1;  // local-variable binding id, leaves only
  std::vector<CassNode> children;

  std::string display_label() const { return prefix + label; }
  bool operator==(const CassNode&) const = default;
};

struct CassTree {
  std::optional<CassNode> root;  // empty tree when absent
  std::string function_name;
};

struct GatEntry {
  std::string function_name;
  int input_cardinality = 0;
  int output_cardinality = 0;
};

struct Cass {
  std::vector<CassTree> trees;
  std::optional<std::vector<GatEntry>> gat;  // present iff fn_io_cardinality = 1
  CassConfig config;
};

enum class IdClass { local_var, global_var, global_func, unknown };

// Per-occurrence classification of identifier leaves, keyed by the leaf's
// span begin. Locals additionally get a binding id so featurization can
// follow one variable's consecutive uses.
struct ScopeInfo {
  std::unordered_map<uint32_t, IdClass> by_offset;
  std::unordered_map<uint32_t, int> binding_ids;

  IdClass classify(Span span) const {
    auto it = by_offset.find(span.begin);
    return it == by_offset.end() ? IdClass::unknown : it->second;
  }
  int binding_id(Span span) const {
    auto it = binding_ids.find(span.begin);
    return it == binding_ids.end() ? -1 : it->second;
  }
};

// Purely lexical scope analysis over a translation unit.
ScopeInfo classify_identifiers(const cst::CstNode& translation_unit);

struct BuildOptions {
  bool keep_literals = false;  // verbatim literals instead of "#LIT"
};

// Builds one CASS tree per function definition (or a single tree over the
// top-level statement list when the unit has no functions), plus the GAT
// when the configuration asks for it.
Cass build_cass(const cst::CstNode& translation_unit, const CassConfig& cfg,
                const BuildOptions& options = {});

struct NodeLabel {
  std::string label;
  std::string prefix;
  bool feature_suppressed = false;
};

// Label/prefix/suppression for a single syntax node under a configuration;
// the per-node view of what build_cass applies everywhere.
NodeLabel node_label(const cst::CstNode& node, const CassConfig& cfg, const ScopeInfo& scope,
                     const BuildOptions& options = {});

// Escapes the feature-string separator characters inside a raw token.
std::string escape_token(std::string_view token);

std::string dump_cass(const Cass& cass);

}  // namespace cassim::cass
