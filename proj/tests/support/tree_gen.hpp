#pragma once

// Random well-formed CstNode generator for serialization round-trip and
// invariant property tests. Spans are assigned left to right with random
// gaps, the way a real lexer lays tokens out.

#include <string>
#include <vector>

#include "cassim/cst.hpp"
#include "cassim/rng.hpp"

namespace treegen {

inline cassim::cst::CstNode random_tree(cassim::Rng& rng, int max_depth = 5) {
  using cassim::cst::CstNode;
  uint32_t cursor = 0;

  const std::vector<std::string> rules = {"translation_unit", "compound", "expr_stmt",
                                          "binary_expr",      "call_expr", "group"};
  const std::vector<std::string> tokens = {"x", "y", "if", "(", ")", "42", "+", ";", "foo", "{"};

  auto make_leaf = [&]() {
    std::string token = tokens[rng.bounded(tokens.size())];
    cursor += static_cast<uint32_t>(rng.bounded(3));  // random gap
    cassim::Span span{cursor, cursor + static_cast<uint32_t>(token.size())};
    cursor = span.end;
    return CstNode::leaf(token, span);
  };

  // Generated bottom-up so child spans nest correctly by construction.
  auto build = [&](auto&& self, int depth) -> CstNode {
    bool leaf = depth >= max_depth || rng.bounded(100) < 35;
    if (leaf) return make_leaf();
    size_t n_children = 1 + rng.bounded(4);
    std::vector<CstNode> children;
    children.reserve(n_children);
    for (size_t i = 0; i < n_children; ++i) children.push_back(self(self, depth + 1));
    return CstNode::internal(rules[rng.bounded(rules.size())], std::move(children));
  };
  return build(build, 0);
}

}  // namespace treegen
