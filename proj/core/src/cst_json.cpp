#include <json.hpp>

#include "cassim/cst.hpp"

namespace cassim::cst {

namespace {

using nlohmann::json;

json node_to_json(const CstNode& node) {
  json j;
  j["kind"] = node.is_leaf() ? "leaf" : "internal";
  j["span"] = {node.span.begin, node.span.end};
  if (node.is_leaf()) {
    j["token"] = node.token;
  } else {
    j["rule"] = node.rule;
    json children = json::array();
    for (const auto& child : node.children) children.push_back(node_to_json(child));
    j["children"] = std::move(children);
  }
  return j;
}

[[noreturn]] void schema_error(const std::string& what, const std::string& path) {
  throw Error(what + " (at " + (path.empty() ? "/" : path) + ")");
}

CstNode node_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error("expected object", path);
  if (!j.contains("kind")) schema_error("missing field: kind", path);
  if (!j["kind"].is_string()) schema_error("field kind must be a string", path);
  std::string kind = j["kind"].get<std::string>();

  Span span;
  if (!j.contains("span")) schema_error("missing field: span", path);
  const json& s = j["span"];
  if (!s.is_array() || s.size() != 2 || !s[0].is_number_unsigned() || !s[1].is_number_unsigned()) {
    schema_error("field span must be [begin, end]", path);
  }
  span.begin = s[0].get<uint32_t>();
  span.end = s[1].get<uint32_t>();
  if (span.begin > span.end) schema_error("span begin exceeds end", path);

  if (kind == "leaf") {
    if (j.contains("children") && !j["children"].empty()) schema_error("leaf with children", path);
    if (!j.contains("token")) schema_error("missing field: token", path);
    if (!j["token"].is_string()) schema_error("field token must be a string", path);
    CstNode leaf = CstNode::leaf(j["token"].get<std::string>(), span);
    if (leaf.token.empty()) schema_error("leaf with empty token", path);
    return leaf;
  }
  if (kind != "internal") schema_error("field kind must be 'internal' or 'leaf'", path);
  if (!j.contains("rule")) schema_error("missing field: rule", path);
  if (!j["rule"].is_string()) schema_error("field rule must be a string", path);
  if (!j.contains("children")) schema_error("missing field: children", path);
  if (!j["children"].is_array()) schema_error("field children must be an array", path);
  if (j["children"].empty()) schema_error("internal node with no children", path);

  CstNode node;
  node.kind = NodeKind::internal;
  node.rule = j["rule"].get<std::string>();
  node.span = span;
  size_t i = 0;
  for (const json& child : j["children"]) {
    node.children.push_back(node_from_json(child, path + "/children/" + std::to_string(i)));
    ++i;
  }
  return node;
}

void check_node(const CstNode& node, const std::string& path) {
  if (node.span.begin > node.span.end) throw Error("span begin exceeds end (at " + path + ")");
  if (node.is_leaf()) {
    if (!node.children.empty()) throw Error("leaf with children (at " + path + ")");
    if (node.token.empty()) throw Error("leaf with empty token (at " + path + ")");
    return;
  }
  if (node.children.empty()) throw Error("internal node with no children (at " + path + ")");
  uint32_t cursor = node.span.begin;
  size_t i = 0;
  for (const CstNode& child : node.children) {
    std::string child_path = path + "/children/" + std::to_string(i);
    if (child.span.begin < cursor) {
      throw Error("child spans overlap or are out of order (at " + child_path + ")");
    }
    if (child.span.end > node.span.end) {
      throw Error("child span escapes parent (at " + child_path + ")");
    }
    cursor = child.span.end;
    check_node(child, child_path);
    ++i;
  }
}

}  // namespace

std::string dump_tree(const CstNode& tree) { return node_to_json(tree).dump(); }

CstNode load_tree(std::string_view json_bytes) {
  json j = json::parse(json_bytes, nullptr, false);
  if (j.is_discarded()) throw Error("invalid JSON");
  CstNode tree = node_from_json(j, "");
  check_invariants(tree);
  return tree;
}

void check_invariants(const CstNode& tree) { check_node(tree, ""); }

}  // namespace cassim::cst
