#include <json.hpp>

#include "cassim/cass.hpp"

namespace cassim::cass {

namespace {

using nlohmann::json;

json node_to_json(const CassNode& node) {
  json j;
  j["kind"] = node.leaf ? "leaf" : "internal";
  j["label"] = node.label;
  if (!node.prefix.empty()) j["prefix"] = node.prefix;
  if (node.feature_suppressed) j["suppressed"] = true;
  if (node.var_id >= 0) j["var"] = node.var_id;
  if (!node.leaf) {
    json children = json::array();
    for (const auto& child : node.children) children.push_back(node_to_json(child));
    j["children"] = std::move(children);
  }
  return j;
}

}  // namespace

std::string dump_cass(const Cass& cass) {
  json j;
  j["config"] = config_id(cass.config);
  json trees = json::array();
  for (const CassTree& tree : cass.trees) {
    json t;
    t["function"] = tree.function_name;
    t["root"] = tree.root ? node_to_json(*tree.root) : json(nullptr);
    trees.push_back(std::move(t));
  }
  j["trees"] = std::move(trees);
  if (cass.gat) {
    json gat = json::array();
    for (const GatEntry& entry : *cass.gat) {
      gat.push_back({{"fn", entry.function_name},
                     {"in", entry.input_cardinality},
                     {"out", entry.output_cardinality}});
    }
    j["gat"] = std::move(gat);
  }
  return j.dump();
}

}  // namespace cassim::cass
