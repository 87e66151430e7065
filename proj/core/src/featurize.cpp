#include <string>
#include <vector>

#include "cassim/featurize.hpp"

namespace cassim::feat {

namespace {

using cass::CassNode;

struct PathEntry {
  const CassNode* node;
  size_t index_in_parent;  // index of this node within its own parent
};

struct LeafRecord {
  const CassNode* leaf;
  int var_id;
  size_t index_in_parent;
  std::vector<PathEntry> ancestors;  // innermost (parent) first
};

struct TreeWalker {
  FeatureBag& bag;
  std::vector<LeafRecord> leaves;
  std::vector<PathEntry> stack;

  void walk(const CassNode& node, size_t index_in_parent) {
    if (!node.feature_suppressed) bag.add(node.display_label());
    if (node.leaf) {
      LeafRecord rec;
      rec.leaf = &node;
      rec.var_id = node.var_id;
      rec.index_in_parent = index_in_parent;
      for (auto it = stack.rbegin(); it != stack.rend(); ++it) rec.ancestors.push_back(*it);
      leaves.push_back(std::move(rec));
      return;
    }
    stack.push_back(PathEntry{&node, index_in_parent});
    for (size_t i = 0; i < node.children.size(); ++i) walk(node.children[i], i);
    stack.pop_back();
  }
};

// Parent-chain features: "L(leaf)>i1>L(a1)[>i2>L(a2)[>i3>L(a3)]]" where a1 is
// the parent and i_k the child index of the path's step into a_k. Chains
// touching a suppressed node are cut; shorter chains below it survive.
void emit_parent_chains(FeatureBag& bag, const LeafRecord& rec) {
  if (rec.leaf->feature_suppressed) return;
  std::string feature = rec.leaf->display_label();
  for (size_t k = 0; k < rec.ancestors.size() && k < 3; ++k) {
    const CassNode* ancestor = rec.ancestors[k].node;
    if (ancestor->feature_suppressed) break;
    size_t step = k == 0 ? rec.index_in_parent : rec.ancestors[k - 1].index_in_parent;
    feature += ">" + std::to_string(step) + ">" + ancestor->display_label();
    bag.add(feature);
  }
}

}  // namespace

int FeatureBag::total() const {
  int n = 0;
  for (const auto& [feature, count] : counts) n += count;
  return n;
}

FeatureBag extract_features(const cass::Cass& cass) {
  FeatureBag bag;
  for (const cass::CassTree& tree : cass.trees) {
    if (!tree.root) continue;
    TreeWalker walker{bag, {}, {}};
    walker.walk(*tree.root, 0);

    for (const LeafRecord& rec : walker.leaves) emit_parent_chains(bag, rec);

    // Consecutive leaves in traversal order.
    for (size_t i = 0; i + 1 < walker.leaves.size(); ++i) {
      const LeafRecord& a = walker.leaves[i];
      const LeafRecord& b = walker.leaves[i + 1];
      if (a.leaf->feature_suppressed || b.leaf->feature_suppressed) continue;
      bag.add(a.leaf->display_label() + "~" + b.leaf->display_label());
    }

    // Consecutive uses of each local variable, linked by their parents'
    // labels. Uses are already in source order.
    std::map<int, std::vector<const LeafRecord*>> uses;
    for (const LeafRecord& rec : walker.leaves) {
      if (rec.var_id >= 0) uses[rec.var_id].push_back(&rec);
    }
    for (const auto& [var_id, occurrences] : uses) {
      for (size_t i = 0; i + 1 < occurrences.size(); ++i) {
        const LeafRecord* a = occurrences[i];
        const LeafRecord* b = occurrences[i + 1];
        if (a->ancestors.empty() || b->ancestors.empty()) continue;
        const CassNode* pa = a->ancestors.front().node;
        const CassNode* pb = b->ancestors.front().node;
        if (pa->feature_suppressed || pb->feature_suppressed) continue;
        bag.add("use:" + pa->display_label() + ">" + pb->display_label());
      }
    }
  }
  if (cass.gat) {
    for (const cass::GatEntry& entry : *cass.gat) {
      bag.add("IO:" + std::to_string(entry.input_cardinality) + "-" +
              std::to_string(entry.output_cardinality));
    }
  }
  return bag;
}

}  // namespace cassim::feat
