#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cassim/cass.hpp"

namespace cassim::feat {

// Multiset of feature strings extracted from one program.
struct FeatureBag {
  std::string program_id;
  std::string class_label;  // empty when unlabeled
  std::map<std::string, int> counts;

  void add(std::string feature) { ++counts[std::move(feature)]; }
  int total() const;
  bool operator==(const FeatureBag&) const = default;
};

// Aroma-style manual features of a CASS:
//   1. internal-node labels (with prefix)
//   2. leaf labels
//   3. parent chains of each leaf, depth 1..3, with child indices
//   4. consecutive-leaf sibling pairs, per function
//   5. consecutive-use contexts of each local variable, per function
//   6. "IO:<in>-<out>" per GAT entry
// Features mentioning a suppressed node's label are omitted.
FeatureBag extract_features(const cass::Cass& cass);

// Feature index fitted on a corpus. Index 0 is reserved for the UNKNOWN
// token; retained features occupy dense indices [1, size).
struct Vocabulary {
  static constexpr int32_t kUnknown = 0;

  std::vector<std::string> features;  // sorted; features[i] has index i+1
  std::unordered_map<std::string, int32_t> index;
  int min_count = 5;

  int32_t size() const { return static_cast<int32_t>(features.size()) + 1; }
  int32_t lookup(const std::string& feature) const {
    auto it = index.find(feature);
    return it == index.end() ? kUnknown : it->second;
  }
};

// Features occurring fewer than min_count times in total collapse onto
// UNKNOWN. Deterministic: retained features are indexed in sorted order.
Vocabulary build_vocab(std::span<const FeatureBag> bags, int min_count = 5);

enum class VectorMode { binary, count };

struct SparseVector {
  int32_t dimension = 0;
  VectorMode mode = VectorMode::binary;
  std::vector<std::pair<int32_t, double>> entries;  // strictly increasing indices
};

SparseVector vectorize(const FeatureBag& bag, const Vocabulary& vocab, VectorMode mode);

// --- file formats ----------------------------------------------------------

// One JSON object per program: {"id", "label", "features": [["f", n], ...]}.
std::string bag_to_json(const FeatureBag& bag);
FeatureBag bag_from_json(std::string_view line);

std::string dump_vocab(const Vocabulary& vocab);
Vocabulary load_vocab(std::string_view bytes);

// Compatibility hash embedded in index and checkpoint files.
uint64_t vocab_hash(const Vocabulary& vocab);

}  // namespace cassim::feat
