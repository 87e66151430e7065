#include <algorithm>
#include <json.hpp>

#include "cassim/featurize.hpp"

namespace cassim::feat {

namespace {
using nlohmann::json;
}

Vocabulary build_vocab(std::span<const FeatureBag> bags, int min_count) {
  if (min_count < 1) throw Error("min_count must be >= 1");
  std::map<std::string, long long> totals;
  for (const FeatureBag& bag : bags) {
    for (const auto& [feature, count] : bag.counts) totals[feature] += count;
  }
  Vocabulary vocab;
  vocab.min_count = min_count;
  for (const auto& [feature, total] : totals) {
    if (total >= min_count) vocab.features.push_back(feature);
  }
  // std::map iteration is already sorted; keep the invariant explicit.
  std::sort(vocab.features.begin(), vocab.features.end());
  for (size_t i = 0; i < vocab.features.size(); ++i) {
    vocab.index[vocab.features[i]] = static_cast<int32_t>(i) + 1;
  }
  return vocab;
}

SparseVector vectorize(const FeatureBag& bag, const Vocabulary& vocab, VectorMode mode) {
  std::map<int32_t, double> accum;
  for (const auto& [feature, count] : bag.counts) {
    int32_t idx = vocab.lookup(feature);
    accum[idx] += count;
  }
  SparseVector vec;
  vec.dimension = vocab.size();
  vec.mode = mode;
  vec.entries.reserve(accum.size());
  for (const auto& [idx, value] : accum) {
    vec.entries.emplace_back(idx, mode == VectorMode::binary ? 1.0 : value);
  }
  return vec;
}

std::string bag_to_json(const FeatureBag& bag) {
  json j;
  j["id"] = bag.program_id;
  j["label"] = bag.class_label.empty() ? json(nullptr) : json(bag.class_label);
  json features = json::array();
  for (const auto& [feature, count] : bag.counts) {
    features.push_back(json::array({feature, count}));
  }
  j["features"] = std::move(features);
  return j.dump();
}

FeatureBag bag_from_json(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("invalid feature line");
  FeatureBag bag;
  if (!j.contains("id") || !j["id"].is_string()) throw Error("feature line missing field: id");
  bag.program_id = j["id"].get<std::string>();
  if (j.contains("label") && j["label"].is_string()) {
    bag.class_label = j["label"].get<std::string>();
  }
  if (!j.contains("features") || !j["features"].is_array()) {
    throw Error("feature line missing field: features");
  }
  for (const json& item : j["features"]) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() ||
        !item[1].is_number_integer()) {
      throw Error("feature entries must be [string, count] pairs");
    }
    int count = item[1].get<int>();
    if (count < 1) throw Error("feature counts must be positive");
    bag.counts[item[0].get<std::string>()] += count;
  }
  return bag;
}

std::string dump_vocab(const Vocabulary& vocab) {
  json j;
  j["min_count"] = vocab.min_count;
  j["features"] = vocab.features;
  return j.dump();
}

Vocabulary load_vocab(std::string_view bytes) {
  json j = json::parse(bytes, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("invalid vocabulary file");
  if (!j.contains("min_count") || !j["min_count"].is_number_integer()) {
    throw Error("vocabulary missing field: min_count");
  }
  if (!j.contains("features") || !j["features"].is_array()) {
    throw Error("vocabulary missing field: features");
  }
  Vocabulary vocab;
  vocab.min_count = j["min_count"].get<int>();
  for (const json& f : j["features"]) {
    if (!f.is_string()) throw Error("vocabulary features must be strings");
    vocab.features.push_back(f.get<std::string>());
  }
  if (!std::is_sorted(vocab.features.begin(), vocab.features.end())) {
    throw Error("vocabulary features must be sorted");
  }
  for (size_t i = 0; i < vocab.features.size(); ++i) {
    vocab.index[vocab.features[i]] = static_cast<int32_t>(i) + 1;
  }
  return vocab;
}

uint64_t vocab_hash(const Vocabulary& vocab) {
  uint64_t h = fnv1a(std::to_string(vocab.min_count));
  for (const std::string& f : vocab.features) {
    h = fnv1a(f, h);
    h = fnv1a("\n", h);
  }
  return h;
}

}  // namespace cassim::feat
