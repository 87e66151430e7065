#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "cassim/simindex.hpp"

namespace cassim::sim {

namespace {
using feat::SparseVector;
using nlohmann::json;
}  // namespace

Metric metric_from_name(std::string_view name) {
  if (name == "dot") return Metric::dot;
  if (name == "cosine") return Metric::cosine;
  throw Error("unknown metric '" + std::string(name) + "' (expected dot or cosine)");
}

std::string_view metric_name(Metric metric) {
  return metric == Metric::dot ? "dot" : "cosine";
}

double dot(const SparseVector& a, const SparseVector& b) {
  if (a.dimension != b.dimension) {
    throw Error("dimension mismatch: " + std::to_string(a.dimension) + " vs " +
                std::to_string(b.dimension));
  }
  double sum = 0.0;
  size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    int32_t ai = a.entries[i].first;
    int32_t bj = b.entries[j].first;
    if (ai == bj) {
      sum += a.entries[i].second * b.entries[j].second;
      ++i;
      ++j;
    } else if (ai < bj) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

double norm(const SparseVector& v) {
  double sum = 0.0;
  for (const auto& [idx, value] : v.entries) sum += value * value;
  return std::sqrt(sum);
}

double cosine(const SparseVector& a, const SparseVector& b) {
  double na = norm(a);
  double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

CorpusIndex build_index(std::span<const feat::FeatureBag> bags, const feat::Vocabulary& vocab,
                        feat::VectorMode mode) {
  if (bags.empty()) throw Error("cannot build an index from an empty corpus");
  std::vector<size_t> order(bags.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return bags[a].program_id < bags[b].program_id; });

  CorpusIndex index;
  index.dimension = vocab.size();
  index.mode = mode;
  index.vocab_hash = feat::vocab_hash(vocab);
  for (size_t pos : order) {
    const feat::FeatureBag& bag = bags[pos];
    if (!index.ids.empty() && index.ids.back() == bag.program_id) {
      throw Error("duplicate program id '" + bag.program_id + "'");
    }
    index.ids.push_back(bag.program_id);
    index.labels.push_back(bag.class_label);
    index.vectors.push_back(feat::vectorize(bag, vocab, mode));
    index.norms.push_back(norm(index.vectors.back()));
    if (index.norms.back() == 0.0) {
      index.warnings.push_back("program '" + bag.program_id + "' has an empty feature vector");
    }
  }
  return index;
}

double pair_score(const CorpusIndex& index, size_t i, size_t j, Metric metric) {
  if (metric == Metric::dot) return dot(index.vectors[i], index.vectors[j]);
  double na = index.norms[i];
  double nb = index.norms[j];
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(index.vectors[i], index.vectors[j]) / (na * nb);
}

RankedResult query(const CorpusIndex& index, const SparseVector& q, int k, Metric metric,
                   std::string query_id) {
  if (k < 1 || static_cast<size_t>(k) > index.size()) {
    throw Error("k must be in [1, " + std::to_string(index.size()) + "], got " +
                std::to_string(k));
  }
  double qn = norm(q);
  std::vector<std::pair<double, size_t>> scored;
  scored.reserve(index.size());
  for (size_t i = 0; i < index.size(); ++i) {
    double s;
    if (metric == Metric::dot) {
      s = dot(q, index.vectors[i]);
    } else {
      s = (qn == 0.0 || index.norms[i] == 0.0) ? 0.0 : dot(q, index.vectors[i]) / (qn * index.norms[i]);
    }
    scored.emplace_back(s, i);
  }
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return index.ids[a.second] < index.ids[b.second];
  });
  RankedResult result;
  result.query_id = std::move(query_id);
  result.metric = metric;
  for (int i = 0; i < k; ++i) {
    result.hits.emplace_back(index.ids[scored[i].second], scored[i].first);
  }
  return result;
}

std::vector<PairScore> pairwise_scores(const CorpusIndex& index, Metric metric,
                                       bool include_self) {
  const size_t n = index.size();
  std::vector<PairScore> out;
  out.reserve(include_self ? n * (n + 1) / 2 : n * (n - 1) / 2);
  for (size_t i = 0; i < n; ++i) {
    if (include_self) {
      out.push_back(PairScore{static_cast<int>(i), static_cast<int>(i),
                              pair_score(index, i, i, metric)});
    }
    for (size_t j = i + 1; j < n; ++j) {
      out.push_back(PairScore{static_cast<int>(i), static_cast<int>(j),
                              pair_score(index, i, j, metric)});
    }
  }
  return out;
}

std::string dump_index(const CorpusIndex& index) {
  json j;
  j["version"] = 1;
  j["dimension"] = index.dimension;
  j["mode"] = index.mode == feat::VectorMode::binary ? "binary" : "count";
  j["vocab_hash"] = index.vocab_hash;
  j["config"] = index.config_id;
  json items = json::array();
  for (size_t i = 0; i < index.size(); ++i) {
    json item;
    item["id"] = index.ids[i];
    item["label"] = index.labels[i].empty() ? json(nullptr) : json(index.labels[i]);
    json entries = json::array();
    for (const auto& [idx, value] : index.vectors[i].entries) {
      entries.push_back(json::array({idx, value}));
    }
    item["entries"] = std::move(entries);
    items.push_back(std::move(item));
  }
  j["items"] = std::move(items);
  return j.dump();
}

CorpusIndex load_index(std::string_view bytes) {
  json j = json::parse(bytes, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("invalid index file");
  if (!j.contains("version") || j["version"].get<int>() != 1) {
    throw Error("unsupported index file version");
  }
  CorpusIndex index;
  index.dimension = j["dimension"].get<int32_t>();
  index.mode = j["mode"].get<std::string>() == "binary" ? feat::VectorMode::binary
                                                        : feat::VectorMode::count;
  index.vocab_hash = j["vocab_hash"].get<uint64_t>();
  if (j.contains("config") && j["config"].is_string()) {
    index.config_id = j["config"].get<std::string>();
  }
  for (const json& item : j["items"]) {
    index.ids.push_back(item["id"].get<std::string>());
    index.labels.push_back(item["label"].is_string() ? item["label"].get<std::string>() : "");
    feat::SparseVector vec;
    vec.dimension = index.dimension;
    vec.mode = index.mode;
    for (const json& entry : item["entries"]) {
      vec.entries.emplace_back(entry[0].get<int32_t>(), entry[1].get<double>());
    }
    index.vectors.push_back(std::move(vec));
    index.norms.push_back(norm(index.vectors.back()));
  }
  return index;
}

}  // namespace cassim::sim
