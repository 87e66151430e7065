#pragma once

#include <span>
#include <string>
#include <vector>

#include "cassim/featurize.hpp"

namespace cassim::sim {

enum class Metric { dot, cosine };

Metric metric_from_name(std::string_view name);
std::string_view metric_name(Metric metric);

// Sorted-merge dot product. Throws Error on dimension mismatch.
double dot(const feat::SparseVector& a, const feat::SparseVector& b);

double norm(const feat::SparseVector& v);

// dot(a,b) / (|a||b|). A zero vector scores 0 against everything,
// including itself; callers that care surface the diagnostic at build time.
double cosine(const feat::SparseVector& a, const feat::SparseVector& b);

// Immutable scoring corpus: parallel arrays ordered by program id.
struct CorpusIndex {
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  std::vector<feat::SparseVector> vectors;
  std::vector<double> norms;
  int32_t dimension = 0;
  feat::VectorMode mode = feat::VectorMode::binary;
  uint64_t vocab_hash = 0;
  std::string config_id;  // CASS configuration the vectors were built under
  std::vector<std::string> warnings;  // e.g. zero-norm programs

  size_t size() const { return ids.size(); }
};

// Throws Error on a duplicate program id.
CorpusIndex build_index(std::span<const feat::FeatureBag> bags, const feat::Vocabulary& vocab,
                        feat::VectorMode mode);

struct RankedResult {
  std::string query_id;
  std::vector<std::pair<std::string, double>> hits;  // non-increasing score
  Metric metric = Metric::cosine;
};

// Exhaustive exact top-k; ties broken by ascending program id.
RankedResult query(const CorpusIndex& index, const feat::SparseVector& q, int k, Metric metric,
                   std::string query_id = "query");

struct PairScore {
  int i = 0;
  int j = 0;
  double score = 0.0;
};

// All cross pairs i<j in row-major order; self pairs (i,i) are interleaved
// in front of each row when include_self is set.
std::vector<PairScore> pairwise_scores(const CorpusIndex& index, Metric metric,
                                       bool include_self = false);

double pair_score(const CorpusIndex& index, size_t i, size_t j, Metric metric);

std::string dump_index(const CorpusIndex& index);
CorpusIndex load_index(std::string_view bytes);

}  // namespace cassim::sim
