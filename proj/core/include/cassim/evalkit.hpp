#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cassim/cass.hpp"
#include "cassim/simindex.hpp"

namespace cassim::evalkit {

// Programs with exactly one class label each.
struct LabeledCorpus {
  std::vector<std::pair<std::string, std::string>> items;  // (program_id, class_label)
  std::map<std::string, std::vector<size_t>> by_class;

  static LabeledCorpus from_items(std::vector<std::pair<std::string, std::string>> items);
  std::vector<std::string> class_labels() const;
};

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

// Partitions the class set (never individual programs) by seeded shuffle.
// Quotas use largest-remainder rounding so exact fractions stay exact.
Split split_by_problem(const LabeledCorpus& corpus, std::array<double, 3> fractions,
                       uint64_t seed);

struct EvalReport {
  std::string metric;
  double value = 0.0;
  std::vector<double> per_query;                    // MAP@R
  std::vector<std::array<double, 3>> pr_points;     // AP: (threshold, precision, recall)
  int n_queries = 0;
  int skipped = 0;
  std::string config_id;
  uint64_t seed = 0;
};

// MAP@R with R = (#same-class programs) - 1 per query; singleton-class
// queries are skipped and counted.
EvalReport map_at_r(const sim::CorpusIndex& index, sim::Metric metric);

// Average precision by descending threshold sweep over the unique scores.
// Throws Error when there is no positive label.
double average_precision(std::span<const double> scores, std::span<const int> labels);

// AP of the same-class pair classifier over all index pairs.
EvalReport pairwise_ap(const sim::CorpusIndex& index, sim::Metric metric,
                       bool include_self = false);

// n_groups subsets of group_size distinct classes; deterministic per seed.
std::vector<std::vector<std::string>> sample_problem_groups(std::span<const std::string> classes,
                                                            int group_size, int n_groups,
                                                            uint64_t seed);

struct SourceProgram {
  std::string id;
  std::string label;
  cst::CstNode tree;
};

struct SourceCorpus {
  std::vector<SourceProgram> programs;
  std::map<std::string, std::vector<size_t>> by_class;

  static SourceCorpus from_programs(std::vector<SourceProgram> programs);
};

struct GroupAp {
  double ap = 0.0;
  bool degenerate = false;  // single-class group, reported as 1.0
};

// Featurizes the group's programs under cfg (per-group vocabulary,
// min_count 1), scores all pairs, and computes AP against same-class labels.
GroupAp evaluate_group_ap(std::span<const std::string> group, const SourceCorpus& corpus,
                          const cass::CassConfig& cfg, sim::Metric metric,
                          bool include_self = false);

struct SweepRow {
  std::string config_id;
  double mean_ap = 0.0;
  int wins = 0;    // groups where this config beats the 0-0-0-0-0 baseline
  int losses = 0;
  int degenerate = 0;
};

struct AxisMarginal {
  std::string axis;
  int option = 0;
  double mean_ap = 0.0;
  int n_configs = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;            // one per config, input order
  std::vector<AxisMarginal> marginals;   // one per axis option over swept configs
  std::string to_csv() const;
};

SweepReport sweep_configs(const SourceCorpus& corpus,
                          const std::vector<std::vector<std::string>>& groups,
                          std::span<const cass::CassConfig> configs, sim::Metric metric,
                          int jobs = 1, bool include_self = false);

}  // namespace cassim::evalkit
