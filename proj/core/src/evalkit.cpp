#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "cassim/evalkit.hpp"
#include "cassim/rng.hpp"

namespace cassim::evalkit {

LabeledCorpus LabeledCorpus::from_items(std::vector<std::pair<std::string, std::string>> items) {
  LabeledCorpus corpus;
  corpus.items = std::move(items);
  for (size_t i = 0; i < corpus.items.size(); ++i) {
    if (corpus.items[i].second.empty()) {
      throw Error("program '" + corpus.items[i].first + "' has no class label");
    }
    corpus.by_class[corpus.items[i].second].push_back(i);
  }
  return corpus;
}

std::vector<std::string> LabeledCorpus::class_labels() const {
  std::vector<std::string> labels;
  labels.reserve(by_class.size());
  for (const auto& [label, members] : by_class) labels.push_back(label);
  return labels;
}

Split split_by_problem(const LabeledCorpus& corpus, std::array<double, 3> fractions,
                       uint64_t seed) {
  double total = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(total - 1.0) > 1e-9) throw Error("split fractions must sum to 1");
  for (double f : fractions) {
    if (f < 0.0) throw Error("split fractions must be non-negative");
  }
  std::vector<std::string> classes = corpus.class_labels();
  int nonzero = 0;
  for (double f : fractions) nonzero += f > 0.0 ? 1 : 0;
  if (classes.size() < static_cast<size_t>(nonzero)) {
    throw Error("fewer classes than nonzero split partitions");
  }

  Rng rng(seed);
  rng.shuffle(classes);

  const size_t n = classes.size();
  std::array<size_t, 3> quota{};
  std::array<double, 3> remainder{};
  size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double raw = fractions[i] * static_cast<double>(n);
    quota[i] = static_cast<size_t>(std::floor(raw + 1e-9));
    remainder[i] = raw - static_cast<double>(quota[i]);
    assigned += quota[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainder[i] > remainder[best]) best = i;
    }
    ++quota[best];
    remainder[best] = -1.0;
    ++assigned;
  }

  Split split;
  size_t pos = 0;
  auto take = [&](size_t count) {
    std::vector<std::string> part(classes.begin() + pos, classes.begin() + pos + count);
    pos += count;
    std::sort(part.begin(), part.end());
    return part;
  };
  split.train = take(quota[0]);
  split.validation = take(quota[1]);
  split.test = take(quota[2]);
  return split;
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("scores and labels differ in length");
  long long positives = 0;
  for (int y : labels) positives += y ? 1 : 0;
  if (positives == 0) throw Error("AP undefined: no positive labels");

  // Sort pair indices by score descending; walk distinct-score blocks, which
  // is exactly the descending threshold sweep over unique score values.
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double prev_recall = 0.0;
  long long tp = 0;
  long long seen = 0;
  size_t i = 0;
  while (i < order.size()) {
    double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      ++seen;
      tp += labels[order[i]] ? 1 : 0;
      ++i;
    }
    double precision = static_cast<double>(tp) / static_cast<double>(seen);
    double recall = static_cast<double>(tp) / static_cast<double>(positives);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

EvalReport pairwise_ap(const sim::CorpusIndex& index, sim::Metric metric, bool include_self) {
  std::vector<sim::PairScore> pairs = sim::pairwise_scores(index, metric, include_self);
  if (pairs.empty()) throw Error("AP undefined: no pairs");
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(pairs.size());
  labels.reserve(pairs.size());
  for (const sim::PairScore& p : pairs) {
    scores.push_back(p.score);
    labels.push_back(index.labels[p.i] == index.labels[p.j] ? 1 : 0);
  }
  EvalReport report;
  report.metric = "ap";
  report.value = average_precision(scores, labels);
  report.n_queries = static_cast<int>(pairs.size());

  // PR points of the same sweep, for the report payload.
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  long long positives = 0;
  for (int y : labels) positives += y;
  long long tp = 0, seen = 0;
  size_t i = 0;
  while (i < order.size()) {
    double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      ++seen;
      tp += labels[order[i]];
      ++i;
    }
    report.pr_points.push_back({threshold, static_cast<double>(tp) / static_cast<double>(seen),
                                static_cast<double>(tp) / static_cast<double>(positives)});
  }
  return report;
}

EvalReport map_at_r(const sim::CorpusIndex& index, sim::Metric metric) {
  const size_t n = index.size();
  std::map<std::string, int> class_sizes;
  for (const std::string& label : index.labels) ++class_sizes[label];

  EvalReport report;
  report.metric = "map_at_r";
  double sum = 0.0;
  for (size_t q = 0; q < n; ++q) {
    int r = class_sizes[index.labels[q]] - 1;
    if (r < 1) {
      ++report.skipped;
      continue;
    }
    std::vector<std::pair<double, size_t>> scored;
    scored.reserve(n - 1);
    for (size_t i = 0; i < n; ++i) {
      if (i == q) continue;
      scored.emplace_back(sim::pair_score(index, q, i, metric), i);
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return index.ids[a.second] < index.ids[b.second];
    });
    double ap_at_r = 0.0;
    int relevant_seen = 0;
    for (int i = 0; i < r; ++i) {
      bool rel = index.labels[scored[i].second] == index.labels[q];
      if (rel) {
        ++relevant_seen;
        ap_at_r += static_cast<double>(relevant_seen) / static_cast<double>(i + 1);
      }
    }
    ap_at_r /= static_cast<double>(r);
    report.per_query.push_back(ap_at_r);
    sum += ap_at_r;
    ++report.n_queries;
  }
  if (report.n_queries == 0) throw Error("MAP@R undefined: every class is a singleton");
  report.value = sum / static_cast<double>(report.n_queries);
  return report;
}

std::vector<std::vector<std::string>> sample_problem_groups(std::span<const std::string> classes,
                                                            int group_size, int n_groups,
                                                            uint64_t seed) {
  if (group_size < 1) throw Error("group_size must be >= 1");
  if (static_cast<size_t>(group_size) > classes.size()) {
    throw Error("group_size exceeds the number of classes");
  }
  Rng rng(seed);
  std::vector<std::vector<std::string>> groups;
  groups.reserve(static_cast<size_t>(n_groups));
  for (int g = 0; g < n_groups; ++g) {
    std::vector<size_t> picks = rng.sample_distinct(classes.size(), static_cast<size_t>(group_size));
    std::vector<std::string> group;
    group.reserve(picks.size());
    for (size_t p : picks) group.push_back(classes[p]);
    std::sort(group.begin(), group.end());
    groups.push_back(std::move(group));
  }
  return groups;
}

SourceCorpus SourceCorpus::from_programs(std::vector<SourceProgram> programs) {
  SourceCorpus corpus;
  corpus.programs = std::move(programs);
  for (size_t i = 0; i < corpus.programs.size(); ++i) {
    corpus.by_class[corpus.programs[i].label].push_back(i);
  }
  return corpus;
}

GroupAp evaluate_group_ap(std::span<const std::string> group, const SourceCorpus& corpus,
                          const cass::CassConfig& cfg, sim::Metric metric, bool include_self) {
  std::vector<feat::FeatureBag> bags;
  size_t distinct_classes = 0;
  for (const std::string& label : group) {
    auto it = corpus.by_class.find(label);
    if (it == corpus.by_class.end()) throw Error("group class '" + label + "' not in corpus");
    ++distinct_classes;
    for (size_t idx : it->second) {
      const SourceProgram& program = corpus.programs[idx];
      feat::FeatureBag bag = feat::extract_features(cass::build_cass(program.tree, cfg));
      bag.program_id = program.id;
      bag.class_label = program.label;
      bags.push_back(std::move(bag));
    }
  }
  if (distinct_classes < 2) return GroupAp{1.0, true};

  feat::Vocabulary vocab = feat::build_vocab(bags, 1);
  sim::CorpusIndex index = sim::build_index(bags, vocab, feat::VectorMode::binary);
  std::vector<sim::PairScore> pairs = sim::pairwise_scores(index, metric, include_self);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const sim::PairScore& p : pairs) {
    scores.push_back(p.score);
    labels.push_back(index.labels[p.i] == index.labels[p.j] ? 1 : 0);
  }
  return GroupAp{average_precision(scores, labels), false};
}

namespace {

const char* kAxisNames[5] = {"node_prefix", "compound_stmt", "global_vars", "global_funcs",
                             "fn_io_cardinality"};

int axis_option(const cass::CassConfig& cfg, int axis) {
  switch (axis) {
    case 0: return cfg.node_prefix;
    case 1: return cfg.compound_stmt;
    case 2: return cfg.global_vars;
    case 3: return cfg.global_funcs;
    default: return cfg.fn_io_cardinality;
  }
}

std::string format_ap(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10f", value);
  return buf;
}

}  // namespace

SweepReport sweep_configs(const SourceCorpus& corpus,
                          const std::vector<std::vector<std::string>>& groups,
                          std::span<const cass::CassConfig> configs, sim::Metric metric,
                          int jobs, bool include_self) {
  const cass::CassConfig baseline{};  // 0-0-0-0-0

  // Per-(config, group) AP values; the baseline is evaluated as an extra row
  // when it is not part of the sweep.
  std::vector<cass::CassConfig> all_configs(configs.begin(), configs.end());
  auto baseline_it = std::find(all_configs.begin(), all_configs.end(), baseline);
  size_t baseline_idx = static_cast<size_t>(baseline_it - all_configs.begin());
  if (baseline_it == all_configs.end()) all_configs.push_back(baseline);

  std::vector<std::vector<GroupAp>> results(all_configs.size());
  auto eval_config = [&](size_t c) {
    std::vector<GroupAp> row;
    row.reserve(groups.size());
    for (const auto& group : groups) {
      row.push_back(evaluate_group_ap(group, corpus, all_configs[c], metric, include_self));
    }
    results[c] = std::move(row);
  };

  if (jobs <= 1) {
    for (size_t c = 0; c < all_configs.size(); ++c) eval_config(c);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    int n_workers = std::min<int>(jobs, static_cast<int>(all_configs.size()));
    for (int w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        while (true) {
          size_t c = next.fetch_add(1);
          if (c >= all_configs.size()) break;
          eval_config(c);
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  const std::vector<GroupAp>& base_row = results[baseline_idx];

  SweepReport report;
  for (size_t c = 0; c < configs.size(); ++c) {
    SweepRow row;
    row.config_id = cass::config_id(configs[c]);
    double sum = 0.0;
    for (size_t g = 0; g < groups.size(); ++g) {
      const GroupAp& result = results[c][g];
      sum += result.ap;
      if (result.degenerate) ++row.degenerate;
      if (result.ap > base_row[g].ap) ++row.wins;
      if (result.ap < base_row[g].ap) ++row.losses;
    }
    row.mean_ap = groups.empty() ? 0.0 : sum / static_cast<double>(groups.size());
    report.rows.push_back(std::move(row));
  }

  for (int axis = 0; axis < 5; ++axis) {
    std::map<int, std::pair<double, int>> per_option;
    for (size_t c = 0; c < configs.size(); ++c) {
      per_option[axis_option(configs[c], axis)].first += report.rows[c].mean_ap;
      per_option[axis_option(configs[c], axis)].second += 1;
    }
    for (const auto& [option, acc] : per_option) {
      report.marginals.push_back(
          AxisMarginal{kAxisNames[axis], option, acc.first / acc.second, acc.second});
    }
  }
  return report;
}

std::string SweepReport::to_csv() const {
  std::string csv = "type,key,mean_ap,wins,losses,degenerate_groups,n_configs\n";
  for (const SweepRow& row : rows) {
    csv += "config," + row.config_id + "," + format_ap(row.mean_ap) + "," +
           std::to_string(row.wins) + "," + std::to_string(row.losses) + "," +
           std::to_string(row.degenerate) + ",\n";
  }
  for (const AxisMarginal& m : marginals) {
    csv += "axis," + m.axis + "=" + std::to_string(m.option) + "," + format_ap(m.mean_ap) +
           ",,,," + std::to_string(m.n_configs) + "\n";
  }
  return csv;
}

}  // namespace cassim::evalkit
