// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. The CLI binary path is taken from argv[1] for the
// end-to-end determinism checks.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cassim/bofnet.hpp"
#include "cassim/cass.hpp"
#include "cassim/dataset.hpp"
#include "cassim/evalkit.hpp"
#include "cassim/featurize.hpp"
#include "cassim/rng.hpp"
#include "cassim/simindex.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

namespace fs = std::filesystem;
using namespace cassim;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

int g_failures = 0;

void run_criterion(int number, const std::string& title, const std::function<void(Check&)>& body) {
  Check check;
  auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.ok = false;
    check.detail = std::string("exception: ") + e.what();
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", check.ok ? "PASS" : "FAIL", number,
              title.c_str(), seconds, check.detail.empty() ? "" : " -- ", check.detail.c_str());
  std::fflush(stdout);
  if (!check.ok) ++g_failures;
}

feat::FeatureBag featurize_source(const std::string& source, const cass::CassConfig& cfg) {
  cst::CstNode tree =
      cst::parse_or_throw(cst::SourceFile{"snippet.c", source, cst::Dialect::c_subset});
  return feat::extract_features(cass::build_cass(tree, cfg));
}

bool bag_has(const feat::FeatureBag& bag, const std::string& feature) {
  return bag.counts.count(feature) > 0;
}

bool bag_mentions(const feat::FeatureBag& bag, const std::string& needle) {
  for (const auto& [feature, count] : bag.counts) {
    if (feature.find(needle) != std::string::npos) return true;
  }
  return false;
}

// --- CLI plumbing -----------------------------------------------------------

std::string g_cli_path;

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

CliResult run_cli(const std::string& args) {
  CliResult result;
  std::string command = g_cli_path + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) result.output.append(buffer, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

void write_corpus_to_dir(const synth::CorpusSources& sources, const fs::path& root) {
  fs::create_directories(root);
  for (const auto& [label, bodies] : sources) {
    fs::create_directories(root / label);
    int n = 0;
    for (const std::string& body : bodies) {
      data::write_file(root / label / ("p" + std::to_string(n++) + ".c"), body);
    }
  }
}

// --- criterion bodies ---------------------------------------------------------

void criterion_config_space(Check& check) {
  std::vector<cass::CassConfig> configs = cass::enumerate_configs();
  check.require(configs.size() == 216, "expected 216 configs");
  std::set<std::string> ids;
  for (const cass::CassConfig& cfg : configs) {
    std::string id = cass::config_id(cfg);
    ids.insert(id);
    check.require(cass::parse_config_id(id) == cfg, "round-trip failed for " + id);
  }
  check.require(ids.size() == 216, "config ids are not distinct");
}

void criterion_spt_baseline(Check& check) {
  std::string source = "int main(){a(); b(); c();}";
  feat::FeatureBag base = featurize_source(source, cass::parse_config_id("0-0-0-0-0"));
  check.require(bag_has(base, "{$$$}"), "baseline bag lacks {$$$}");
  feat::FeatureBag replaced = featurize_source(source, cass::parse_config_id("0-2-0-0-0"));
  check.require(bag_has(replaced, "{#}"), "option-2 bag lacks {#}");
  check.require(!bag_has(replaced, "{$$$}"), "option-2 bag still has {$$$}");
  feat::FeatureBag dropped = featurize_source(source, cass::parse_config_id("0-1-0-0-0"));
  check.require(!bag_mentions(dropped, "{"), "option-1 bag still mentions a compound label");
}

void criterion_invariance(Check& check) {
  std::vector<cass::CassConfig> configs = cass::enumerate_configs();

  // (a) local alpha-renaming, 100 random rename pairs, all 216 configs
  synth::NameSet base_names = synth::default_names();
  for (uint64_t seed = 0; seed < 100 && check.ok; ++seed) {
    synth::NameSet renamed = base_names;
    renamed.locals = {"r" + std::to_string(seed) + "x", "mVal" + std::to_string(seed), "tmp_q",
                      "runningTotal"};
    std::string a = synth::random_program(seed, base_names);
    std::string b = synth::random_program(seed, renamed);
    cst::CstNode ta = cst::parse_or_throw(cst::SourceFile{"a.c", a, cst::Dialect::c_subset});
    cst::CstNode tb = cst::parse_or_throw(cst::SourceFile{"b.c", b, cst::Dialect::c_subset});
    for (const cass::CassConfig& cfg : configs) {
      feat::FeatureBag ba = feat::extract_features(cass::build_cass(ta, cfg));
      feat::FeatureBag bb = feat::extract_features(cass::build_cass(tb, cfg));
      if (ba.counts != bb.counts) {
        check.require(false, "rename pair " + std::to_string(seed) + " differs under " +
                                 cass::config_id(cfg));
        break;
      }
    }
  }

  // (b) global renaming: changes bags under C=0, never under C in {2,3}
  synth::NameSet gbase = synth::default_names();
  synth::NameSet grenamed = gbase;
  grenamed.globals = {"worldCount", "modeFlagZ"};
  for (uint64_t seed = 200; seed < 210 && check.ok; ++seed) {
    cst::CstNode ta = cst::parse_or_throw(
        cst::SourceFile{"a.c", synth::random_program(seed, gbase), cst::Dialect::c_subset});
    cst::CstNode tb = cst::parse_or_throw(
        cst::SourceFile{"b.c", synth::random_program(seed, grenamed), cst::Dialect::c_subset});
    for (const cass::CassConfig& cfg : configs) {
      feat::FeatureBag ba = feat::extract_features(cass::build_cass(ta, cfg));
      feat::FeatureBag bb = feat::extract_features(cass::build_cass(tb, cfg));
      bool equal = ba.counts == bb.counts;
      if (cfg.global_vars == 2 || cfg.global_vars == 3) {
        if (!equal) {
          check.require(false,
                        "global rename changed bags under " + cass::config_id(cfg));
          break;
        }
      } else if (cfg.global_vars == 0) {
        if (equal) {
          check.require(false,
                        "global rename left bags equal under " + cass::config_id(cfg));
          break;
        }
      }
    }
  }

  // (c) call argument list vs condition group
  std::string call_src = "int main(){f(x);}";
  std::string cond_src = "int main(){if(x){}}";
  feat::FeatureBag call0 = featurize_source(call_src, cass::parse_config_id("0-0-0-0-0"));
  feat::FeatureBag cond0 = featurize_source(cond_src, cass::parse_config_id("0-0-0-0-0"));
  check.require(bag_has(call0, "($)") && bag_has(cond0, "($)"),
                "A=0 should label both groups ($)");
  feat::FeatureBag call2 = featurize_source(call_src, cass::parse_config_id("2-0-0-0-0"));
  feat::FeatureBag cond2 = featurize_source(cond_src, cass::parse_config_id("2-0-0-0-0"));
  check.require(bag_has(call2, "args:($)") && !bag_has(call2, "cond:($)"),
                "A=2 call group should be args:($) only");
  check.require(bag_has(cond2, "cond:($)") && !bag_has(cond2, "args:($)"),
                "A=2 condition group should be cond:($) only");
}

void criterion_metric_oracles(Check& check) {
  // worked example
  std::vector<double> scores{0.9, 0.8, 0.7, 0.6};
  std::vector<int> labels{1, 1, 0, 1};
  double ap = evalkit::average_precision(scores, labels);
  check.require(std::abs(ap - 11.0 / 12.0) <= 1e-12, "worked AP example mismatch");

  // 1000 random score/label sets vs the independent step-sweep oracle
  Rng rng(404);
  for (int trial = 0; trial < 1000 && check.ok; ++trial) {
    int n = 2 + static_cast<int>(rng.bounded(60));
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      s.push_back(static_cast<double>(rng.bounded(8)) / 2.0);
      y.push_back(rng.bounded(3) == 0 ? 1 : 0);
    }
    y[static_cast<size_t>(rng.bounded(static_cast<uint64_t>(n)))] = 1;
    double mine = evalkit::average_precision(s, y);
    double reference = oracle::ap_rescan(s, y);
    check.require(std::abs(mine - reference) <= 1e-12,
                  "AP oracle mismatch on trial " + std::to_string(trial));
  }

  // MAP@R vs brute force on random corpora up to n = 50
  for (int trial = 0; trial < 40 && check.ok; ++trial) {
    int n = 6 + static_cast<int>(rng.bounded(45));
    std::vector<feat::FeatureBag> bags(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      bags[static_cast<size_t>(i)].program_id = "p" + std::to_string(100 + i);
      bags[static_cast<size_t>(i)].class_label = "c" + std::to_string(rng.bounded(4));
      int k = 1 + static_cast<int>(rng.bounded(6));
      for (int f = 0; f < k; ++f) {
        bags[static_cast<size_t>(i)].counts["f" + std::to_string(rng.bounded(12))] += 1;
      }
    }
    std::map<std::string, int> sizes;
    for (const auto& bag : bags) ++sizes[bag.class_label];
    bool any_pair = false;
    for (const auto& [label, count] : sizes) any_pair = any_pair || count >= 2;
    if (!any_pair) continue;

    feat::Vocabulary vocab = feat::build_vocab(bags, 1);
    sim::CorpusIndex index = sim::build_index(bags, vocab, feat::VectorMode::binary);
    std::vector<oracle::MaprItem> items;
    for (size_t i = 0; i < index.size(); ++i) {
      items.push_back(oracle::MaprItem{index.ids[i], index.labels[i]});
    }
    std::vector<std::vector<double>> score(index.size(), std::vector<double>(index.size()));
    for (size_t q = 0; q < index.size(); ++q) {
      for (size_t i = 0; i < index.size(); ++i) {
        score[q][i] = oracle::dense_cosine(index.vectors[q], index.vectors[i]);
      }
    }
    double mine = evalkit::map_at_r(index, sim::Metric::cosine).value;
    double reference = oracle::mapr_brute(items, score);
    check.require(std::abs(mine - reference) <= 1e-12,
                  "MAP@R oracle mismatch on trial " + std::to_string(trial));
  }
}

feat::SparseVector vector_of_mask(uint32_t mask, int32_t dim) {
  feat::SparseVector v;
  v.dimension = dim;
  v.mode = feat::VectorMode::binary;
  for (int32_t i = 0; i < dim; ++i) {
    if (mask & (1u << i)) v.entries.emplace_back(i, 1.0);
  }
  return v;
}

void criterion_similarity_oracles(Check& check) {
  Rng rng(505);
  // 1000 random vector pairs vs the dense oracle
  for (int trial = 0; trial < 1000 && check.ok; ++trial) {
    int32_t dim = 1 + static_cast<int32_t>(rng.bounded(60));
    feat::SparseVector a, b;
    a.dimension = b.dimension = dim;
    a.mode = b.mode = feat::VectorMode::count;
    for (int32_t i = 0; i < dim; ++i) {
      if (rng.bounded(100) < 35) a.entries.emplace_back(i, 1.0 + static_cast<double>(rng.bounded(9)));
      if (rng.bounded(100) < 35) b.entries.emplace_back(i, 1.0 + static_cast<double>(rng.bounded(9)));
    }
    check.require(std::abs(sim::dot(a, b) - oracle::dense_dot(a, b)) <= 1e-12, "dot mismatch");
    check.require(std::abs(sim::cosine(a, b) - oracle::dense_cosine(a, b)) <= 1e-12,
                  "cosine mismatch");
  }

  // binary dot = |set intersection|: all pairs for universes up to 8,
  // every subset against 128 seeded partners for universes 9..16
  for (int32_t n = 1; n <= 8 && check.ok; ++n) {
    for (uint32_t x = 0; x < (1u << n) && check.ok; ++x) {
      feat::SparseVector a = vector_of_mask(x, n);
      for (uint32_t y = 0; y < (1u << n); ++y) {
        feat::SparseVector b = vector_of_mask(y, n);
        if (sim::dot(a, b) != static_cast<double>(__builtin_popcount(x & y))) {
          check.require(false, "binary dot != intersection at n=" + std::to_string(n));
          break;
        }
      }
    }
  }
  for (int32_t n = 9; n <= 16 && check.ok; ++n) {
    std::vector<uint32_t> partners;
    partners.push_back(0);
    partners.push_back((1u << n) - 1);
    for (int i = 0; i < 126; ++i) {
      partners.push_back(static_cast<uint32_t>(rng.bounded(1u << n)));
    }
    for (uint32_t x = 0; x < (1u << n) && check.ok; ++x) {
      feat::SparseVector a = vector_of_mask(x, n);
      for (uint32_t y : partners) {
        feat::SparseVector b = vector_of_mask(y, n);
        if (sim::dot(a, b) != static_cast<double>(__builtin_popcount(x & y))) {
          check.require(false, "binary dot != intersection at n=" + std::to_string(n));
          break;
        }
      }
    }
  }
}

void criterion_gradcheck(Check& check) {
  Rng rng(606);
  std::vector<bof::FeatureSet> programs;
  std::vector<int> class_ids;
  for (int i = 0; i < 6; ++i) {
    size_t k = 3 + rng.bounded(5);
    std::vector<size_t> picks = rng.sample_distinct(10, k);
    bof::FeatureSet fs(picks.begin(), picks.end());
    std::sort(fs.begin(), fs.end());
    programs.push_back(fs);
    class_ids.push_back(i % 3);
  }
  bof::Batch batch = bof::make_batch(std::move(programs), std::move(class_ids));
  bof::BofModel model = bof::init_model(10, 4, 0.0, 607);
  double max_rel = bof::grad_check(model, batch, bof::TrainHyper{}, 1e-5);
  check.require(max_rel <= 1e-4,
                "max relative gradient error " + std::to_string(max_rel) + " > 1e-4");
}

void criterion_learning(Check& check) {
  synth::CorpusSources sources = synth::learnable_corpus(8, 20, 4242);
  evalkit::SourceCorpus corpus = synth::parse_corpus(sources);
  std::vector<feat::FeatureBag> bags;
  cass::CassConfig cfg;  // 0-0-0-0-0
  for (const evalkit::SourceProgram& program : corpus.programs) {
    feat::FeatureBag bag = feat::extract_features(cass::build_cass(program.tree, cfg));
    bag.program_id = program.id;
    bag.class_label = program.label;
    bags.push_back(std::move(bag));
  }

  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& bag : bags) items.emplace_back(bag.program_id, bag.class_label);
  evalkit::LabeledCorpus labeled = evalkit::LabeledCorpus::from_items(std::move(items));
  evalkit::Split split = evalkit::split_by_problem(labeled, {5.0 / 8, 1.0 / 8, 2.0 / 8}, 77);
  check.require(split.train.size() == 5 && split.validation.size() == 1 && split.test.size() == 2,
                "split sizes are not 5/1/2");

  auto in_part = [](const std::vector<std::string>& part, const std::string& label) {
    return std::find(part.begin(), part.end(), label) != part.end();
  };
  std::vector<feat::FeatureBag> train_bags;
  for (const auto& bag : bags) {
    if (in_part(split.train, bag.class_label)) train_bags.push_back(bag);
  }
  feat::Vocabulary vocab = feat::build_vocab(train_bags, 1);

  bof::TrainData data;
  std::vector<bof::TrainItem> test_items;
  for (const auto& bag : bags) {
    bof::TrainItem item{bof::to_feature_set(bag, vocab), bag.class_label};
    if (in_part(split.train, bag.class_label)) data.train.push_back(std::move(item));
    else if (in_part(split.validation, bag.class_label)) data.validation.push_back(std::move(item));
    else test_items.push_back(std::move(item));
  }

  bof::TrainHyper hyper;
  hyper.p = 4;
  hyper.k = 4;
  hyper.epochs = 5;
  hyper.iters_per_epoch = 50;
  hyper.seed = 99;

  bof::BofModel untrained = bof::init_model(vocab.size(), 32, 0.5, hyper.seed);
  double before = bof::embedding_map_at_r(untrained, test_items);
  bof::TrainResult result = bof::train(data, hyper, vocab.size(), 32, 0.5);
  double after = bof::embedding_map_at_r(result.model, test_items);

  char buffer[128];
  std::snprintf(buffer, sizeof(buffer), "held-out MAP@R %.4f -> %.4f", before, after);
  check.require(after - before >= 0.15, std::string(buffer) + " (improvement < 0.15)");
  if (check.ok) check.detail = buffer;
}

void criterion_config_sensitivity(Check& check) {
  const int n_groups = 50;
  auto mean_ap_of = [&](const synth::CorpusSources& sources, const std::string& config_id) {
    evalkit::SourceCorpus corpus = synth::parse_corpus(sources);
    std::vector<std::string> classes;
    for (const auto& [label, members] : corpus.by_class) classes.push_back(label);
    auto groups = evalkit::sample_problem_groups(classes, 5, n_groups, 1234);
    double sum = 0.0;
    for (const auto& group : groups) {
      sum += evalkit::evaluate_group_ap(group, corpus, cass::parse_config_id(config_id),
                                        sim::Metric::cosine)
                 .ap;
    }
    return sum / n_groups;
  };

  synth::CorpusSources noisy = synth::randomized_global_corpus(10, 6, 31);
  double noisy_abstract = mean_ap_of(noisy, "0-0-2-0-0");
  double noisy_verbatim = mean_ap_of(noisy, "0-0-0-0-0");
  synth::CorpusSources consistent = synth::consistent_global_corpus(10, 6, 32);
  double consistent_abstract = mean_ap_of(consistent, "0-0-2-0-0");
  double consistent_verbatim = mean_ap_of(consistent, "0-0-0-0-0");

  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "randomized names: #GVAR %.4f vs verbatim %.4f; consistent names: #GVAR %.4f vs "
                "verbatim %.4f",
                noisy_abstract, noisy_verbatim, consistent_abstract, consistent_verbatim);
  check.require(noisy_abstract > noisy_verbatim,
                std::string(buffer) + " (abstraction should win on randomized names)");
  check.require(consistent_verbatim > consistent_abstract,
                std::string(buffer) + " (verbatim should win on consistent names)");
  if (check.ok) check.detail = buffer;
}

void criterion_group_protocol(Check& check) {
  // five identical-ish programs in one scoring corpus, with self pairs
  std::vector<feat::FeatureBag> bags(5);
  for (int i = 0; i < 5; ++i) {
    bags[static_cast<size_t>(i)].program_id = "g/p" + std::to_string(i);
    bags[static_cast<size_t>(i)].class_label = "g";
    bags[static_cast<size_t>(i)].counts = {{"f" + std::to_string(i), 1}, {"shared", 1}};
  }
  feat::Vocabulary vocab = feat::build_vocab(bags, 1);
  sim::CorpusIndex index = sim::build_index(bags, vocab, feat::VectorMode::binary);
  check.require(sim::pairwise_scores(index, sim::Metric::dot, true).size() == 15,
                "|g|=5 with self pairs should give 15 pairs");
  check.require(sim::pairwise_scores(index, sim::Metric::dot, false).size() == 10,
                "|g|=5 without self pairs should give 10 pairs");

  std::vector<std::string> classes;
  for (int i = 0; i < 104; ++i) classes.push_back("p" + std::to_string(i));
  auto g1 = evalkit::sample_problem_groups(classes, 5, 1000, 99);
  auto g2 = evalkit::sample_problem_groups(classes, 5, 1000, 99);
  check.require(g1 == g2, "group sampling is not deterministic");
  check.require(g1.size() == 1000, "expected 1000 groups");
  for (const auto& group : g1) {
    if (group.size() != 5) {
      check.require(false, "group size != 5");
      break;
    }
  }
}

void criterion_cli_determinism(Check& check) {
  if (g_cli_path.empty()) {
    check.require(false, "CLI binary path missing (pass as argv[1])");
    return;
  }
  fs::path root = fs::temp_directory_path() / ("cassim_accept_" + std::to_string(getpid()));
  fs::remove_all(root);
  write_corpus_to_dir(synth::randomized_global_corpus(6, 4, 9), root / "data");

  std::string eval_cmd = "eval " + (root / "data").string() +
                         " --config 0-0-2-0-0 --metric mapr --seed 7";
  CliResult eval1 = run_cli(eval_cmd);
  CliResult eval2 = run_cli(eval_cmd);
  check.require(eval1.exit_code == 0, "eval exited nonzero");
  check.require(!eval1.output.empty() && eval1.output == eval2.output,
                "eval reruns differ byte-for-byte");

  std::string sweep_cmd = "sweep " + (root / "data").string() +
                          " --configs 0-0-0-0-0,0-0-2-0-0,2-1-3-1-1 --n-groups 20 "
                          "--group-size 3 --seed 5 --metric cosine";
  CliResult sweep1 = run_cli(sweep_cmd);
  CliResult sweep2 = run_cli(sweep_cmd);
  check.require(sweep1.exit_code == 0, "sweep exited nonzero");
  check.require(!sweep1.output.empty() && sweep1.output == sweep2.output,
                "sweep reruns differ byte-for-byte");

  fs::remove_all(root);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];

  run_criterion(1, "configuration space enumerates and round-trips 216 ids",
                criterion_config_space);
  run_criterion(2, "baseline compound semantics {$$$} / {#} / dropped", criterion_spt_baseline);
  run_criterion(3, "renaming and context invariance suite", criterion_invariance);
  run_criterion(4, "average precision and MAP@R against independent oracles",
                criterion_metric_oracles);
  run_criterion(5, "sparse similarity against dense and set oracles",
                criterion_similarity_oracles);
  run_criterion(6, "analytic gradients within 1e-4 of central differences", criterion_gradcheck);
  run_criterion(7, "trained scorer beats its random initialization by >= 0.15 MAP@R",
                criterion_learning);
  run_criterion(8, "global-name abstraction helps noisy corpora and hurts consistent ones",
                criterion_config_sensitivity);
  run_criterion(9, "problem-group pair counts and deterministic sampling",
                criterion_group_protocol);
  run_criterion(10, "eval and sweep runs are byte-identical per seed", criterion_cli_determinism);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
