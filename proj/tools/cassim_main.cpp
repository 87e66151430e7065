// cassim - code similarity toolkit over configurable semantics trees.
//
// Subcommands: parse, cass, featurize, vocab, compare, index, query, eval,
// sweep, train, gradcheck. Exit codes: 0 success, 1 computational/domain
// error, 2 usage error. All randomness flows from the --seed flags.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "cassim/bofnet.hpp"
#include "cassim/cass.hpp"
#include "cassim/common.hpp"
#include "cassim/cst.hpp"
#include "cassim/dataset.hpp"
#include "cassim/evalkit.hpp"
#include "cassim/featurize.hpp"
#include "cassim/simindex.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cassim;

namespace {

// ---------------------------------------------------------------------------
// run manifest

struct Manifest {
  std::string command;
  std::map<std::string, std::string> flags;
  std::map<std::string, std::string> inputs;  // path -> content digest

  void flag(const std::string& name, const std::string& value) { flags[name] = value; }
  void input(const fs::path& path, std::string_view contents) {
    char hex[19];
    std::snprintf(hex, sizeof(hex), "0x%016llx",
                  static_cast<unsigned long long>(fnv1a(contents)));
    inputs[path.string()] = hex;
  }
  void input_dir(const fs::path& root) {
    uint64_t h = 0xcbf29ce484222325ull;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
      h = fnv1a(file.string(), h);
      h = fnv1a(data::read_file(file), h);
    }
    char hex[19];
    std::snprintf(hex, sizeof(hex), "0x%016llx", static_cast<unsigned long long>(h));
    inputs[root.string()] = hex;
  }

  json to_json() const {
    json j;
    j["command"] = command;
    j["flags"] = flags;
    j["inputs"] = inputs;
    j["tool_version"] = kVersion;
    return j;
  }
};

// ---------------------------------------------------------------------------
// shared helpers

cst::CstNode load_program(const fs::path& path, const std::string& dialect) {
  std::string contents = data::read_file(path);
  if (dialect == "external") return cst::load_tree(contents);
  cst::SourceFile source{path.string(), std::move(contents), cst::Dialect::c_subset};
  cst::ParseResult result = cst::parse_source(source);
  if (auto* tree = std::get_if<cst::CstNode>(&result)) return std::move(*tree);
  const auto& diags = std::get<cst::ParseDiagnostics>(result);
  std::string msg = path.string() + ": parse failed";
  for (const auto& d : diags.errors) {
    msg += "\n  [" + std::to_string(d.span.begin) + "," + std::to_string(d.span.end) + ") " +
           d.message;
  }
  throw Error(msg);
}

std::vector<feat::FeatureBag> featurize_corpus(const evalkit::SourceCorpus& corpus,
                                               const cass::CassConfig& cfg,
                                               const cass::BuildOptions& options) {
  std::vector<feat::FeatureBag> bags;
  bags.reserve(corpus.programs.size());
  for (const evalkit::SourceProgram& program : corpus.programs) {
    feat::FeatureBag bag = feat::extract_features(cass::build_cass(program.tree, cfg, options));
    bag.program_id = program.id;
    bag.class_label = program.label;
    bags.push_back(std::move(bag));
  }
  return bags;
}

evalkit::SourceCorpus select_split_part(const evalkit::SourceCorpus& corpus,
                                        const std::string& part,
                                        const std::array<double, 3>& fractions, uint64_t seed) {
  if (part == "whole") return corpus;
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& program : corpus.programs) items.emplace_back(program.id, program.label);
  evalkit::LabeledCorpus labeled = evalkit::LabeledCorpus::from_items(std::move(items));
  evalkit::Split split = evalkit::split_by_problem(labeled, fractions, seed);
  const std::vector<std::string>* keep = nullptr;
  if (part == "train") keep = &split.train;
  else if (part == "validation") keep = &split.validation;
  else if (part == "test") keep = &split.test;
  else throw Error("unknown split part '" + part + "'");
  std::vector<evalkit::SourceProgram> selected;
  for (const evalkit::SourceProgram& program : corpus.programs) {
    if (std::find(keep->begin(), keep->end(), program.label) != keep->end()) {
      selected.push_back(program);
    }
  }
  if (selected.empty()) throw Error("selected split part is empty");
  return evalkit::SourceCorpus::from_programs(std::move(selected));
}

std::array<double, 3> parse_fractions(const std::string& text) {
  std::array<double, 3> out{};
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &out[0], &out[1], &out[2]) != 3) {
    throw Error("split fractions must be three comma-separated numbers");
  }
  return out;
}

void emit(const std::string& text) { std::fwrite(text.data(), 1, text.size(), stdout); }

// ---------------------------------------------------------------------------
// subcommand payloads

struct ParseArgs {
  std::string file;
  std::string dialect = "c-subset";
  bool pretty = false;
};

struct CassArgs {
  std::string file;
  std::string config = "0-0-0-0-0";
  std::string dialect = "c-subset";
  bool keep_literals = false;
};

struct FeaturizeArgs {
  std::string path;
  std::string config = "0-0-0-0-0";
  bool keep_literals = false;
};

struct VocabArgs {
  std::string input;
  std::string config = "0-0-0-0-0";
  int min_count = 5;
  std::string output;
};

struct CompareArgs {
  std::string file_a, file_b;
  std::string config = "0-0-0-0-0";
  std::string metric = "cosine";
  bool keep_literals = false;
};

struct IndexArgs {
  std::string dataset;
  std::string config = "0-0-0-0-0";
  std::string vocab_file;
  std::string mode = "binary";
  std::string output;
};

struct QueryArgs {
  std::string file;
  std::string index_file;
  std::string vocab_file;
  int k = 10;
  std::string metric = "cosine";
  std::string format = "tsv";
};

struct EvalArgs {
  std::string dataset;
  std::string config = "0-0-0-0-0";
  std::string metric = "mapr";
  std::string mode = "binary";
  int min_count = 1;
  uint64_t seed = 0;
  std::string split;
  std::string part = "whole";
  bool self_pairs = false;
};

struct SweepArgs {
  std::string dataset;
  std::string configs = "all";
  int n_groups = 1000;
  int group_size = 5;
  uint64_t seed = 0;
  std::string metric = "dot";
  bool self_pairs = false;
  int jobs = 1;
};

struct TrainArgs {
  std::string dataset;
  std::string config = "0-0-0-0-0";
  double gamma = 80.0, margin = 0.4, lr = 1e-3, weight_decay = 0.01, dropout = 0.5;
  int p = 16, k = 5, epochs = 100, iters = 1000, dim = 128, min_count = 5;
  uint64_t seed = 0;
  std::string split = "0.6,0.2,0.2";
  std::string output = "checkpoint.json";
};

struct GradcheckArgs {
  int dim = 4, vocab_size = 10, programs = 6;
  double eps = 1e-5, gamma = 80.0, margin = 0.4;
  uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// command bodies

int run_parse(const ParseArgs& args) {
  if (args.dialect == "external") {
    cst::CstNode tree = cst::load_tree(data::read_file(args.file));
    emit(args.pretty ? json::parse(cst::dump_tree(tree)).dump(2) + "\n" : cst::dump_tree(tree) + "\n");
    return 0;
  }
  cst::SourceFile source{args.file, data::read_file(args.file), cst::Dialect::c_subset};
  cst::ParseResult result = cst::parse_source(source);
  if (auto* tree = std::get_if<cst::CstNode>(&result)) {
    std::string dumped = cst::dump_tree(*tree);
    emit(args.pretty ? json::parse(dumped).dump(2) + "\n" : dumped + "\n");
    return 0;
  }
  const auto& diags = std::get<cst::ParseDiagnostics>(result);
  for (const auto& d : diags.errors) {
    std::cerr << args.file << ": error at [" << d.span.begin << "," << d.span.end
              << "): " << d.message << "\n";
  }
  return 1;
}

int run_cass(const CassArgs& args) {
  cass::CassConfig cfg = cass::parse_config_id(args.config);
  cst::CstNode tree = load_program(args.file, args.dialect);
  cass::Cass cass_value = cass::build_cass(tree, cfg, cass::BuildOptions{args.keep_literals});
  emit(cass::dump_cass(cass_value) + "\n");
  return 0;
}

int run_featurize(const FeaturizeArgs& args) {
  cass::CassConfig cfg = cass::parse_config_id(args.config);
  cass::BuildOptions options{args.keep_literals};
  if (fs::is_directory(args.path)) {
    data::LoadStats stats;
    evalkit::SourceCorpus corpus = data::load_dataset(args.path, &stats);
    for (const feat::FeatureBag& bag : featurize_corpus(corpus, cfg, options)) {
      emit(feat::bag_to_json(bag) + "\n");
    }
    if (stats.skipped > 0) {
      std::cerr << "skipped " << stats.skipped << " unparsable file(s)\n";
    }
    return 0;
  }
  cst::CstNode tree = load_program(args.path, "c-subset");
  feat::FeatureBag bag = feat::extract_features(cass::build_cass(tree, cfg, options));
  bag.program_id = fs::path(args.path).filename().string();
  emit(feat::bag_to_json(bag) + "\n");
  return 0;
}

std::vector<feat::FeatureBag> bags_from_jsonl(const std::string& contents) {
  std::vector<feat::FeatureBag> bags;
  size_t pos = 0;
  while (pos < contents.size()) {
    size_t end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    std::string_view line(contents.data() + pos, end - pos);
    if (!line.empty()) bags.push_back(feat::bag_from_json(line));
    pos = end + 1;
  }
  return bags;
}

int run_vocab(const VocabArgs& args) {
  std::vector<feat::FeatureBag> bags;
  if (fs::is_directory(args.input)) {
    cass::CassConfig cfg = cass::parse_config_id(args.config);
    evalkit::SourceCorpus corpus = data::load_dataset(args.input);
    bags = featurize_corpus(corpus, cfg, cass::BuildOptions{});
  } else {
    bags = bags_from_jsonl(data::read_file(args.input));
  }
  feat::Vocabulary vocab = feat::build_vocab(bags, args.min_count);
  std::string dumped = feat::dump_vocab(vocab);
  if (args.output.empty()) {
    emit(dumped + "\n");
  } else {
    data::write_file(args.output, dumped);
    std::cerr << "wrote " << args.output << " (" << vocab.size() << " entries incl. UNKNOWN)\n";
  }
  return 0;
}

int run_compare(const CompareArgs& args, const Manifest& manifest) {
  cass::CassConfig cfg = cass::parse_config_id(args.config);
  sim::Metric metric = sim::metric_from_name(args.metric);
  cass::BuildOptions options{args.keep_literals};

  feat::FeatureBag bag_a =
      feat::extract_features(cass::build_cass(load_program(args.file_a, "c-subset"), cfg, options));
  feat::FeatureBag bag_b =
      feat::extract_features(cass::build_cass(load_program(args.file_b, "c-subset"), cfg, options));
  bag_a.program_id = "a";
  bag_b.program_id = "b";

  std::vector<feat::FeatureBag> bags{bag_a, bag_b};
  feat::Vocabulary vocab = feat::build_vocab(bags, 1);
  feat::SparseVector va = feat::vectorize(bag_a, vocab, feat::VectorMode::binary);
  feat::SparseVector vb = feat::vectorize(bag_b, vocab, feat::VectorMode::binary);
  double score = metric == sim::Metric::dot ? sim::dot(va, vb) : sim::cosine(va, vb);

  char line[64];
  std::snprintf(line, sizeof(line), "%.6f\n", score);
  emit(line);
  std::cerr << manifest.to_json().dump() << "\n";
  return 0;
}

int run_index(const IndexArgs& args) {
  cass::CassConfig cfg = cass::parse_config_id(args.config);
  evalkit::SourceCorpus corpus = data::load_dataset(args.dataset);
  std::vector<feat::FeatureBag> bags = featurize_corpus(corpus, cfg, cass::BuildOptions{});
  feat::Vocabulary vocab = feat::load_vocab(data::read_file(args.vocab_file));
  feat::VectorMode mode =
      args.mode == "count" ? feat::VectorMode::count : feat::VectorMode::binary;
  sim::CorpusIndex index = sim::build_index(bags, vocab, mode);
  index.config_id = cass::config_id(cfg);
  for (const std::string& warning : index.warnings) std::cerr << "warning: " << warning << "\n";
  std::string dumped = sim::dump_index(index);
  if (args.output.empty()) {
    emit(dumped + "\n");
  } else {
    data::write_file(args.output, dumped);
    std::cerr << "indexed " << index.size() << " programs\n";
  }
  return 0;
}

int run_query(const QueryArgs& args) {
  sim::CorpusIndex index = sim::load_index(data::read_file(args.index_file));
  feat::Vocabulary vocab = feat::load_vocab(data::read_file(args.vocab_file));
  if (feat::vocab_hash(vocab) != index.vocab_hash) {
    throw Error("vocabulary file does not match the index (hash mismatch)");
  }
  cass::CassConfig cfg = index.config_id.empty() ? cass::CassConfig{}
                                                 : cass::parse_config_id(index.config_id);
  cst::CstNode tree = load_program(args.file, "c-subset");
  feat::FeatureBag bag = feat::extract_features(cass::build_cass(tree, cfg));
  feat::SparseVector q = feat::vectorize(bag, vocab, index.mode);
  sim::RankedResult result = sim::query(index, q, args.k, sim::metric_from_name(args.metric),
                                        fs::path(args.file).filename().string());
  if (args.format == "json") {
    json j;
    j["query"] = result.query_id;
    j["metric"] = std::string(sim::metric_name(result.metric));
    json hits = json::array();
    for (size_t i = 0; i < result.hits.size(); ++i) {
      hits.push_back({{"rank", i + 1}, {"id", result.hits[i].first},
                      {"score", result.hits[i].second}});
    }
    j["hits"] = std::move(hits);
    emit(j.dump() + "\n");
  } else {
    for (size_t i = 0; i < result.hits.size(); ++i) {
      char line[512];
      std::snprintf(line, sizeof(line), "%zu\t%s\t%.6f\n", i + 1, result.hits[i].first.c_str(),
                    result.hits[i].second);
      emit(line);
    }
  }
  return 0;
}

int run_eval(const EvalArgs& args, const Manifest& manifest) {
  cass::CassConfig cfg = cass::parse_config_id(args.config);
  const sim::Metric metric = sim::Metric::cosine;  // pair scoring metric

  data::LoadStats stats;
  evalkit::SourceCorpus corpus = data::load_dataset(args.dataset, &stats);
  for (const std::string& label : stats.empty_classes) {
    std::cerr << "warning: class directory '" << label << "' is empty, skipped\n";
  }
  if (!args.split.empty()) {
    corpus = select_split_part(corpus, args.part, parse_fractions(args.split), args.seed);
  }

  std::vector<feat::FeatureBag> bags = featurize_corpus(corpus, cfg, cass::BuildOptions{});
  feat::Vocabulary vocab = feat::build_vocab(bags, args.min_count);
  feat::VectorMode mode =
      args.mode == "count" ? feat::VectorMode::count : feat::VectorMode::binary;
  sim::CorpusIndex index = sim::build_index(bags, vocab, mode);

  evalkit::EvalReport report = args.metric == "mapr"
                                   ? evalkit::map_at_r(index, metric)
                                   : evalkit::pairwise_ap(index, metric, args.self_pairs);
  report.config_id = cass::config_id(cfg);
  report.seed = args.seed;

  std::map<std::string, int> class_counts;
  for (const std::string& label : index.labels) ++class_counts[label];

  json j;
  j["metric"] = report.metric;
  j["value"] = report.value;
  j["n_queries"] = report.n_queries;
  j["skipped"] = report.skipped;
  j["config"] = report.config_id;
  j["seed"] = report.seed;
  j["classes"] = class_counts;
  j["parse_skipped"] = stats.skipped;
  j["manifest"] = manifest.to_json();
  emit(j.dump() + "\n");
  return 0;
}

int run_sweep(const SweepArgs& args, const Manifest& manifest) {
  evalkit::SourceCorpus corpus = data::load_dataset(args.dataset);
  std::vector<cass::CassConfig> configs;
  if (args.configs == "all") {
    configs = cass::enumerate_configs();
  } else {
    std::string rest = args.configs;
    size_t pos = 0;
    while (pos <= rest.size()) {
      size_t comma = rest.find(',', pos);
      if (comma == std::string::npos) comma = rest.size();
      if (comma > pos) configs.push_back(cass::parse_config_id(rest.substr(pos, comma - pos)));
      pos = comma + 1;
    }
    if (configs.empty()) throw Error("no configs given");
  }

  std::vector<std::string> classes;
  for (const auto& [label, members] : corpus.by_class) classes.push_back(label);
  std::vector<std::vector<std::string>> groups =
      evalkit::sample_problem_groups(classes, args.group_size, args.n_groups, args.seed);

  evalkit::SweepReport report = evalkit::sweep_configs(
      corpus, groups, configs, sim::metric_from_name(args.metric), args.jobs, args.self_pairs);
  emit("# manifest: " + manifest.to_json().dump() + "\n");
  emit(report.to_csv());
  return 0;
}

int run_train(const TrainArgs& args, const Manifest& manifest) {
  cass::CassConfig cfg = cass::parse_config_id(args.config);
  evalkit::SourceCorpus corpus = data::load_dataset(args.dataset);
  std::vector<feat::FeatureBag> bags = featurize_corpus(corpus, cfg, cass::BuildOptions{});

  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& bag : bags) items.emplace_back(bag.program_id, bag.class_label);
  evalkit::LabeledCorpus labeled = evalkit::LabeledCorpus::from_items(std::move(items));
  evalkit::Split split =
      evalkit::split_by_problem(labeled, parse_fractions(args.split), args.seed);

  auto in_part = [](const std::vector<std::string>& part, const std::string& label) {
    return std::find(part.begin(), part.end(), label) != part.end();
  };

  std::vector<feat::FeatureBag> train_bags;
  for (const feat::FeatureBag& bag : bags) {
    if (in_part(split.train, bag.class_label)) train_bags.push_back(bag);
  }
  if (train_bags.empty()) throw Error("training split is empty");
  feat::Vocabulary vocab = feat::build_vocab(train_bags, args.min_count);

  bof::TrainData train_data;
  for (const feat::FeatureBag& bag : bags) {
    bof::TrainItem item{bof::to_feature_set(bag, vocab), bag.class_label};
    if (in_part(split.train, bag.class_label)) train_data.train.push_back(std::move(item));
    else if (in_part(split.validation, bag.class_label)) {
      train_data.validation.push_back(std::move(item));
    }
  }

  bof::TrainHyper hyper;
  hyper.gamma = args.gamma;
  hyper.margin = args.margin;
  hyper.lr = args.lr;
  hyper.weight_decay = args.weight_decay;
  hyper.p = args.p;
  hyper.k = args.k;
  hyper.epochs = args.epochs;
  hyper.iters_per_epoch = args.iters;
  hyper.seed = args.seed;

  bof::TrainResult result =
      bof::train(train_data, hyper, vocab.size(), args.dim, args.dropout);

  json ckpt = json::parse(bof::dump_checkpoint(result, feat::vocab_hash(vocab)));
  ckpt["manifest"] = manifest.to_json();
  ckpt["config"] = cass::config_id(cfg);
  data::write_file(args.output, ckpt.dump());

  json summary;
  summary["best_epoch"] = result.best_epoch;
  summary["best_val_map_at_r"] = result.best_val;
  summary["epochs"] = static_cast<int>(result.history.size());
  summary["checkpoint"] = args.output;
  emit(summary.dump() + "\n");
  return 0;
}

int run_gradcheck(const GradcheckArgs& args) {
  Rng rng(args.seed);
  std::vector<bof::FeatureSet> programs;
  std::vector<int> class_ids;
  for (int i = 0; i < args.programs; ++i) {
    bof::FeatureSet features;
    int count = 3 + static_cast<int>(rng.bounded(static_cast<uint64_t>(args.vocab_size - 2)));
    for (size_t idx : rng.sample_distinct(static_cast<size_t>(args.vocab_size),
                                          static_cast<size_t>(count))) {
      features.push_back(static_cast<int32_t>(idx));
    }
    std::sort(features.begin(), features.end());
    programs.push_back(std::move(features));
    class_ids.push_back(i % 3);
  }
  bof::Batch batch = bof::make_batch(std::move(programs), std::move(class_ids));
  bof::BofModel model = bof::init_model(args.vocab_size, args.dim, 0.0, args.seed + 1);
  bof::TrainHyper hyper;
  hyper.gamma = args.gamma;
  hyper.margin = args.margin;
  double max_rel = bof::grad_check(model, batch, hyper, args.eps);
  char line[64];
  std::snprintf(line, sizeof(line), "max_rel_error=%.6e\n", max_rel);
  emit(line);
  return max_rel <= 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"code similarity toolkit (configurable semantics trees)"};
  app.require_subcommand(1);

  ParseArgs parse_args;
  auto* cmd_parse = app.add_subcommand("parse", "parse a source file and print its tree as JSON");
  cmd_parse->add_option("file", parse_args.file)->required();
  cmd_parse->add_option("--dialect", parse_args.dialect)
      ->check(CLI::IsMember({"c-subset", "external"}));
  cmd_parse->add_flag("--pretty", parse_args.pretty);

  CassArgs cass_args;
  auto* cmd_cass = app.add_subcommand("cass", "build the semantics tree for one file");
  cmd_cass->add_option("file", cass_args.file)->required();
  cmd_cass->add_option("--config", cass_args.config);
  cmd_cass->add_option("--dialect", cass_args.dialect)
      ->check(CLI::IsMember({"c-subset", "external"}));
  cmd_cass->add_flag("--keep-literals", cass_args.keep_literals);

  FeaturizeArgs feat_args;
  auto* cmd_feat = app.add_subcommand("featurize", "emit feature bags as JSON lines");
  cmd_feat->add_option("path", feat_args.path)->required();
  cmd_feat->add_option("--config", feat_args.config);
  cmd_feat->add_flag("--keep-literals", feat_args.keep_literals);

  VocabArgs vocab_args;
  auto* cmd_vocab = app.add_subcommand("vocab", "fit a vocabulary from features or a dataset");
  cmd_vocab->add_option("input", vocab_args.input)->required();
  cmd_vocab->add_option("--config", vocab_args.config);
  cmd_vocab->add_option("--min-count", vocab_args.min_count)->check(CLI::PositiveNumber);
  cmd_vocab->add_option("-o,--output", vocab_args.output);

  CompareArgs compare_args;
  auto* cmd_compare = app.add_subcommand("compare", "similarity score of two files");
  cmd_compare->add_option("file_a", compare_args.file_a)->required();
  cmd_compare->add_option("file_b", compare_args.file_b)->required();
  cmd_compare->add_option("--config", compare_args.config);
  cmd_compare->add_option("--metric", compare_args.metric)
      ->check(CLI::IsMember({"dot", "cosine"}));
  cmd_compare->add_flag("--keep-literals", compare_args.keep_literals);

  IndexArgs index_args;
  auto* cmd_index = app.add_subcommand("index", "build a scoring index over a dataset");
  cmd_index->add_option("dataset", index_args.dataset)->required();
  cmd_index->add_option("--config", index_args.config);
  cmd_index->add_option("--vocab", index_args.vocab_file)->required();
  cmd_index->add_option("--mode", index_args.mode)->check(CLI::IsMember({"binary", "count"}));
  cmd_index->add_option("-o,--output", index_args.output);

  QueryArgs query_args;
  auto* cmd_query = app.add_subcommand("query", "rank indexed programs against a query file");
  cmd_query->add_option("file", query_args.file)->required();
  cmd_query->add_option("--index", query_args.index_file)->required();
  cmd_query->add_option("--vocab", query_args.vocab_file)->required();
  cmd_query->add_option("-k", query_args.k)->check(CLI::PositiveNumber);
  cmd_query->add_option("--metric", query_args.metric)->check(CLI::IsMember({"dot", "cosine"}));
  cmd_query->add_option("--format", query_args.format)->check(CLI::IsMember({"tsv", "json"}));

  EvalArgs eval_args;
  auto* cmd_eval = app.add_subcommand("eval", "retrieval/classification metrics over a dataset");
  cmd_eval->add_option("dataset", eval_args.dataset)->required();
  cmd_eval->add_option("--config", eval_args.config);
  cmd_eval->add_option("--metric", eval_args.metric)->check(CLI::IsMember({"mapr", "ap"}));
  cmd_eval->add_option("--mode", eval_args.mode)->check(CLI::IsMember({"binary", "count"}));
  cmd_eval->add_option("--min-count", eval_args.min_count)->check(CLI::PositiveNumber);
  cmd_eval->add_option("--seed", eval_args.seed);
  cmd_eval->add_option("--split", eval_args.split);
  cmd_eval->add_option("--part", eval_args.part)
      ->check(CLI::IsMember({"whole", "train", "validation", "test"}));
  cmd_eval->add_flag("--self-pairs", eval_args.self_pairs);

  SweepArgs sweep_args;
  auto* cmd_sweep = app.add_subcommand("sweep", "evaluate configurations over problem groups");
  cmd_sweep->add_option("dataset", sweep_args.dataset)->required();
  cmd_sweep->add_option("--configs", sweep_args.configs);
  cmd_sweep->add_option("--n-groups", sweep_args.n_groups)->check(CLI::PositiveNumber);
  cmd_sweep->add_option("--group-size", sweep_args.group_size)->check(CLI::PositiveNumber);
  cmd_sweep->add_option("--seed", sweep_args.seed);
  cmd_sweep->add_option("--metric", sweep_args.metric)->check(CLI::IsMember({"dot", "cosine"}));
  cmd_sweep->add_flag("--self-pairs", sweep_args.self_pairs);
  cmd_sweep->add_option("--jobs", sweep_args.jobs)->check(CLI::PositiveNumber);

  TrainArgs train_args;
  auto* cmd_train = app.add_subcommand("train", "train the bag-of-features scorer");
  cmd_train->add_option("dataset", train_args.dataset)->required();
  cmd_train->add_option("--config", train_args.config);
  cmd_train->add_option("--gamma", train_args.gamma);
  cmd_train->add_option("--margin", train_args.margin);
  cmd_train->add_option("--lr", train_args.lr);
  cmd_train->add_option("--weight-decay", train_args.weight_decay);
  cmd_train->add_option("--dropout", train_args.dropout);
  cmd_train->add_option("--p", train_args.p)->check(CLI::PositiveNumber);
  cmd_train->add_option("--k", train_args.k)->check(CLI::PositiveNumber);
  cmd_train->add_option("--epochs", train_args.epochs);
  cmd_train->add_option("--iters", train_args.iters)->check(CLI::PositiveNumber);
  cmd_train->add_option("--dim", train_args.dim)->check(CLI::PositiveNumber);
  cmd_train->add_option("--min-count", train_args.min_count)->check(CLI::PositiveNumber);
  cmd_train->add_option("--seed", train_args.seed);
  cmd_train->add_option("--split", train_args.split);
  cmd_train->add_option("-o,--output", train_args.output);

  GradcheckArgs grad_args;
  auto* cmd_grad = app.add_subcommand("gradcheck", "finite-difference gradient check");
  cmd_grad->add_option("--dim", grad_args.dim)->check(CLI::PositiveNumber);
  cmd_grad->add_option("--vocab-size", grad_args.vocab_size)->check(CLI::Range(4, 1 << 20));
  cmd_grad->add_option("--programs", grad_args.programs)->check(CLI::PositiveNumber);
  cmd_grad->add_option("--eps", grad_args.eps);
  cmd_grad->add_option("--gamma", grad_args.gamma);
  cmd_grad->add_option("--margin", grad_args.margin);
  cmd_grad->add_option("--seed", grad_args.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  auto reference_manifest = [](const Manifest& manifest) {
    std::cerr << manifest.to_json().dump() << "\n";
  };

  try {
    if (cmd_parse->parsed()) {
      Manifest manifest;
      manifest.command = "parse";
      manifest.flag("dialect", parse_args.dialect);
      manifest.input(parse_args.file, data::read_file(parse_args.file));
      reference_manifest(manifest);
      return run_parse(parse_args);
    }
    if (cmd_cass->parsed()) {
      Manifest manifest;
      manifest.command = "cass";
      manifest.flag("config", cass_args.config);
      manifest.flag("dialect", cass_args.dialect);
      manifest.flag("keep_literals", cass_args.keep_literals ? "true" : "false");
      manifest.input(cass_args.file, data::read_file(cass_args.file));
      reference_manifest(manifest);
      return run_cass(cass_args);
    }
    if (cmd_feat->parsed()) {
      Manifest manifest;
      manifest.command = "featurize";
      manifest.flag("config", feat_args.config);
      manifest.flag("keep_literals", feat_args.keep_literals ? "true" : "false");
      if (fs::is_directory(feat_args.path)) manifest.input_dir(feat_args.path);
      else manifest.input(feat_args.path, data::read_file(feat_args.path));
      reference_manifest(manifest);
      return run_featurize(feat_args);
    }
    if (cmd_vocab->parsed()) {
      Manifest manifest;
      manifest.command = "vocab";
      manifest.flag("config", vocab_args.config);
      manifest.flag("min_count", std::to_string(vocab_args.min_count));
      if (fs::is_directory(vocab_args.input)) manifest.input_dir(vocab_args.input);
      else manifest.input(vocab_args.input, data::read_file(vocab_args.input));
      reference_manifest(manifest);
      return run_vocab(vocab_args);
    }
    if (cmd_compare->parsed()) {
      Manifest manifest;
      manifest.command = "compare";
      manifest.flag("config", compare_args.config);
      manifest.flag("metric", compare_args.metric);
      manifest.flag("keep_literals", compare_args.keep_literals ? "true" : "false");
      manifest.input(compare_args.file_a, data::read_file(compare_args.file_a));
      manifest.input(compare_args.file_b, data::read_file(compare_args.file_b));
      return run_compare(compare_args, manifest);
    }
    if (cmd_index->parsed()) {
      Manifest manifest;
      manifest.command = "index";
      manifest.flag("config", index_args.config);
      manifest.flag("mode", index_args.mode);
      manifest.input_dir(index_args.dataset);
      manifest.input(index_args.vocab_file, data::read_file(index_args.vocab_file));
      reference_manifest(manifest);
      return run_index(index_args);
    }
    if (cmd_query->parsed()) {
      Manifest manifest;
      manifest.command = "query";
      manifest.flag("k", std::to_string(query_args.k));
      manifest.flag("metric", query_args.metric);
      manifest.input(query_args.file, data::read_file(query_args.file));
      manifest.input(query_args.index_file, data::read_file(query_args.index_file));
      reference_manifest(manifest);
      return run_query(query_args);
    }
    if (cmd_eval->parsed()) {
      Manifest manifest;
      manifest.command = "eval";
      manifest.flag("config", eval_args.config);
      manifest.flag("metric", eval_args.metric);
      manifest.flag("mode", eval_args.mode);
      manifest.flag("min_count", std::to_string(eval_args.min_count));
      manifest.flag("seed", std::to_string(eval_args.seed));
      manifest.flag("split", eval_args.split);
      manifest.flag("part", eval_args.part);
      manifest.flag("self_pairs", eval_args.self_pairs ? "true" : "false");
      manifest.input_dir(eval_args.dataset);
      return run_eval(eval_args, manifest);
    }
    if (cmd_sweep->parsed()) {
      Manifest manifest;
      manifest.command = "sweep";
      manifest.flag("configs", sweep_args.configs);
      manifest.flag("n_groups", std::to_string(sweep_args.n_groups));
      manifest.flag("group_size", std::to_string(sweep_args.group_size));
      manifest.flag("seed", std::to_string(sweep_args.seed));
      manifest.flag("metric", sweep_args.metric);
      manifest.flag("self_pairs", sweep_args.self_pairs ? "true" : "false");
      manifest.input_dir(sweep_args.dataset);
      return run_sweep(sweep_args, manifest);
    }
    if (cmd_train->parsed()) {
      Manifest manifest;
      manifest.command = "train";
      manifest.flag("config", train_args.config);
      manifest.flag("gamma", std::to_string(train_args.gamma));
      manifest.flag("margin", std::to_string(train_args.margin));
      manifest.flag("lr", std::to_string(train_args.lr));
      manifest.flag("weight_decay", std::to_string(train_args.weight_decay));
      manifest.flag("dropout", std::to_string(train_args.dropout));
      manifest.flag("p", std::to_string(train_args.p));
      manifest.flag("k", std::to_string(train_args.k));
      manifest.flag("epochs", std::to_string(train_args.epochs));
      manifest.flag("iters", std::to_string(train_args.iters));
      manifest.flag("dim", std::to_string(train_args.dim));
      manifest.flag("min_count", std::to_string(train_args.min_count));
      manifest.flag("seed", std::to_string(train_args.seed));
      manifest.flag("split", train_args.split);
      manifest.input_dir(train_args.dataset);
      return run_train(train_args, manifest);
    }
    if (cmd_grad->parsed()) return run_gradcheck(grad_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
