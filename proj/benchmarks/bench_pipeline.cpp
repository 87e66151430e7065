#include <benchmark/benchmark.h>

#include "cassim/bofnet.hpp"
#include "cassim/evalkit.hpp"
#include "cassim/featurize.hpp"
#include "cassim/simindex.hpp"
#include "support/synth.hpp"

using namespace cassim;

namespace {

std::string bench_source() { return synth::random_program(12345, synth::default_names()); }

void bm_parse(benchmark::State& state) {
  std::string source = bench_source();
  for (auto _ : state) {
    cst::CstNode tree = cst::parse_or_throw({"bench.c", source, cst::Dialect::c_subset});
    benchmark::DoNotOptimize(tree);
  }
}
BENCHMARK(bm_parse);

void bm_build_cass(benchmark::State& state) {
  cst::CstNode tree = cst::parse_or_throw({"bench.c", bench_source(), cst::Dialect::c_subset});
  cass::CassConfig cfg = cass::parse_config_id("2-1-3-1-1");
  for (auto _ : state) {
    cass::Cass cass_value = cass::build_cass(tree, cfg);
    benchmark::DoNotOptimize(cass_value);
  }
}
BENCHMARK(bm_build_cass);

void bm_extract_features(benchmark::State& state) {
  cst::CstNode tree = cst::parse_or_throw({"bench.c", bench_source(), cst::Dialect::c_subset});
  cass::Cass cass_value = cass::build_cass(tree, cass::parse_config_id("2-1-3-1-1"));
  for (auto _ : state) {
    feat::FeatureBag bag = feat::extract_features(cass_value);
    benchmark::DoNotOptimize(bag);
  }
}
BENCHMARK(bm_extract_features);

struct ScoringFixture {
  sim::CorpusIndex index;
  ScoringFixture() {
    synth::CorpusSources sources = synth::learnable_corpus(8, 16, 777);
    evalkit::SourceCorpus corpus = synth::parse_corpus(sources);
    std::vector<feat::FeatureBag> bags;
    for (const evalkit::SourceProgram& program : corpus.programs) {
      feat::FeatureBag bag =
          feat::extract_features(cass::build_cass(program.tree, cass::CassConfig{}));
      bag.program_id = program.id;
      bag.class_label = program.label;
      bags.push_back(std::move(bag));
    }
    feat::Vocabulary vocab = feat::build_vocab(bags, 1);
    index = sim::build_index(bags, vocab, feat::VectorMode::binary);
  }
};

void bm_sparse_cosine(benchmark::State& state) {
  static ScoringFixture fixture;
  size_t n = fixture.index.size();
  size_t i = 0;
  for (auto _ : state) {
    double s = sim::cosine(fixture.index.vectors[i % n], fixture.index.vectors[(i + 7) % n]);
    benchmark::DoNotOptimize(s);
    ++i;
  }
}
BENCHMARK(bm_sparse_cosine);

void bm_query_top10(benchmark::State& state) {
  static ScoringFixture fixture;
  for (auto _ : state) {
    sim::RankedResult result =
        sim::query(fixture.index, fixture.index.vectors[0], 10, sim::Metric::cosine);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(bm_query_top10);

void bm_loss_and_gradients(benchmark::State& state) {
  Rng rng(4);
  std::vector<bof::FeatureSet> programs;
  std::vector<int> classes;
  for (int i = 0; i < 16; ++i) {
    std::vector<size_t> picks = rng.sample_distinct(512, 40);
    bof::FeatureSet fs(picks.begin(), picks.end());
    std::sort(fs.begin(), fs.end());
    programs.push_back(fs);
    classes.push_back(i / 4);
  }
  bof::Batch batch = bof::make_batch(std::move(programs), std::move(classes));
  bof::BofModel model = bof::init_model(512, 128, 0.0, 5);
  bof::Gradients grads;
  for (auto _ : state) {
    double loss = bof::loss_and_gradients(model, batch, bof::TrainHyper{}, false, nullptr, &grads);
    benchmark::DoNotOptimize(loss);
  }
}
BENCHMARK(bm_loss_and_gradients);

}  // namespace

BENCHMARK_MAIN();
