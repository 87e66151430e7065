#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cassim/featurize.hpp"
#include "cassim/rng.hpp"

namespace cassim::bof {

// Bag-of-features scorer: per-feature embeddings, average pooling over the
// program's feature set, and a fully-connected projection to the code vector.
// All arithmetic is 64-bit so the gradient checker is meaningful.
struct BofModel {
  int32_t vocab_rows = 0;  // row 0 is the UNKNOWN embedding
  int32_t dim = 128;
  double dropout_rate = 0.5;
  std::vector<double> embeddings;  // vocab_rows x dim, row-major
  std::vector<double> fc_weight;   // dim x dim, row-major
  std::vector<double> fc_bias;     // dim

  std::span<const double> row(int32_t r) const {
    return {embeddings.data() + static_cast<size_t>(r) * dim, static_cast<size_t>(dim)};
  }
};

// Embeddings and weights uniform in (-1/sqrt(dim), 1/sqrt(dim)), zero bias.
BofModel init_model(int32_t vocab_rows, int32_t dim, double dropout_rate, uint64_t seed);

struct TrainHyper {
  double gamma = 80.0;
  double margin = 0.4;
  double lr = 1e-3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int p = 16;  // classes per batch
  int k = 5;   // programs per class, at most
  int epochs = 100;
  int iters_per_epoch = 1000;
  uint64_t seed = 0;
};

// Distinct vocabulary indices of a bag (set semantics: duplicates collapse,
// all out-of-vocabulary features fold onto UNKNOWN).
using FeatureSet = std::vector<int32_t>;
FeatureSet to_feature_set(const feat::FeatureBag& bag, const feat::Vocabulary& vocab);

// Code vector of one program. Dropout (inverted scaling, applied to the
// embedding vectors) is active only in train mode and draws from rng.
// Duplicate features never change the result (set semantics); the optional
// count_weighted flag on the bag overload switches to a count-weighted mean.
std::vector<double> embed_program(const BofModel& model, const FeatureSet& features,
                                  bool train_mode = false, Rng* rng = nullptr);
std::vector<double> embed_program(const BofModel& model, const feat::FeatureBag& bag,
                                  const feat::Vocabulary& vocab, bool train_mode = false,
                                  Rng* rng = nullptr, bool count_weighted = false);

// Row-major n x n cosine matrix. Throws Error on a zero vector.
std::vector<double> similarity_matrix(std::span<const std::vector<double>> vectors);

// Pairwise Circle loss over the upper triangle:
//   L = log(1 + [sum_N exp(g*a_n*(s_n - m))] * [sum_P exp(-g*a_p*(s_p - (1-m)))])
// with a_p = max(0, 1+m-s_p), a_n = max(0, s_n+m). Zero when either side
// has no pairs.
double circle_loss(std::span<const double> similarities, std::span<const uint8_t> pair_labels,
                   int n, double gamma, double margin);

struct Batch {
  std::vector<FeatureSet> programs;
  std::vector<int> class_ids;
  std::vector<uint8_t> pair_labels;  // n x n, row-major; diagonal unused

  int size() const { return static_cast<int>(programs.size()); }
  bool same_class(int i, int j) const {
    return pair_labels[static_cast<size_t>(i) * programs.size() + j] != 0;
  }
};

Batch make_batch(std::vector<FeatureSet> programs, std::vector<int> class_ids);

struct ClassDataset {
  // programs grouped by class, in a stable order
  std::vector<std::vector<FeatureSet>> classes;
};

// P distinct classes, then at most K distinct programs from each.
Batch sample_pk_batch(const ClassDataset& dataset, int p, int k, Rng& rng);

struct Gradients {
  std::map<int32_t, std::vector<double>> embedding_rows;  // touched rows only
  std::vector<double> fc_weight;
  std::vector<double> fc_bias;
};

// Loss plus analytic gradients for the embeddings, FC weight, and bias.
// Dropout masks (train mode) are drawn from rng and folded into the
// backward pass. Throws Error on non-finite intermediates.
double loss_and_gradients(const BofModel& model, const Batch& batch, const TrainHyper& hyper,
                          bool train_mode, Rng* rng, Gradients* out);

// Max relative error between analytic gradients and central differences over
// every touched parameter (absolute tolerance 1e-8 where both are tiny).
// Dropout is disabled.
double grad_check(const BofModel& model, const Batch& batch, const TrainHyper& hyper,
                  double epsilon);

struct OptimizerState {
  int64_t step = 0;
  std::vector<double> m_embeddings, v_embeddings;
  std::vector<double> m_weight, v_weight;
  std::vector<double> m_bias, v_bias;
};

OptimizerState init_optimizer(const BofModel& model);

// Decoupled-weight-decay Adam with bias correction. Weight decay applies to
// embeddings and FC weight, not the bias.
void adamw_step(BofModel& model, const Gradients& grads, OptimizerState& state,
                const TrainHyper& hyper);

struct TrainItem {
  FeatureSet features;
  std::string class_label;
};

struct TrainData {
  std::vector<TrainItem> train;
  std::vector<TrainItem> validation;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double val_map_at_r = 0.0;
};

struct TrainResult {
  BofModel model;  // checkpoint with the best validation MAP@R
  OptimizerState optimizer;
  std::vector<EpochStats> history;
  int best_epoch = 0;     // 0 when epochs = 0
  double best_val = 0.0;
};

TrainResult train(const TrainData& data, const TrainHyper& hyper, int32_t vocab_rows, int32_t dim,
                  double dropout_rate);

// Cosine MAP@R of the model's code vectors over a labeled item set.
double embedding_map_at_r(const BofModel& model, std::span<const TrainItem> items);

// Versioned checkpoint container with the vocabulary hash.
std::string dump_checkpoint(const TrainResult& result, uint64_t vocab_hash);
TrainResult load_checkpoint(std::string_view bytes, uint64_t* vocab_hash = nullptr);

}  // namespace cassim::bof
