#include <algorithm>
#include <cmath>

#include "cassim/bofnet.hpp"

namespace cassim::bof {

BofModel init_model(int32_t vocab_rows, int32_t dim, double dropout_rate, uint64_t seed) {
  if (vocab_rows < 1 || dim < 1) throw Error("model needs at least one row and one dimension");
  BofModel model;
  model.vocab_rows = vocab_rows;
  model.dim = dim;
  model.dropout_rate = dropout_rate;
  double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  Rng rng(seed);
  model.embeddings.resize(static_cast<size_t>(vocab_rows) * dim);
  for (double& w : model.embeddings) w = rng.uniform(-bound, bound);
  model.fc_weight.resize(static_cast<size_t>(dim) * dim);
  for (double& w : model.fc_weight) w = rng.uniform(-bound, bound);
  model.fc_bias.assign(static_cast<size_t>(dim), 0.0);
  return model;
}

FeatureSet to_feature_set(const feat::FeatureBag& bag, const feat::Vocabulary& vocab) {
  FeatureSet set;
  for (const auto& [feature, count] : bag.counts) set.push_back(vocab.lookup(feature));
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

std::vector<double> embed_program(const BofModel& model, const FeatureSet& features,
                                  bool train_mode, Rng* rng) {
  const int32_t d = model.dim;
  std::vector<double> pooled(static_cast<size_t>(d), 0.0);
  bool drop = train_mode && model.dropout_rate > 0.0;
  double keep = 1.0 - model.dropout_rate;
  for (int32_t f : features) {
    if (f < 0 || f >= model.vocab_rows) throw Error("feature index out of range");
    std::span<const double> e = model.row(f);
    if (drop) {
      if (rng == nullptr) throw Error("dropout requires an rng");
      for (int32_t i = 0; i < d; ++i) {
        if (rng->uniform() >= model.dropout_rate) pooled[i] += e[i] / keep;
      }
    } else {
      for (int32_t i = 0; i < d; ++i) pooled[i] += e[i];
    }
  }
  if (!features.empty()) {
    double inv = 1.0 / static_cast<double>(features.size());
    for (double& x : pooled) x *= inv;
  }
  std::vector<double> code(static_cast<size_t>(d), 0.0);
  for (int32_t i = 0; i < d; ++i) {
    double acc = model.fc_bias[i];
    const double* w = model.fc_weight.data() + static_cast<size_t>(i) * d;
    for (int32_t j = 0; j < d; ++j) acc += w[j] * pooled[j];
    code[i] = acc;
  }
  return code;
}

std::vector<double> embed_program(const BofModel& model, const feat::FeatureBag& bag,
                                  const feat::Vocabulary& vocab, bool train_mode, Rng* rng,
                                  bool count_weighted) {
  if (!count_weighted) return embed_program(model, to_feature_set(bag, vocab), train_mode, rng);

  const int32_t d = model.dim;
  bool drop = train_mode && model.dropout_rate > 0.0;
  double keep = 1.0 - model.dropout_rate;
  std::map<int32_t, double> weights;
  double total = 0.0;
  for (const auto& [feature, count] : bag.counts) {
    weights[vocab.lookup(feature)] += count;
    total += count;
  }
  std::vector<double> pooled(static_cast<size_t>(d), 0.0);
  for (const auto& [f, weight] : weights) {
    std::span<const double> e = model.row(f);
    for (int32_t i = 0; i < d; ++i) {
      double value = e[i];
      if (drop) {
        if (rng == nullptr) throw Error("dropout requires an rng");
        value = rng->uniform() >= model.dropout_rate ? value / keep : 0.0;
      }
      pooled[i] += weight * value;
    }
  }
  if (total > 0.0) {
    for (double& x : pooled) x /= total;
  }
  std::vector<double> code(static_cast<size_t>(d), 0.0);
  for (int32_t i = 0; i < d; ++i) {
    double acc = model.fc_bias[i];
    const double* w = model.fc_weight.data() + static_cast<size_t>(i) * d;
    for (int32_t j = 0; j < d; ++j) acc += w[j] * pooled[j];
    code[i] = acc;
  }
  return code;
}

std::vector<double> similarity_matrix(std::span<const std::vector<double>> vectors) {
  const size_t n = vectors.size();
  std::vector<double> norms(n);
  for (size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double x : vectors[i]) sum += x * x;
    norms[i] = std::sqrt(sum);
    if (norms[i] == 0.0) throw Error("zero code vector in similarity matrix");
  }
  std::vector<double> s(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    s[i * n + i] = 1.0;
    for (size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (size_t k = 0; k < vectors[i].size(); ++k) acc += vectors[i][k] * vectors[j][k];
      double value = acc / (norms[i] * norms[j]);
      s[i * n + j] = value;
      s[j * n + i] = value;
    }
  }
  return s;
}

Batch make_batch(std::vector<FeatureSet> programs, std::vector<int> class_ids) {
  if (programs.size() != class_ids.size()) throw Error("programs/class_ids size mismatch");
  Batch batch;
  batch.programs = std::move(programs);
  batch.class_ids = std::move(class_ids);
  const size_t n = batch.programs.size();
  batch.pair_labels.assign(n * n, 0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i != j && batch.class_ids[i] == batch.class_ids[j]) batch.pair_labels[i * n + j] = 1;
    }
  }
  return batch;
}

Batch sample_pk_batch(const ClassDataset& dataset, int p, int k, Rng& rng) {
  if (p < 1 || k < 1) throw Error("p and k must be positive");
  if (dataset.classes.size() < static_cast<size_t>(p)) {
    throw Error("dataset has fewer than P classes");
  }
  std::vector<size_t> class_picks = rng.sample_distinct(dataset.classes.size(), static_cast<size_t>(p));
  std::vector<FeatureSet> programs;
  std::vector<int> class_ids;
  for (size_t c : class_picks) {
    const auto& members = dataset.classes[c];
    size_t take = std::min<size_t>(static_cast<size_t>(k), members.size());
    for (size_t idx : rng.sample_distinct(members.size(), take)) {
      programs.push_back(members[idx]);
      class_ids.push_back(static_cast<int>(c));
    }
  }
  return make_batch(std::move(programs), std::move(class_ids));
}

OptimizerState init_optimizer(const BofModel& model) {
  OptimizerState state;
  state.m_embeddings.assign(model.embeddings.size(), 0.0);
  state.v_embeddings.assign(model.embeddings.size(), 0.0);
  state.m_weight.assign(model.fc_weight.size(), 0.0);
  state.v_weight.assign(model.fc_weight.size(), 0.0);
  state.m_bias.assign(model.fc_bias.size(), 0.0);
  state.v_bias.assign(model.fc_bias.size(), 0.0);
  return state;
}

namespace {

void adamw_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                  std::span<double> v, int64_t step, const TrainHyper& hyper, double weight_decay) {
  double bias1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  double bias2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
  for (size_t i = 0; i < params.size(); ++i) {
    double g = grads[i];
    m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g;
    v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g * g;
    double m_hat = m[i] / bias1;
    double v_hat = v[i] / bias2;
    params[i] -= hyper.lr * (m_hat / (std::sqrt(v_hat) + hyper.eps) + weight_decay * params[i]);
  }
}

}  // namespace

void adamw_step(BofModel& model, const Gradients& grads, OptimizerState& state,
                const TrainHyper& hyper) {
  if (grads.fc_weight.size() != model.fc_weight.size() ||
      grads.fc_bias.size() != model.fc_bias.size()) {
    throw Error("gradient shapes do not match the model");
  }
  ++state.step;

  // Dense embedding gradient: untouched rows carry zero gradient but still
  // receive moment decay and weight decay, matching a dense optimizer.
  std::vector<double> dense(model.embeddings.size(), 0.0);
  for (const auto& [row, grad] : grads.embedding_rows) {
    if (row < 0 || row >= model.vocab_rows || grad.size() != static_cast<size_t>(model.dim)) {
      throw Error("gradient shapes do not match the model");
    }
    std::copy(grad.begin(), grad.end(), dense.begin() + static_cast<size_t>(row) * model.dim);
  }
  adamw_update(model.embeddings, dense, state.m_embeddings, state.v_embeddings, state.step, hyper,
               hyper.weight_decay);
  adamw_update(model.fc_weight, grads.fc_weight, state.m_weight, state.v_weight, state.step, hyper,
               hyper.weight_decay);
  adamw_update(model.fc_bias, grads.fc_bias, state.m_bias, state.v_bias, state.step, hyper, 0.0);
}

}  // namespace cassim::bof
