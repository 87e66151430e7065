#include <algorithm>
#include <cmath>

#include "cassim/bofnet.hpp"
#include "cassim/evalkit.hpp"

namespace cassim::bof {

namespace {

ClassDataset group_by_class(std::span<const TrainItem> items) {
  std::map<std::string, std::vector<const TrainItem*>> grouped;
  for (const TrainItem& item : items) grouped[item.class_label].push_back(&item);
  ClassDataset dataset;
  for (const auto& [label, members] : grouped) {
    std::vector<FeatureSet> sets;
    sets.reserve(members.size());
    for (const TrainItem* item : members) sets.push_back(item->features);
    dataset.classes.push_back(std::move(sets));
  }
  return dataset;
}

}  // namespace

double embedding_map_at_r(const BofModel& model, std::span<const TrainItem> items) {
  // Code vectors become dense "sparse" vectors so the shared MAP@R
  // implementation applies unchanged.
  sim::CorpusIndex index;
  index.dimension = model.dim;
  index.mode = feat::VectorMode::count;
  size_t ord = 0;
  for (const TrainItem& item : items) {
    std::vector<double> code = embed_program(model, item.features);
    feat::SparseVector vec;
    vec.dimension = model.dim;
    vec.mode = feat::VectorMode::count;
    for (int32_t i = 0; i < model.dim; ++i) {
      vec.entries.emplace_back(i, code[i]);
    }
    char id[24];
    std::snprintf(id, sizeof(id), "q%08zu", ord++);
    index.ids.push_back(id);
    index.labels.push_back(item.class_label);
    index.vectors.push_back(std::move(vec));
    index.norms.push_back(sim::norm(index.vectors.back()));
  }
  return evalkit::map_at_r(index, sim::Metric::cosine).value;
}

TrainResult train(const TrainData& data, const TrainHyper& hyper, int32_t vocab_rows, int32_t dim,
                  double dropout_rate) {
  if (hyper.gamma <= 0.0) throw Error("gamma must be positive");
  if (hyper.margin <= 0.0 || hyper.margin >= 1.0) throw Error("margin must be in (0, 1)");
  if (hyper.p < 2 || hyper.k < 2) throw Error("p and k must be at least 2");
  if (hyper.epochs < 0) throw Error("epochs must be non-negative");
  if (hyper.epochs > 0 && data.validation.empty()) {
    throw Error("training requires a validation split");
  }
  TrainResult result;
  result.model = init_model(vocab_rows, dim, dropout_rate, hyper.seed);
  result.optimizer = init_optimizer(result.model);
  if (hyper.epochs == 0) return result;

  ClassDataset classes = group_by_class(data.train);
  Rng root(hyper.seed);
  Rng batch_rng = root.fork(1);
  Rng dropout_rng = root.fork(2);

  BofModel best = result.model;
  OptimizerState best_opt = result.optimizer;
  double best_val = -1.0;
  int best_epoch = 0;

  Gradients grads;
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int iter = 0; iter < hyper.iters_per_epoch; ++iter) {
      Batch batch = sample_pk_batch(classes, hyper.p, hyper.k, batch_rng);
      double loss = loss_and_gradients(result.model, batch, hyper, /*train_mode=*/true,
                                       &dropout_rng, &grads);
      adamw_step(result.model, grads, result.optimizer, hyper);
      loss_sum += loss;
    }
    double val = embedding_map_at_r(result.model, data.validation);
    result.history.push_back(
        EpochStats{epoch, loss_sum / static_cast<double>(hyper.iters_per_epoch), val});
    // Ties keep the later epoch: more optimization at equal validation score.
    if (val >= best_val) {
      best_val = val;
      best_epoch = epoch;
      best = result.model;
      best_opt = result.optimizer;
    }
  }
  result.model = std::move(best);
  result.optimizer = std::move(best_opt);
  result.best_epoch = best_epoch;
  result.best_val = best_val;
  return result;
}

}  // namespace cassim::bof
