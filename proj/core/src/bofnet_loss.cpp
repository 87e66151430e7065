#include <algorithm>
#include <cmath>

#include "cassim/bofnet.hpp"

namespace cassim::bof {

namespace {

struct CircleTerms {
  double neg_sum = 0.0;  // sum over negatives of exp(gamma*a_n*(s - m))
  double pos_sum = 0.0;  // sum over positives of exp(-gamma*a_p*(s - (1-m)))
  bool has_pos = false;
  bool has_neg = false;
};

CircleTerms circle_terms(std::span<const double> s, std::span<const uint8_t> y, int n,
                         double gamma, double margin) {
  CircleTerms t;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double sij = s[static_cast<size_t>(i) * n + j];
      if (y[static_cast<size_t>(i) * n + j]) {
        t.has_pos = true;
        double alpha = std::max(0.0, 1.0 + margin - sij);
        t.pos_sum += std::exp(-gamma * alpha * (sij - (1.0 - margin)));
      } else {
        t.has_neg = true;
        double alpha = std::max(0.0, sij + margin);
        t.neg_sum += std::exp(gamma * alpha * (sij - margin));
      }
    }
  }
  return t;
}

}  // namespace

double circle_loss(std::span<const double> similarities, std::span<const uint8_t> pair_labels,
                   int n, double gamma, double margin) {
  CircleTerms t = circle_terms(similarities, pair_labels, n, gamma, margin);
  if (!t.has_pos || !t.has_neg) return 0.0;
  return std::log1p(t.neg_sum * t.pos_sum);
}

double loss_and_gradients(const BofModel& model, const Batch& batch, const TrainHyper& hyper,
                          bool train_mode, Rng* rng, Gradients* out) {
  const int n = batch.size();
  const int32_t d = model.dim;
  if (n < 2) throw Error("batch needs at least two programs");

  const bool drop = train_mode && model.dropout_rate > 0.0;
  const double keep = 1.0 - model.dropout_rate;
  if (drop && rng == nullptr) throw Error("dropout requires an rng");

  // Forward. Per-feature dropout masks are kept so the backward pass routes
  // gradients through exactly the surviving components.
  std::vector<std::vector<std::vector<uint8_t>>> masks(drop ? n : 0);
  std::vector<std::vector<double>> pooled(n, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> code(n);
  std::vector<double> norms(n);
  std::vector<std::vector<double>> unit(n, std::vector<double>(d, 0.0));

  for (int i = 0; i < n; ++i) {
    const FeatureSet& features = batch.programs[i];
    if (drop) masks[i].resize(features.size());
    for (size_t fi = 0; fi < features.size(); ++fi) {
      int32_t f = features[fi];
      if (f < 0 || f >= model.vocab_rows) throw Error("feature index out of range");
      std::span<const double> e = model.row(f);
      if (drop) {
        masks[i][fi].resize(d);
        for (int32_t c = 0; c < d; ++c) {
          bool keep_unit = rng->uniform() >= model.dropout_rate;
          masks[i][fi][c] = keep_unit ? 1 : 0;
          if (keep_unit) pooled[i][c] += e[c] / keep;
        }
      } else {
        for (int32_t c = 0; c < d; ++c) pooled[i][c] += e[c];
      }
    }
    if (!features.empty()) {
      double inv = 1.0 / static_cast<double>(features.size());
      for (double& x : pooled[i]) x *= inv;
    }
    code[i].assign(d, 0.0);
    for (int32_t r = 0; r < d; ++r) {
      double acc = model.fc_bias[r];
      const double* w = model.fc_weight.data() + static_cast<size_t>(r) * d;
      for (int32_t c = 0; c < d; ++c) acc += w[c] * pooled[i][c];
      code[i][r] = acc;
    }
    double sq = 0.0;
    for (double x : code[i]) sq += x * x;
    norms[i] = std::sqrt(sq);
    if (!(norms[i] > 0.0)) throw Error("zero code vector in training batch");
    for (int32_t r = 0; r < d; ++r) unit[i][r] = code[i][r] / norms[i];
  }

  std::vector<double> s(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    s[static_cast<size_t>(i) * n + i] = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (int32_t r = 0; r < d; ++r) acc += unit[i][r] * unit[j][r];
      s[static_cast<size_t>(i) * n + j] = acc;
      s[static_cast<size_t>(j) * n + i] = acc;
    }
  }

  CircleTerms terms = circle_terms(s, batch.pair_labels, n, hyper.gamma, hyper.margin);
  double loss = (!terms.has_pos || !terms.has_neg) ? 0.0 : std::log1p(terms.neg_sum * terms.pos_sum);
  if (!std::isfinite(loss)) throw Error("non-finite loss");
  if (out == nullptr) return loss;

  out->embedding_rows.clear();
  out->fc_weight.assign(model.fc_weight.size(), 0.0);
  out->fc_bias.assign(model.fc_bias.size(), 0.0);
  if (!terms.has_pos || !terms.has_neg) return loss;

  // d loss / d s_ij for each unordered pair. Terms whose cut-off alpha hit
  // zero contribute a constant to the sums and therefore no gradient.
  const double m = hyper.margin;
  const double g = hyper.gamma;
  const double denom = 1.0 + terms.neg_sum * terms.pos_sum;
  std::vector<std::vector<double>> dunit(n, std::vector<double>(d, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double sij = s[static_cast<size_t>(i) * n + j];
      double ds;
      if (batch.pair_labels[static_cast<size_t>(i) * n + j]) {
        double alpha = 1.0 + m - sij;
        if (alpha <= 0.0) continue;
        double term = std::exp(-g * alpha * (sij - (1.0 - m)));
        ds = terms.neg_sum * term * (-2.0 * g * (1.0 - sij)) / denom;
      } else {
        double alpha = sij + m;
        if (alpha <= 0.0) continue;
        double term = std::exp(g * alpha * (sij - m));
        ds = terms.pos_sum * term * (2.0 * g * sij) / denom;
      }
      for (int32_t r = 0; r < d; ++r) {
        dunit[i][r] += ds * unit[j][r];
        dunit[j][r] += ds * unit[i][r];
      }
    }
  }

  // Through the normalization, the FC layer, and the pooled mean.
  for (int i = 0; i < n; ++i) {
    double dot = 0.0;
    for (int32_t r = 0; r < d; ++r) dot += dunit[i][r] * unit[i][r];
    std::vector<double> dcode(d);
    for (int32_t r = 0; r < d; ++r) dcode[r] = (dunit[i][r] - dot * unit[i][r]) / norms[i];

    for (int32_t r = 0; r < d; ++r) {
      out->fc_bias[r] += dcode[r];
      double* wrow = out->fc_weight.data() + static_cast<size_t>(r) * d;
      for (int32_t c = 0; c < d; ++c) wrow[c] += dcode[r] * pooled[i][c];
    }

    std::vector<double> dpooled(d, 0.0);
    for (int32_t r = 0; r < d; ++r) {
      const double* w = model.fc_weight.data() + static_cast<size_t>(r) * d;
      for (int32_t c = 0; c < d; ++c) dpooled[c] += w[c] * dcode[r];
    }

    const FeatureSet& features = batch.programs[i];
    if (features.empty()) continue;
    double inv = 1.0 / static_cast<double>(features.size());
    for (size_t fi = 0; fi < features.size(); ++fi) {
      auto [it, inserted] = out->embedding_rows.try_emplace(features[fi]);
      if (inserted) it->second.assign(d, 0.0);
      std::vector<double>& erow = it->second;
      if (drop) {
        for (int32_t c = 0; c < d; ++c) {
          if (masks[i][fi][c]) erow[c] += dpooled[c] * inv / keep;
        }
      } else {
        for (int32_t c = 0; c < d; ++c) erow[c] += dpooled[c] * inv;
      }
    }
  }

  for (const auto& [row, grad] : out->embedding_rows) {
    for (double v : grad) {
      if (!std::isfinite(v)) throw Error("non-finite embedding gradient");
    }
  }
  return loss;
}

double grad_check(const BofModel& model, const Batch& batch, const TrainHyper& hyper,
                  double epsilon) {
  if (epsilon < 1e-7 || epsilon > 1e-3) throw Error("epsilon must be in [1e-7, 1e-3]");
  Gradients grads;
  loss_and_gradients(model, batch, hyper, /*train_mode=*/false, nullptr, &grads);

  BofModel probe = model;
  auto loss_at = [&]() {
    return loss_and_gradients(probe, batch, hyper, /*train_mode=*/false, nullptr, nullptr);
  };
  auto central = [&](double* param) {
    double saved = *param;
    *param = saved + epsilon;
    double up = loss_at();
    *param = saved - epsilon;
    double down = loss_at();
    *param = saved;
    return (up - down) / (2.0 * epsilon);
  };

  double max_rel = 0.0;
  auto account = [&](double analytic, double numeric) {
    double denom = std::max(std::abs(analytic), std::abs(numeric));
    if (denom < 1e-8) return;  // both effectively zero
    max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
  };

  for (const auto& [row, grad] : grads.embedding_rows) {
    for (int32_t c = 0; c < model.dim; ++c) {
      double numeric = central(&probe.embeddings[static_cast<size_t>(row) * model.dim + c]);
      account(grad[c], numeric);
    }
  }
  for (size_t i = 0; i < model.fc_weight.size(); ++i) {
    account(grads.fc_weight[i], central(&probe.fc_weight[i]));
  }
  for (size_t i = 0; i < model.fc_bias.size(); ++i) {
    account(grads.fc_bias[i], central(&probe.fc_bias[i]));
  }
  return max_rel;
}

}  // namespace cassim::bof
