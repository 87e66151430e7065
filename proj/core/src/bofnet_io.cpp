#include <json.hpp>

#include "cassim/bofnet.hpp"

namespace cassim::bof {

namespace {
using nlohmann::json;
}

std::string dump_checkpoint(const TrainResult& result, uint64_t vocab_hash) {
  const BofModel& model = result.model;
  json j;
  j["version"] = 1;
  j["vocab_hash"] = vocab_hash;
  j["vocab_rows"] = model.vocab_rows;
  j["dim"] = model.dim;
  j["dropout"] = model.dropout_rate;
  j["embeddings"] = model.embeddings;
  j["fc_weight"] = model.fc_weight;
  j["fc_bias"] = model.fc_bias;
  j["optimizer"] = {
      {"step", result.optimizer.step},
      {"m_embeddings", result.optimizer.m_embeddings},
      {"v_embeddings", result.optimizer.v_embeddings},
      {"m_weight", result.optimizer.m_weight},
      {"v_weight", result.optimizer.v_weight},
      {"m_bias", result.optimizer.m_bias},
      {"v_bias", result.optimizer.v_bias},
  };
  json history = json::array();
  for (const EpochStats& stats : result.history) {
    history.push_back({{"epoch", stats.epoch},
                       {"mean_loss", stats.mean_loss},
                       {"val_map_at_r", stats.val_map_at_r}});
  }
  j["history"] = std::move(history);
  j["best_epoch"] = result.best_epoch;
  j["best_val"] = result.best_val;
  return j.dump();
}

TrainResult load_checkpoint(std::string_view bytes, uint64_t* vocab_hash) {
  json j = json::parse(bytes, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("invalid checkpoint file");
  if (!j.contains("version") || j["version"].get<int>() != 1) {
    throw Error("unsupported checkpoint version");
  }
  TrainResult result;
  BofModel& model = result.model;
  model.vocab_rows = j["vocab_rows"].get<int32_t>();
  model.dim = j["dim"].get<int32_t>();
  model.dropout_rate = j["dropout"].get<double>();
  model.embeddings = j["embeddings"].get<std::vector<double>>();
  model.fc_weight = j["fc_weight"].get<std::vector<double>>();
  model.fc_bias = j["fc_bias"].get<std::vector<double>>();
  size_t expect_e = static_cast<size_t>(model.vocab_rows) * model.dim;
  size_t expect_w = static_cast<size_t>(model.dim) * model.dim;
  if (model.embeddings.size() != expect_e || model.fc_weight.size() != expect_w ||
      model.fc_bias.size() != static_cast<size_t>(model.dim)) {
    throw Error("checkpoint tensor shapes are inconsistent");
  }
  const json& opt = j["optimizer"];
  result.optimizer.step = opt["step"].get<int64_t>();
  result.optimizer.m_embeddings = opt["m_embeddings"].get<std::vector<double>>();
  result.optimizer.v_embeddings = opt["v_embeddings"].get<std::vector<double>>();
  result.optimizer.m_weight = opt["m_weight"].get<std::vector<double>>();
  result.optimizer.v_weight = opt["v_weight"].get<std::vector<double>>();
  result.optimizer.m_bias = opt["m_bias"].get<std::vector<double>>();
  result.optimizer.v_bias = opt["v_bias"].get<std::vector<double>>();
  for (const json& entry : j["history"]) {
    result.history.push_back(EpochStats{entry["epoch"].get<int>(),
                                        entry["mean_loss"].get<double>(),
                                        entry["val_map_at_r"].get<double>()});
  }
  result.best_epoch = j["best_epoch"].get<int>();
  result.best_val = j["best_val"].get<double>();
  if (vocab_hash != nullptr) *vocab_hash = j["vocab_hash"].get<uint64_t>();
  return result;
}

}  // namespace cassim::bof
