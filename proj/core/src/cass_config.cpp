#include <array>

#include "cassim/cass.hpp"

namespace cassim::cass {

namespace {

struct Axis {
  const char* name;
  int limit;  // exclusive upper bound
  const char* range;
};

constexpr std::array<Axis, 5> kAxes = {{
    {"node_prefix", 3, "{0,1,2}"},
    {"compound_stmt", 3, "{0,1,2}"},
    {"global_vars", 4, "{0,1,2,3}"},
    {"global_funcs", 3, "{0,1,2}"},
    {"fn_io_cardinality", 2, "{0,1}"},
}};

}  // namespace

CassConfig parse_config_id(std::string_view id) {
  std::array<int, 5> values{};
  size_t pos = 0;
  for (size_t axis = 0; axis < 5; ++axis) {
    if (pos >= id.size() || id[pos] < '0' || id[pos] > '9') {
      throw Error("config id must be five dash-separated digits, got '" + std::string(id) + "'");
    }
    values[axis] = id[pos] - '0';
    ++pos;
    if (axis < 4) {
      if (pos >= id.size() || id[pos] != '-') {
        throw Error("config id must be five dash-separated digits, got '" + std::string(id) + "'");
      }
      ++pos;
    }
  }
  if (pos != id.size()) {
    throw Error("config id must be five dash-separated digits, got '" + std::string(id) + "'");
  }
  for (size_t axis = 0; axis < 5; ++axis) {
    if (values[axis] >= kAxes[axis].limit) {
      throw Error(std::string(kAxes[axis].name) + " out of range " + kAxes[axis].range);
    }
  }
  return CassConfig{values[0], values[1], values[2], values[3], values[4]};
}

std::string config_id(const CassConfig& cfg) {
  std::string out;
  const int values[5] = {cfg.node_prefix, cfg.compound_stmt, cfg.global_vars, cfg.global_funcs,
                         cfg.fn_io_cardinality};
  for (int i = 0; i < 5; ++i) {
    if (i) out.push_back('-');
    out.push_back(static_cast<char>('0' + values[i]));
  }
  return out;
}

std::vector<CassConfig> enumerate_configs() {
  std::vector<CassConfig> configs;
  configs.reserve(216);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 3; ++d)
          for (int e = 0; e < 2; ++e) configs.push_back(CassConfig{a, b, c, d, e});
  return configs;
}

}  // namespace cassim::cass
