#pragma once

#include <fstream>
#include <string>

#include "vfd/channel_model.hpp"
#include "vfd/json_io.hpp"

#ifndef VFD_TEST_DATA_DIR
#define VFD_TEST_DATA_DIR "tests/data"
#endif

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(VFD_TEST_DATA_DIR) + "/" + name; }

inline nlohmann::json load_json(const std::string& name) {
  std::ifstream in(data_path(name));
  if (!in) throw std::runtime_error("cannot open " + data_path(name));
  return nlohmann::json::parse(in);
}

/// Binary network in which every receiver sees its upstream symbol without
/// noise and ignores interference. Auxiliaries are trivial.
inline vfd::DmNetworkSpec noiseless_binary(int K) {
  vfd::DmNetworkSpec s;
  s.num_stages = K;
  s.x_alphabets.assign(static_cast<std::size_t>(K) + 1, {"0", "1"});
  s.u_alphabets.assign(static_cast<std::size_t>(K) + 1, {"c"});
  s.u_alphabets[0].clear();
  s.y_alphabets.assign(static_cast<std::size_t>(K) + 2, {"0", "1"});
  s.y_alphabets[0].clear();
  s.channels.resize(static_cast<std::size_t>(K) + 2);
  for (int k = 1; k <= K; ++k) s.channels[static_cast<std::size_t>(k)] = {4, 2, {1, 0, 1, 0, 0, 1, 0, 1}};
  s.channels[static_cast<std::size_t>(K) + 1] = {2, 2, {1, 0, 0, 1}};
  s.quantizers.resize(static_cast<std::size_t>(K) + 1);
  for (int k = 1; k <= K; ++k) s.quantizers[static_cast<std::size_t>(k)] = vfd::QuantizerFamily::erasure(2);
  s.inputs.resize(2);
  for (auto& nodes : s.inputs) {
    nodes.push_back({{}, {}, {0.5, 0.5}});
    for (int k = 1; k <= K; ++k) nodes.push_back({{1.0}, {1, 2, {0.5, 0.5}}, {}});
  }
  return s;
}

/// Like noiseless_binary but stage `dead_stage`'s receivers always output 0.
inline vfd::DmNetworkSpec constant_output(int K, int dead_stage) {
  auto s = noiseless_binary(K);
  auto& c = s.channels[static_cast<std::size_t>(dead_stage)];
  for (int r = 0; r < c.rows; ++r) {
    for (int col = 0; col < c.cols; ++col) c.table[static_cast<std::size_t>(r * c.cols + col)] = col == 0 ? 1.0 : 0.0;
  }
  return s;
}

/// Noisy two-stage binary network with real superposition and asymmetric paths.
inline vfd::DmNetworkSpec binary_reference() {
  return vfd::dm_spec_from_json(load_json("dm_binary_reference.json"));
}

}  // namespace fixtures
