#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "madrl/agent.hpp"
#include "madrl/multicast.hpp"
#include "madrl/traffic.hpp"

namespace madrl {

/// Experiment settings. Every section is optional in the file; missing keys keep
/// the defaults below.
struct ExperimentConfig {
  struct TopologySection {
    int nodes = 14;
  } topology;

  struct TrafficSection {
    TrafficProfile profile = TrafficProfile::diurnal();
    int snapshots = 48;
    int per_window = 6;
  } traffic;

  RewardWeights reward;
  Hyperparams hyper;
  int n_agents = 3;
  int pretrain_episodes = 3000;
  bool parallel = false;
  MulticastRequest request{3, {6, 7, 8, 9, 11, 13}};
  std::uint64_t seed = 7;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

}  // namespace madrl
