#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "madrl/agent.hpp"
#include "madrl/checkpoint.hpp"
#include "madrl/env.hpp"
#include "madrl/multicast.hpp"
#include "madrl/traffic.hpp"

namespace madrl {

struct AgentTask {
  int agent_index = 0;
  NodeId src = 0;
  std::vector<NodeId> dsts;  // sorted
};

/// Shuffles the destinations and deals them round-robin. Agents beyond |DST| get
/// empty tasks.
std::vector<AgentTask> partition_destinations(const MulticastRequest& req, int n_agents, Rng& rng);

/// Outcome tally for one episode.
struct EpisodeRecord {
  double reward = 0.0;
  int steps = 0;
  int part = 0;
  int hell = 0;
  int loop = 0;
  bool reached_end = false;
};

/// Initial weights for RNG stream `stream` of the run seeded by hyper.seed.
AgentParams initial_params(const Topology& topo, const Hyperparams& hyper, std::uint64_t stream);

/// Stream used by pretraining; agents use their index.
inline constexpr std::uint64_t kPretrainStream = 0xC0FFEE;

/// Runs one sampled episode, feeding every transition to the agent's buffer.
EpisodeRecord run_episode(A2CAgent& agent, const Topology& topo, const Snapshot& snap, NodeId src,
                          const std::vector<NodeId>& dsts, const RewardWeights& w, int step_cap);

/// Deterministic rollout: the most probable node among the currently valid actions
/// at every step. Returns the final state (terminal when every destination was reached).
EnvState greedy_rollout(const Network& actor, const Topology& topo, const Snapshot& snap, NodeId src,
                        const std::vector<NodeId>& dsts, const RewardWeights& w, int step_cap);

struct PretrainedWeights {
  AgentParams params;
  std::uint64_t topology_hash = 0;
  std::uint64_t traffic_hash = 0;
  int episodes = 0;

  Checkpoint to_checkpoint() const;
  static PretrainedWeights from_checkpoint(const Checkpoint& c);
};

/// Trains one generic agent on unicast episodes over random (src, dst) pairs and snapshots.
PretrainedWeights pretrain_unicast(const Topology& topo, const std::vector<Snapshot>& snapshots,
                                   const Hyperparams& hyper, const RewardWeights& w, int episodes);

struct AgentRun {
  AgentTask task;
  std::vector<EpisodeRecord> episodes;
  AgentParams final_params;
  std::vector<RoutePath> paths;  // greedy paths on the evaluation snapshot
  bool used_fallback = false;
  double seconds = 0.0;
};

struct TrainingRun {
  std::vector<AgentRun> agents;  // agents with empty tasks are omitted
  MulticastTree tree;
  bool any_fallback = false;
  double seconds = 0.0;

  /// Per-episode reward summed over agents.
  std::vector<double> reward_curve() const;
  /// Per-episode flag: every agent reached END.
  std::vector<bool> end_curve() const;
};

struct TrainOptions {
  int n_agents = 3;
  bool parallel = false;
};

TrainingRun train_madrl(const Topology& topo, const std::vector<Snapshot>& snapshots, const MulticastRequest& req,
                        const Hyperparams& hyper, const RewardWeights& w, const TrainOptions& opts,
                        const std::optional<PretrainedWeights>& warm = std::nullopt);

/// Greedy per-agent paths on `snap` merged into one tree. Destinations an agent fails
/// to reach are routed over the minimum-delay path instead; `fallback` reports that.
MulticastTree madrl_tree(const std::vector<AgentTask>& tasks, const std::vector<const Network*>& actors,
                         const Topology& topo, const Snapshot& snap, const RewardWeights& w, int step_cap,
                         std::vector<std::vector<RoutePath>>* paths = nullptr, bool* fallback = nullptr);

MulticastTree merge_agent_trees(const std::vector<std::vector<RoutePath>>& per_agent_paths,
                                const LinkStateMatrices& m);

/// Episodes until the trailing `window`-episode mean first reaches `threshold`;
/// returns curve.size() + 1 when it never does.
int episodes_to_threshold(const std::vector<double>& curve, double threshold, int window = 50);

}  // namespace madrl
