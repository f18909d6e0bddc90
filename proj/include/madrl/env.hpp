#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "madrl/multicast.hpp"
#include "madrl/topology.hpp"

namespace madrl {

/// Number of state channels: seven link metrics plus the tree-progress matrix.
inline constexpr int kStateChannels = kMetricCount + 1;

/// One agent's view of the tree-construction MDP.
///
/// The tree channel marks attached links symmetrically and starts all-zero.
struct EnvState {
  const Topology* topo = nullptr;
  std::shared_ptr<const NormalizedMatrices> link_state;
  Eigen::MatrixXd tree_channel;
  std::vector<char> in_tree;       // head set, indexed by node
  std::vector<NodeId> remaining;   // sorted
  std::vector<NodeId> assigned;    // sorted
  std::vector<Edge> edges;         // attachment order
  NodeId src = 0;
  bool terminal = false;

  int size() const { return topo ? topo->size() : 0; }
  int observation_size() const { return kStateChannels * size() * size(); }

  friend bool operator==(const EnvState& a, const EnvState& b) {
    return a.topo == b.topo && a.link_state == b.link_state && a.tree_channel == b.tree_channel &&
           a.in_tree == b.in_tree && a.remaining == b.remaining && a.assigned == b.assigned &&
           a.edges == b.edges && a.src == b.src && a.terminal == b.terminal;
  }
};

enum class StepKind { Part, Hell, Loop, End };

const char* to_string(StepKind k);

struct StepOutcome {
  StepKind kind = StepKind::Hell;
  double reward = 0.0;
  EnvState next_state;
};

class EnvError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

EnvState reset(const Topology& topo, std::shared_ptr<const NormalizedMatrices> link_state, NodeId src,
               std::vector<NodeId> assigned_dsts);

/// Nodes adjacent to the partial tree but not yet in it, ascending.
std::vector<NodeId> valid_actions(const EnvState& s);

StepOutcome step(const EnvState& s, NodeId action, const RewardWeights& w);

/// Per-link reward for attaching (i, j).
double reward_part(const PathMetrics& edge, const RewardWeights& w);
/// Completion reward over the agent's finished tree.
double reward_end(const TreeMetrics& tree, const RewardWeights& w);

/// Normalized metrics of the single link (i, j).
PathMetrics edge_metrics(const LinkStateMatrices& m, NodeId i, NodeId j);

/// The grown tree with dead-end branches removed.
MulticastTree agent_tree(const EnvState& s);

// The tree channel is small next to the seven metric channels, so the network sees
// it amplified; without this the policy barely conditions on its own progress.
inline constexpr double kTreeInputScale = 10.0;

/// Flattened channels, channel-major, each n×n block column-major.
Eigen::VectorXd observation(const EnvState& s);
void write_observation(const EnvState& s, Eigen::Ref<Eigen::VectorXd> out);

}  // namespace madrl
