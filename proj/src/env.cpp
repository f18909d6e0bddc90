#include "madrl/env.hpp"

#include <algorithm>
#include <string>

namespace madrl {

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::Part: return "PART";
    case StepKind::Hell: return "HELL";
    case StepKind::Loop: return "LOOP";
    case StepKind::End: return "END";
  }
  return "?";
}

EnvState reset(const Topology& topo, std::shared_ptr<const NormalizedMatrices> link_state, NodeId src,
               std::vector<NodeId> assigned_dsts) {
  const int n = topo.size();
  if (!link_state || link_state->size() != n) throw EnvError("link state does not match topology");
  MulticastRequest{src, assigned_dsts}.validate(n);

  EnvState s;
  s.topo = &topo;
  s.link_state = std::move(link_state);
  s.tree_channel = Eigen::MatrixXd::Zero(n, n);
  s.in_tree.assign(n, 0);
  s.in_tree[src] = 1;
  std::sort(assigned_dsts.begin(), assigned_dsts.end());
  s.assigned = assigned_dsts;
  s.remaining = std::move(assigned_dsts);
  s.src = src;
  return s;
}

std::vector<NodeId> valid_actions(const EnvState& s) {
  if (s.terminal) throw EnvError("valid_actions on terminal state");
  std::vector<NodeId> out;
  for (NodeId v = 0; v < s.size(); ++v) {
    if (s.in_tree[v]) continue;
    for (NodeId nb : s.topo->neighbors(v))
      if (s.in_tree[nb]) {
        out.push_back(v);
        break;
      }
  }
  return out;
}

PathMetrics edge_metrics(const LinkStateMatrices& m, NodeId i, NodeId j) {
  return {m.at(Metric::Bw, i, j),      m.at(Metric::Delay, i, j),  m.at(Metric::Loss, i, j),
          m.at(Metric::UsedBw, i, j),  m.at(Metric::Errors, i, j), m.at(Metric::Drops, i, j),
          m.at(Metric::Distance, i, j)};
}

double reward_part(const PathMetrics& edge, const RewardWeights& w) { return path_objective(edge, w); }

double reward_end(const TreeMetrics& tree, const RewardWeights& w) { return path_objective(tree, w); }

MulticastTree agent_tree(const EnvState& s) {
  MulticastTree t;
  t.src = s.src;
  t.dsts = s.assigned;
  t.edges = prune_leaves(s.edges, s.src, s.assigned);
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

StepOutcome step(const EnvState& s, NodeId action, const RewardWeights& w) {
  if (s.terminal) throw EnvError("step on terminal state");
  const int n = s.size();
  if (action < 0 || action >= n) throw EnvError("action " + std::to_string(action) + " out of range");

  // Members of the head set count as adjacent to it.
  if (s.in_tree[action]) return {StepKind::Loop, w.r_loop, s};

  // Best attachment point: highest single-link reward, lowest id on ties.
  NodeId anchor = -1;
  double anchor_reward = 0.0;
  for (NodeId nb : s.topo->neighbors(action)) {
    if (!s.in_tree[nb]) continue;
    const double r = reward_part(edge_metrics(*s.link_state, action, nb), w);
    if (anchor < 0 || r > anchor_reward) {
      anchor = nb;
      anchor_reward = r;
    }
  }
  if (anchor < 0) return {StepKind::Hell, w.r_hell, s};

  StepOutcome out{StepKind::Part, anchor_reward, s};
  EnvState& next = out.next_state;
  next.tree_channel(action, anchor) = next.tree_channel(anchor, action) = 1.0;
  next.in_tree[action] = 1;
  next.edges.push_back(make_edge(anchor, action));
  auto it = std::lower_bound(next.remaining.begin(), next.remaining.end(), action);
  if (it != next.remaining.end() && *it == action) next.remaining.erase(it);
  if (next.remaining.empty()) {
    next.terminal = true;
    out.kind = StepKind::End;
    out.reward = reward_end(tree_metrics(agent_tree(next), *next.link_state), w);
  }
  return out;
}

void write_observation(const EnvState& s, Eigen::Ref<Eigen::VectorXd> out) {
  const Eigen::Index block = static_cast<Eigen::Index>(s.size()) * s.size();
  for (int c = 0; c < kMetricCount; ++c)
    out.segment(c * block, block) = Eigen::Map<const Eigen::VectorXd>(s.link_state->channels[c].data(), block);
  out.segment(kMetricCount * block, block) = kTreeInputScale * Eigen::Map<const Eigen::VectorXd>(s.tree_channel.data(), block);
}

Eigen::VectorXd observation(const EnvState& s) {
  Eigen::VectorXd v(s.observation_size());
  write_observation(s, v);
  return v;
}

}  // namespace madrl
