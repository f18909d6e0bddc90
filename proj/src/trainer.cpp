#include "madrl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <numeric>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

namespace madrl {

namespace {

constexpr std::uint64_t kInitSalt = 0x5DEECE66DULL;
constexpr std::uint64_t kPartitionSalt = 0xA5A5A5A5ULL;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + salt * 0x9E3779B97F4A7C15ULL + stream;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int step_cap_for(const Topology& topo, const Hyperparams& hyper) {
  return hyper.step_cap_multiplier * topo.size();
}

}  // namespace

std::vector<AgentTask> partition_destinations(const MulticastRequest& req, int n_agents, Rng& rng) {
  if (n_agents < 1) throw std::invalid_argument("need at least one agent");
  if (req.dsts.empty()) throw std::invalid_argument("empty destination set");
  std::vector<NodeId> dsts = req.dsts;
  std::shuffle(dsts.begin(), dsts.end(), rng);
  std::vector<AgentTask> tasks(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    tasks[i].agent_index = i;
    tasks[i].src = req.src;
  }
  for (std::size_t k = 0; k < dsts.size(); ++k) tasks[k % n_agents].dsts.push_back(dsts[k]);
  for (auto& t : tasks) std::sort(t.dsts.begin(), t.dsts.end());
  if (n_agents > static_cast<int>(dsts.size()))
    spdlog::warn("{} agents for {} destinations; {} agents stay idle", n_agents, dsts.size(),
                 n_agents - static_cast<int>(dsts.size()));
  return tasks;
}

AgentParams initial_params(const Topology& topo, const Hyperparams& hyper, std::uint64_t stream) {
  Rng rng(mix_seed(hyper.seed, stream, kInitSalt));
  const int n = topo.size();
  return init_params(kStateChannels * n * n, n, hyper.hidden, rng);
}

EpisodeRecord run_episode(A2CAgent& agent, const Topology& topo, const Snapshot& snap, NodeId src,
                          const std::vector<NodeId>& dsts, const RewardWeights& w, int step_cap) {
  EpisodeRecord rec;
  EnvState s = reset(topo, snap.normalized, src, dsts);
  Eigen::VectorXd obs = observation(s);
  while (rec.steps < step_cap) {
    const int action = agent.act(obs);
    StepOutcome out = step(s, action, w);
    ++rec.steps;
    rec.reward += out.reward;
    const bool moved = out.kind == StepKind::Part || out.kind == StepKind::End;
    Eigen::VectorXd next_obs = moved ? observation(out.next_state) : obs;
    switch (out.kind) {
      case StepKind::Part: ++rec.part; break;
      case StepKind::Hell: ++rec.hell; break;
      case StepKind::Loop: ++rec.loop; break;
      case StepKind::End: rec.reached_end = true; break;
    }
    agent.observe({obs, action, out.reward, next_obs, out.kind == StepKind::End});
    if (rec.reached_end) break;
    if (moved) {
      s = std::move(out.next_state);
      obs = std::move(next_obs);
    }
  }
  return rec;
}

EnvState greedy_rollout(const Network& actor, const Topology& topo, const Snapshot& snap, NodeId src,
                        const std::vector<NodeId>& dsts, const RewardWeights& w, int step_cap) {
  EnvState s = reset(topo, snap.normalized, src, dsts);
  for (int t = 0; t < step_cap && !s.terminal; ++t) {
    const auto valid = valid_actions(s);
    if (valid.empty()) break;
    const Eigen::VectorXd probs = policy_forward(actor, observation(s));
    NodeId best = valid.front();
    for (NodeId v : valid)
      if (probs[v] > probs[best]) best = v;
    s = step(s, best, w).next_state;
  }
  return s;
}

Checkpoint PretrainedWeights::to_checkpoint() const {
  Checkpoint c;
  c.params = params;
  c.provenance["kind"] = "pretrained-unicast";
  c.provenance["topology_hash"] = std::to_string(topology_hash);
  c.provenance["traffic_hash"] = std::to_string(traffic_hash);
  c.provenance["episodes"] = std::to_string(episodes);
  return c;
}

PretrainedWeights PretrainedWeights::from_checkpoint(const Checkpoint& c) {
  PretrainedWeights p;
  p.params = c.params;
  auto get = [&](const char* key) -> std::string {
    auto it = c.provenance.find(key);
    return it == c.provenance.end() ? "0" : it->second;
  };
  p.topology_hash = std::stoull(get("topology_hash"));
  p.traffic_hash = std::stoull(get("traffic_hash"));
  p.episodes = std::stoi(get("episodes"));
  return p;
}

PretrainedWeights pretrain_unicast(const Topology& topo, const std::vector<Snapshot>& snapshots,
                                   const Hyperparams& hyper, const RewardWeights& w, int episodes) {
  if (snapshots.empty()) throw std::invalid_argument("pretraining needs at least one snapshot");
  const int n = topo.size();
  A2CAgent agent(initial_params(topo, hyper, kPretrainStream), hyper, mix_seed(hyper.seed, kPretrainStream, 0));
  std::uniform_int_distribution<int> node(0, n - 1);
  std::uniform_int_distribution<std::size_t> pick(0, snapshots.size() - 1);
  const int cap = step_cap_for(topo, hyper);
  for (int ep = 0; ep < episodes; ++ep) {
    const NodeId src = node(agent.rng());
    NodeId dst = node(agent.rng());
    while (dst == src) dst = node(agent.rng());
    const Snapshot& snap = snapshots[pick(agent.rng())];
    try {
      run_episode(agent, topo, snap, src, {dst}, w, cap);
    } catch (const TrainingError& e) {
      throw TrainingError("pretraining diverged at episode " + std::to_string(ep) + ": " + e.what());
    }
  }
  PretrainedWeights out;
  out.params = agent.params();
  out.topology_hash = topo.fingerprint();
  out.traffic_hash = snapshots_fingerprint(snapshots);
  out.episodes = episodes;
  return out;
}

std::vector<double> TrainingRun::reward_curve() const {
  std::size_t len = 0;
  for (const auto& a : agents) len = std::max(len, a.episodes.size());
  std::vector<double> curve(len, 0.0);
  for (const auto& a : agents)
    for (std::size_t e = 0; e < a.episodes.size(); ++e) curve[e] += a.episodes[e].reward;
  return curve;
}

std::vector<bool> TrainingRun::end_curve() const {
  std::size_t len = 0;
  for (const auto& a : agents) len = std::max(len, a.episodes.size());
  std::vector<bool> curve(len, true);
  for (const auto& a : agents)
    for (std::size_t e = 0; e < len; ++e) curve[e] = curve[e] && e < a.episodes.size() && a.episodes[e].reached_end;
  return curve;
}

MulticastTree merge_agent_trees(const std::vector<std::vector<RoutePath>>& per_agent_paths,
                                const LinkStateMatrices& m) {
  std::vector<RoutePath> all;
  for (const auto& ps : per_agent_paths) all.insert(all.end(), ps.begin(), ps.end());
  return merge_paths(all, [&m](NodeId i, NodeId j) { return m.at(Metric::Delay, i, j); });
}

MulticastTree madrl_tree(const std::vector<AgentTask>& tasks, const std::vector<const Network*>& actors,
                         const Topology& topo, const Snapshot& snap, const RewardWeights& w, int step_cap,
                         std::vector<std::vector<RoutePath>>* paths_out, bool* fallback) {
  if (tasks.size() != actors.size()) throw std::invalid_argument("one actor per task required");
  std::vector<std::vector<RoutePath>> per_agent;
  bool fell_back = false;
  const WeightFn delay = kmb_weight(snap.metrics, KmbMetric::Delay);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const AgentTask& task = tasks[i];
    std::vector<RoutePath> paths;
    const EnvState final_state = greedy_rollout(*actors[i], topo, snap, task.src, task.dsts, w, step_cap);
    const std::set<NodeId> missing(final_state.remaining.begin(), final_state.remaining.end());
    MulticastTree grown;
    grown.src = task.src;
    for (NodeId d : task.dsts)
      if (!missing.count(d)) grown.dsts.push_back(d);
    grown.edges = prune_leaves(final_state.edges, grown.src, grown.dsts);
    for (NodeId d : task.dsts) {
      if (missing.count(d)) {
        paths.push_back(shortest_path(topo, delay, task.src, d));
        fell_back = true;
      } else {
        paths.push_back(grown.path_to(d));
      }
    }
    per_agent.push_back(std::move(paths));
  }
  if (fallback) *fallback = fell_back;
  MulticastTree tree = merge_agent_trees(per_agent, snap.metrics);
  if (paths_out) *paths_out = std::move(per_agent);
  return tree;
}

TrainingRun train_madrl(const Topology& topo, const std::vector<Snapshot>& snapshots, const MulticastRequest& req,
                        const Hyperparams& hyper, const RewardWeights& w, const TrainOptions& opts,
                        const std::optional<PretrainedWeights>& warm) {
  if (snapshots.empty()) throw std::invalid_argument("training needs at least one snapshot");
  req.validate(topo.size());
  const auto t0 = std::chrono::steady_clock::now();

  Rng partition_rng(mix_seed(hyper.seed, 0, kPartitionSalt));
  std::vector<AgentTask> tasks = partition_destinations(req, opts.n_agents, partition_rng);
  std::erase_if(tasks, [](const AgentTask& t) { return t.dsts.empty(); });

  if (warm) {
    const int obs = kStateChannels * topo.size() * topo.size();
    if (warm->params.actor.input_size() != obs || warm->params.actor.output_size() != topo.size() ||
        warm->params.critic.input_size() != obs || warm->params.critic.output_size() != 1)
      throw std::invalid_argument("pretrained weights do not fit this topology");
  }

  const int cap = step_cap_for(topo, hyper);
  TrainingRun run;
  run.agents.resize(tasks.size());

  auto train_one = [&](std::size_t i) {
    const auto ta = std::chrono::steady_clock::now();
    AgentRun& ar = run.agents[i];
    ar.task = tasks[i];
    const auto stream = static_cast<std::uint64_t>(tasks[i].agent_index);
    A2CAgent agent(warm ? warm->params : initial_params(topo, hyper, stream), hyper, hyper.seed + stream);
    ar.episodes.reserve(static_cast<std::size_t>(hyper.episodes));
    for (int ep = 0; ep < hyper.episodes; ++ep) {
      const Snapshot& snap = snapshots[static_cast<std::size_t>(ep) % snapshots.size()];
      ar.episodes.push_back(run_episode(agent, topo, snap, ar.task.src, ar.task.dsts, w, cap));
    }
    ar.final_params = agent.params();
    ar.seconds = seconds_since(ta);
  };

  if (opts.parallel && tasks.size() > 1) {
    std::vector<std::exception_ptr> errors(tasks.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < tasks.size(); ++i)
      workers.emplace_back([&, i] {
        try {
          train_one(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    for (auto& t : workers) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (std::size_t i = 0; i < tasks.size(); ++i) train_one(i);
  }

  std::vector<const Network*> actors;
  for (const auto& a : run.agents) actors.push_back(&a.final_params.actor);
  std::vector<std::vector<RoutePath>> paths;
  run.tree = madrl_tree(tasks, actors, topo, snapshots.back(), w, cap, &paths, &run.any_fallback);
  for (std::size_t i = 0; i < run.agents.size(); ++i) run.agents[i].paths = paths[i];
  run.agents.shrink_to_fit();
  if (run.any_fallback) spdlog::warn("greedy rollout incomplete; unreached destinations use min-delay paths");
  run.seconds = seconds_since(t0);
  return run;
}

int episodes_to_threshold(const std::vector<double>& curve, double threshold, int window) {
  if (window < 1) window = 1;
  // Summed afresh per window: a running sum drifts, and a curve must reach its own tail mean.
  for (std::size_t end = window; end <= curve.size(); ++end) {
    const double sum = std::accumulate(curve.begin() + (end - window), curve.begin() + end, 0.0);
    if (sum / window >= threshold) return static_cast<int>(end);
  }
  return static_cast<int>(curve.size()) + 1;
}

}  // namespace madrl
