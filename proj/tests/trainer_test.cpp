#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "madrl/trainer.hpp"

using namespace madrl;

namespace {

Hyperparams small_hyper(int episodes) {
  Hyperparams h;
  h.episodes = episodes;
  h.hidden = {16, 8};
  h.seed = 21;
  return h;
}

}  // namespace

TEST(Partition, RoundRobinSizes) {
  Rng rng(1);
  const MulticastRequest req{3, {6, 7, 8, 9, 11, 13}};
  const auto tasks = partition_destinations(req, 3, rng);
  ASSERT_EQ(tasks.size(), 3u);
  std::multiset<NodeId> seen;
  for (const auto& t : tasks) {
    EXPECT_EQ(t.dsts.size(), 2u);
    EXPECT_EQ(t.src, 3);
    EXPECT_TRUE(std::is_sorted(t.dsts.begin(), t.dsts.end()));
    seen.insert(t.dsts.begin(), t.dsts.end());
  }
  EXPECT_EQ(seen, (std::multiset<NodeId>{6, 7, 8, 9, 11, 13}));

  std::vector<std::size_t> sizes;
  for (const auto& t : partition_destinations({0, {1, 2, 3, 4, 5}}, 3, rng)) sizes.push_back(t.dsts.size());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 2, 2}));

  const auto solo = partition_destinations({0, {4}}, 1, rng);
  EXPECT_EQ(solo[0].dsts, (std::vector<NodeId>{4}));

  const auto idle = partition_destinations({0, {4}}, 2, rng);
  ASSERT_EQ(idle.size(), 2u);
  EXPECT_TRUE(idle[1].dsts.empty());
}

TEST(Pretrain, ZeroEpisodesKeepsInitializer) {
  const Topology topo = gen_topology(5, 2);
  const auto snaps = gen_snapshots(topo, TrafficProfile::diurnal(), 2, 2);
  const Hyperparams h = small_hyper(0);
  const PretrainedWeights w = pretrain_unicast(topo, snaps, h, {}, 0);
  EXPECT_EQ(w.params, initial_params(topo, h, kPretrainStream));
  EXPECT_EQ(w.topology_hash, topo.fingerprint());
  const PretrainedWeights back = PretrainedWeights::from_checkpoint(w.to_checkpoint());
  EXPECT_EQ(back.params, w.params);
  EXPECT_EQ(back.traffic_hash, w.traffic_hash);

  const PretrainedWeights a = pretrain_unicast(topo, snaps, h, {}, 20);
  const PretrainedWeights b = pretrain_unicast(topo, snaps, h, {}, 20);
  EXPECT_EQ(a.params, b.params);
  EXPECT_FALSE(a.params == w.params);
}

TEST(Train, TwoNodeTopology) {
  const Topology topo({{0, 0, 0}, {1, 50, 0}}, {{0, 1, 20, 2}});
  const auto snaps = gen_snapshots(topo, TrafficProfile::diurnal(), 1, 4);
  const TrainingRun run = train_madrl(topo, snaps, {0, {1}}, small_hyper(1), {}, {1, false});
  EXPECT_EQ(run.tree.edges, (std::vector<Edge>{{0, 1}}));
  EXPECT_FALSE(run.any_fallback);
  ASSERT_EQ(run.agents.size(), 1u);
  EXPECT_TRUE(run.agents[0].episodes[0].reached_end);
}

TEST(Train, DeterministicAndParallelInvariant) {
  const Topology topo = gen_topology(8, 5);
  const auto snaps = gen_snapshots(topo, TrafficProfile::diurnal(), 3, 5);
  const MulticastRequest req{0, {3, 5, 7}};
  const Hyperparams h = small_hyper(15);
  const TrainingRun a = train_madrl(topo, snaps, req, h, {}, {3, false});
  const TrainingRun b = train_madrl(topo, snaps, req, h, {}, {3, false});
  const TrainingRun c = train_madrl(topo, snaps, req, h, {}, {3, true});
  EXPECT_EQ(a.reward_curve(), b.reward_curve());
  EXPECT_EQ(a.tree, b.tree);
  EXPECT_EQ(a.reward_curve(), c.reward_curve());
  EXPECT_EQ(a.tree, c.tree);
  EXPECT_TRUE(a.tree.valid());
  EXPECT_EQ(a.tree.dsts, req.dsts);
  EXPECT_EQ(a.reward_curve().size(), 15u);
}

TEST(Train, AgentsAreIndependent) {
  // Interleaving another agent's episodes does not change this agent's trajectory.
  const Topology topo = gen_topology(8, 6);
  const auto snaps = gen_snapshots(topo, TrafficProfile::diurnal(), 2, 6);
  Hyperparams h = small_hyper(0);
  h.batch_size = 8;
  const int cap = 4 * topo.size();
  A2CAgent solo(initial_params(topo, h, 0), h, 100);
  A2CAgent mine(initial_params(topo, h, 0), h, 100);
  A2CAgent other(initial_params(topo, h, 1), h, 101);
  for (int ep = 0; ep < 6; ++ep) {
    const Snapshot& snap = snaps[ep % snaps.size()];
    const EpisodeRecord a = run_episode(solo, topo, snap, 0, {3, 5}, {}, cap);
    run_episode(other, topo, snap, 0, {7}, {}, cap);
    const EpisodeRecord b = run_episode(mine, topo, snap, 0, {3, 5}, {}, cap);
    EXPECT_EQ(a.reward, b.reward);
    EXPECT_EQ(a.steps, b.steps);
  }
  EXPECT_EQ(solo.params(), mine.params());
}

TEST(Merge, AgentPaths) {
  auto m = LinkStateMatrices::absent(6);
  for (auto [u, v] : std::vector<Edge>{{0, 1}, {1, 2}, {0, 3}, {3, 4}, {2, 4}, {1, 5}})
    for (int c = 0; c < kMetricCount; ++c) m.set(static_cast<Metric>(c), u, v, 1.0);
  const MulticastTree own = merge_agent_trees({{{0, 1, 2}, {0, 1, 5}}}, m);
  EXPECT_EQ(own, merge_paths({{0, 1, 2}, {0, 1, 5}}));
  EXPECT_EQ(merge_agent_trees({{{0, 1, 2}}, {{0, 3, 4}}}, m).edges.size(), 4u);
  const MulticastTree overlap = merge_agent_trees({{{0, 1, 2}}, {{0, 3, 4}}, {{0, 3, 4, 2, 1, 5}}}, m);
  EXPECT_TRUE(overlap.valid());
  EXPECT_EQ(overlap.edges.size(), 4u);  // cycle broken, then the dangling 3 pruned
}

TEST(Threshold, TrailingWindow) {
  const std::vector<double> curve{0, 0, 1, 1, 1, 3};
  EXPECT_EQ(episodes_to_threshold(curve, 1.0, 2), 4);
  EXPECT_EQ(episodes_to_threshold(curve, 2.0, 2), 6);
  EXPECT_EQ(episodes_to_threshold(curve, 5.0, 2), 7);

  // a curve always reaches its own tail mean
  std::vector<double> noisy;
  for (int i = 0; i < 300; ++i) noisy.push_back(0.1 * (i % 7) + 1e-3 * i);
  double tail = 0.0;
  for (std::size_t i = noisy.size() - 50; i < noisy.size(); ++i) tail += noisy[i];
  EXPECT_LE(episodes_to_threshold(noisy, tail / 50), 300);
}
