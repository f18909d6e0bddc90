// Acceptance suite: one PASS/FAIL line per criterion.
//
//   madrl_acceptance            run everything
//   madrl_acceptance 1 3 8      run a subset
//
// Writes the baseline comparison CSVs under ./acceptance_out.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "madrl/agent.hpp"
#include "madrl/env.hpp"
#include "madrl/evaluation.hpp"
#include "madrl/multicast.hpp"
#include "madrl/topology.hpp"
#include "madrl/traffic.hpp"
#include "madrl/trainer.hpp"

using namespace madrl;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// The fixed desk-scale scenario.
constexpr std::uint64_t kScenarioSeed = 7;
constexpr int kNodes = 14;
const MulticastRequest kRequest{3, {6, 7, 8, 9, 11, 13}};
constexpr int kAgents = 3;
constexpr int kConvergenceEpisodes = 1000;
constexpr int kAblationEpisodes = 300;
constexpr int kBaselineEpisodes = 300;
constexpr int kPretrainEpisodes = 3000;

Hyperparams scenario_hyper(std::uint64_t seed, int episodes) {
  Hyperparams h;
  h.seed = seed;
  h.episodes = episodes;
  return h;
}

// ---------------------------------------------------------------- 1

Verdict derivation_oracle() {
  const auto t0 = Clock::now();
  const Topology topo = gen_topology(10, 101);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bytes(0, 2'000'000), pkts(1, 1'000'000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool endpoints = true;
  for (int set = 0; set < 100; ++set) {
    RawLinkCounters raw;
    for (std::size_t k = 0; k < topo.links().size(); ++k) {
      LinkCounters c;
      c.a.tx_bytes = bytes(rng), c.a.rx_bytes = bytes(rng);
      c.b.tx_bytes = bytes(rng), c.b.rx_bytes = bytes(rng);
      c.a.tx_packets = pkts(rng);
      c.b.rx_packets = static_cast<std::uint64_t>(static_cast<double>(c.a.tx_packets) * u(rng));
      auto part = [&](std::uint64_t total, double frac) {
        return static_cast<std::uint64_t>(static_cast<double>(total) * frac * u(rng));
      };
      c.a.tx_dropped = part(c.a.tx_packets, 0.02);
      c.b.rx_dropped = part(c.b.rx_packets, 0.02);
      c.a.tx_errors = part(c.a.tx_packets, 0.01);
      c.b.rx_errors = part(c.b.rx_packets, 0.01);
      c.a.duration = 1000.0 * u(rng);
      c.b.duration = c.a.duration + 1.0 + 60.0 * u(rng);
      c.rtt_to_a = 0.005 * u(rng);
      c.rtt_to_b = 0.005 * u(rng);
      c.t_forward = c.rtt_to_a + 0.03 * u(rng);
      c.t_reply = c.rtt_to_b + 0.03 * u(rng);
      raw.push_back(c);
    }
    const LinkStateMatrices m = derive_link_state(raw, topo);
    for (std::size_t k = 0; k < raw.size(); ++k) {
      const LinkCounters& c = raw[k];
      const Link& l = topo.links()[k];
      // written out longhand
      const double seconds = c.b.duration - c.a.duration;
      const double used = std::fabs(double(c.b.tx_bytes + c.b.rx_bytes) - double(c.a.tx_bytes + c.a.rx_bytes)) *
                          8.0 / 1e6 / seconds;
      const double packets = double(c.a.tx_packets) + double(c.b.rx_packets);
      const double expect[kMetricCount] = {
          l.bw_max - used,
          (c.t_forward + c.t_reply - c.rtt_to_a - c.rtt_to_b) * 1000.0 / 2.0,
          (double(c.a.tx_packets) - double(c.b.rx_packets)) / double(c.a.tx_packets),
          used,
          double(c.a.tx_errors + c.b.rx_errors) / packets,
          double(c.a.tx_dropped + c.b.rx_dropped) / packets,
          std::hypot(topo.nodes()[l.u].x - topo.nodes()[l.v].x, topo.nodes()[l.u].y - topo.nodes()[l.v].y)};
      for (int ch = 0; ch < kMetricCount; ++ch) {
        const double got = m.at(static_cast<Metric>(ch), l.u, l.v);
        worst = std::max(worst, std::fabs(got - expect[ch]) / std::max(1.0, std::fabs(expect[ch])));
        worst = std::max(worst, std::fabs(got - m.at(static_cast<Metric>(ch), l.v, l.u)));
      }
    }
    // max–min endpoints on every non-constant channel
    const NormalizedMatrices n = normalize(m);
    for (int ch = 0; ch < kMetricCount; ++ch) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& l : topo.links()) {
        lo = std::min(lo, m.at(static_cast<Metric>(ch), l.u, l.v));
        hi = std::max(hi, m.at(static_cast<Metric>(ch), l.u, l.v));
      }
      if (hi == lo) continue;
      for (const auto& l : topo.links()) {
        const double raw_v = m.at(static_cast<Metric>(ch), l.u, l.v);
        if (raw_v == lo && n.at(static_cast<Metric>(ch), l.u, l.v) != 0.0) endpoints = false;
        if (raw_v == hi && n.at(static_cast<Metric>(ch), l.u, l.v) != 1.0) endpoints = false;
      }
    }
  }
  const double secs = since(t0);
  return {worst <= 1e-9 && endpoints && secs < 5.0,
          fmt("max deviation %.3g, endpoints %s, %.2f s", worst, endpoints ? "ok" : "wrong", secs)};
}

// ---------------------------------------------------------------- 2

Verdict steiner_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  int instances = 0, above_bound = 0, closure_optimal = 0, missed_optimum = 0;
  for (int g = 0; g < 200; ++g) {
    const int n = std::uniform_int_distribution<int>(3, 7)(rng);
    const Topology topo = gen_topology(n, 1000 + g);
    const auto snaps = gen_snapshots(topo, TrafficProfile::diurnal(), 1, 2000 + g);
    std::vector<NodeId> nodes(n);
    std::iota(nodes.begin(), nodes.end(), 0);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    const int terminals = std::uniform_int_distribution<int>(2, 3)(rng);
    MulticastRequest req{nodes[0], std::vector<NodeId>(nodes.begin() + 1, nodes.begin() + terminals)};
    for (KmbMetric metric : {KmbMetric::Bw, KmbMetric::Delay, KmbMetric::Loss}) {
      ++instances;
      const WeightFn w = kmb_weight(snaps[0].metrics, metric);
      const double opt = tree_weight(exhaustive_steiner_oracle(topo, w, req), w);
      const MulticastTree tree = kmb(topo, snaps[0].metrics, metric, req);
      const double got = tree_weight(tree, w);
      const double tol = 1e-9 * std::max(1.0, opt);
      if (!tree.valid() || got > 2.0 * opt + tol) ++above_bound;
      if (std::fabs(metric_closure_mst_weight(topo, w, req) - opt) <= tol) {
        ++closure_optimal;
        if (std::fabs(got - opt) > tol) ++missed_optimum;
      }
    }
  }
  const double secs = since(t0);
  return {above_bound == 0 && missed_optimum == 0 && secs < 120.0,
          fmt("%d instances, %d above 2*OPT, %d/%d closure-optimal instances missed, %.1f s", instances, above_bound,
              missed_optimum, closure_optimal, secs)};
}

// ---------------------------------------------------------------- 3

// Independent re-statement of the reward rules.
double weighted(const double v[kMetricCount], const RewardWeights& w) {
  double r = w.beta[0] * v[0];
  for (int c = 1; c < kMetricCount; ++c) r += w.beta[c] * (1.0 - v[c]);
  return r;
}

double hand_part(const NormalizedMatrices& m, NodeId a, NodeId b, const RewardWeights& w) {
  double v[kMetricCount];
  for (int c = 0; c < kMetricCount; ++c) v[c] = m.channels[c](a, b);
  return weighted(v, w);
}

double hand_end(const NormalizedMatrices& m, std::vector<Edge> edges, NodeId src, const std::set<NodeId>& dsts,
                const RewardWeights& w) {
  // strip non-terminal leaves
  for (bool again = true; again;) {
    again = false;
    std::map<NodeId, int> deg;
    for (auto [a, b] : edges) ++deg[a], ++deg[b];
    for (auto it = edges.begin(); it != edges.end(); ++it) {
      for (NodeId x : {it->first, it->second})
        if (deg[x] == 1 && x != src && !dsts.count(x)) {
          edges.erase(it);
          again = true;
          break;
        }
      if (again) break;
    }
  }
  std::map<NodeId, std::vector<NodeId>> adj;
  for (auto [a, b] : edges) adj[a].push_back(b), adj[b].push_back(a);
  std::map<NodeId, NodeId> parent{{src, src}};
  std::vector<NodeId> stack{src};
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    for (NodeId y : adj[x])
      if (!parent.count(y)) parent[y] = x, stack.push_back(y);
  }
  double v[kMetricCount] = {INFINITY, 0, 0, 0, 0, 0, 0};
  double dist = 0.0;
  for (auto [a, b] : edges) {
    v[0] = std::min(v[0], m.channels[0](a, b));
    v[3] = std::max(v[3], m.channels[3](a, b));
    dist += m.channels[6](a, b);
  }
  v[6] = dist / static_cast<double>(edges.size());
  for (NodeId d : dsts) {
    double delay = 0, keep_loss = 1, keep_err = 1, keep_drop = 1;
    for (NodeId x = d; x != src; x = parent.at(x)) {
      const NodeId p = parent.at(x);
      delay += m.channels[1](x, p);
      keep_loss *= 1 - m.channels[2](x, p);
      keep_err *= 1 - m.channels[4](x, p);
      keep_drop *= 1 - m.channels[5](x, p);
    }
    v[1] = std::max(v[1], delay);
    v[2] = std::max(v[2], 1 - keep_loss);
    v[4] = std::max(v[4], 1 - keep_err);
    v[5] = std::max(v[5], 1 - keep_drop);
  }
  return weighted(v, w);
}

Verdict environment_totality() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(3);
  const RewardWeights w;
  long pairs = 0, violations = 0;
  double worst_reward = 0.0;
  std::string first_violation;
  auto flag = [&](const std::string& what) {
    if (violations++ == 0) first_violation = what;
  };
  int episode = 0;
  while (pairs < 100'000) {
    const int n = std::uniform_int_distribution<int>(3, 14)(rng);
    const Topology topo = gen_topology(n, 5000 + episode);
    const auto snaps = gen_snapshots(topo, TrafficProfile::diurnal(), 1, 6000 + episode);
    ++episode;
    std::vector<NodeId> nodes(n);
    std::iota(nodes.begin(), nodes.end(), 0);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    const int k = std::uniform_int_distribution<int>(1, std::min(4, n - 1))(rng);
    const NodeId src = nodes[0];
    const std::vector<NodeId> dsts(nodes.begin() + 1, nodes.begin() + 1 + k);
    const NormalizedMatrices& m = *snaps[0].normalized;

    EnvState s = reset(topo, snaps[0].normalized, src, dsts);
    std::set<NodeId> head{src}, remaining(dsts.begin(), dsts.end());
    std::vector<Edge> edges;
    std::uniform_int_distribution<int> any(0, n - 1);
    for (int t = 0; t < 4 * n && pairs < 100'000; ++t, ++pairs) {
      const NodeId a = any(rng);
      const EnvState before = s;
      const StepOutcome out = step(s, a, w);
      if (!(s == before)) flag("input state mutated");

      // expected classification
      bool adjacent = false;
      NodeId anchor = -1;
      double best = -INFINITY;
      for (NodeId h : head)
        if (topo.has_edge(a, h)) {
          adjacent = true;
          const double r = hand_part(m, a, h, w);
          if (r > best || (r == best && h < anchor)) best = r, anchor = h;
        }
      const bool member = head.count(a) > 0;
      StepKind expect = !member && !adjacent ? StepKind::Hell : member ? StepKind::Loop : StepKind::Part;
      if (expect == StepKind::Part && remaining.size() == 1 && remaining.count(a)) expect = StepKind::End;
      if (out.kind != expect) {
        flag(fmt("step %d on node %d: got %s, expected %s", t, a, to_string(out.kind), to_string(expect)));
        break;
      }

      double expected_reward = 0.0;
      switch (expect) {
        case StepKind::Hell:
        case StepKind::Loop:
          expected_reward = expect == StepKind::Hell ? -0.7 : -0.5;
          if (out.reward != expected_reward) flag("penalty is not exact");
          if (!(out.next_state == s)) flag("penalty step changed the state");
          break;
        case StepKind::Part:
        case StepKind::End:
          head.insert(a);
          remaining.erase(a);
          edges.push_back(make_edge(a, anchor));
          expected_reward = expect == StepKind::Part ? best : hand_end(m, edges, src, {dsts.begin(), dsts.end()}, w);
          worst_reward = std::max(worst_reward, std::fabs(out.reward - expected_reward));
          if (std::fabs(out.reward - expected_reward) > 1e-9) flag(fmt("reward %.12g vs %.12g", out.reward, expected_reward));
          if (out.next_state.terminal != remaining.empty()) flag("terminal flag disagrees with remaining set");
          if (out.next_state.tree_channel(a, anchor) != 1.0 || out.next_state.tree_channel(anchor, a) != 1.0)
            flag("tree channel not updated");
          s = out.next_state;
          break;
      }
      if (s.terminal) break;
    }
  }
  const double secs = since(t0);
  return {violations == 0 && secs < 30.0,
          fmt("%ld pairs over %d episodes, %ld violations%s%s, max reward error %.2g, %.1f s", pairs, episode,
              violations, violations ? ": " : "", first_violation.c_str(), worst_reward, secs)};
}

// ---------------------------------------------------------------- 4

Verdict gradient_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  double worst_critic = 0.0, worst_actor = 0.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int net = 0; net < 20; ++net) {
    const int in = std::uniform_int_distribution<int>(2, 8)(rng);
    const int actions = std::uniform_int_distribution<int>(2, 6)(rng);
    std::vector<int> hidden;
    for (int l = 0, depth = std::uniform_int_distribution<int>(1, 2)(rng); l < depth; ++l)
      hidden.push_back(std::uniform_int_distribution<int>(3, 8)(rng));
    AgentParams p = init_params(in, actions, hidden, rng);
    for (Network* nn : {&p.actor, &p.critic}) {
      auto& head = nn->layers().back();
      head.weight = head.weight.unaryExpr([&](double) { return 0.5 * u(rng); });
      head.bias = head.bias.unaryExpr([&](double) { return 0.5 * u(rng); });
    }
    Batch batch;
    for (int i = 0, size = std::uniform_int_distribution<int>(1, 16)(rng); i < size; ++i) {
      Experience e;
      e.state = Eigen::VectorXd::NullaryExpr(in, [&] { return u(rng); });
      e.next_state = Eigen::VectorXd::NullaryExpr(in, [&] { return u(rng); });
      e.action = std::uniform_int_distribution<int>(0, actions - 1)(rng);
      e.reward = 2.0 * u(rng);
      e.done = u(rng) > 0.6;
      batch.push_back(e);
    }
    const TdEstimate td = td_advantage(batch, p.critic, 0.9);
    worst_critic = std::max(worst_critic, gradcheck(
                                              p.critic, [&](const Network& c) { return critic_loss(c, batch, td.target); },
                                              critic_loss_gradient(p.critic, batch, td.target)));
    worst_actor = std::max(worst_actor, gradcheck(
                                            p.actor, [&](const Network& a) { return actor_objective(a, batch, td.advantage); },
                                            actor_objective_gradient(p.actor, batch, td.advantage)));
  }
  const double secs = since(t0);
  return {worst_critic < 1e-4 && worst_actor < 1e-4 && secs < 60.0,
          fmt("max relative error critic %.2e, actor %.2e, %.2f s", worst_critic, worst_actor, secs)};
}

// ---------------------------------------------------------------- 5

struct Scenario {
  Topology topo;
  std::vector<Snapshot> snaps;
};

const Scenario& scenario() {
  static const Scenario s = [] {
    Scenario out{gen_topology(kNodes, kScenarioSeed), {}};
    out.snaps = gen_snapshots(out.topo, TrafficProfile::diurnal(), 48, kScenarioSeed);
    return out;
  }();
  return s;
}

double mean_of(const std::vector<double>& v, std::size_t from, std::size_t to) {
  return std::accumulate(v.begin() + from, v.begin() + to, 0.0) / static_cast<double>(to - from);
}

Verdict convergence() {
  const auto t0 = Clock::now();
  const Scenario& sc = scenario();
  const TrainingRun run =
      train_madrl(sc.topo, sc.snaps, kRequest, scenario_hyper(kScenarioSeed, kConvergenceEpisodes), {}, {kAgents});
  const auto curve = run.reward_curve();
  const auto ends = run.end_curve();
  const std::size_t n = curve.size();
  const double first = mean_of(curve, 0, 100);
  const double last = mean_of(curve, n - 100, n);
  const double best = *std::max_element(curve.begin(), curve.end());
  const long reached = std::count(ends.end() - 100, ends.end(), true);
  const double gain = (last - first) / (best - first);
  const double secs = since(t0);
  return {last - first >= 0.5 * (best - first) && reached >= 80 && secs <= 1800.0,
          fmt("first-100 mean %.3f, last-100 mean %.3f, episode max %.3f, gain %.0f%% of gap (need 50%%), "
              "END in %ld/100 final episodes, %.0f s",
              first, last, best, 100.0 * gain, reached, secs)};
}

// ---------------------------------------------------------------- 6

const PretrainedWeights& pretrained() {
  static const PretrainedWeights w = [] {
    const Scenario& sc = scenario();
    return pretrain_unicast(sc.topo, sc.snaps, scenario_hyper(kScenarioSeed, 0), {}, kPretrainEpisodes);
  }();
  return w;
}

Verdict transfer_ablation() {
  const auto t0 = Clock::now();
  const Scenario& sc = scenario();
  const PretrainedWeights& warm = pretrained();
  int faster = 0;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Hyperparams h = scenario_hyper(seed, kAblationEpisodes);
    const auto cold = train_madrl(sc.topo, sc.snaps, kRequest, h, {}, {kAgents}).reward_curve();
    const auto hot = train_madrl(sc.topo, sc.snaps, kRequest, h, {}, {kAgents}, warm).reward_curve();
    const double threshold = mean_of(cold, cold.size() - 50, cold.size());
    const int cold_at = episodes_to_threshold(cold, threshold);
    const int warm_at = episodes_to_threshold(hot, threshold);
    faster += warm_at < cold_at;
    per_seed << (seed > 1 ? " " : "") << warm_at << "/" << cold_at;
  }
  const double secs = since(t0);
  return {faster >= 7 && secs <= 7200.0,
          fmt("warm start faster in %d/10 seeds (warm/cold episodes: %s), %.0f s", faster, per_seed.str().c_str(),
              secs)};
}

// ---------------------------------------------------------------- 7

Verdict baseline_dominance() {
  const auto t0 = Clock::now();
  const Scenario& sc = scenario();
  const PretrainedWeights& warm = pretrained();
  const fs::path out_dir = fs::current_path() / "acceptance_out";
  fs::create_directories(out_dir);
  const TrafficProfile profile = TrafficProfile::diurnal();
  int dominated = 0;
  bool csv_ok = true;
  std::ostringstream per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto snaps = gen_snapshots(sc.topo, profile, 48, 100 + seed);
    const Hyperparams h = scenario_hyper(seed, kBaselineEpisodes);
    const TrainingRun run = train_madrl(sc.topo, snaps, kRequest, h, {}, {kAgents}, warm);
    const MadrlPolicy policy = MadrlPolicy::from_run(run, {}, h.step_cap_multiplier * kNodes);

    std::vector<RoutingAlgorithm> algs{madrl_algorithm(sc.topo, policy)};
    for (auto& a : kmb_algorithms(sc.topo, kRequest)) algs.push_back(std::move(a));
    const EvalReport report = evaluate(sc.topo, snaps, kRequest, algs, profile, 6);
    const fs::path csv = out_dir / ("comparison_seed_" + std::to_string(seed) + ".csv");
    write_report_csv(report, csv);
    std::set<std::string> labels;
    for (const auto& row : report.rows) labels.insert(row.algorithm);
    csv_ok = csv_ok && fs::file_size(csv) > 0 && labels == std::set<std::string>{"MADRL-MR", "KMB_bw", "KMB_delay", "KMB_loss"};

    // bottleneck bandwidth and worst-receiver delay averaged over the day
    std::map<std::string, std::pair<double, double>> avg;
    for (const auto& a : algs) {
      double bw = 0, delay = 0;
      for (const auto& s : snaps) {
        const TreeMetrics t = tree_metrics(a.build(s), s.metrics);
        bw += t.bw / snaps.size();
        delay += t.delay / snaps.size();
      }
      avg[a.label] = {bw, delay};
    }
    const auto& mr = avg["MADRL-MR"];
    const bool ok = mr.first >= avg["KMB_delay"].first && mr.first >= avg["KMB_loss"].first &&
                    mr.second <= avg["KMB_bw"].second;
    dominated += ok;
    per_seed << fmt("%s[bw %.1f vs %.1f/%.1f, delay %.1f vs %.1f]", seed > 1 ? " " : "", mr.first,
                    avg["KMB_delay"].first, avg["KMB_loss"].first, mr.second, avg["KMB_bw"].second);
  }
  const double secs = since(t0);
  return {dominated >= 6 && csv_ok,
          fmt("dominates on %d/10 snapshot sets, CSVs %s; %s; %.0f s", dominated, csv_ok ? "complete" : "incomplete",
              per_seed.str().c_str(), secs)};
}

// ---------------------------------------------------------------- 8

Verdict determinism() {
  const auto t0 = Clock::now();
  const Scenario& sc = scenario();
  const Hyperparams h = scenario_hyper(kScenarioSeed, 150);
  const TrainingRun a = train_madrl(sc.topo, sc.snaps, kRequest, h, {}, {kAgents, false});
  const TrainingRun b = train_madrl(sc.topo, sc.snaps, kRequest, h, {}, {kAgents, false});
  const TrainingRun c = train_madrl(sc.topo, sc.snaps, kRequest, h, {}, {kAgents, true});
  const bool same = a.reward_curve() == b.reward_curve() && a.tree == b.tree;
  const bool threads = a.reward_curve() == c.reward_curve() && a.tree == c.tree;
  return {same && threads, fmt("repeat run %s, threaded run %s, %.0f s", same ? "identical" : "differs",
                               threads ? "identical" : "differs", since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"metric derivation oracle", derivation_oracle},
      {"Steiner oracle equivalence", steiner_oracle},
      {"environment totality and rollback", environment_totality},
      {"gradient correctness", gradient_correctness},
      {"desk-scale convergence", convergence},
      {"transfer ablation", transfer_ablation},
      {"baseline dominance", baseline_dominance},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[i].first << " — " << v.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
