#include "madrl/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace madrl {

using json = nlohmann::json;

FlowSample flow_accounting(const MulticastTree& tree, const LinkStateMatrices& m, double offered) {
  const TreeMetrics tm = tree_metrics(tree, m);
  const double per_receiver = std::min(offered, std::max(tm.bw, 0.0)) * (1.0 - tm.loss);
  return {per_receiver * static_cast<double>(tree.dsts.size()), tm.delay, tm.loss};
}

FlowSample window_average(std::span<const FlowSample> samples) {
  FlowSample avg;
  if (samples.empty()) return avg;
  for (const auto& s : samples) {
    avg.throughput += s.throughput;
    avg.delay += s.delay;
    avg.loss += s.loss;
  }
  const double n = static_cast<double>(samples.size());
  return {avg.throughput / n, avg.delay / n, avg.loss / n};
}

TreeAverages tree_averages(std::span<const MulticastTree> trees, std::span<const LinkStateMatrices* const> metrics) {
  TreeAverages avg;
  if (trees.empty()) return avg;
  for (std::size_t k = 0; k < trees.size(); ++k) {
    const auto& t = trees[k];
    const auto& m = *metrics[k];
    double bw = 0.0, dist = 0.0;
    for (auto [u, v] : t.edges) {
      bw += m.at(Metric::Bw, u, v);
      dist += m.at(Metric::Distance, u, v);
    }
    const double e = static_cast<double>(std::max<std::size_t>(t.edges.size(), 1));
    avg.bw += bw / e;
    avg.distance += dist / e;
    avg.length += static_cast<double>(t.edges.size());
  }
  const double n = static_cast<double>(trees.size());
  return {avg.bw / n, avg.length / n, avg.distance / n};
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  out << kReportHeader << '\n';
  out << std::setprecision(10);
  for (const auto& r : report.rows)
    out << r.algorithm << ',' << r.window << ',' << r.start_hour << ',' << r.end_hour << ',' << r.measurements << ','
        << r.flow.throughput << ',' << r.flow.delay << ',' << r.flow.loss << ',' << r.tree.bw << ','
        << r.tree.length << ',' << r.tree.distance << '\n';
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_report_csv(report, out);
}

std::vector<RoutingAlgorithm> kmb_algorithms(const Topology& topo, const MulticastRequest& req) {
  std::vector<RoutingAlgorithm> out;
  for (KmbMetric metric : {KmbMetric::Bw, KmbMetric::Delay, KmbMetric::Loss})
    out.push_back({to_string(metric), [&topo, req, metric](const Snapshot& s) { return kmb(topo, s.metrics, metric, req); }});
  return out;
}

MadrlPolicy MadrlPolicy::from_run(const TrainingRun& run, const RewardWeights& w, int step_cap) {
  MadrlPolicy p;
  for (const auto& a : run.agents) {
    p.tasks.push_back(a.task);
    p.actors.push_back(a.final_params.actor);
  }
  p.weights = w;
  p.step_cap = step_cap;
  return p;
}

RoutingAlgorithm madrl_algorithm(const Topology& topo, const MadrlPolicy& policy) {
  return {"MADRL-MR", [&topo, &policy](const Snapshot& s) {
            std::vector<const Network*> actors;
            for (const auto& a : policy.actors) actors.push_back(&a);
            return madrl_tree(policy.tasks, actors, topo, s, policy.weights, policy.step_cap);
          }};
}

EvalReport evaluate(const Topology& topo, const std::vector<Snapshot>& snapshots, const MulticastRequest& req,
                    const std::vector<RoutingAlgorithm>& algorithms, const TrafficProfile& profile,
                    int per_window) {
  req.validate(topo.size());
  if (per_window < 1) per_window = 1;
  EvalReport report;
  const double hours_per_snapshot = snapshots.empty() ? 0.0 : 24.0 / static_cast<double>(snapshots.size());
  for (const auto& alg : algorithms) {
    int window = 0;
    for (std::size_t begin = 0; begin < snapshots.size(); begin += per_window, ++window) {
      const std::size_t end = std::min(snapshots.size(), begin + per_window);
      std::vector<FlowSample> flows;
      std::vector<MulticastTree> trees;
      std::vector<const LinkStateMatrices*> metrics;
      for (std::size_t k = begin; k < end; ++k) {
        const Snapshot& s = snapshots[k];
        trees.push_back(alg.build(s));
        metrics.push_back(&s.metrics);
        flows.push_back(flow_accounting(trees.back(), s.metrics, profile.load_at(s.hour)));
      }
      ReportRow row;
      row.algorithm = alg.label;
      row.window = window;
      row.start_hour = snapshots[begin].hour;
      row.end_hour = snapshots[end - 1].hour + hours_per_snapshot;
      row.measurements = static_cast<int>(end - begin);
      row.flow = window_average(flows);
      row.tree = tree_averages(trees, metrics);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_run_directory(const std::filesystem::path& dir, const TrainingRun& run, const std::string& config_json,
                         std::uint64_t seed, const RewardWeights& w, int step_cap) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "config.json") << config_json << '\n';
  }
  json summary;
  summary["seed"] = seed;
  summary["seconds"] = run.seconds;
  summary["fallback"] = run.any_fallback;
  summary["step_cap"] = step_cap;
  summary["beta"] = w.beta;
  summary["r_hell"] = w.r_hell;
  summary["r_loop"] = w.r_loop;
  summary["agents"] = json::array();
  for (std::size_t i = 0; i < run.agents.size(); ++i) {
    const AgentRun& a = run.agents[i];
    const std::string stem = "agent_" + std::to_string(a.task.agent_index);
    Checkpoint ck{a.final_params, {{"kind", "madrl-agent"}, {"agent_index", std::to_string(a.task.agent_index)}}};
    save_checkpoint(ck, dir / (stem + ".ckpt"));
    std::ofstream csv(dir / (stem + "_rewards.csv"));
    csv << "episode,reward,steps,part,hell,loop,end\n" << std::setprecision(10);
    for (std::size_t e = 0; e < a.episodes.size(); ++e) {
      const auto& r = a.episodes[e];
      csv << e << ',' << r.reward << ',' << r.steps << ',' << r.part << ',' << r.hell << ',' << r.loop << ','
          << (r.reached_end ? 1 : 0) << '\n';
    }
    json paths = json::array();
    for (const auto& p : a.paths) paths.push_back(p);
    summary["agents"].push_back({{"index", a.task.agent_index},
                                 {"src", a.task.src},
                                 {"dsts", a.task.dsts},
                                 {"checkpoint", stem + ".ckpt"},
                                 {"paths", paths},
                                 {"seconds", a.seconds}});
  }
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  std::ofstream(dir / "tree.json") << tree_to_json_text(run.tree) << '\n';
}

MadrlPolicy load_run_policy(const std::filesystem::path& dir) {
  const auto summary_path = dir / "summary.json";
  std::ifstream in(summary_path);
  if (!in) throw std::runtime_error("missing run summary: " + summary_path.string());
  const json summary = json::parse(in);
  MadrlPolicy p;
  p.step_cap = summary.at("step_cap").get<int>();
  p.weights.beta = summary.at("beta").get<std::array<double, kMetricCount>>();
  p.weights.r_hell = summary.at("r_hell").get<double>();
  p.weights.r_loop = summary.at("r_loop").get<double>();
  for (const auto& a : summary.at("agents")) {
    const auto ckpt = dir / a.at("checkpoint").get<std::string>();
    if (!std::filesystem::exists(ckpt)) throw std::runtime_error("missing checkpoint: " + ckpt.string());
    p.tasks.push_back({a.at("index").get<int>(), a.at("src").get<int>(), a.at("dsts").get<std::vector<int>>()});
    p.actors.push_back(load_checkpoint(ckpt).params.actor);
  }
  if (p.tasks.empty()) throw std::runtime_error("run directory holds no agents: " + dir.string());
  return p;
}

}  // namespace madrl
