#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "madrl/multicast.hpp"
#include "madrl/traffic.hpp"
#include "madrl/trainer.hpp"

namespace madrl {

/// Analytic delivery for one multicast stream over one snapshot.
struct FlowSample {
  double throughput = 0.0;  // Mbit/s summed over receivers
  double delay = 0.0;       // ms, worst receiver
  double loss = 0.0;        // worst receiver
};

/// Each receiver gets min(offered, bottleneck) × (1 − loss_tree).
FlowSample flow_accounting(const MulticastTree& tree, const LinkStateMatrices& m, double offered);

/// Mean of the samples taken within one time window.
FlowSample window_average(std::span<const FlowSample> samples);

/// Per-link tree averages over repeated measurements.
struct TreeAverages {
  double bw = 0.0;        // mean residual bandwidth per tree link
  double length = 0.0;    // mean edge count
  double distance = 0.0;  // mean distance per tree link
};

TreeAverages tree_averages(std::span<const MulticastTree> trees, std::span<const LinkStateMatrices* const> metrics);

struct ReportRow {
  std::string algorithm;
  int window = 0;
  double start_hour = 0.0;
  double end_hour = 0.0;
  int measurements = 0;
  FlowSample flow;
  TreeAverages tree;
};

struct EvalReport {
  std::vector<ReportRow> rows;  // grouped by algorithm, windows ascending
};

inline constexpr const char* kReportHeader =
    "algorithm,window,start_hour,end_hour,measurements,throughput,delay,loss,bw_tree,len_tree,distance_tree";

void write_report_csv(const EvalReport& report, std::ostream& out);
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);

/// Builds the tree one algorithm would install for a snapshot.
struct RoutingAlgorithm {
  std::string label;
  std::function<MulticastTree(const Snapshot&)> build;
};

std::vector<RoutingAlgorithm> kmb_algorithms(const Topology& topo, const MulticastRequest& req);

/// Trained agents bundled for deployment.
struct MadrlPolicy {
  std::vector<AgentTask> tasks;
  std::vector<Network> actors;
  RewardWeights weights;
  int step_cap = 0;

  static MadrlPolicy from_run(const TrainingRun& run, const RewardWeights& w, int step_cap);
};

RoutingAlgorithm madrl_algorithm(const Topology& topo, const MadrlPolicy& policy);

/// Builds every algorithm's tree on every snapshot; windows hold `per_window` consecutive snapshots.
/// Offered load per snapshot is the profile's per-node load at that hour.
EvalReport evaluate(const Topology& topo, const std::vector<Snapshot>& snapshots, const MulticastRequest& req,
                    const std::vector<RoutingAlgorithm>& algorithms, const TrafficProfile& profile,
                    int per_window);

/// Run directory: config.json, agent_<i>.ckpt, agent_<i>_rewards.csv, tree.json, summary.json.
void write_run_directory(const std::filesystem::path& dir, const TrainingRun& run, const std::string& config_json,
                         std::uint64_t seed, const RewardWeights& w, int step_cap);
/// Throws std::runtime_error naming the missing file.
MadrlPolicy load_run_policy(const std::filesystem::path& dir);

}  // namespace madrl
