#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "madrl/topology.hpp"

namespace madrl {

class RoutingError : public std::runtime_error {
 public:
  enum class Kind { InvalidRequest, InvalidPath, Unreachable, DuplicateDestination, SizeLimit, Internal };

  RoutingError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct MulticastRequest {
  NodeId src = 0;
  std::vector<NodeId> dsts;

  /// Throws RoutingError::InvalidRequest.
  void validate(int n) const;
};

/// Node sequence from the source to one destination.
using RoutePath = std::vector<NodeId>;

struct PathMetrics {
  double bw = 0.0;
  double delay = 0.0;
  double loss = 0.0;
  double used_bw = 0.0;
  double errors = 0.0;
  double drops = 0.0;
  double distance = 0.0;
};

/// Undirected edge with u < v.
using Edge = std::pair<NodeId, NodeId>;

inline Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

struct MulticastTree {
  NodeId src = 0;
  std::vector<NodeId> dsts;  // sorted
  std::vector<Edge> edges;   // sorted

  /// Connected, acyclic, spans src and dsts, every leaf is a terminal.
  bool valid() const;
  /// Node sequence from src to `dst` along tree edges.
  RoutePath path_to(NodeId dst) const;
  std::vector<NodeId> nodes() const;

  friend bool operator==(const MulticastTree&, const MulticastTree&) = default;
};

struct TreeMetrics : PathMetrics {
  int length = 0;  // edge count
};

/// Per-link weight used by shortest-path and Steiner routines.
using WeightFn = std::function<double(NodeId, NodeId)>;

PathMetrics path_metrics(const RoutePath& path, const LinkStateMatrices& m);

struct RewardWeights {
  std::array<double, kMetricCount> beta{0.7, 0.3, 0.1, 0.1, 0.1, 0.1, 0.1};
  double r_hell = -0.7;
  double r_loop = -0.5;
};

/// Weighted score of normalized metrics: bw counts positively, every cost as (1 - cost).
double path_objective(const PathMetrics& normalized, const RewardWeights& w);

struct TreeObjective {
  std::vector<double> per_path;
  double mean = 0.0;
};

/// Scores each path on the normalized matrices.
TreeObjective tree_objective(const std::vector<RoutePath>& paths, const NormalizedMatrices& m,
                             const RewardWeights& w);

/// Union of the paths reduced to a tree. Cycles are broken by a minimum spanning
/// forest under `edge_weight` (hop count when empty), then non-terminal leaves are pruned.
MulticastTree merge_paths(const std::vector<RoutePath>& paths, const WeightFn& edge_weight = {});

/// Repeatedly removes leaves that are neither the source nor a destination.
std::vector<Edge> prune_leaves(std::vector<Edge> edges, NodeId src, const std::vector<NodeId>& dsts);

TreeMetrics tree_metrics(const MulticastTree& tree, const LinkStateMatrices& m);

/// Minimum-weight path; ties go to fewer hops, then the lexicographically smaller sequence.
RoutePath shortest_path(const Topology& topo, const WeightFn& weight, NodeId from, NodeId to);

double tree_weight(const MulticastTree& tree, const WeightFn& weight);

enum class KmbMetric { Bw, Delay, Loss };

const char* to_string(KmbMetric m);

/// Additive link weight KMB uses for `metric` on raw link-state matrices.
WeightFn kmb_weight(const LinkStateMatrices& m, KmbMetric metric);

/// Kou–Markowsky–Berman Steiner heuristic under an arbitrary weight.
MulticastTree kmb_tree(const Topology& topo, const WeightFn& weight, const MulticastRequest& req);
MulticastTree kmb(const Topology& topo, const LinkStateMatrices& m, KmbMetric metric,
                  const MulticastRequest& req);

/// Minimum spanning tree weight of the metric closure over the terminals.
double metric_closure_mst_weight(const Topology& topo, const WeightFn& weight, const MulticastRequest& req);

/// Minimum Steiner tree by enumerating node subsets. Limited to 10 nodes.
MulticastTree exhaustive_steiner_oracle(const Topology& topo, const WeightFn& weight, const MulticastRequest& req);

std::string tree_to_json_text(const MulticastTree& tree);
MulticastTree tree_from_json_text(const std::string& text);

}  // namespace madrl
