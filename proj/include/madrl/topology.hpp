#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace madrl {

using NodeId = int;

/// Marker for matrix entries that do not correspond to a link.
inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

inline bool is_absent(double v) { return v != v; }

struct NodeInfo {
  NodeId id = 0;
  double x = 0.0;  // meters
  double y = 0.0;

  friend bool operator==(const NodeInfo&, const NodeInfo&) = default;
};

struct Link {
  NodeId u = 0;
  NodeId v = 0;
  double bw_max = 0.0;    // Mbit/s
  double base_delay = 0.0;  // ms, propagation part used by the traffic synthesizer

  friend bool operator==(const Link&, const Link&) = default;
};

class TopologyError : public std::runtime_error {
 public:
  enum class Kind { Parse, SelfLoop, DuplicateEdge, Disconnected, InvalidNode, InvalidCapacity };

  TopologyError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Undirected wireless graph. Links are stored once with u < v.
class Topology {
 public:
  Topology() = default;
  /// Validates ids, capacities, duplicates, self-loops and connectivity.
  Topology(std::vector<NodeInfo> nodes, std::vector<Link> links);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<NodeInfo>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_.at(v); }

  bool has_edge(NodeId a, NodeId b) const;
  /// Index into links(), or -1.
  int link_index(NodeId a, NodeId b) const;
  double distance(NodeId a, NodeId b) const;

  /// FNV-1a over the canonical JSON form; used for checkpoint provenance.
  std::uint64_t fingerprint() const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.nodes_ == b.nodes_ && a.links_ == b.links_;
  }

 private:
  std::vector<NodeInfo> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<NodeId>> adjacency_;
  Eigen::MatrixXi link_of_;
};

Topology load_topology(const std::filesystem::path& path);
void save_topology(const Topology& topo, const std::filesystem::path& path);
Topology topology_from_json_text(const std::string& text);
std::string topology_to_json_text(const Topology& topo);

/// Port statistics reported by one endpoint of a link.
struct PortCounters {
  std::uint64_t tx_packets = 0;
  std::uint64_t rx_packets = 0;
  std::uint64_t tx_bytes = 0;
  std::uint64_t rx_bytes = 0;
  std::uint64_t tx_dropped = 0;
  std::uint64_t rx_dropped = 0;
  std::uint64_t tx_errors = 0;
  std::uint64_t rx_errors = 0;
  double duration = 0.0;  // seconds
};

/// Raw statistics for one link. `a` is the endpoint at Link::u, `b` at Link::v.
/// Probe timings are in seconds.
struct LinkCounters {
  PortCounters a;
  PortCounters b;
  double t_forward = 0.0;
  double t_reply = 0.0;
  double rtt_to_a = 0.0;
  double rtt_to_b = 0.0;
};

/// One entry per Topology::links(), same order.
using RawLinkCounters = std::vector<LinkCounters>;

enum class Metric { Bw = 0, Delay, Loss, UsedBw, Errors, Drops, Distance };
inline constexpr int kMetricCount = 7;
inline constexpr std::array<const char*, kMetricCount> kMetricNames = {
    "bw", "delay", "loss", "used_bw", "errors", "drops", "distance"};

/// Seven symmetric n×n link-metric matrices; non-links hold kAbsent.
/// Units: bw/used_bw Mbit/s, delay ms, distance m, rates in [0,1].
struct LinkStateMatrices {
  std::array<Eigen::MatrixXd, kMetricCount> channels;

  Eigen::MatrixXd& operator[](Metric m) { return channels[static_cast<int>(m)]; }
  const Eigen::MatrixXd& operator[](Metric m) const { return channels[static_cast<int>(m)]; }
  double at(Metric m, NodeId i, NodeId j) const { return (*this)[m](i, j); }
  int size() const { return static_cast<int>(channels[0].rows()); }

  static LinkStateMatrices absent(int n);
  /// Writes (i,j) and (j,i).
  void set(Metric m, NodeId i, NodeId j, double value);
};

/// Same seven channels rescaled to [0,1], dense.
struct NormalizedMatrices : LinkStateMatrices {};

class CounterError : public std::runtime_error {
 public:
  enum class Kind { Malformed, Inconsistent };

  CounterError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Turns raw port counters into per-link metrics.
LinkStateMatrices derive_link_state(const RawLinkCounters& counters, const Topology& topo);

/// Per-channel max–min rescaling over present entries. A constant channel maps to 0.
/// Absent entries (including the diagonal) take the channel's worst value.
NormalizedMatrices normalize(const LinkStateMatrices& matrices);

inline bool is_benefit_metric(Metric m) { return m == Metric::Bw; }

}  // namespace madrl
