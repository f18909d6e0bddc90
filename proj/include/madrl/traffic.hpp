#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "madrl/topology.hpp"

namespace madrl {

/// Random connected wireless topology: link capacity U[5,40] Mbit/s, base delay
/// U[1,10] ms, link lengths within [30,120] m.
Topology gen_topology(int n_nodes, std::uint64_t seed);

/// Mean offered load per node for each hour of the day.
struct TrafficProfile {
  std::array<double, 24> hourly_load{};  // Mbit/s
  double noise = 0.1;                    // multiplicative, standard deviation
  std::uint64_t seed = 0;

  /// Two-peak day: quiet night, a midday peak and a higher evening peak.
  static TrafficProfile diurnal(double peak_load = 16.0);
  static TrafficProfile zero();

  /// Linear interpolation between hourly means, wrapping at midnight.
  double load_at(double hour) const;
};

/// Link-state observation at one instant.
struct Snapshot {
  double hour = 0.0;
  RawLinkCounters counters;
  std::vector<double> sampled_usage;  // ground-truth used bandwidth per link, Mbit/s
  LinkStateMatrices metrics;
  std::shared_ptr<const NormalizedMatrices> normalized;
};

/// Synthesizes consistent counters for `count` equally spaced instants of one day
/// and derives the link-state matrices from them.
std::vector<Snapshot> gen_snapshots(const Topology& topo, const TrafficProfile& profile, int count,
                                    std::uint64_t seed);

/// Content hash of a snapshot sequence's metric matrices.
std::uint64_t snapshots_fingerprint(const std::vector<Snapshot>& snaps);

/// Snapshot file: the topology JSON with a "state" object of derived metrics on each
/// edge, plus the hour.
void save_snapshot(const Topology& topo, const Snapshot& snap, const std::filesystem::path& path);
Snapshot load_snapshot(const Topology& topo, const std::filesystem::path& path);

/// Writes snapshot_000.json, snapshot_001.json, ... into `dir`.
void save_snapshots(const Topology& topo, const std::vector<Snapshot>& snaps, const std::filesystem::path& dir);
std::vector<Snapshot> load_snapshots(const Topology& topo, const std::filesystem::path& dir);

}  // namespace madrl
