#include "madrl/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace madrl {

using json = nlohmann::json;

namespace {

constexpr double kMinLinkLength = 30.0;
constexpr double kMaxLinkLength = 120.0;
constexpr double kExtraLinkProbability = 0.35;

}  // namespace

Topology gen_topology(int n_nodes, std::uint64_t seed) {
  if (n_nodes < 2) throw std::invalid_argument("topology needs at least 2 nodes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<NodeInfo> nodes{{0, 0.0, 0.0}};
  std::vector<std::pair<int, int>> tree;
  for (int id = 1; id < n_nodes; ++id) {
    for (int attempt = 0;; ++attempt) {
      const int parent = std::uniform_int_distribution<int>(0, id - 1)(rng);
      const double angle = uniform(0.0, 2.0 * std::numbers::pi);
      // Keep a margin inside the length band so later jitter cannot leave it.
      const double r = uniform(kMinLinkLength + 1.0, kMaxLinkLength - 1.0);
      const NodeInfo cand{id, nodes[parent].x + r * std::cos(angle), nodes[parent].y + r * std::sin(angle)};
      const bool clear = std::all_of(nodes.begin(), nodes.end(), [&](const NodeInfo& o) {
        return std::hypot(o.x - cand.x, o.y - cand.y) >= kMinLinkLength;
      });
      if (clear || attempt > 1000) {
        nodes.push_back(cand);
        tree.emplace_back(parent, id);
        break;
      }
    }
  }

  auto make_link = [&](int u, int v) { return Link{u, v, uniform(5.0, 40.0), uniform(1.0, 10.0)}; };
  std::vector<Link> links;
  for (auto [u, v] : tree) links.push_back(make_link(u, v));
  for (int u = 0; u < n_nodes; ++u)
    for (int v = u + 1; v < n_nodes; ++v) {
      const bool in_tree = std::any_of(tree.begin(), tree.end(), [&](auto e) {
        return (e.first == u && e.second == v) || (e.first == v && e.second == u);
      });
      const double d = std::hypot(nodes[u].x - nodes[v].x, nodes[u].y - nodes[v].y);
      if (in_tree || d < kMinLinkLength || d > kMaxLinkLength) continue;
      if (unit(rng) < kExtraLinkProbability) links.push_back(make_link(u, v));
    }
  return Topology(std::move(nodes), std::move(links));
}

TrafficProfile TrafficProfile::diurnal(double peak_load) {
  static constexpr std::array<double, 24> shape{0.25, 0.18, 0.14, 0.12, 0.12, 0.15, 0.25, 0.40,
                                                0.55, 0.65, 0.72, 0.78, 0.80, 0.74, 0.65, 0.60,
                                                0.62, 0.70, 0.82, 0.92, 1.00, 0.95, 0.70, 0.40};
  TrafficProfile p;
  for (int h = 0; h < 24; ++h) p.hourly_load[h] = peak_load * shape[h];
  return p;
}

TrafficProfile TrafficProfile::zero() {
  TrafficProfile p;
  p.hourly_load.fill(0.0);
  p.noise = 0.0;
  return p;
}

double TrafficProfile::load_at(double hour) const {
  hour = std::fmod(std::fmod(hour, 24.0) + 24.0, 24.0);
  const int h0 = static_cast<int>(std::floor(hour)) % 24;
  const int h1 = (h0 + 1) % 24;
  const double t = hour - std::floor(hour);
  return (1.0 - t) * hourly_load[h0] + t * hourly_load[h1];
}

std::vector<Snapshot> gen_snapshots(const Topology& topo, const TrafficProfile& profile, int count,
                                    std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("snapshot count must be >= 1");
  std::mt19937_64 rng(seed ^ (profile.seed * 0x9E3779B97F4A7C15ULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto& links = topo.links();
  // Busier and quieter links keep their relative share across the day.
  std::vector<double> share(links.size());
  for (auto& s : share) s = 0.3 + 0.9 * unit(rng);

  const double window = 86400.0 / count;  // seconds between snapshots
  std::vector<Snapshot> out;
  out.reserve(count);
  for (int t = 0; t < count; ++t) {
    Snapshot snap;
    snap.hour = 24.0 * t / count;
    const double load = profile.load_at(snap.hour);
    snap.counters.resize(links.size());
    snap.sampled_usage.resize(links.size());
    for (std::size_t k = 0; k < links.size(); ++k) {
      const Link& l = links[k];
      const double noisy = load * share[k] * (1.0 + profile.noise * gauss(rng));
      const double usage = std::clamp(noisy, 0.0, l.bw_max);
      const double rho = usage / l.bw_max;
      const double delay_ms = std::max(0.0, l.base_delay * (1.0 + 1.5 * rho) + 0.05 * l.base_delay * gauss(rng));
      const double loss = 0.02 * rho * rho * (0.5 + 0.5 * unit(rng));
      const double drops = 0.02 * rho * unit(rng);
      const double errors = 0.005 * unit(rng);

      LinkCounters& c = snap.counters[k];
      c.a.duration = 1.0 + t * window;
      c.b.duration = c.a.duration + window;

      const auto base_bytes = static_cast<std::uint64_t>(1e8 * (1.0 + unit(rng)));
      const auto usage_bytes = static_cast<std::uint64_t>(std::llround(usage * window * 1e6 / 8.0));
      c.b.tx_bytes = base_bytes / 2;
      c.b.rx_bytes = base_bytes - c.b.tx_bytes;
      c.a.tx_bytes = c.b.tx_bytes + usage_bytes / 2;
      c.a.rx_bytes = c.b.rx_bytes + (usage_bytes - usage_bytes / 2);
      snap.sampled_usage[k] = usage;

      const auto sent = static_cast<std::uint64_t>(1000 + std::llround(usage * window * 1e6 / 8.0 / 1200.0));
      const auto lost = static_cast<std::uint64_t>(std::llround(loss * static_cast<double>(sent)));
      c.a.tx_packets = sent;
      c.b.rx_packets = sent - lost;
      c.b.tx_packets = c.b.rx_packets;
      c.a.rx_packets = c.b.tx_packets;
      const double seen = static_cast<double>(c.a.tx_packets + c.b.rx_packets);
      const auto dropped = static_cast<std::uint64_t>(std::llround(drops * seen));
      c.a.tx_dropped = dropped / 2;
      c.b.rx_dropped = dropped - c.a.tx_dropped;
      const auto errored = static_cast<std::uint64_t>(std::llround(errors * seen));
      c.a.tx_errors = errored / 2;
      c.b.rx_errors = errored - c.a.tx_errors;

      c.rtt_to_a = (1.0 + 4.0 * unit(rng)) * 1e-3;
      c.rtt_to_b = (1.0 + 4.0 * unit(rng)) * 1e-3;
      c.t_forward = c.rtt_to_a / 2.0 + delay_ms * 1e-3 + c.rtt_to_b / 2.0;
      c.t_reply = c.t_forward;
    }
    snap.metrics = derive_link_state(snap.counters, topo);
    snap.normalized = std::make_shared<const NormalizedMatrices>(normalize(snap.metrics));
    out.push_back(std::move(snap));
  }
  return out;
}

std::uint64_t snapshots_fingerprint(const std::vector<Snapshot>& snaps) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& s : snaps) {
    mix(&s.hour, sizeof s.hour);
    for (const auto& c : s.metrics.channels)
      for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double v = is_absent(c.data()[i]) ? -1.0 : c.data()[i];
        mix(&v, sizeof v);
      }
  }
  return h;
}

void save_snapshot(const Topology& topo, const Snapshot& snap, const std::filesystem::path& path) {
  json j = json::parse(topology_to_json_text(topo));
  j["hour"] = snap.hour;
  for (auto& e : j["edges"]) {
    const int u = e["u"], v = e["v"];
    for (int c = 0; c < kMetricCount; ++c) e["state"][kMetricNames[c]] = snap.metrics.channels[c](u, v);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

Snapshot load_snapshot(const Topology& topo, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const json j = json::parse(ss.str());
  if (!(topology_from_json_text(ss.str()) == topo))
    throw std::runtime_error("snapshot " + path.string() + " was taken on a different topology");
  Snapshot snap;
  snap.hour = j.at("hour").get<double>();
  snap.metrics = LinkStateMatrices::absent(topo.size());
  for (const auto& e : j.at("edges")) {
    const int u = e.at("u"), v = e.at("v");
    for (int c = 0; c < kMetricCount; ++c)
      snap.metrics.set(static_cast<Metric>(c), u, v, e.at("state").at(kMetricNames[c]).get<double>());
  }
  snap.normalized = std::make_shared<const NormalizedMatrices>(normalize(snap.metrics));
  return snap;
}

void save_snapshots(const Topology& topo, const std::vector<Snapshot>& snaps, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.json", i);
    save_snapshot(topo, snaps[i], dir / name);
  }
}

std::vector<Snapshot> load_snapshots(const Topology& topo, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("traffic directory not found: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json" && e.path().filename().string().starts_with("snapshot_"))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no snapshot files in " + dir.string());
  std::vector<Snapshot> out;
  for (const auto& f : files) out.push_back(load_snapshot(topo, f));
  return out;
}

}  // namespace madrl
