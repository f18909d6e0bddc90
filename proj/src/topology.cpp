#include "madrl/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace madrl {

using json = nlohmann::json;

namespace {

std::string edge_name(NodeId u, NodeId v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

bool connected(int n, const std::vector<std::vector<NodeId>>& adj) {
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop();
    for (NodeId w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        q.push(w);
      }
    }
  }
  return count == n;
}

}  // namespace

Topology::Topology(std::vector<NodeInfo> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  const int n = size();
  std::sort(nodes_.begin(), nodes_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (int i = 0; i < n; ++i) {
    if (nodes_[i].id != i)
      throw TopologyError(TopologyError::Kind::InvalidNode, "node ids must be contiguous 0..n-1");
    if (!std::isfinite(nodes_[i].x) || !std::isfinite(nodes_[i].y))
      throw TopologyError(TopologyError::Kind::InvalidNode,
                          "node " + std::to_string(i) + " has non-finite coordinates");
  }

  link_of_ = Eigen::MatrixXi::Constant(n, n, -1);
  adjacency_.assign(n, {});
  for (auto& l : links_) {
    if (l.u == l.v) throw TopologyError(TopologyError::Kind::SelfLoop, "self-loop at node " + std::to_string(l.u));
    if (l.u < 0 || l.v < 0 || l.u >= n || l.v >= n)
      throw TopologyError(TopologyError::Kind::InvalidNode, "edge " + edge_name(l.u, l.v) + " references unknown node");
    if (!(l.bw_max > 0.0) || !std::isfinite(l.bw_max))
      throw TopologyError(TopologyError::Kind::InvalidCapacity, "edge " + edge_name(l.u, l.v) + " has bw_max <= 0");
    if (l.u > l.v) std::swap(l.u, l.v);
  }
  std::sort(links_.begin(), links_.end(),
            [](const Link& a, const Link& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  for (int k = 0; k < static_cast<int>(links_.size()); ++k) {
    const auto& l = links_[k];
    if (link_of_(l.u, l.v) >= 0)
      throw TopologyError(TopologyError::Kind::DuplicateEdge, "duplicate edge " + edge_name(l.u, l.v));
    link_of_(l.u, l.v) = link_of_(l.v, l.u) = k;
    adjacency_[l.u].push_back(l.v);
    adjacency_[l.v].push_back(l.u);
  }
  for (auto& a : adjacency_) std::sort(a.begin(), a.end());
  if (!connected(n, adjacency_))
    throw TopologyError(TopologyError::Kind::Disconnected, "topology is not connected");
}

bool Topology::has_edge(NodeId a, NodeId b) const { return link_index(a, b) >= 0; }

int Topology::link_index(NodeId a, NodeId b) const {
  if (a < 0 || b < 0 || a >= size() || b >= size()) return -1;
  return link_of_(a, b);
}

double Topology::distance(NodeId a, NodeId b) const {
  const auto& p = nodes_.at(a);
  const auto& q = nodes_.at(b);
  return std::hypot(p.x - q.x, p.y - q.y);
}

std::uint64_t Topology::fingerprint() const {
  const std::string text = topology_to_json_text(*this);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string topology_to_json_text(const Topology& topo) {
  json j;
  j["nodes"] = json::array();
  for (const auto& n : topo.nodes()) j["nodes"].push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
  j["edges"] = json::array();
  for (const auto& l : topo.links())
    j["edges"].push_back({{"u", l.u}, {"v", l.v}, {"bw_max", l.bw_max}, {"delay", l.base_delay}});
  return j.dump(2);
}

Topology topology_from_json_text(const std::string& text) {
  std::vector<NodeInfo> nodes;
  std::vector<Link> links;
  try {
    const json j = json::parse(text);
    for (const auto& n : j.at("nodes"))
      nodes.push_back({n.at("id").get<int>(), n.at("x").get<double>(), n.at("y").get<double>()});
    for (const auto& e : j.at("edges"))
      links.push_back({e.at("u").get<int>(), e.at("v").get<int>(), e.at("bw_max").get<double>(),
                       e.value("delay", 0.0)});
  } catch (const json::exception& e) {
    throw TopologyError(TopologyError::Kind::Parse, std::string("topology parse error: ") + e.what());
  }
  return Topology(std::move(nodes), std::move(links));
}

Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError(TopologyError::Kind::Parse, "cannot open topology file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return topology_from_json_text(ss.str());
}

void save_topology(const Topology& topo, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << topology_to_json_text(topo) << '\n';
}

LinkStateMatrices LinkStateMatrices::absent(int n) {
  LinkStateMatrices m;
  for (auto& c : m.channels) c = Eigen::MatrixXd::Constant(n, n, kAbsent);
  return m;
}

void LinkStateMatrices::set(Metric m, NodeId i, NodeId j, double value) {
  (*this)[m](i, j) = value;
  (*this)[m](j, i) = value;
}

LinkStateMatrices derive_link_state(const RawLinkCounters& counters, const Topology& topo) {
  const auto& links = topo.links();
  if (counters.size() != links.size())
    throw CounterError(CounterError::Kind::Malformed, "counter set does not cover every edge");

  auto out = LinkStateMatrices::absent(topo.size());
  for (std::size_t k = 0; k < links.size(); ++k) {
    const Link& l = links[k];
    const LinkCounters& c = counters[k];
    const std::string name = edge_name(l.u, l.v);

    const double dt = c.b.duration - c.a.duration;
    if (!(dt > 0.0)) throw CounterError(CounterError::Kind::Malformed, "non-positive time delta on edge " + name);
    if (c.a.tx_packets == 0)
      throw CounterError(CounterError::Kind::Malformed, "no transmitted packets on edge " + name);

    const double bytes_a = static_cast<double>(c.a.tx_bytes) + static_cast<double>(c.a.rx_bytes);
    const double bytes_b = static_cast<double>(c.b.tx_bytes) + static_cast<double>(c.b.rx_bytes);
    const double used = std::abs(bytes_a - bytes_b) * 8.0 / 1e6 / dt;

    const double sent = static_cast<double>(c.a.tx_packets);
    const double received = static_cast<double>(c.b.rx_packets);
    const double loss = (sent - received) / sent;
    const double seen = sent + received;
    const double drops = (static_cast<double>(c.a.tx_dropped) + static_cast<double>(c.b.rx_dropped)) / seen;
    const double errors = (static_cast<double>(c.a.tx_errors) + static_cast<double>(c.b.rx_errors)) / seen;
    for (double rate : {loss, drops, errors})
      if (!(rate >= 0.0 && rate <= 1.0))
        throw CounterError(CounterError::Kind::Inconsistent, "rate outside [0,1] on edge " + name);

    double delay = (c.t_forward + c.t_reply - c.rtt_to_a - c.rtt_to_b) / 2.0 * 1e3;
    if (delay < 0.0) {
      spdlog::warn("negative delay {:.6g} ms on edge {} clamped to 0", delay, name);
      delay = 0.0;
    }

    out.set(Metric::UsedBw, l.u, l.v, used);
    out.set(Metric::Bw, l.u, l.v, l.bw_max - used);
    out.set(Metric::Loss, l.u, l.v, loss);
    out.set(Metric::Drops, l.u, l.v, drops);
    out.set(Metric::Errors, l.u, l.v, errors);
    out.set(Metric::Delay, l.u, l.v, delay);
    out.set(Metric::Distance, l.u, l.v, topo.distance(l.u, l.v));
  }
  return out;
}

NormalizedMatrices normalize(const LinkStateMatrices& matrices) {
  NormalizedMatrices out;
  for (int c = 0; c < kMetricCount; ++c) {
    const Eigen::MatrixXd& src = matrices.channels[c];
    const double worst = is_benefit_metric(static_cast<Metric>(c)) ? 0.0 : 1.0;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < src.size(); ++i) {
      const double v = src.data()[i];
      if (is_absent(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = hi - lo;
    out.channels[c] = src.unaryExpr([&](double v) {
      if (is_absent(v)) return worst;
      return span > 0.0 ? (v - lo) / span : 0.0;
    });
  }
  return out;
}

}  // namespace madrl
