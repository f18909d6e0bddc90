#include "madrl/multicast.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

namespace madrl {

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

int max_node(const std::vector<Edge>& edges) {
  int n = -1;
  for (auto [u, v] : edges) n = std::max({n, u, v});
  return n;
}

/// Kruskal over `edges`; ties broken by (u, v).
std::vector<Edge> spanning_forest(std::vector<Edge> edges, const WeightFn& weight) {
  std::vector<std::pair<double, Edge>> ranked;
  ranked.reserve(edges.size());
  for (auto e : edges) ranked.push_back({weight ? weight(e.first, e.second) : 1.0, e});
  std::sort(ranked.begin(), ranked.end());
  DisjointSet ds(max_node(edges) + 1);
  std::vector<Edge> out;
  for (const auto& [w, e] : ranked)
    if (ds.unite(e.first, e.second)) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

std::map<NodeId, std::vector<NodeId>> adjacency_of(const std::vector<Edge>& edges) {
  std::map<NodeId, std::vector<NodeId>> adj;
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

void check_path_shape(const RoutePath& path) {
  if (path.empty()) throw RoutingError(RoutingError::Kind::InvalidPath, "empty path");
  std::set<NodeId> seen(path.begin(), path.end());
  if (seen.size() != path.size()) throw RoutingError(RoutingError::Kind::InvalidPath, "path repeats a node");
}

}  // namespace

void MulticastRequest::validate(int n) const {
  if (src < 0 || src >= n) throw RoutingError(RoutingError::Kind::InvalidRequest, "source id out of range");
  if (dsts.empty()) throw RoutingError(RoutingError::Kind::InvalidRequest, "empty destination set");
  std::set<NodeId> seen;
  for (NodeId d : dsts) {
    if (d < 0 || d >= n) throw RoutingError(RoutingError::Kind::InvalidRequest, "destination id out of range");
    if (d == src) throw RoutingError(RoutingError::Kind::InvalidRequest, "source listed as destination");
    if (!seen.insert(d).second)
      throw RoutingError(RoutingError::Kind::DuplicateDestination, "duplicate destination " + std::to_string(d));
  }
}

PathMetrics path_metrics(const RoutePath& path, const LinkStateMatrices& m) {
  check_path_shape(path);
  if (path.size() < 2) throw RoutingError(RoutingError::Kind::InvalidPath, "path has no links");
  PathMetrics pm;
  pm.bw = std::numeric_limits<double>::infinity();
  double keep_loss = 1.0, keep_errors = 1.0, keep_drops = 1.0, dist = 0.0;
  const int n = m.size();
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const NodeId i = path[k], j = path[k + 1];
    if (i < 0 || j < 0 || i >= n || j >= n || is_absent(m.at(Metric::Bw, i, j)))
      throw RoutingError(RoutingError::Kind::InvalidPath,
                         "no link between " + std::to_string(i) + " and " + std::to_string(j));
    pm.bw = std::min(pm.bw, m.at(Metric::Bw, i, j));
    pm.delay += m.at(Metric::Delay, i, j);
    keep_loss *= 1.0 - m.at(Metric::Loss, i, j);
    pm.used_bw = std::max(pm.used_bw, m.at(Metric::UsedBw, i, j));
    keep_errors *= 1.0 - m.at(Metric::Errors, i, j);
    keep_drops *= 1.0 - m.at(Metric::Drops, i, j);
    dist += m.at(Metric::Distance, i, j);
  }
  pm.loss = 1.0 - keep_loss;
  pm.errors = 1.0 - keep_errors;
  pm.drops = 1.0 - keep_drops;
  pm.distance = dist / static_cast<double>(path.size() - 1);
  return pm;
}

double path_objective(const PathMetrics& p, const RewardWeights& w) {
  const auto& b = w.beta;
  return b[0] * p.bw + b[1] * (1.0 - p.delay) + b[2] * (1.0 - p.loss) + b[3] * (1.0 - p.used_bw) +
         b[4] * (1.0 - p.errors) + b[5] * (1.0 - p.drops) + b[6] * (1.0 - p.distance);
}

TreeObjective tree_objective(const std::vector<RoutePath>& paths, const NormalizedMatrices& m,
                             const RewardWeights& w) {
  TreeObjective out;
  std::set<NodeId> dsts;
  for (const auto& p : paths) {
    check_path_shape(p);
    if (!dsts.insert(p.back()).second)
      throw RoutingError(RoutingError::Kind::DuplicateDestination, "duplicate destination " + std::to_string(p.back()));
    out.per_path.push_back(path_objective(path_metrics(p, m), w));
  }
  if (!out.per_path.empty())
    out.mean = std::accumulate(out.per_path.begin(), out.per_path.end(), 0.0) / out.per_path.size();
  return out;
}

std::vector<Edge> prune_leaves(std::vector<Edge> edges, NodeId src, const std::vector<NodeId>& dsts) {
  std::set<NodeId> terminals(dsts.begin(), dsts.end());
  terminals.insert(src);
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<NodeId, int> degree;
    for (auto [u, v] : edges) {
      ++degree[u];
      ++degree[v];
    }
    auto is_dead_leaf = [&](const Edge& e) {
      return (degree[e.first] == 1 && !terminals.count(e.first)) ||
             (degree[e.second] == 1 && !terminals.count(e.second));
    };
    const auto before = edges.size();
    edges.erase(std::remove_if(edges.begin(), edges.end(), is_dead_leaf), edges.end());
    changed = edges.size() != before;
  }
  return edges;
}

MulticastTree merge_paths(const std::vector<RoutePath>& paths, const WeightFn& edge_weight) {
  if (paths.empty()) throw RoutingError(RoutingError::Kind::InvalidPath, "no paths to merge");
  MulticastTree tree;
  tree.src = paths.front().front();
  std::set<Edge> uni;
  std::set<NodeId> dsts;
  for (const auto& p : paths) {
    check_path_shape(p);
    if (p.front() != tree.src) throw RoutingError(RoutingError::Kind::InvalidPath, "paths do not share a source");
    if (p.size() < 2) throw RoutingError(RoutingError::Kind::InvalidPath, "path has no links");
    dsts.insert(p.back());
    for (std::size_t k = 0; k + 1 < p.size(); ++k) uni.insert(make_edge(p[k], p[k + 1]));
  }
  tree.dsts.assign(dsts.begin(), dsts.end());
  std::vector<Edge> edges(uni.begin(), uni.end());
  // A union of n-node tree has exactly (nodes - 1) edges; anything more closes a cycle.
  std::set<NodeId> nodes;
  for (auto [u, v] : edges) {
    nodes.insert(u);
    nodes.insert(v);
  }
  if (edges.size() >= nodes.size()) edges = spanning_forest(std::move(edges), edge_weight);
  tree.edges = prune_leaves(std::move(edges), tree.src, tree.dsts);
  std::sort(tree.edges.begin(), tree.edges.end());
  if (!tree.valid()) throw RoutingError(RoutingError::Kind::Internal, "merged paths do not form a valid tree");
  return tree;
}

std::vector<NodeId> MulticastTree::nodes() const {
  std::set<NodeId> s{src};
  for (auto [u, v] : edges) {
    s.insert(u);
    s.insert(v);
  }
  return {s.begin(), s.end()};
}

bool MulticastTree::valid() const {
  const auto ns = nodes();
  if (edges.size() + 1 != ns.size()) return false;
  const auto adj = adjacency_of(edges);
  std::set<NodeId> seen{src};
  std::vector<NodeId> stack{src};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    auto it = adj.find(v);
    if (it == adj.end()) continue;
    for (NodeId w : it->second)
      if (seen.insert(w).second) stack.push_back(w);
  }
  if (seen.size() != ns.size()) return false;
  for (NodeId d : dsts)
    if (!seen.count(d) || d == src) return false;
  for (const auto& [v, nb] : adj)
    if (nb.size() == 1 && v != src && !std::binary_search(dsts.begin(), dsts.end(), v)) return false;
  return true;
}

RoutePath MulticastTree::path_to(NodeId dst) const {
  const auto adj = adjacency_of(edges);
  std::map<NodeId, NodeId> parent{{src, src}};
  std::queue<NodeId> q;
  q.push(src);
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop();
    auto it = adj.find(v);
    if (it == adj.end()) continue;
    for (NodeId w : it->second)
      if (parent.emplace(w, v).second) q.push(w);
  }
  if (!parent.count(dst)) throw RoutingError(RoutingError::Kind::Unreachable, "destination not in tree");
  RoutePath path{dst};
  while (path.back() != src) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

TreeMetrics tree_metrics(const MulticastTree& tree, const LinkStateMatrices& m) {
  TreeMetrics tm;
  tm.length = static_cast<int>(tree.edges.size());
  if (tree.edges.empty()) return tm;
  tm.bw = std::numeric_limits<double>::infinity();
  double dist = 0.0;
  for (auto [u, v] : tree.edges) {
    if (is_absent(m.at(Metric::Bw, u, v)))
      throw RoutingError(RoutingError::Kind::InvalidPath, "tree edge missing from link state");
    tm.bw = std::min(tm.bw, m.at(Metric::Bw, u, v));
    tm.used_bw = std::max(tm.used_bw, m.at(Metric::UsedBw, u, v));
    dist += m.at(Metric::Distance, u, v);
  }
  tm.distance = dist / tm.length;
  for (NodeId d : tree.dsts) {
    const PathMetrics pm = path_metrics(tree.path_to(d), m);
    tm.delay = std::max(tm.delay, pm.delay);
    tm.loss = std::max(tm.loss, pm.loss);
    tm.errors = std::max(tm.errors, pm.errors);
    tm.drops = std::max(tm.drops, pm.drops);
  }
  return tm;
}

RoutePath shortest_path(const Topology& topo, const WeightFn& weight, NodeId from, NodeId to) {
  const int n = topo.size();
  if (from < 0 || to < 0 || from >= n || to >= n)
    throw RoutingError(RoutingError::Kind::InvalidRequest, "node id out of range");
  // Label = (weight, hops, node sequence); compared lexicographically.
  using Label = std::tuple<double, int, RoutePath>;
  std::vector<std::optional<Label>> best(n);
  std::vector<char> done(n, 0);
  best[from] = Label{0.0, 0, RoutePath{from}};
  for (;;) {
    int pick = -1;
    for (int v = 0; v < n; ++v)
      if (!done[v] && best[v] && (pick < 0 || *best[v] < *best[pick])) pick = v;
    if (pick < 0) break;
    if (pick == to) return std::get<2>(*best[to]);
    done[pick] = 1;
    const auto& [w0, h0, p0] = *best[pick];
    for (NodeId nb : topo.neighbors(pick)) {
      if (done[nb]) continue;
      const double w = weight(pick, nb);
      if (w < 0.0) throw RoutingError(RoutingError::Kind::InvalidRequest, "negative link weight");
      RoutePath p = p0;
      p.push_back(nb);
      Label cand{w0 + w, h0 + 1, std::move(p)};
      if (!best[nb] || cand < *best[nb]) best[nb] = std::move(cand);
    }
  }
  throw RoutingError(RoutingError::Kind::Unreachable,
                     "node " + std::to_string(to) + " unreachable from " + std::to_string(from));
}

double tree_weight(const MulticastTree& tree, const WeightFn& weight) {
  double total = 0.0;
  for (auto [u, v] : tree.edges) total += weight(u, v);
  return total;
}

const char* to_string(KmbMetric m) {
  switch (m) {
    case KmbMetric::Bw: return "KMB_bw";
    case KmbMetric::Delay: return "KMB_delay";
    case KmbMetric::Loss: return "KMB_loss";
  }
  return "KMB";
}

WeightFn kmb_weight(const LinkStateMatrices& m, KmbMetric metric) {
  switch (metric) {
    case KmbMetric::Delay:
      return [&m](NodeId i, NodeId j) { return m.at(Metric::Delay, i, j); };
    case KmbMetric::Loss:
      return [&m](NodeId i, NodeId j) { return -std::log1p(-std::min(m.at(Metric::Loss, i, j), 0.999999)); };
    case KmbMetric::Bw:
      break;
  }
  return [&m](NodeId i, NodeId j) { return 1.0 / (m.at(Metric::Bw, i, j) + 1e-6); };
}

namespace {

std::vector<NodeId> terminals_of(const MulticastRequest& req) {
  std::vector<NodeId> t{req.src};
  t.insert(t.end(), req.dsts.begin(), req.dsts.end());
  return t;
}

struct ClosureEdge {
  double weight;
  int a, b;  // indices into the terminal list
  bool operator<(const ClosureEdge& o) const { return std::tie(weight, a, b) < std::tie(o.weight, o.a, o.b); }
};

/// MST edges of the terminal metric closure, plus the shortest paths behind them.
std::vector<RoutePath> closure_mst_paths(const Topology& topo, const WeightFn& weight,
                                         const std::vector<NodeId>& terms, double* total) {
  const int t = static_cast<int>(terms.size());
  std::vector<std::vector<RoutePath>> sp(t, std::vector<RoutePath>(t));
  std::vector<ClosureEdge> ce;
  for (int a = 0; a < t; ++a)
    for (int b = a + 1; b < t; ++b) {
      sp[a][b] = shortest_path(topo, weight, terms[a], terms[b]);
      double w = 0.0;
      for (std::size_t k = 0; k + 1 < sp[a][b].size(); ++k) w += weight(sp[a][b][k], sp[a][b][k + 1]);
      ce.push_back({w, a, b});
    }
  std::sort(ce.begin(), ce.end());
  DisjointSet ds(t);
  std::vector<RoutePath> out;
  double sum = 0.0;
  for (const auto& e : ce)
    if (ds.unite(e.a, e.b)) {
      out.push_back(sp[e.a][e.b]);
      sum += e.weight;
    }
  if (total) *total = sum;
  return out;
}

}  // namespace

double metric_closure_mst_weight(const Topology& topo, const WeightFn& weight, const MulticastRequest& req) {
  req.validate(topo.size());
  double total = 0.0;
  closure_mst_paths(topo, weight, terminals_of(req), &total);
  return total;
}

MulticastTree kmb_tree(const Topology& topo, const WeightFn& weight, const MulticastRequest& req) {
  req.validate(topo.size());
  const auto terms = terminals_of(req);
  const auto paths = closure_mst_paths(topo, weight, terms, nullptr);

  std::set<NodeId> nodes(terms.begin(), terms.end());
  for (const auto& p : paths) nodes.insert(p.begin(), p.end());
  std::vector<Edge> induced;
  for (const auto& l : topo.links())
    if (nodes.count(l.u) && nodes.count(l.v)) induced.push_back({l.u, l.v});

  MulticastTree tree;
  tree.src = req.src;
  tree.dsts = req.dsts;
  std::sort(tree.dsts.begin(), tree.dsts.end());
  tree.edges = prune_leaves(spanning_forest(std::move(induced), weight), tree.src, tree.dsts);
  std::sort(tree.edges.begin(), tree.edges.end());
  if (!tree.valid()) throw RoutingError(RoutingError::Kind::Internal, "KMB produced an invalid tree");
  return tree;
}

MulticastTree kmb(const Topology& topo, const LinkStateMatrices& m, KmbMetric metric, const MulticastRequest& req) {
  return kmb_tree(topo, kmb_weight(m, metric), req);
}

MulticastTree exhaustive_steiner_oracle(const Topology& topo, const WeightFn& weight, const MulticastRequest& req) {
  const int n = topo.size();
  if (n > 10) throw RoutingError(RoutingError::Kind::SizeLimit, "exhaustive Steiner search limited to 10 nodes");
  req.validate(n);
  unsigned required = 1u << req.src;
  for (NodeId d : req.dsts) required |= 1u << d;

  double best = std::numeric_limits<double>::infinity();
  std::vector<Edge> best_edges;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if ((mask & required) != required) continue;
    std::vector<Edge> induced;
    for (const auto& l : topo.links())
      if ((mask >> l.u & 1u) && (mask >> l.v & 1u)) induced.push_back({l.u, l.v});
    auto forest = spanning_forest(std::move(induced), weight);
    if (forest.size() + 1 != static_cast<std::size_t>(std::popcount(mask))) continue;  // disconnected
    double w = 0.0;
    for (auto [u, v] : forest) w += weight(u, v);
    if (w < best) {
      best = w;
      best_edges = std::move(forest);
    }
  }
  if (best_edges.empty() && !req.dsts.empty())
    throw RoutingError(RoutingError::Kind::Unreachable, "terminals are not connected");
  MulticastTree tree;
  tree.src = req.src;
  tree.dsts = req.dsts;
  std::sort(tree.dsts.begin(), tree.dsts.end());
  tree.edges = prune_leaves(std::move(best_edges), tree.src, tree.dsts);
  return tree;
}

std::string tree_to_json_text(const MulticastTree& tree) {
  nlohmann::json j;
  j["src"] = tree.src;
  j["dst_set"] = tree.dsts;
  j["edges"] = nlohmann::json::array();
  for (auto [u, v] : tree.edges) j["edges"].push_back({u, v});
  return j.dump();
}

MulticastTree tree_from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  MulticastTree t;
  t.src = j.at("src").get<int>();
  t.dsts = j.at("dst_set").get<std::vector<int>>();
  std::sort(t.dsts.begin(), t.dsts.end());
  for (const auto& e : j.at("edges")) t.edges.push_back(make_edge(e.at(0).get<int>(), e.at(1).get<int>()));
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

}  // namespace madrl
