#include "ctdg/temporal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace ctdg {

TemporalGraph TemporalGraph::build(const EventLog& log) {
  log.validate();
  std::vector<std::vector<NeighborEntry>> lists(log.node_count);
  for (std::size_t e = 0; e < log.events.size(); ++e) {
    const EventRecord& ev = log.events[e];
    lists[ev.src].push_back({ev.dst, e, ev.time});
    lists[ev.dst].push_back({ev.src, e, ev.time});
  }
  return TemporalGraph(log.node_count, std::move(lists), &log);
}

TemporalGraph::TemporalGraph(std::uint32_t node_count,
                             std::vector<std::vector<NeighborEntry>> lists,
                             const EventLog* log)
    : n_(node_count), adj_(std::move(lists)), log_(log) {
  if (log_ == nullptr) throw std::invalid_argument("TemporalGraph: null log");
  if (adj_.size() != n_)
    throw std::invalid_argument("TemporalGraph: list count != node count");
  for (auto& list : adj_)
    std::sort(list.begin(), list.end(),
              [](const NeighborEntry& a, const NeighborEntry& b) {
                if (a.time != b.time) return a.time < b.time;
                return a.event_index < b.event_index;
              });
}

const std::vector<NeighborEntry>& TemporalGraph::neighbor_list(NodeId u) const {
  check_node(u);
  return adj_[u];
}

std::size_t TemporalGraph::total_entries() const {
  std::size_t total = 0;
  for (const auto& list : adj_) total += list.size();
  return total;
}

void TemporalGraph::check_node(NodeId u) const {
  if (u >= n_)
    throw std::out_of_range("node index " + std::to_string(u) +
                            " out of range (n=" + std::to_string(n_) + ")");
}

TemporalGraph::Snapshot TemporalGraph::snapshot_at(double t) const {
  Snapshot s;
  s.visible.resize(n_);
  for (NodeId u = 0; u < n_; ++u) {
    const auto& list = adj_[u];
    const auto it = std::upper_bound(
        list.begin(), list.end(), t,
        [](double lhs, const NeighborEntry& e) { return lhs < e.time; });
    s.visible[u] = static_cast<std::uint32_t>(it - list.begin());
  }
  return s;
}

TemporalGraph::Snapshot TemporalGraph::snapshot_before_event(
    std::size_t event_index) const {
  // Valid for log-built graphs, whose lists are also event-index sorted.
  Snapshot s;
  s.visible.resize(n_);
  for (NodeId u = 0; u < n_; ++u) {
    const auto& list = adj_[u];
    const auto it = std::partition_point(
        list.begin(), list.end(),
        [event_index](const NeighborEntry& e) { return e.event_index < event_index; });
    s.visible[u] = static_cast<std::uint32_t>(it - list.begin());
  }
  return s;
}

std::vector<NeighborEntry> TemporalGraph::recent_interactions(
    NodeId u, const Snapshot& s, std::size_t k) const {
  check_node(u);
  if (k < 1) throw std::invalid_argument("recent_interactions: k must be >= 1");
  const auto& list = adj_[u];
  const std::size_t len = s.visible[u];
  const std::size_t take = std::min(k, len);
  std::vector<NeighborEntry> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(list[len - 1 - i]);
  return out;
}

std::vector<NeighborEntry> TemporalGraph::temporal_neighborhood(
    NodeId u, double t, std::size_t k) const {
  // Full-list scan is avoided by reusing the per-node cut directly.
  check_node(u);
  if (k < 1) throw std::invalid_argument("temporal_neighborhood: k must be >= 1");
  const auto& list = adj_[u];
  const auto it = std::upper_bound(
      list.begin(), list.end(), t,
      [](double lhs, const NeighborEntry& e) { return lhs < e.time; });
  const std::size_t len = static_cast<std::size_t>(it - list.begin());
  const std::size_t take = std::min(k, len);
  std::vector<NeighborEntry> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(list[len - 1 - i]);
  return out;
}

std::vector<NeighborEntry> TemporalGraph::recent_distinct_partners(
    NodeId u, const Snapshot& s, std::size_t k) const {
  check_node(u);
  if (k < 1) throw std::invalid_argument("recent_distinct_partners: k must be >= 1");
  const auto& list = adj_[u];
  const std::size_t len = s.visible[u];
  std::vector<NeighborEntry> out;
  std::vector<NodeId> seen;
  for (std::size_t i = len; i-- > 0 && out.size() < k;) {
    const NeighborEntry& e = list[i];
    if (std::find(seen.begin(), seen.end(), e.node) != seen.end()) continue;
    seen.push_back(e.node);
    out.push_back(e);
  }
  return out;
}

std::size_t TemporalGraph::degree(NodeId u, const Snapshot& s) const {
  check_node(u);
  const auto& list = adj_[u];
  std::vector<NodeId> ids;
  ids.reserve(s.visible[u]);
  for (std::size_t i = 0; i < s.visible[u]; ++i) ids.push_back(list[i].node);
  std::sort(ids.begin(), ids.end());
  return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) -
                                  ids.begin());
}

std::size_t TemporalGraph::degree_at(NodeId u, double t) const {
  Snapshot s = snapshot_at(t);
  return degree(u, s);
}

std::vector<std::size_t> TemporalGraph::degrees(const Snapshot& s) const {
  std::vector<std::size_t> out(n_);
  for (NodeId u = 0; u < n_; ++u) out[u] = degree(u, s);
  return out;
}

TemporalGraph::DistinctAdjacency TemporalGraph::distinct_adjacency(
    const Snapshot& s) const {
  DistinctAdjacency d;
  d.neighbors.resize(n_);
  d.degree.resize(n_);
  for (NodeId u = 0; u < n_; ++u) {
    auto& ids = d.neighbors[u];
    ids.reserve(s.visible[u]);
    for (std::size_t i = 0; i < s.visible[u]; ++i)
      ids.push_back(adj_[u][i].node);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    d.degree[u] = ids.size();
  }
  return d;
}

std::vector<std::size_t> TemporalGraph::distances_from(
    std::span<const NodeId> sources, const Snapshot& s) const {
  std::vector<std::size_t> dist(n_, kUnreachable);
  std::deque<NodeId> queue;
  for (NodeId src : sources) {
    check_node(src);
    if (dist[src] == kUnreachable) {
      dist[src] = 0;
      queue.push_back(src);
    }
  }
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    const auto& list = adj_[u];
    for (std::size_t i = 0; i < s.visible[u]; ++i) {
      const NodeId v = list[i].node;
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::size_t TemporalGraph::distance(NodeId u, NodeId v, const Snapshot& s) const {
  check_node(u);
  check_node(v);
  if (u == v) return 0;
  const NodeId sources[1] = {u};
  return distances_from(sources, s)[v];
}

std::size_t TemporalGraph::shortest_path_distance(NodeId u, NodeId v,
                                                  double t) const {
  Snapshot s = snapshot_at(t);
  return distance(u, v, s);
}

namespace {

// y = Â x with Â[u,v] = c_u c_v for v in N(u), Â[u,u] = c_u^2,
// c_u = 1/sqrt(1 + deg u).
DenseVector normalized_step(const TemporalGraph::DistinctAdjacency& adj,
                            const std::vector<double>& c,
                            const DenseVector& x) {
  const std::size_t n = adj.neighbors.size();
  DenseVector y(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    double acc = c[u] * x[u];  // self loop: c_u * x_u, scaled by c_u below
    for (NodeId v : adj.neighbors[u]) acc += c[v] * x[v];
    y[u] = c[u] * acc;
  }
  return y;
}

}  // namespace

DenseVector TemporalGraph::walk_sum_vector(const Snapshot& s, int walk_len) const {
  if (walk_len < 0) throw std::invalid_argument("walk length must be >= 0");
  DistinctAdjacency adj = distinct_adjacency(s);
  std::vector<double> c(n_);
  for (NodeId u = 0; u < n_; ++u)
    c[u] = 1.0 / std::sqrt(1.0 + static_cast<double>(adj.degree[u]));
  DenseVector x(n_, 1.0);
  for (int step = 0; step < walk_len; ++step) x = normalized_step(adj, c, x);
  return x;
}

DenseVector TemporalGraph::pair_weight_vector(const Snapshot& s, NodeId i,
                                              int walk_len) const {
  check_node(i);
  if (walk_len < 0) throw std::invalid_argument("walk length must be >= 0");
  DistinctAdjacency adj = distinct_adjacency(s);
  std::vector<double> c(n_);
  for (NodeId u = 0; u < n_; ++u)
    c[u] = 1.0 / std::sqrt(1.0 + static_cast<double>(adj.degree[u]));
  DenseVector x(n_, 0.0);
  x[i] = 1.0;
  for (int step = 0; step < walk_len; ++step) x = normalized_step(adj, c, x);
  return x;
}

double TemporalGraph::normalized_walk_sum(NodeId u, int walk_len,
                                          double t) const {
  check_node(u);
  if (walk_len == 0) return 1.0;  // empty-walk convention
  Snapshot s = snapshot_at(t);
  return walk_sum_vector(s, walk_len)[u];
}

double TemporalGraph::normalized_pair_weight(NodeId u, NodeId i, int walk_len,
                                             double t) const {
  check_node(u);
  check_node(i);
  if (walk_len == 0) return u == i ? 1.0 : 0.0;
  Snapshot s = snapshot_at(t);
  return pair_weight_vector(s, i, walk_len)[u];
}

}  // namespace ctdg
