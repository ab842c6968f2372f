#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ctdg/events.hpp"
#include "ctdg/linalg.hpp"

namespace ctdg {

struct NeighborEntry {
  NodeId node = 0;
  std::size_t event_index = 0;
  double time = 0.0;
};

// Time-indexed undirected adjacency over a fixed node set. Immutable after
// construction; snapshot queries are answered from per-node time-sorted
// neighbor lists. The source EventLog must outlive the graph (features are
// looked up through it).
class TemporalGraph {
 public:
  static constexpr std::size_t kUnreachable =
      std::numeric_limits<std::size_t>::max();

  static TemporalGraph build(const EventLog& log);

  // Advanced constructor from explicit lists; canonicalizes each list by
  // (time, event_index) so storage order never leaks into results.
  TemporalGraph(std::uint32_t node_count,
                std::vector<std::vector<NeighborEntry>> lists,
                const EventLog* log);

  std::uint32_t node_count() const { return n_; }
  const EventLog& log() const { return *log_; }
  const std::vector<NeighborEntry>& neighbor_list(NodeId u) const;
  std::size_t total_entries() const;

  // A snapshot pins, per node, the visible prefix of its neighbor list.
  struct Snapshot {
    std::vector<std::uint32_t> visible;
  };
  Snapshot snapshot_at(double t) const;                      // time <= t
  Snapshot snapshot_before_event(std::size_t event_index) const;  // index < e

  // The k most recent interactions of u, newest first.
  std::vector<NeighborEntry> temporal_neighborhood(NodeId u, double t,
                                                   std::size_t k) const;
  std::vector<NeighborEntry> recent_interactions(NodeId u, const Snapshot& s,
                                                 std::size_t k) const;
  // Interactions deduplicated to distinct partners, keeping the most recent
  // interaction per partner, newest first, then truncated to k partners.
  std::vector<NeighborEntry> recent_distinct_partners(NodeId u,
                                                      const Snapshot& s,
                                                      std::size_t k) const;

  std::size_t degree_at(NodeId u, double t) const;
  std::size_t degree(NodeId u, const Snapshot& s) const;
  std::vector<std::size_t> degrees(const Snapshot& s) const;

  std::size_t shortest_path_distance(NodeId u, NodeId v, double t) const;
  std::size_t distance(NodeId u, NodeId v, const Snapshot& s) const;
  // Multi-source BFS; distance to the nearest source per node.
  std::vector<std::size_t> distances_from(std::span<const NodeId> sources,
                                          const Snapshot& s) const;

  // Normalized walk machinery over the self-loop-augmented, symmetrically
  // normalized snapshot adjacency  Â[a,b] = 1/sqrt((1+deg a)(1+deg b)).
  // walk_sum_vector = Â^L · 1, pair_weight_vector = Â^L · e_i.
  DenseVector walk_sum_vector(const Snapshot& s, int walk_len) const;
  DenseVector pair_weight_vector(const Snapshot& s, NodeId i,
                                 int walk_len) const;
  double normalized_walk_sum(NodeId u, int walk_len, double t) const;
  double normalized_pair_weight(NodeId u, NodeId i, int walk_len,
                                double t) const;

  // Distinct-neighbor adjacency at a snapshot (shared by BFS and walks).
  struct DistinctAdjacency {
    std::vector<std::vector<NodeId>> neighbors;
    std::vector<std::size_t> degree;
  };
  DistinctAdjacency distinct_adjacency(const Snapshot& s) const;

 private:
  void check_node(NodeId u) const;

  std::uint32_t n_ = 0;
  std::vector<std::vector<NeighborEntry>> adj_;
  const EventLog* log_ = nullptr;
};

}  // namespace ctdg
