// Independent test oracles: straight-line implementations kept deliberately
// separate from the library code paths they check.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ctdg/temporal_graph.hpp"

namespace oracles {

// Total weight of all length-L walks u -> ... -> (stop), under the
// self-loop-augmented normalized adjacency, by explicit enumeration.
// stop < 0 sums over all end nodes.
inline double walk_enumeration(
    const ctdg::TemporalGraph::DistinctAdjacency& adj, std::size_t u, int len,
    long long stop) {
  const auto step_options = [&](std::size_t a) {
    std::vector<std::size_t> opts = {a};  // self loop
    for (ctdg::NodeId b : adj.neighbors[a]) opts.push_back(b);
    return opts;
  };
  const auto coef = [&](std::size_t a, std::size_t b) {
    return 1.0 / std::sqrt((1.0 + static_cast<double>(adj.degree[a])) *
                           (1.0 + static_cast<double>(adj.degree[b])));
  };
  struct Frame {
    std::size_t node;
    double weight;
    int depth;
  };
  double total = 0.0;
  std::vector<Frame> stack = {{u, 1.0, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.depth == len) {
      if (stop < 0 || static_cast<long long>(f.node) == stop) total += f.weight;
      continue;
    }
    for (std::size_t next : step_options(f.node))
      stack.push_back({next, f.weight * coef(f.node, next), f.depth + 1});
  }
  return total;
}

// Shortest path by exhaustive simple-path enumeration (small graphs only).
inline std::size_t exhaustive_distance(
    const ctdg::TemporalGraph::DistinctAdjacency& adj, std::size_t u,
    std::size_t v) {
  if (u == v) return 0;
  const std::size_t n = adj.neighbors.size();
  std::size_t best = ctdg::TemporalGraph::kUnreachable;
  std::vector<char> used(n, 0);
  const std::function<void(std::size_t, std::size_t)> dfs =
      [&](std::size_t node, std::size_t depth) {
        if (depth >= best) return;
        used[node] = 1;
        for (ctdg::NodeId next : adj.neighbors[node]) {
          if (next == v) {
            best = std::min(best, depth + 1);
          } else if (!used[next]) {
            dfs(next, depth + 1);
          }
        }
        used[node] = 0;
      };
  dfs(u, 0);
  return best;
}

// Closed-form largest eigenvalue of a symmetric 2x2 matrix [[a,b],[b,c]].
inline double sym2_max_eigen(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double diff = 0.5 * (a - c);
  return mean + std::sqrt(diff * diff + b * b);
}

// Closed-form largest eigenvalue of a symmetric 3x3 matrix (trigonometric
// solution of the characteristic cubic).
inline double sym3_max_eigen(const double m[3][3]) {
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
  if (p1 == 0.0) return std::max({m[0][0], m[1][1], m[2][2]});
  const double p2 = (m[0][0] - q) * (m[0][0] - q) +
                    (m[1][1] - q) * (m[1][1] - q) +
                    (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  double bmat[3][3];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      bmat[r][c] = (m[r][c] - (r == c ? q : 0.0)) / p;
  const double detb =
      bmat[0][0] * (bmat[1][1] * bmat[2][2] - bmat[1][2] * bmat[2][1]) -
      bmat[0][1] * (bmat[1][0] * bmat[2][2] - bmat[1][2] * bmat[2][0]) +
      bmat[0][2] * (bmat[1][0] * bmat[2][1] - bmat[1][1] * bmat[2][0]);
  double r = detb / 2.0;
  r = std::max(-1.0, std::min(1.0, r));
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(phi);
}

// Time-sorted log from (src, dst) pairs at times 1..m, no features.
inline ctdg::EventLog log_from_edges(
    std::uint32_t n, const std::vector<std::pair<ctdg::NodeId, ctdg::NodeId>>& edges) {
  ctdg::EventLog log;
  log.node_count = n;
  log.feature_dim = 0;
  double t = 0.0;
  for (const auto& [a, b] : edges)
    log.events.push_back({a, b, t += 1.0, +1, {}});
  return log;
}

}  // namespace oracles
