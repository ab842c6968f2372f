#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ctdg {

using NodeId = std::uint32_t;

// One timestamped interaction. Removals are modeled as reverse-signal
// additions (sign = -1): the edge stays in the topology, the feature
// vector is negated wherever features are consumed.
struct EventRecord {
  NodeId src = 0;
  NodeId dst = 0;
  double time = 0.0;
  int sign = +1;
  std::vector<double> features;
};

struct EventLog {
  std::uint32_t node_count = 0;
  std::size_t feature_dim = 0;
  std::vector<EventRecord> events;

  // Throws std::invalid_argument with the offending event index when any
  // invariant fails (ordering, bounds, self-events, signs, feature dims).
  void validate() const;

  // Event CSV, header `src,dst,time,sign,f0,...,f{D-1}`. Parse errors carry
  // the 1-based line number.
  static EventLog load_csv(const std::filesystem::path& path);
  void save_csv(const std::filesystem::path& path) const;

  // Event features with the removal convention applied (sign -1 negates).
  std::vector<double> effective_features(std::size_t event_index) const;
};

// Log-wide time-normalization scale: 95th percentile of inter-event gaps,
// falling back to the max gap and then 1.0 when degenerate.
double time_scale_p95(const EventLog& log);

}  // namespace ctdg
