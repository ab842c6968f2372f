#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ctdg/model.hpp"
#include "ctdg/temporal_graph.hpp"

namespace ctdg {

struct FlowBucket {
  std::size_t hop = 0;  // TemporalGraph::kUnreachable groups disconnected nodes
  double mean_disp = 0.0;
  double max_disp = 0.0;
  std::size_t count = 0;
};

struct FlowReport {
  std::size_t event_index = 0;
  std::vector<double> displacement;  // d_Y(f_u(G_{t+1}), f_u(G_t)) per node
  std::vector<std::size_t> hop;      // distance to nearest event endpoint
  std::vector<FlowBucket> buckets;
};

struct FlowOutcome {
  FlowReport report;
  EventApplication application;
};

// Embedding displacement induced by one event. The pre-event embedding uses
// the graph without the event and states at t-; the post-event embedding
// uses updated endpoint memories and, outside theorem mode, the inserted
// edge. In theorem mode the aggregation structure and attention coefficients
// stay frozen at the pre-event snapshot and one unit of normalized time
// elapses for uninvolved nodes.
FlowOutcome empirical_flow_detailed(const TemporalGraph& graph,
                                    std::size_t event_index,
                                    const ModelParams& params,
                                    const ModelConfig& config,
                                    const NodeStateTable& states_before);
FlowReport empirical_flow(const TemporalGraph& graph, std::size_t event_index,
                          const ModelParams& params, const ModelConfig& config,
                          const NodeStateTable& states_before);

struct ProfileRow {
  int layers = 0;
  long long hop = 0;  // -1 encodes the disconnected bucket
  double mean_disp = 0.0;
  double max_disp = 0.0;
  double normalized_mean = 0.0;  // mean / max bucket mean within the block
  std::size_t count = 0;
};

// Streams the log once per layer setting (replaying memory with that
// setting's params) and aggregates displacement by hop distance. Every
// config entry must match base_config except for the layer count.
std::vector<ProfileRow> flow_profile(
    const EventLog& log, const ModelConfig& base_config,
    const std::vector<std::pair<int, ModelParams>>& params_by_layers,
    std::size_t max_events = 0);

void write_profile_csv(const std::vector<ProfileRow>& rows,
                       const std::filesystem::path& path);

// Monte-Carlo estimate of the flow quantity E[d_Y] over uniformly sampled
// (event, node) pairs; exact enumeration when samples covers all pairs.
double expected_flow(const EventLog& log, const ModelParams& params,
                     const ModelConfig& config, std::size_t samples,
                     std::uint64_t seed);

}  // namespace ctdg
