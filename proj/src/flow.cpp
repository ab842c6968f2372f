#include "ctdg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>

#include "ctdg/fingerprint.hpp"

namespace ctdg {

namespace {

std::vector<NodeId> all_nodes(const TemporalGraph& g) {
  std::vector<NodeId> nodes(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) nodes[u] = u;
  return nodes;
}

struct PrePost {
  std::vector<DenseVector> pre;
  std::vector<DenseVector> post;
  EventApplication application;
  NodeStateTable post_states;
  TemporalGraph::Snapshot pre_snapshot;
};

PrePost embed_around_event(const TemporalGraph& g, std::size_t event_index,
                           std::span<const NodeId> targets,
                           const ModelParams& params,
                           const ModelConfig& config,
                           const NodeStateTable& states_before) {
  const EventLog& log = g.log();
  if (event_index >= log.events.size())
    throw std::out_of_range("event index out of range");
  const EventRecord& event = log.events[event_index];

  PrePost out;
  out.pre_snapshot = g.snapshot_before_event(event_index);

  ForwardSpec pre_spec;
  pre_spec.graph = &g;
  pre_spec.snapshot = out.pre_snapshot;
  pre_spec.time = event.time;
  pre_spec.states = &states_before;
  pre_spec.dt = config.theorem_mode ? DtPolicy::fixed_value(0.0)
                                    : DtPolicy::elapsed();
  out.pre = forward(pre_spec, targets, params, config);

  out.post_states = states_before;
  out.application =
      apply_event(out.post_states, event, event_index, params, config);

  ForwardSpec post_spec;
  post_spec.graph = &g;
  post_spec.time = event.time;
  post_spec.states = &out.post_states;
  if (config.theorem_mode) {
    // Structure and attention coefficients stay at the pre-event snapshot;
    // one unit of normalized time passes for uninvolved nodes.
    post_spec.snapshot = out.pre_snapshot;
    post_spec.dt = DtPolicy::fixed_value(1.0);
    post_spec.dt.overrides = {{event.src, 0.0}, {event.dst, 0.0}};
    post_spec.attn_states = &states_before;
    post_spec.attn_time = event.time;
  } else {
    post_spec.snapshot = g.snapshot_before_event(event_index + 1);
    post_spec.dt = DtPolicy::elapsed();
  }
  out.post = forward(post_spec, targets, params, config);
  return out;
}

}  // namespace

FlowOutcome empirical_flow_detailed(const TemporalGraph& graph,
                                    std::size_t event_index,
                                    const ModelParams& params,
                                    const ModelConfig& config,
                                    const NodeStateTable& states_before) {
  const std::vector<NodeId> targets = all_nodes(graph);
  PrePost pp = embed_around_event(graph, event_index, targets, params, config,
                                  states_before);
  const EventRecord& event = graph.log().events[event_index];

  FlowOutcome out;
  out.application = pp.application;
  FlowReport& rep = out.report;
  rep.event_index = event_index;
  rep.displacement.resize(graph.node_count());
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    DenseVector diff = pp.post[u];
    axpy(-1.0, pp.pre[u], diff);
    rep.displacement[u] = norm2(diff);
  }
  const NodeId endpoints[2] = {event.src, event.dst};
  rep.hop = graph.distances_from(endpoints, pp.pre_snapshot);

  std::map<std::size_t, FlowBucket> buckets;
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    FlowBucket& b = buckets[rep.hop[u]];
    b.hop = rep.hop[u];
    b.mean_disp += rep.displacement[u];
    b.max_disp = std::max(b.max_disp, rep.displacement[u]);
    b.count += 1;
  }
  for (auto& [hop, b] : buckets) {
    b.mean_disp /= static_cast<double>(b.count);
    rep.buckets.push_back(b);
  }
  return out;
}

FlowReport empirical_flow(const TemporalGraph& graph, std::size_t event_index,
                          const ModelParams& params, const ModelConfig& config,
                          const NodeStateTable& states_before) {
  return empirical_flow_detailed(graph, event_index, params, config,
                                 states_before)
      .report;
}

std::vector<ProfileRow> flow_profile(
    const EventLog& log, const ModelConfig& base_config,
    const std::vector<std::pair<int, ModelParams>>& params_by_layers,
    std::size_t max_events) {
  TemporalGraph graph = TemporalGraph::build(log);
  const std::size_t m = log.events.size();
  if (m == 0) throw std::invalid_argument("flow_profile: empty stream");
  // When a cap is set, measure an evenly strided subset but replay everything.
  std::size_t stride = 1;
  if (max_events > 0 && max_events < m)
    stride = (m + max_events - 1) / max_events;

  std::vector<ProfileRow> rows;
  for (const auto& [layers, params] : params_by_layers) {
    ModelConfig config = base_config;
    config.layers = layers;
    config.validate();
    NodeStateTable states =
        NodeStateTable::init(log.node_count, config.hidden_dim);
    states.time_scale = time_scale_p95(log);

    struct Acc {
      double sum = 0.0;
      double max = 0.0;
      std::size_t count = 0;
    };
    std::map<std::size_t, Acc> acc;
    for (std::size_t e = 0; e < m; ++e) {
      if (e % stride == 0) {
        FlowOutcome out =
            empirical_flow_detailed(graph, e, params, config, states);
        for (NodeId u = 0; u < log.node_count; ++u) {
          Acc& a = acc[out.report.hop[u]];
          a.sum += out.report.displacement[u];
          a.max = std::max(a.max, out.report.displacement[u]);
          a.count += 1;
        }
      }
      apply_event(states, log.events[e], e, params, config);
    }

    double max_mean = 0.0;
    for (const auto& [hop, a] : acc)
      max_mean = std::max(max_mean, a.sum / static_cast<double>(a.count));
    for (const auto& [hop, a] : acc) {
      ProfileRow row;
      row.layers = layers;
      row.hop = hop == TemporalGraph::kUnreachable
                    ? -1
                    : static_cast<long long>(hop);
      row.mean_disp = a.sum / static_cast<double>(a.count);
      row.max_disp = a.max;
      row.normalized_mean = max_mean > 0.0 ? row.mean_disp / max_mean : 0.0;
      row.count = a.count;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_profile_csv(const std::vector<ProfileRow>& rows,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "L,hop_distance,mean_disp,max_disp,normalized_mean,count\n";
  char buf[96];
  for (const ProfileRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%lld,%.17g,%.17g,%.17g,%zu", r.layers,
                  r.hop, r.mean_disp, r.max_disp, r.normalized_mean, r.count);
    out << buf << "\n";
  }
}

double expected_flow(const EventLog& log, const ModelParams& params,
                     const ModelConfig& config, std::size_t samples,
                     std::uint64_t seed) {
  if (log.events.empty()) throw std::invalid_argument("expected_flow: empty stream");
  if (samples < 1) throw std::invalid_argument("expected_flow: samples must be >= 1");
  TemporalGraph graph = TemporalGraph::build(log);
  const std::size_t m = log.events.size();
  const std::size_t n = log.node_count;
  const std::size_t total_pairs = m * n;

  // (event, node) sample multiset, grouped by event so the stream replays once
  std::vector<std::vector<NodeId>> picks(m);
  if (samples >= total_pairs) {
    for (std::size_t e = 0; e < m; ++e) {
      picks[e].resize(n);
      for (NodeId u = 0; u < n; ++u) picks[e][u] = u;
    }
    samples = total_pairs;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pair_dist(0, total_pairs - 1);
    for (std::size_t s = 0; s < samples; ++s) {
      const std::size_t pick = pair_dist(rng);
      picks[pick / n].push_back(static_cast<NodeId>(pick % n));
    }
  }

  NodeStateTable states = NodeStateTable::init(log.node_count, config.hidden_dim);
  states.time_scale = time_scale_p95(log);
  double sum = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    if (!picks[e].empty()) {
      PrePost pp = embed_around_event(graph, e, picks[e], params, config, states);
      for (std::size_t i = 0; i < picks[e].size(); ++i) {
        DenseVector diff = pp.post[i];
        axpy(-1.0, pp.pre[i], diff);
        sum += norm2(diff);
      }
    }
    apply_event(states, log.events[e], e, params, config);
  }
  return sum / static_cast<double>(samples);
}

}  // namespace ctdg
