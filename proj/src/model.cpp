#include "ctdg/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ctdg {

void ModelConfig::validate() const {
  if (layers < 0) throw std::invalid_argument("layers must be >= 0");
  if (hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
  if (!(norm_bound > 0.0)) throw std::invalid_argument("norm_bound must be > 0");
  if (!(activation_slope > 0.0 && activation_slope <= 1.0))
    throw std::invalid_argument("activation_slope must be in (0,1]");
  if (neighbor_k < 1) throw std::invalid_argument("neighbor_k must be >= 1");
}

bool ModelConfig::is_theorem_conformant() const {
  return theorem_mode && projection == Projection::kLinear &&
         memory == MemoryKind::kIdentity && norm_bound == 1.0 &&
         activation_slope > 0.0 && activation_slope <= 1.0;
}

ModelConfig ModelConfig::theorem_preset(int layers, std::size_t hidden_dim,
                                        Aggregator aggregator,
                                        bool use_edge_features) {
  ModelConfig c;
  c.layers = layers;
  c.hidden_dim = hidden_dim;
  c.aggregator = aggregator;
  c.memory = MemoryKind::kIdentity;
  c.projection = Projection::kLinear;
  c.activation = Activation::kLeakyRelu;
  c.activation_slope = 0.01;
  c.norm_bound = 1.0;
  c.use_edge_features = use_edge_features;
  c.theorem_mode = true;
  c.validate();
  return c;
}

namespace {

std::size_t memory_input_dim(const ModelConfig& config,
                             std::size_t feature_dim) {
  return 2 * config.hidden_dim + 1 + feature_dim;
}

void fill_xavier(std::vector<double>& values, std::size_t fan_in,
                 std::size_t fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : values) v = dist(rng);
}

}  // namespace

ModelParams init_params(const ModelConfig& config, std::size_t feature_dim,
                        std::uint64_t seed) {
  config.validate();
  const std::size_t h = config.hidden_dim;
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.layer_weights.resize(static_cast<std::size_t>(config.layers));
  for (auto& w : p.layer_weights) {
    w = DenseMatrix(h, h);
    fill_xavier(w.values, h, h, rng);
  }
  p.time_weight = DenseMatrix(h, h);
  fill_xavier(p.time_weight.values, h, h, rng);
  p.attn_vector.assign(2 * h, 0.0);
  fill_xavier(p.attn_vector, 2 * h, 1, rng);
  p.edge_weight.assign(feature_dim + 1, 0.0);
  fill_xavier(p.edge_weight, feature_dim + 1, 1, rng);
  const std::size_t min = memory_input_dim(config, feature_dim);
  p.memory.input_map = DenseMatrix(h, min);
  fill_xavier(p.memory.input_map.values, min, h, rng);
  p.memory.input_bias.assign(h, 0.0);
  if (config.memory == MemoryKind::kGated) {
    p.memory.gate_weights.assign(min, 0.0);
    fill_xavier(p.memory.gate_weights, min, 1, rng);
    p.memory.gate_bias.assign(1, 0.0);
  }
  p.decoder.hidden_map = DenseMatrix(h, 2 * h);
  fill_xavier(p.decoder.hidden_map.values, 2 * h, h, rng);
  p.decoder.hidden_bias.assign(h, 0.0);
  p.decoder.out_weights.assign(h, 0.0);
  fill_xavier(p.decoder.out_weights, h, 1, rng);
  p.decoder.out_bias.assign(1, 0.0);
  return p;
}

void for_each_param_block(
    ModelParams& params,
    const std::function<void(const std::string&, std::vector<double>&)>& fn) {
  for (std::size_t l = 0; l < params.layer_weights.size(); ++l)
    fn("layer_weights[" + std::to_string(l) + "]",
       params.layer_weights[l].values);
  fn("time_weight", params.time_weight.values);
  fn("attn_vector", params.attn_vector);
  fn("edge_weight", params.edge_weight);
  fn("memory.input_map", params.memory.input_map.values);
  fn("memory.input_bias", params.memory.input_bias);
  if (!params.memory.gate_weights.empty()) {
    fn("memory.gate_weights", params.memory.gate_weights);
    fn("memory.gate_bias", params.memory.gate_bias);
  }
  fn("decoder.hidden_map", params.decoder.hidden_map.values);
  fn("decoder.hidden_bias", params.decoder.hidden_bias);
  fn("decoder.out_weights", params.decoder.out_weights);
  fn("decoder.out_bias", params.decoder.out_bias);
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z = params;
  for_each_param_block(z, [](const std::string&, std::vector<double>& v) {
    std::fill(v.begin(), v.end(), 0.0);
  });
  return z;
}

NodeStateTable NodeStateTable::init(std::uint32_t node_count,
                                    std::size_t hidden_dim,
                                    double start_time) {
  NodeStateTable t;
  t.state.assign(node_count, DenseVector(hidden_dim, 0.0));
  t.last_update.assign(node_count, start_time);
  t.time_scale = 1.0;
  return t;
}

double activation_apply(Activation a, double slope, double x) {
  switch (a) {
    case Activation::kLeakyRelu:
      return x >= 0.0 ? x : slope * x;
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kTanh:
      return std::tanh(x);
  }
  return x;
}

double activation_deriv(Activation a, double slope, double x) {
  switch (a) {
    case Activation::kLeakyRelu:
      return x >= 0.0 ? 1.0 : slope;
    case Activation::kRelu:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

DenseVector activation_apply(Activation a, double slope,
                             std::span<const double> v) {
  DenseVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = activation_apply(a, slope, v[i]);
  return out;
}

double dt_norm_at(const NodeStateTable& states, NodeId u, double t,
                  const ModelConfig& config) {
  if (config.theorem_mode) return 1.0;
  const double raw = (t - states.last_update[u]) / states.time_scale;
  return std::clamp(raw, 0.0, 1.0);
}

DenseVector mem_update(const DenseVector& s_u, const DenseVector& s_v,
                       double dt_norm, std::span<const double> edge_features,
                       const ModelParams& params, const ModelConfig& config) {
  const std::size_t h = config.hidden_dim;
  if (s_u.size() != h || s_v.size() != h)
    throw std::invalid_argument("mem_update: state dimension mismatch");
  if (!(dt_norm >= 0.0))
    throw std::invalid_argument("mem_update: dt_norm must be >= 0");
  const DenseMatrix& m = params.memory.input_map;
  DenseVector input;
  input.reserve(2 * h + 1 + edge_features.size());
  input.insert(input.end(), s_u.begin(), s_u.end());
  input.insert(input.end(), s_v.begin(), s_v.end());
  input.push_back(dt_norm);
  input.insert(input.end(), edge_features.begin(), edge_features.end());
  if (input.size() != m.cols)
    throw std::invalid_argument("mem_update: edge feature dimension mismatch");
  DenseVector msg = matvec(m, input);
  axpy(1.0, params.memory.input_bias, msg);
  if (config.memory == MemoryKind::kIdentity)
    return norm_clip(msg, config.norm_bound);
  // gated: scalar sigmoid blend of old state and candidate message
  const double z = dot(params.memory.gate_weights, input) +
                   params.memory.gate_bias.at(0);
  const double gate = 1.0 / (1.0 + std::exp(-z));
  DenseVector blended(h);
  for (std::size_t i = 0; i < h; ++i)
    blended[i] = (1.0 - gate) * s_u[i] + gate * msg[i];
  return norm_clip(blended, config.norm_bound);
}

DenseVector temporal_project(const DenseVector& s_u, double dt_norm,
                             const ModelParams& params,
                             const ModelConfig& config) {
  if (!(dt_norm >= 0.0 && dt_norm <= 1.0))
    throw std::invalid_argument("temporal_project: dt_norm must be in [0,1]");
  if (config.projection == Projection::kNone) return s_u;
  DenseVector out = s_u;
  DenseVector drift = matvec(params.time_weight, s_u);
  axpy(dt_norm, drift, out);
  return norm_clip(out, config.norm_bound);
}

EventApplication apply_event(NodeStateTable& states, const EventRecord& event,
                             std::size_t event_index,
                             const ModelParams& params,
                             const ModelConfig& config) {
  const NodeId u = event.src;
  const NodeId v = event.dst;
  if (event.time < states.last_update[u] || event.time < states.last_update[v])
    throw std::invalid_argument("apply_event: time regression");
  std::vector<double> feats = event.features;
  if (event.sign < 0)
    for (double& f : feats) f = -f;

  double dt_u, dt_v;
  if (config.theorem_mode) {
    dt_u = dt_v = 1.0;
  } else {
    dt_u = std::clamp((event.time - states.last_update[u]) / states.time_scale,
                      0.0, 1.0);
    dt_v = std::clamp((event.time - states.last_update[v]) / states.time_scale,
                      0.0, 1.0);
  }
  DenseVector new_u = mem_update(states.state[u], states.state[v], dt_u, feats,
                                 params, config);
  DenseVector new_v = mem_update(states.state[v], states.state[u], dt_v, feats,
                                 params, config);
  EventApplication app;
  app.event_index = event_index;
  app.src = u;
  app.dst = v;
  DenseVector diff_u = new_u;
  axpy(-1.0, states.state[u], diff_u);
  DenseVector diff_v = new_v;
  axpy(-1.0, states.state[v], diff_v);
  app.delta_src = norm2(diff_u);
  app.delta_dst = norm2(diff_v);
  states.state[u] = std::move(new_u);
  states.state[v] = std::move(new_v);
  states.last_update[u] = event.time;
  states.last_update[v] = event.time;
  return app;
}

double DtPolicy::value(NodeId u, const NodeStateTable& states, double t,
                       const ModelConfig& config) const {
  if (kind == Kind::kElapsed) return dt_norm_at(states, u, t, config);
  for (const auto& [node, v] : overrides)
    if (node == u) return v;
  return fixed;
}

namespace {

double interaction_age(double attn_time, double event_time, double scale,
                       const ModelConfig& config) {
  if (config.theorem_mode) return 1.0;
  return std::clamp((attn_time - event_time) / scale, 0.0, 1.0);
}

ResolvedNeighborhood resolve_neighborhood(
    const ForwardSpec& spec, NodeId u, const ModelParams& params,
    const ModelConfig& config, const std::vector<std::size_t>& degree_memo) {
  const TemporalGraph& g = *spec.graph;
  ResolvedNeighborhood nb;
  auto partners = g.recent_distinct_partners(u, spec.snapshot, config.neighbor_k);
  const NodeStateTable& attn_states =
      spec.attn_states != nullptr ? *spec.attn_states : *spec.states;
  const double attn_time =
      std::isnan(spec.attn_time) ? spec.time : spec.attn_time;
  nb.nodes.reserve(partners.size());
  for (const NeighborEntry& e : partners) {
    nb.nodes.push_back(e.node);
    nb.event_index.push_back(e.event_index);
    nb.age.push_back(interaction_age(attn_time, e.time, attn_states.time_scale,
                                     config));
  }
  if (config.aggregator == Aggregator::kGcn) {
    const double cu = 1.0 / std::sqrt(1.0 + static_cast<double>(degree_memo[u]));
    nb.self_coef = cu * cu;
    nb.gcn_coef.reserve(nb.nodes.size());
    for (NodeId v : nb.nodes)
      nb.gcn_coef.push_back(
          cu / std::sqrt(1.0 + static_cast<double>(degree_memo[v])));
  } else if (!nb.nodes.empty()) {
    const DenseVector& su = attn_states.state[u];
    const std::size_t h = config.hidden_dim;
    nb.logit_pre.resize(nb.nodes.size());
    for (std::size_t j = 0; j < nb.nodes.size(); ++j) {
      const DenseVector& sj = attn_states.state[nb.nodes[j]];
      double pre = 0.0;
      for (std::size_t i = 0; i < h; ++i) pre += params.attn_vector[i] * su[i];
      for (std::size_t i = 0; i < h; ++i)
        pre += params.attn_vector[h + i] * sj[i];
      if (config.use_edge_features) {
        const std::vector<double> feats =
            g.log().effective_features(nb.event_index[j]);
        for (std::size_t i = 0; i < feats.size(); ++i)
          pre += params.edge_weight[i] * feats[i];
        pre += params.edge_weight[feats.size()] * nb.age[j];
      }
      nb.logit_pre[j] = pre;
    }
    DenseVector logits(nb.logit_pre.size());
    for (std::size_t j = 0; j < logits.size(); ++j)
      logits[j] = activation_apply(Activation::kLeakyRelu, kAttnLogitSlope,
                                   nb.logit_pre[j]);
    nb.alphas = softmax(logits);
  }
  return nb;
}

}  // namespace

std::vector<DenseVector> forward(const ForwardSpec& spec,
                                 std::span<const NodeId> targets,
                                 const ModelParams& params,
                                 const ModelConfig& config,
                                 ForwardTape* tape) {
  config.validate();
  const TemporalGraph& g = *spec.graph;
  const NodeStateTable& states = *spec.states;
  const int L = config.layers;

  ForwardTape local;
  ForwardTape& tp = tape != nullptr ? *tape : local;
  tp = ForwardTape{};
  tp.layers = L;
  tp.need.resize(L + 1);
  tp.index.resize(L + 1);

  // need[L] = unique targets; need[l-1] adds each node's resolved partners.
  auto add_node = [&tp](int l, NodeId u) {
    auto [it, inserted] = tp.index[l].try_emplace(u, tp.need[l].size());
    if (inserted) tp.need[l].push_back(u);
    (void)it;
  };
  for (NodeId u : targets) add_node(L, u);

  // Degrees are only needed for GCN coefficients; memoized over all nodes.
  std::vector<std::size_t> degree_memo;
  if (config.aggregator == Aggregator::kGcn)
    degree_memo = g.degrees(spec.snapshot);

  for (int l = L; l >= 1; --l) {
    for (NodeId u : tp.need[l]) {
      if (!tp.nbhd.contains(u))
        tp.nbhd.emplace(u,
                        resolve_neighborhood(spec, u, params, config, degree_memo));
    }
    for (std::size_t i = 0; i < tp.need[l].size(); ++i) {
      const NodeId u = tp.need[l][i];
      add_node(l - 1, u);
      for (NodeId v : tp.nbhd.at(u).nodes) add_node(l - 1, v);
    }
  }

  // layer 0: temporal projection of memory states
  tp.h.assign(L + 1, {});
  tp.preact.assign(L + 1, {});
  tp.h[0].resize(tp.need[0].size());
  tp.dt.resize(tp.need[0].size());
  tp.pre_clip.resize(tp.need[0].size());
  tp.pre_clip_norm.resize(tp.need[0].size());
  tp.clip_active.assign(tp.need[0].size(), 0);
  for (std::size_t i = 0; i < tp.need[0].size(); ++i) {
    const NodeId u = tp.need[0][i];
    const double dtv = spec.dt.value(u, states, spec.time, config);
    tp.dt[i] = dtv;
    DenseVector x = states.state[u];
    if (config.projection == Projection::kLinear) {
      DenseVector drift = matvec(params.time_weight, states.state[u]);
      axpy(dtv, drift, x);
    }
    const double n = norm2(x);
    tp.pre_clip[i] = x;
    tp.pre_clip_norm[i] = n;
    if (n > config.norm_bound) {
      tp.clip_active[i] = 1;
      const double sc = config.norm_bound / n;
      for (double& e : x) e *= sc;
    }
    tp.h[0][i] = std::move(x);
  }

  tp.wh.assign(L + 1, {});
  for (int l = 1; l <= L; ++l) {
    const DenseMatrix& W = params.layer_weights[l - 1];
    // cache W h^(l-1) for every contributing node
    std::vector<DenseVector>& wh = tp.wh[l];
    wh.resize(tp.need[l - 1].size());
    for (std::size_t i = 0; i < tp.need[l - 1].size(); ++i)
      wh[i] = matvec(W, tp.h[l - 1][i]);
    tp.h[l].resize(tp.need[l].size());
    tp.preact[l].resize(tp.need[l].size());
    for (std::size_t i = 0; i < tp.need[l].size(); ++i) {
      const NodeId u = tp.need[l][i];
      const ResolvedNeighborhood& nb = tp.nbhd.at(u);
      const std::size_t self_idx = tp.index[l - 1].at(u);
      DenseVector a(config.hidden_dim, 0.0);
      if (config.aggregator == Aggregator::kGcn) {
        axpy(nb.self_coef, wh[self_idx], a);
        for (std::size_t j = 0; j < nb.nodes.size(); ++j)
          axpy(nb.gcn_coef[j], wh[tp.index[l - 1].at(nb.nodes[j])], a);
      } else if (nb.nodes.empty()) {
        // empty neighborhood keeps the self term only
        axpy(1.0, wh[self_idx], a);
      } else {
        for (std::size_t j = 0; j < nb.nodes.size(); ++j)
          axpy(nb.alphas[j], wh[tp.index[l - 1].at(nb.nodes[j])], a);
      }
      tp.preact[l][i] = a;
      tp.h[l][i] = activation_apply(config.activation, config.activation_slope,
                                    std::span<const double>(a));
    }
  }

  std::vector<DenseVector> out;
  out.reserve(targets.size());
  for (NodeId u : targets) out.push_back(tp.h[L][tp.index[L].at(u)]);
  return out;
}

std::vector<DenseVector> embed(const TemporalGraph& graph, double t,
                               const ModelParams& params,
                               const ModelConfig& config,
                               const NodeStateTable& states) {
  ForwardSpec spec;
  spec.graph = &graph;
  spec.snapshot = graph.snapshot_at(t);
  spec.time = t;
  spec.states = &states;
  spec.dt = DtPolicy::elapsed();
  std::vector<NodeId> all(graph.node_count());
  for (NodeId u = 0; u < graph.node_count(); ++u) all[u] = u;
  return forward(spec, all, params, config);
}

namespace {

// Single-layer application over full rep tables; shared by the two public
// layer entry points.
std::vector<DenseVector> apply_layer(const TemporalGraph& graph, double t,
                                     const std::vector<DenseVector>& reps,
                                     const NodeStateTable* states,
                                     int layer_idx, const ModelParams& params,
                                     const ModelConfig& config) {
  if (reps.size() != graph.node_count())
    throw std::invalid_argument("layer: one rep per node required");
  if (layer_idx < 0 ||
      layer_idx >= static_cast<int>(params.layer_weights.size()))
    throw std::invalid_argument("layer: layer_idx out of range");
  const DenseMatrix& W = params.layer_weights[layer_idx];
  TemporalGraph::Snapshot snap = graph.snapshot_at(t);
  std::vector<std::size_t> deg;
  if (config.aggregator == Aggregator::kGcn) deg = graph.degrees(snap);

  ForwardSpec spec;
  spec.graph = &graph;
  spec.snapshot = snap;
  spec.time = t;
  spec.states = states;

  std::vector<DenseVector> out(reps.size());
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    ResolvedNeighborhood nb =
        resolve_neighborhood(spec, u, params, config, deg);
    DenseVector a(config.hidden_dim, 0.0);
    if (config.aggregator == Aggregator::kGcn) {
      DenseVector self = matvec(W, reps[u]);
      axpy(nb.self_coef, self, a);
      for (std::size_t j = 0; j < nb.nodes.size(); ++j) {
        DenseVector wh = matvec(W, reps[nb.nodes[j]]);
        axpy(nb.gcn_coef[j], wh, a);
      }
    } else if (nb.nodes.empty()) {
      DenseVector self = matvec(W, reps[u]);
      axpy(1.0, self, a);
    } else {
      for (std::size_t j = 0; j < nb.nodes.size(); ++j) {
        DenseVector wh = matvec(W, reps[nb.nodes[j]]);
        axpy(nb.alphas[j], wh, a);
      }
    }
    out[u] = activation_apply(config.activation, config.activation_slope,
                              std::span<const double>(a));
  }
  return out;
}

}  // namespace

std::vector<DenseVector> gcn_layer(const TemporalGraph& graph, double t,
                                   const std::vector<DenseVector>& reps,
                                   int layer_idx, const ModelParams& params,
                                   const ModelConfig& config) {
  ModelConfig c = config;
  c.aggregator = Aggregator::kGcn;
  return apply_layer(graph, t, reps, nullptr, layer_idx, params, c);
}

std::vector<DenseVector> attention_layer(const TemporalGraph& graph, double t,
                                         const std::vector<DenseVector>& reps,
                                         const NodeStateTable& states,
                                         int layer_idx,
                                         const ModelParams& params,
                                         const ModelConfig& config) {
  ModelConfig c = config;
  c.aggregator = Aggregator::kAttention;
  return apply_layer(graph, t, reps, &states, layer_idx, params, c);
}

DenseVector attention_alphas(const TemporalGraph& graph, double t, NodeId u,
                             const NodeStateTable& states,
                             const ModelParams& params,
                             const ModelConfig& config) {
  ForwardSpec spec;
  spec.graph = &graph;
  spec.snapshot = graph.snapshot_at(t);
  spec.time = t;
  spec.states = &states;
  ModelConfig c = config;
  c.aggregator = Aggregator::kAttention;
  std::vector<std::size_t> deg;
  ResolvedNeighborhood nb = resolve_neighborhood(spec, u, params, c, deg);
  return nb.alphas;
}

double decoder_logit(std::span<const double> h_u, std::span<const double> h_v,
                     const ModelParams& params, const ModelConfig& config) {
  const DenseMatrix& W1 = params.decoder.hidden_map;
  if (h_u.size() + h_v.size() != W1.cols)
    throw std::invalid_argument("decoder_logit: dimension mismatch");
  DenseVector z;
  z.reserve(W1.cols);
  z.insert(z.end(), h_u.begin(), h_u.end());
  z.insert(z.end(), h_v.begin(), h_v.end());
  DenseVector d1 = matvec(W1, z);
  axpy(1.0, params.decoder.hidden_bias, d1);
  for (double& x : d1)
    x = activation_apply(config.activation, config.activation_slope, x);
  return dot(params.decoder.out_weights, d1) + params.decoder.out_bias.at(0);
}

}  // namespace ctdg
