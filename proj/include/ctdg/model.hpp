#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctdg/events.hpp"
#include "ctdg/linalg.hpp"
#include "ctdg/temporal_graph.hpp"

namespace ctdg {

enum class Aggregator { kGcn, kAttention };
enum class MemoryKind { kIdentity, kGated };
enum class Projection { kNone, kLinear };
enum class Activation { kLeakyRelu, kRelu, kTanh };

// Slope of the LeakyReLU applied to attention logits (distinct from the
// model activation).
inline constexpr double kAttnLogitSlope = 0.2;

struct ModelConfig {
  // layers = 0 expresses the projection-only ablation (no message passing).
  int layers = 1;
  std::size_t hidden_dim = 16;
  Aggregator aggregator = Aggregator::kGcn;
  MemoryKind memory = MemoryKind::kIdentity;
  Projection projection = Projection::kLinear;
  Activation activation = Activation::kLeakyRelu;
  double activation_slope = 0.01;
  double norm_bound = 1.0;  // B
  std::size_t neighbor_k = 10;
  bool use_edge_features = false;
  // Matches the assumptions behind the flow upper bounds: linear projection,
  // identity memory, B = 1, unit-normalized time steps, and (for flow
  // measurement) aggregation structure frozen across the event.
  bool theorem_mode = false;

  void validate() const;
  bool is_theorem_conformant() const;
  static ModelConfig theorem_preset(int layers, std::size_t hidden_dim,
                                    Aggregator aggregator,
                                    bool use_edge_features);
};

struct MemoryParams {
  DenseMatrix input_map;     // hidden x (2*hidden + 1 + feature_dim)
  DenseVector input_bias;    // hidden
  DenseVector gate_weights;  // gated only: 2*hidden + 1 + feature_dim
  DenseVector gate_bias;     // gated only: length 1
};

struct DecoderParams {
  DenseMatrix hidden_map;  // hidden x (2*hidden)
  DenseVector hidden_bias;
  DenseVector out_weights;  // hidden
  DenseVector out_bias;     // length 1
};

struct ModelParams {
  std::vector<DenseMatrix> layer_weights;  // W^(1..L), hidden x hidden
  DenseMatrix time_weight;                 // W_t
  DenseVector attn_vector;                 // w, length 2*hidden
  DenseVector edge_weight;                 // w_2, length feature_dim + 1
  MemoryParams memory;
  DecoderParams decoder;
};

// Xavier-uniform entries, deterministic in (config, feature_dim, seed).
ModelParams init_params(const ModelConfig& config, std::size_t feature_dim,
                        std::uint64_t seed);

// Visits every parameter block in a fixed order; the same traversal drives
// the optimizer, the save/load container, and the finite-difference checks.
void for_each_param_block(
    ModelParams& params,
    const std::function<void(const std::string&, std::vector<double>&)>& fn);
ModelParams zeros_like(const ModelParams& params);

struct NodeStateTable {
  std::vector<DenseVector> state;
  std::vector<double> last_update;
  double time_scale = 1.0;

  static NodeStateTable init(std::uint32_t node_count, std::size_t hidden_dim,
                             double start_time = 0.0);
};

double activation_apply(Activation a, double slope, double x);
double activation_deriv(Activation a, double slope, double x);
DenseVector activation_apply(Activation a, double slope,
                             std::span<const double> v);

// Per-node normalized elapsed time, clamped to [0,1]; forced to 1 in
// theorem mode.
double dt_norm_at(const NodeStateTable& states, NodeId u, double t,
                  const ModelConfig& config);

DenseVector mem_update(const DenseVector& s_u, const DenseVector& s_v,
                       double dt_norm, std::span<const double> edge_features,
                       const ModelParams& params, const ModelConfig& config);

DenseVector temporal_project(const DenseVector& s_u, double dt_norm,
                             const ModelParams& params,
                             const ModelConfig& config);

struct EventApplication {
  std::size_t event_index = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double delta_src = 0.0;  // ||s'_src - s_src||
  double delta_dst = 0.0;
};

// Stage (i) of the two-stage update: both endpoints re-memorized from their
// pre-event states, everything else untouched.
EventApplication apply_event(NodeStateTable& states, const EventRecord& event,
                             std::size_t event_index,
                             const ModelParams& params,
                             const ModelConfig& config);

// --- forward machinery -----------------------------------------------------

struct DtPolicy {
  enum class Kind { kElapsed, kFixed };
  Kind kind = Kind::kElapsed;
  double fixed = 1.0;
  std::vector<std::pair<NodeId, double>> overrides;

  double value(NodeId u, const NodeStateTable& states, double t,
               const ModelConfig& config) const;
  static DtPolicy elapsed() { return {}; }
  static DtPolicy fixed_value(double v) {
    return {Kind::kFixed, v, {}};
  }
};

struct ForwardSpec {
  const TemporalGraph* graph = nullptr;
  TemporalGraph::Snapshot snapshot;
  double time = 0.0;
  const NodeStateTable* states = nullptr;
  DtPolicy dt;
  // Attention logits read these; default to `states`/`time`. Theorem-mode
  // flow passes the pre-event pair to keep coefficients static.
  const NodeStateTable* attn_states = nullptr;
  double attn_time = std::numeric_limits<double>::quiet_NaN();
};

struct ResolvedNeighborhood {
  std::vector<NodeId> nodes;  // distinct partners, newest first
  std::vector<std::size_t> event_index;
  std::vector<double> age;       // normalized interaction age
  std::vector<double> gcn_coef;  // 1/sqrt((1+deg u)(1+deg v))
  double self_coef = 0.0;        // 1/(1+deg u)
  DenseVector logit_pre;         // attention: pre-nonlinearity logits
  DenseVector alphas;
};

struct ForwardTape {
  int layers = 0;
  std::vector<std::vector<NodeId>> need;  // [0..L]
  std::vector<std::unordered_map<NodeId, std::size_t>> index;
  // layer 0, aligned with need[0]
  std::vector<double> dt;
  std::vector<DenseVector> pre_clip;
  std::vector<double> pre_clip_norm;
  std::vector<char> clip_active;
  std::unordered_map<NodeId, ResolvedNeighborhood> nbhd;
  std::vector<std::vector<DenseVector>> h;       // [l], aligned with need[l]
  std::vector<std::vector<DenseVector>> preact;  // [l >= 1]
  std::vector<std::vector<DenseVector>> wh;      // [l >= 1], aligned with need[l-1]
};

// Computes h^(L) for the requested targets; tape is optional and records
// everything the reverse pass needs.
std::vector<DenseVector> forward(const ForwardSpec& spec,
                                 std::span<const NodeId> targets,
                                 const ModelParams& params,
                                 const ModelConfig& config,
                                 ForwardTape* tape = nullptr);

// f_u(G_t) for all nodes: temporal projection into L aggregation layers.
std::vector<DenseVector> embed(const TemporalGraph& graph, double t,
                               const ModelParams& params,
                               const ModelConfig& config,
                               const NodeStateTable& states);

std::vector<DenseVector> gcn_layer(const TemporalGraph& graph, double t,
                                   const std::vector<DenseVector>& reps,
                                   int layer_idx, const ModelParams& params,
                                   const ModelConfig& config);

std::vector<DenseVector> attention_layer(const TemporalGraph& graph, double t,
                                         const std::vector<DenseVector>& reps,
                                         const NodeStateTable& states,
                                         int layer_idx,
                                         const ModelParams& params,
                                         const ModelConfig& config);

// Attention weights over u's truncated neighborhood at t (empty when the
// neighborhood is empty).
DenseVector attention_alphas(const TemporalGraph& graph, double t, NodeId u,
                             const NodeStateTable& states,
                             const ModelParams& params,
                             const ModelConfig& config);

// Link-prediction head: two affine maps around a 1-Lipschitz activation.
double decoder_logit(std::span<const double> h_u, std::span<const double> h_v,
                     const ModelParams& params, const ModelConfig& config);

}  // namespace ctdg
