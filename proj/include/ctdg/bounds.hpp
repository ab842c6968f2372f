#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctdg/flow.hpp"
#include "ctdg/model.hpp"

namespace ctdg {

enum class BoundCase { kNear, kFar };  // near: L >= d(u,i)

// GCN-aggregation flow bound.
//   far:  walk_sum * ||W_t|| * prod ||W^(l)||
//   near: prod ||W^(l)|| * (walk_sum * ||W_t|| + pair_weight * mem_delta)
double gcn_bound(BoundCase c, double walk_sum, double pair_weight,
                 std::span<const double> layer_norms, double time_norm,
                 double mem_delta);

struct EdgeTerm {
  double weight_norm = 0.0;  // ||w_2||
  double feat_sq = 0.0;      // ||e||^2
  double dt_sq = 1.0;        // unit-normalized step
};

// Attention-aggregation flow bound.
//   far:  deg(u) * (||W_t|| + B ||W_t||^2)  [+ edge augmentation]
//   near: far + mem_delta
double attention_bound(BoundCase c, double degree, double time_norm,
                       double cap, double mem_delta,
                       const std::optional<EdgeTerm>& edge_term);

// Inputs shared by every node's bound for one event.
struct BoundInputs {
  TemporalGraph::Snapshot snapshot;  // pre-event
  std::vector<double> layer_norms;
  double time_norm = 0.0;
  DenseVector walk_sums;             // (Â^L 1)_u for all u
  DenseVector pair_weight_src;       // (Â^L e_src)_u
  DenseVector pair_weight_dst;
  std::vector<std::size_t> dist_src;
  std::vector<std::size_t> dist_dst;
  std::vector<std::size_t> degree;
  std::optional<EdgeTerm> edge_term;
};

BoundInputs prepare_bound_inputs(const TemporalGraph& graph,
                                 const EventApplication& application,
                                 const ModelParams& params,
                                 const ModelConfig& config);

struct BoundEvaluation {
  bool covered = false;  // endpoints are outside the theorems' scope
  BoundCase case_tag = BoundCase::kFar;
  std::size_t distance = 0;  // to the nearest endpoint
  double gamma = 0.0;
};

// Two-endpoint events: per-endpoint near/far contributions are summed.
BoundEvaluation bound_for(NodeId u, const EventApplication& application,
                          const BoundInputs& inputs, const ModelConfig& config);
BoundEvaluation bound_for(const TemporalGraph& graph,
                          const EventApplication& application, NodeId u,
                          const ModelParams& params, const ModelConfig& config);

// flow > gamma * (1 + 1e-9) + 1e-12
bool is_violation(double gamma, double flow);

enum class GraphFamily { kMixed, kErdosRenyi, kStar, kPath, kBarbell, kSbm };

struct VerifySpec {
  std::size_t trials = 1000;
  GraphFamily family = GraphFamily::kMixed;
  ModelConfig config;  // must be theorem-conformant
  std::uint64_t seed = 0;
  std::uint32_t max_nodes = 50;
  double gamma_scale = 1.0;  // test hook: scales every gamma before checking
  int threads = 0;           // 0 = auto; CTDG_FLOW_THREADS caps
  bool keep_records = true;
};

struct BoundRecord {
  std::size_t trial = 0;
  std::size_t event_index = 0;
  NodeId node = 0;
  BoundCase case_tag = BoundCase::kFar;
  double gamma = 0.0;
  double flow = 0.0;
  double gap = 0.0;
};

struct CaseStats {
  std::size_t count = 0;
  std::size_t violations = 0;
  double min_gap = 0.0;
  double median_gap = 0.0;
  // log10(gamma - flow) at probes {5, 25, 50, 75, 95}%
  std::array<double, 5> log10_gap_quantiles{};
};

struct BoundReport {
  std::size_t trials = 0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  CaseStats near_stats;
  CaseStats far_stats;
  std::vector<BoundRecord> records;

  std::string to_json() const;
  void write_records_csv(const std::filesystem::path& path) const;
};

// Fuzz verification: random graph, random theorem-mode params, random
// event; empirical flow compared against the closed-form bound for every
// uninvolved node. Deterministic in the seed regardless of thread count.
BoundReport verify_bounds(const VerifySpec& spec);

}  // namespace ctdg
