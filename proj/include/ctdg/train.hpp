#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctdg/model.hpp"
#include "ctdg/synth.hpp"
#include "ctdg/temporal_graph.hpp"

namespace ctdg {

enum class NegativeMode { kUniform, kBipartite };

// Uniform draws over valid destinations, excluding the event's endpoints
// (bipartite mode restricts to the item side).
std::vector<NodeId> negative_sample(const EventLog& log,
                                    const EventRecord& event,
                                    std::size_t n_neg, std::mt19937_64& rng,
                                    NegativeMode mode, NodeId first_item = 0);

// mean(-log sigmoid(pos)) + mean(-log(1 - sigmoid(neg))), numerically stable.
double bce_loss(std::span<const double> pos_logits,
                std::span<const double> neg_logits);

struct TrainExample {
  std::size_t event_index = 0;
  std::vector<NodeId> negatives;
};

// Prediction context for one batch: everything is read as of the batch
// start (pre-batch snapshot and states), per the predict-then-apply staging.
struct BatchContext {
  const TemporalGraph* graph = nullptr;
  TemporalGraph::Snapshot snapshot;
  double time = 0.0;
  const NodeStateTable* states = nullptr;
};

struct BatchResult {
  double loss = 0.0;
  ModelParams grads;  // congruent with ModelParams
};

// Exact reverse-mode gradients of the batch BCE loss with respect to every
// parameter block. Stored memory states are treated as constants (truncated
// credit assignment), so memory-map blocks carry zero gradient.
BatchResult grad(const ModelParams& params,
                 const std::vector<TrainExample>& batch,
                 const BatchContext& context, const ModelConfig& config,
                 double loss_scale = 1.0);

enum class EvalTask { kLinkAuc, kLinkMrr, kCommunityNdcg };

struct EvalContext {
  EvalTask task = EvalTask::kLinkAuc;
  std::size_t n_negatives = 20;
  std::uint64_t seed = 0;
  // bipartite negative sampling: items live in [first_item, n)
  std::optional<NodeId> first_item;
  // paired-anchor AUC for the long-range construction: only events whose
  // destination is one of the anchors are scored, against the other anchor
  std::optional<std::pair<NodeId, NodeId>> anchor_pair;
  const GroundTruth* ground_truth = nullptr;  // community_ndcg
  std::optional<double> time_scale;           // default: p95 over the replay
};

using MetricBundle = std::map<std::string, double>;

MetricBundle evaluate(const EventLog& log, const ModelParams& params,
                      const ModelConfig& config, const EvalContext& context,
                      double begin_frac, double end_frac);

// Protocol core with an injectable scorer (tests use oracle scorers).
using ScoreFn =
    std::function<double(NodeId src, NodeId dst, std::size_t event_index)>;
MetricBundle evaluate_with_scorer(const EventLog& log, const ScoreFn& scorer,
                                  const EvalContext& context,
                                  double begin_frac, double end_frac);

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 200;
  int epochs = 30;
  int patience = 5;
  std::size_t n_negatives = 1;
  std::array<double, 3> split = {0.70, 0.15, 0.15};
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;
  double elapsed_s = 0.0;
};

struct TrainResult {
  ModelParams params;  // best-validation snapshot
  std::vector<EpochStats> trace;
  int best_epoch = 0;
  double best_val = 0.0;
  double train_time_scale = 1.0;
};

struct TrainingDivergence : std::runtime_error {
  std::vector<EpochStats> trace;
  explicit TrainingDivergence(const std::string& what,
                              std::vector<EpochStats> t)
      : std::runtime_error(what), trace(std::move(t)) {}
};

// Adam over chronological batches with predict-then-apply memory staging,
// early stopping on the validation metric of the configured task.
TrainResult train(const EventLog& log, const ModelConfig& model_config,
                  const TrainConfig& train_config,
                  const EvalContext& eval_context);

void write_trace_csv(const std::vector<EpochStats>& trace,
                     const std::filesystem::path& path);

}  // namespace ctdg
