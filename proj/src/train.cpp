#include "ctdg/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "ctdg/fingerprint.hpp"
#include "ctdg/metrics.hpp"

namespace ctdg {

std::vector<NodeId> negative_sample(const EventLog& log,
                                    const EventRecord& event,
                                    std::size_t n_neg, std::mt19937_64& rng,
                                    NegativeMode mode, NodeId first_item) {
  if (n_neg < 1) throw std::invalid_argument("negative_sample: n_neg >= 1");
  NodeId lo = 0;
  NodeId hi = log.node_count;  // exclusive
  if (mode == NegativeMode::kBipartite) lo = first_item;
  if (hi <= lo) throw std::invalid_argument("negative_sample: empty range");
  std::size_t valid = hi - lo;
  if (event.dst >= lo && event.dst < hi) valid -= 1;
  if (event.src >= lo && event.src < hi) valid -= 1;
  if (valid == 0)
    throw std::invalid_argument("negative_sample: no valid destination");
  std::uniform_int_distribution<NodeId> dist(lo, hi - 1);
  std::vector<NodeId> out;
  out.reserve(n_neg);
  while (out.size() < n_neg) {
    const NodeId cand = dist(rng);
    if (cand == event.dst || cand == event.src) continue;
    out.push_back(cand);
  }
  return out;
}

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double bce_loss(std::span<const double> pos_logits,
                std::span<const double> neg_logits) {
  if (pos_logits.empty() || neg_logits.empty())
    throw std::invalid_argument("bce_loss: both sides must be non-empty");
  double pos = 0.0, neg = 0.0;
  for (double x : pos_logits) pos += softplus(-x);
  for (double x : neg_logits) neg += softplus(x);
  return pos / static_cast<double>(pos_logits.size()) +
         neg / static_cast<double>(neg_logits.size());
}

BatchResult grad(const ModelParams& params,
                 const std::vector<TrainExample>& batch,
                 const BatchContext& context, const ModelConfig& config,
                 double loss_scale) {
  if (batch.empty()) throw std::invalid_argument("grad: empty batch");
  const EventLog& log = context.graph->log();
  const std::size_t h = config.hidden_dim;

  // target set: every endpoint and negative, deduplicated
  std::vector<NodeId> targets;
  std::unordered_map<NodeId, std::size_t> target_index;
  const auto add_target = [&](NodeId u) {
    if (target_index.try_emplace(u, targets.size()).second) targets.push_back(u);
  };
  std::size_t total_neg = 0;
  for (const TrainExample& ex : batch) {
    const EventRecord& ev = log.events[ex.event_index];
    add_target(ev.src);
    add_target(ev.dst);
    for (NodeId v : ex.negatives) add_target(v);
    total_neg += ex.negatives.size();
  }
  if (total_neg == 0) throw std::invalid_argument("grad: no negatives in batch");

  ForwardSpec spec;
  spec.graph = context.graph;
  spec.snapshot = context.snapshot;
  spec.time = context.time;
  spec.states = context.states;
  spec.dt = DtPolicy::elapsed();
  ForwardTape tape;
  std::vector<DenseVector> reps = forward(spec, targets, params, config, &tape);

  ModelParams grads = zeros_like(params);
  const int L = config.layers;
  // d loss / d h^(L), aligned with tape.need[L]
  std::vector<DenseVector> grad_h(tape.need[L].size(), DenseVector(h, 0.0));

  const double pos_w = loss_scale / static_cast<double>(batch.size());
  const double neg_w = loss_scale / static_cast<double>(total_neg);

  // decoder forward/backward per scored pair
  double loss = 0.0;
  const DenseMatrix& W1 = params.decoder.hidden_map;
  const auto score_pair = [&](NodeId a, NodeId b, bool positive) {
    const DenseVector& ha = reps[target_index.at(a)];
    const DenseVector& hb = reps[target_index.at(b)];
    DenseVector z;
    z.reserve(2 * h);
    z.insert(z.end(), ha.begin(), ha.end());
    z.insert(z.end(), hb.begin(), hb.end());
    DenseVector d1_pre = matvec(W1, z);
    axpy(1.0, params.decoder.hidden_bias, d1_pre);
    DenseVector d1(h);
    for (std::size_t i = 0; i < h; ++i)
      d1[i] = activation_apply(config.activation, config.activation_slope,
                               d1_pre[i]);
    const double logit =
        dot(params.decoder.out_weights, d1) + params.decoder.out_bias[0];
    loss += positive ? pos_w * softplus(-logit) : neg_w * softplus(logit);
    const double dlogit =
        positive ? -pos_w * sigmoid(-logit) : neg_w * sigmoid(logit);

    axpy(dlogit, d1, grads.decoder.out_weights);
    grads.decoder.out_bias[0] += dlogit;
    DenseVector g_pre(h);
    for (std::size_t i = 0; i < h; ++i)
      g_pre[i] = dlogit * params.decoder.out_weights[i] *
                 activation_deriv(config.activation, config.activation_slope,
                                  d1_pre[i]);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < 2 * h; ++c)
        grads.decoder.hidden_map.at(r, c) += g_pre[r] * z[c];
    axpy(1.0, g_pre, grads.decoder.hidden_bias);
    DenseVector g_z = matvec_t(W1, g_pre);
    DenseVector& ga = grad_h[tape.index[L].at(a)];
    DenseVector& gb = grad_h[tape.index[L].at(b)];
    for (std::size_t i = 0; i < h; ++i) {
      ga[i] += g_z[i];
      gb[i] += g_z[h + i];
    }
  };

  for (const TrainExample& ex : batch) {
    const EventRecord& ev = log.events[ex.event_index];
    score_pair(ev.src, ev.dst, true);
    for (NodeId v : ex.negatives) score_pair(ev.src, v, false);
  }

  // reverse through the aggregation layers
  const NodeStateTable& attn_states =
      spec.attn_states != nullptr ? *spec.attn_states : *spec.states;
  for (int l = L; l >= 1; --l) {
    const DenseMatrix& W = params.layer_weights[l - 1];
    DenseMatrix& gW = grads.layer_weights[l - 1];
    std::vector<DenseVector> grad_wh(tape.need[l - 1].size(),
                                     DenseVector(h, 0.0));
    for (std::size_t i = 0; i < tape.need[l].size(); ++i) {
      const NodeId u = tape.need[l][i];
      const ResolvedNeighborhood& nb = tape.nbhd.at(u);
      DenseVector g_a(h);
      for (std::size_t k = 0; k < h; ++k)
        g_a[k] = grad_h[i][k] *
                 activation_deriv(config.activation, config.activation_slope,
                                  tape.preact[l][i][k]);
      const std::size_t self_idx = tape.index[l - 1].at(u);
      if (config.aggregator == Aggregator::kGcn) {
        axpy(nb.self_coef, g_a, grad_wh[self_idx]);
        for (std::size_t j = 0; j < nb.nodes.size(); ++j)
          axpy(nb.gcn_coef[j], g_a,
               grad_wh[tape.index[l - 1].at(nb.nodes[j])]);
      } else if (nb.nodes.empty()) {
        axpy(1.0, g_a, grad_wh[self_idx]);
      } else {
        // alpha-weighted aggregation plus softmax/logit backward
        DenseVector grad_alpha(nb.nodes.size());
        for (std::size_t j = 0; j < nb.nodes.size(); ++j) {
          const std::size_t vj = tape.index[l - 1].at(nb.nodes[j]);
          axpy(nb.alphas[j], g_a, grad_wh[vj]);
          grad_alpha[j] = dot(g_a, tape.wh[l][vj]);
        }
        double weighted = 0.0;
        for (std::size_t j = 0; j < nb.nodes.size(); ++j)
          weighted += nb.alphas[j] * grad_alpha[j];
        const DenseVector& su = attn_states.state[u];
        for (std::size_t j = 0; j < nb.nodes.size(); ++j) {
          const double g_logit = nb.alphas[j] * (grad_alpha[j] - weighted);
          const double g_pre =
              g_logit * activation_deriv(Activation::kLeakyRelu,
                                         kAttnLogitSlope, nb.logit_pre[j]);
          if (g_pre == 0.0) continue;
          const DenseVector& sj = attn_states.state[nb.nodes[j]];
          for (std::size_t k = 0; k < h; ++k) {
            grads.attn_vector[k] += g_pre * su[k];
            grads.attn_vector[h + k] += g_pre * sj[k];
          }
          if (config.use_edge_features) {
            const std::vector<double> feats =
                log.effective_features(nb.event_index[j]);
            for (std::size_t k = 0; k < feats.size(); ++k)
              grads.edge_weight[k] += g_pre * feats[k];
            grads.edge_weight[feats.size()] += g_pre * nb.age[j];
          }
        }
      }
    }
    // wh_v = W h_v  =>  dW += g_wh ⊗ h_v,  dh_v += W^T g_wh
    std::vector<DenseVector> next_grad_h(tape.need[l - 1].size(),
                                         DenseVector(h, 0.0));
    for (std::size_t j = 0; j < tape.need[l - 1].size(); ++j) {
      bool nonzero = false;
      for (double x : grad_wh[j])
        if (x != 0.0) {
          nonzero = true;
          break;
        }
      if (!nonzero) continue;
      const DenseVector& hv = tape.h[l - 1][j];
      for (std::size_t r = 0; r < h; ++r) {
        const double g = grad_wh[j][r];
        if (g == 0.0) continue;
        for (std::size_t c = 0; c < h; ++c) gW.at(r, c) += g * hv[c];
      }
      DenseVector back = matvec_t(W, grad_wh[j]);
      axpy(1.0, back, next_grad_h[j]);
    }
    grad_h = std::move(next_grad_h);
  }

  // layer 0: clip jacobian, then the projection pulls gradient into W_t
  for (std::size_t i = 0; i < tape.need[0].size(); ++i) {
    const NodeId u = tape.need[0][i];
    DenseVector g = grad_h[i];
    bool nonzero = false;
    for (double x : g)
      if (x != 0.0) {
        nonzero = true;
        break;
      }
    if (!nonzero) continue;
    if (tape.clip_active[i]) {
      const DenseVector& x = tape.pre_clip[i];
      const double n = tape.pre_clip_norm[i];
      const double scale = config.norm_bound / n;
      const double xg = dot(x, g) / (n * n);
      for (std::size_t k = 0; k < h; ++k) g[k] = scale * (g[k] - xg * x[k]);
    }
    if (config.projection == Projection::kLinear && tape.dt[i] != 0.0) {
      const DenseVector& s = context.states->state[u];
      const double dt = tape.dt[i];
      for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < h; ++c)
          grads.time_weight.at(r, c) += dt * g[r] * s[c];
    }
  }

  return {loss, std::move(grads)};
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0))
    throw std::invalid_argument("learning_rate must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (n_negatives < 1) throw std::invalid_argument("n_negatives must be >= 1");
  const double sum = split[0] + split[1] + split[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must sum to 1");
}

namespace {

// p95 over a prefix of the log (train-span scale, so truncating unseen
// spans cannot change training).
double prefix_time_scale(const EventLog& log, std::size_t end) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < end; ++i)
    gaps.push_back(log.events[i].time - log.events[i - 1].time);
  if (gaps.empty()) return 1.0;
  std::sort(gaps.begin(), gaps.end());
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(gaps.size())));
  if (rank == 0) rank = 1;
  const double p95 = gaps[std::min(rank - 1, gaps.size() - 1)];
  if (p95 > 0.0) return p95;
  return gaps.back() > 0.0 ? gaps.back() : 1.0;
}

struct ModelScorer {
  const TemporalGraph* graph;
  const ModelParams* params;
  const ModelConfig* config;
  const NodeStateTable* states;

  double operator()(NodeId src, NodeId dst, std::size_t event_index) const {
    ForwardSpec spec;
    spec.graph = graph;
    spec.snapshot = graph->snapshot_before_event(event_index);
    spec.time = graph->log().events[event_index].time;
    spec.states = states;
    const NodeId targets[2] = {src, dst};
    std::vector<DenseVector> reps =
        forward(spec, targets, *params, *config, nullptr);
    return decoder_logit(reps[0], reps[1], *params, *config);
  }
};

MetricBundle evaluate_impl(const EventLog& log, const ScoreFn& scorer,
                           const EvalContext& ctx, double begin_frac,
                           double end_frac,
                           const std::function<void(std::size_t)>& on_event) {
  if (!(begin_frac >= 0.0 && begin_frac < end_frac && end_frac <= 1.0))
    throw std::invalid_argument("evaluate: bad span fractions");
  const std::size_t m = log.events.size();
  const std::size_t begin = static_cast<std::size_t>(begin_frac * m);
  const std::size_t end = static_cast<std::size_t>(end_frac * m);
  if (begin >= end) throw std::invalid_argument("evaluate: empty span");

  std::mt19937_64 rng(ctx.seed);
  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<RankedQuery> mrr_queries;
  std::vector<double> ndcg_values;

  // community ranking: group ground-truth rows by timestep and find each
  // timestep's first event
  std::map<int, std::vector<GroundTruthRow>> active_by_step;
  std::map<int, std::size_t> first_event_of_step;
  std::size_t members_per_community = 0;
  if (ctx.task == EvalTask::kCommunityNdcg) {
    if (ctx.ground_truth == nullptr)
      throw std::invalid_argument("community_ndcg requires ground truth");
    for (const GroundTruthRow& row : ctx.ground_truth->rows)
      active_by_step[row.timestep].push_back(row);
    for (std::size_t e = 0; e < m; ++e) {
      const int step = static_cast<int>(log.events[e].time);
      if (!first_event_of_step.contains(step)) first_event_of_step[step] = e;
    }
    const auto& membership = ctx.ground_truth->membership;
    std::uint32_t n_comms = 0;
    for (std::uint32_t c : membership) n_comms = std::max(n_comms, c + 1);
    members_per_community = membership.size() / std::max(1u, n_comms);
  }

  for (std::size_t e = 0; e < end; ++e) {
    const EventRecord& ev = log.events[e];
    if (ctx.task == EvalTask::kCommunityNdcg) {
      const int step = static_cast<int>(ev.time);
      auto first_it = first_event_of_step.find(step);
      if (first_it != first_event_of_step.end() && first_it->second == e &&
          e >= begin && active_by_step.contains(step)) {
        const auto& rows = active_by_step.at(step);
        RankedQuery q;
        for (const GroundTruthRow& row : rows) {
          // aggregated cross-pair link score over sampled member pairs
          const std::size_t nb = members_per_community;
          const std::size_t pairs = std::min<std::size_t>(25, nb * nb);
          std::uniform_int_distribution<std::size_t> pick(0, nb - 1);
          double acc = 0.0;
          for (std::size_t s = 0; s < pairs; ++s) {
            const NodeId a = static_cast<NodeId>(row.comm_a * nb + pick(rng));
            const NodeId b = static_cast<NodeId>(row.comm_b * nb + pick(rng));
            acc += scorer(a, b, e);
          }
          q.scores.push_back(acc / static_cast<double>(pairs));
          q.relevance.push_back(row.relevance);
        }
        if (q.scores.size() > 1) ndcg_values.push_back(ndcg(q));
      }
    } else if (e >= begin) {
      if (ctx.anchor_pair) {
        const auto [a0, a1] = *ctx.anchor_pair;
        if (ev.dst == a0 || ev.dst == a1) {
          const NodeId other = ev.dst == a0 ? a1 : a0;
          scores.push_back(scorer(ev.src, ev.dst, e));
          labels.push_back(1);
          scores.push_back(scorer(ev.src, other, e));
          labels.push_back(0);
        }
      } else {
        const NegativeMode mode = ctx.first_item ? NegativeMode::kBipartite
                                                 : NegativeMode::kUniform;
        std::vector<NodeId> negs =
            negative_sample(log, ev, ctx.n_negatives, rng, mode,
                            ctx.first_item.value_or(0));
        const double pos = scorer(ev.src, ev.dst, e);
        if (ctx.task == EvalTask::kLinkAuc) {
          scores.push_back(pos);
          labels.push_back(1);
          for (NodeId v : negs) {
            scores.push_back(scorer(ev.src, v, e));
            labels.push_back(0);
          }
        } else {
          RankedQuery q;
          for (NodeId v : negs) {
            q.scores.push_back(scorer(ev.src, v, e));
            q.relevance.push_back(0.0);
          }
          q.scores.push_back(pos);
          q.relevance.push_back(1.0);
          mrr_queries.push_back(std::move(q));
        }
      }
    }
    on_event(e);
  }

  MetricBundle out;
  switch (ctx.task) {
    case EvalTask::kLinkAuc:
      if (scores.empty()) throw std::runtime_error("evaluate: nothing scored");
      out["auc"] = auc(scores, labels);
      out["scored"] = static_cast<double>(scores.size());
      break;
    case EvalTask::kLinkMrr:
      if (mrr_queries.empty())
        throw std::runtime_error("evaluate: nothing scored");
      out["mrr"] = mrr(mrr_queries);
      out["scored"] = static_cast<double>(mrr_queries.size());
      break;
    case EvalTask::kCommunityNdcg:
      if (ndcg_values.empty())
        throw std::runtime_error("evaluate: no rankable timesteps in span");
      out["ndcg"] = 0.0;
      for (double v : ndcg_values) out["ndcg"] += v;
      out["ndcg"] /= static_cast<double>(ndcg_values.size());
      out["queries"] = static_cast<double>(ndcg_values.size());
      break;
  }
  return out;
}

}  // namespace

MetricBundle evaluate_with_scorer(const EventLog& log, const ScoreFn& scorer,
                                  const EvalContext& context,
                                  double begin_frac, double end_frac) {
  return evaluate_impl(log, scorer, context, begin_frac, end_frac,
                       [](std::size_t) {});
}

MetricBundle evaluate(const EventLog& log, const ModelParams& params,
                      const ModelConfig& config, const EvalContext& context,
                      double begin_frac, double end_frac) {
  TemporalGraph graph = TemporalGraph::build(log);
  NodeStateTable states = NodeStateTable::init(log.node_count, config.hidden_dim);
  const std::size_t end = static_cast<std::size_t>(end_frac * log.events.size());
  states.time_scale =
      context.time_scale.value_or(prefix_time_scale(log, end));
  ModelScorer scorer{&graph, &params, &config, &states};
  return evaluate_impl(
      log, scorer, context, begin_frac, end_frac, [&](std::size_t e) {
        apply_event(states, log.events[e], e, params, config);
      });
}

namespace {

struct AdamState {
  ModelParams m;
  ModelParams v;
  long long step = 0;
};

void adam_update(ModelParams& params, const ModelParams& grads,
                 AdamState& state, const TrainConfig& cfg) {
  state.step += 1;
  const double b1c = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double b2c = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  ModelParams& m = state.m;
  ModelParams& v = state.v;
  ModelParams g_copy = grads;

  std::vector<std::vector<double>*> pb, gb, mb, vb;
  for_each_param_block(params, [&](const std::string&, std::vector<double>& x) {
    pb.push_back(&x);
  });
  for_each_param_block(g_copy, [&](const std::string&, std::vector<double>& x) {
    gb.push_back(&x);
  });
  for_each_param_block(m, [&](const std::string&, std::vector<double>& x) {
    mb.push_back(&x);
  });
  for_each_param_block(v, [&](const std::string&, std::vector<double>& x) {
    vb.push_back(&x);
  });
  for (std::size_t b = 0; b < pb.size(); ++b) {
    std::vector<double>& p = *pb[b];
    const std::vector<double>& g = *gb[b];
    std::vector<double>& mm = *mb[b];
    std::vector<double>& vv = *vb[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      mm[i] = cfg.beta1 * mm[i] + (1.0 - cfg.beta1) * g[i];
      vv[i] = cfg.beta2 * vv[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = mm[i] / b1c;
      const double vhat = vv[i] / b2c;
      p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
  }
}

}  // namespace

TrainResult train(const EventLog& log, const ModelConfig& model_config,
                  const TrainConfig& train_config,
                  const EvalContext& eval_context) {
  model_config.validate();
  train_config.validate();
  const std::size_t m = log.events.size();
  const std::size_t n_train = static_cast<std::size_t>(train_config.split[0] * m);
  const double val_begin = train_config.split[0];
  const double val_end = train_config.split[0] + train_config.split[1];
  if (n_train == 0) throw std::invalid_argument("train: empty training span");

  TemporalGraph graph = TemporalGraph::build(log);
  ModelParams params =
      init_params(model_config, log.feature_dim, train_config.seed);
  AdamState adam{zeros_like(params), zeros_like(params), 0};
  const double time_scale = prefix_time_scale(log, n_train);

  EvalContext val_ctx = eval_context;
  val_ctx.time_scale = time_scale;

  TrainResult result;
  result.train_time_scale = time_scale;
  double best_val = -std::numeric_limits<double>::infinity();
  ModelParams best_params = params;
  int best_epoch = -1;
  int since_improve = 0;

  const auto t0 = std::chrono::steady_clock::now();
  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    NodeStateTable states =
        NodeStateTable::init(log.node_count, model_config.hidden_dim);
    states.time_scale = time_scale;

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n_train;
         start += train_config.batch_size) {
      const std::size_t stop =
          std::min(n_train, start + train_config.batch_size);
      std::mt19937_64 neg_rng(splitmix64(
          train_config.seed, static_cast<std::uint64_t>(epoch) * 1000003ULL +
                                 start));
      std::vector<TrainExample> batch;
      batch.reserve(stop - start);
      const NegativeMode mode = eval_context.first_item
                                    ? NegativeMode::kBipartite
                                    : NegativeMode::kUniform;
      for (std::size_t e = start; e < stop; ++e)
        batch.push_back({e, negative_sample(
                                log, log.events[e], train_config.n_negatives,
                                neg_rng, mode,
                                eval_context.first_item.value_or(0))});
      BatchContext ctx;
      ctx.graph = &graph;
      ctx.snapshot = graph.snapshot_before_event(start);
      ctx.time = log.events[start].time;
      ctx.states = &states;
      BatchResult res = grad(params, batch, ctx, model_config);
      if (!std::isfinite(res.loss))
        throw TrainingDivergence(
            "training diverged at epoch " + std::to_string(epoch),
            result.trace);
      adam_update(params, res.grads, adam, train_config);
      epoch_loss += res.loss;
      batches += 1;
      for (std::size_t e = start; e < stop; ++e)
        apply_event(states, log.events[e], e, params, model_config);
    }

    MetricBundle val =
        evaluate(log, params, model_config, val_ctx, val_begin, val_end);
    const char* key = eval_context.task == EvalTask::kLinkAuc    ? "auc"
                      : eval_context.task == EvalTask::kLinkMrr  ? "mrr"
                                                                 : "ndcg";
    const double val_metric = val.at(key);

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(batches);
    stats.val_metric = val_metric;
    stats.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.trace.push_back(stats);

    if (val_metric > best_val) {
      best_val = val_metric;
      best_params = params;
      best_epoch = epoch;
      since_improve = 0;
    } else {
      since_improve += 1;
      if (since_improve >= train_config.patience) break;
    }
  }

  result.params = std::move(best_params);
  result.best_epoch = best_epoch;
  result.best_val = best_val;
  return result;
}

void write_trace_csv(const std::vector<EpochStats>& trace,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,train_loss,val_metric,elapsed_s\n";
  char buf[128];
  for (const EpochStats& s : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.3f", s.epoch,
                  s.train_loss, s.val_metric, s.elapsed_s);
    out << buf << "\n";
  }
}

}  // namespace ctdg
