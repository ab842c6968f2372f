#include "ctdg/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include "ctdg/fingerprint.hpp"
#include "json.hpp"

namespace ctdg {

namespace {

void check_nonnegative(double v, const char* name) {
  if (!(v >= 0.0))
    throw std::invalid_argument(std::string(name) + " must be >= 0");
}

}  // namespace

double gcn_bound(BoundCase c, double walk_sum, double pair_weight,
                 std::span<const double> layer_norms, double time_norm,
                 double mem_delta) {
  check_nonnegative(walk_sum, "walk_sum");
  check_nonnegative(pair_weight, "pair_weight");
  check_nonnegative(time_norm, "time_norm");
  check_nonnegative(mem_delta, "mem_delta");
  double prod = 1.0;
  for (double n : layer_norms) {
    check_nonnegative(n, "layer norm");
    prod *= n;
  }
  if (c == BoundCase::kFar) return walk_sum * time_norm * prod;
  return prod * (walk_sum * time_norm + pair_weight * mem_delta);
}

double attention_bound(BoundCase c, double degree, double time_norm,
                       double cap, double mem_delta,
                       const std::optional<EdgeTerm>& edge_term) {
  check_nonnegative(degree, "degree");
  check_nonnegative(time_norm, "time_norm");
  if (!(cap > 0.0)) throw std::invalid_argument("cap must be > 0");
  check_nonnegative(mem_delta, "mem_delta");
  // per-neighbor budget: projection drift + attention drift
  double budget = time_norm + cap * time_norm * time_norm;
  if (edge_term) {
    check_nonnegative(edge_term->weight_norm, "edge weight norm");
    check_nonnegative(edge_term->feat_sq, "edge feature norm");
    check_nonnegative(edge_term->dt_sq, "edge dt");
    budget += cap * edge_term->weight_norm * (edge_term->feat_sq + edge_term->dt_sq);
  }
  double gamma = degree * budget;
  if (c == BoundCase::kNear) gamma += mem_delta;
  return gamma;
}

BoundInputs prepare_bound_inputs(const TemporalGraph& graph,
                                 const EventApplication& application,
                                 const ModelParams& params,
                                 const ModelConfig& config) {
  if (!config.is_theorem_conformant())
    throw std::invalid_argument("bounds require a theorem-conformant config");
  BoundInputs in;
  in.snapshot = graph.snapshot_before_event(application.event_index);
  in.layer_norms.reserve(params.layer_weights.size());
  for (const DenseMatrix& w : params.layer_weights)
    in.layer_norms.push_back(spectral_norm(w, 1e-12, 100000));
  in.time_norm = spectral_norm(params.time_weight, 1e-12, 100000);
  const int L = config.layers;
  in.walk_sums = graph.walk_sum_vector(in.snapshot, L);
  in.pair_weight_src = graph.pair_weight_vector(in.snapshot, application.src, L);
  in.pair_weight_dst = graph.pair_weight_vector(in.snapshot, application.dst, L);
  const NodeId src[1] = {application.src};
  const NodeId dst[1] = {application.dst};
  in.dist_src = graph.distances_from(src, in.snapshot);
  in.dist_dst = graph.distances_from(dst, in.snapshot);
  if (config.aggregator == Aggregator::kAttention)
    in.degree = graph.degrees(in.snapshot);
  if (config.use_edge_features) {
    EdgeTerm term;
    term.weight_norm = norm2(params.edge_weight);
    const std::vector<double> feats =
        graph.log().effective_features(application.event_index);
    term.feat_sq = dot(feats, feats);
    term.dt_sq = 1.0;
    in.edge_term = term;
  }
  return in;
}

BoundEvaluation bound_for(NodeId u, const EventApplication& application,
                          const BoundInputs& inputs,
                          const ModelConfig& config) {
  if (!config.is_theorem_conformant())
    throw std::invalid_argument("bounds require a theorem-conformant config");
  BoundEvaluation eval;
  if (u == application.src || u == application.dst) {
    eval.covered = false;  // the theorems cover only uninvolved nodes
    return eval;
  }
  eval.covered = true;
  const std::size_t L = static_cast<std::size_t>(config.layers);
  eval.distance = std::min(inputs.dist_src[u], inputs.dist_dst[u]);
  eval.case_tag = L >= eval.distance ? BoundCase::kNear : BoundCase::kFar;

  const auto endpoint_contribution = [&](std::size_t dist, double pair_weight,
                                         double delta) {
    const BoundCase c = L >= dist ? BoundCase::kNear : BoundCase::kFar;
    if (config.aggregator == Aggregator::kGcn)
      return gcn_bound(c, inputs.walk_sums[u], pair_weight, inputs.layer_norms,
                       inputs.time_norm, delta);
    return attention_bound(c, static_cast<double>(inputs.degree[u]),
                           inputs.time_norm, config.norm_bound, delta,
                           inputs.edge_term);
  };
  eval.gamma = endpoint_contribution(inputs.dist_src[u],
                                     inputs.pair_weight_src[u],
                                     application.delta_src) +
               endpoint_contribution(inputs.dist_dst[u],
                                     inputs.pair_weight_dst[u],
                                     application.delta_dst);
  return eval;
}

BoundEvaluation bound_for(const TemporalGraph& graph,
                          const EventApplication& application, NodeId u,
                          const ModelParams& params,
                          const ModelConfig& config) {
  BoundInputs inputs = prepare_bound_inputs(graph, application, params, config);
  return bound_for(u, application, inputs, config);
}

bool is_violation(double gamma, double flow) {
  return flow > gamma * (1.0 + 1e-9) + 1e-12;
}

// --- fuzz verification -------------------------------------------------------

namespace {

struct TrialGraph {
  EventLog log;
  std::size_t trigger_index = 0;
};

using Edge = std::pair<NodeId, NodeId>;

std::vector<Edge> sample_structure(GraphFamily family, std::uint32_t n,
                                   std::mt19937_64& rng) {
  std::vector<Edge> edges;
  switch (family) {
    case GraphFamily::kErdosRenyi: {
      std::uniform_real_distribution<double> cdist(0.8, 3.0);
      const double p = std::min(1.0, cdist(rng) / n);
      std::bernoulli_distribution keep(p);
      for (NodeId a = 0; a < n; ++a)
        for (NodeId b = a + 1; b < n; ++b)
          if (keep(rng)) edges.push_back({a, b});
      break;
    }
    case GraphFamily::kStar: {
      std::bernoulli_distribution keep(0.8);
      for (NodeId b = 1; b < n; ++b)
        if (keep(rng)) edges.push_back({0, b});
      break;
    }
    case GraphFamily::kPath: {
      for (NodeId a = 0; a + 1 < n; ++a) edges.push_back({a, a + 1});
      break;
    }
    case GraphFamily::kBarbell: {
      const NodeId k = std::max<NodeId>(3, n / 3);
      for (NodeId a = 0; a < k; ++a)
        for (NodeId b = a + 1; b < k; ++b) edges.push_back({a, b});
      const NodeId off = n - k;
      for (NodeId a = 0; a < k; ++a)
        for (NodeId b = a + 1; b < k; ++b) edges.push_back({off + a, off + b});
      for (NodeId a = k - 1; a + 1 <= off; ++a) edges.push_back({a, a + 1});
      break;
    }
    case GraphFamily::kSbm: {
      std::uniform_int_distribution<int> bdist(2, 4);
      const int blocks = bdist(rng);
      std::bernoulli_distribution intra(0.5), inter(0.05);
      for (NodeId a = 0; a < n; ++a)
        for (NodeId b = a + 1; b < n; ++b) {
          const bool same = (a % blocks) == (b % blocks);
          if (same ? intra(rng) : inter(rng)) edges.push_back({a, b});
        }
      break;
    }
    case GraphFamily::kMixed:
      break;
  }
  return edges;
}

TrialGraph sample_trial_graph(GraphFamily family, std::uint32_t max_nodes,
                              std::size_t feature_dim, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> ndist(8, std::max(9u, max_nodes));
  const std::uint32_t n = ndist(rng);
  std::vector<Edge> edges = sample_structure(family, n, rng);
  std::shuffle(edges.begin(), edges.end(), rng);

  TrialGraph out;
  out.log.node_count = n;
  out.log.feature_dim = feature_dim;
  std::uniform_real_distribution<double> fdist(-1.0, 1.0);
  double t = 0.0;
  const auto push_event = [&](NodeId a, NodeId b) {
    EventRecord e;
    e.src = a;
    e.dst = b;
    e.time = t += 1.0;
    e.sign = +1;
    for (std::size_t i = 0; i < feature_dim; ++i)
      e.features.push_back(fdist(rng));
    out.log.events.push_back(std::move(e));
  };
  for (const Edge& e : edges) push_event(e.first, e.second);
  // trigger: a random pair, new or repeated
  std::uniform_int_distribution<NodeId> node_dist(0, n - 1);
  NodeId a = node_dist(rng);
  NodeId b = node_dist(rng);
  while (b == a) b = node_dist(rng);
  out.trigger_index = out.log.events.size();
  push_event(a, b);
  return out;
}

// Theorem-mode parameter draw. Attention layer weights are rescaled to a
// random spectral norm in [0.2, 1]; the stated bound carries no ||W^(l)||
// factor, so it only covers non-expansive layer maps.
ModelParams sample_trial_params(const ModelConfig& config,
                                std::size_t feature_dim,
                                std::mt19937_64& rng) {
  ModelParams params = init_params(config, feature_dim, rng());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (config.aggregator == Aggregator::kAttention) {
    for (DenseMatrix& w : params.layer_weights) {
      const double norm = spectral_norm(w, 1e-12, 100000);
      if (norm > 0.0) {
        const double target = 0.2 + 0.8 * unit(rng);
        const double s = target / norm;
        for (double& v : w.values) v *= s;
      }
    }
  }
  // vary the projection strength, including the zero-projection regime
  const double u = unit(rng);
  const double scale = u < 0.15 ? 0.0 : unit(rng) * 1.2;
  for (double& v : params.time_weight.values) v *= scale;
  return params;
}

GraphFamily trial_family(GraphFamily requested, std::size_t trial) {
  if (requested != GraphFamily::kMixed) return requested;
  constexpr GraphFamily kRotation[5] = {
      GraphFamily::kErdosRenyi, GraphFamily::kStar, GraphFamily::kPath,
      GraphFamily::kBarbell, GraphFamily::kSbm};
  return kRotation[trial % 5];
}

std::vector<BoundRecord> run_trial(const VerifySpec& spec, std::size_t trial) {
  std::mt19937_64 rng(splitmix64(spec.seed, trial));
  const std::size_t feature_dim = spec.config.use_edge_features ? 3 : 0;
  TrialGraph tg = sample_trial_graph(trial_family(spec.family, trial),
                                     spec.max_nodes, feature_dim, rng);
  TemporalGraph graph = TemporalGraph::build(tg.log);
  ModelParams params = sample_trial_params(spec.config, feature_dim, rng);

  NodeStateTable states =
      NodeStateTable::init(tg.log.node_count, spec.config.hidden_dim);
  for (std::size_t e = 0; e < tg.trigger_index; ++e)
    apply_event(states, tg.log.events[e], e, params, spec.config);

  FlowOutcome outcome = empirical_flow_detailed(graph, tg.trigger_index,
                                                params, spec.config, states);
  BoundInputs inputs =
      prepare_bound_inputs(graph, outcome.application, params, spec.config);

  std::vector<BoundRecord> records;
  records.reserve(tg.log.node_count);
  for (NodeId u = 0; u < tg.log.node_count; ++u) {
    BoundEvaluation eval = bound_for(u, outcome.application, inputs, spec.config);
    if (!eval.covered) continue;
    BoundRecord rec;
    rec.trial = trial;
    rec.event_index = tg.trigger_index;
    rec.node = u;
    rec.case_tag = eval.case_tag;
    rec.gamma = eval.gamma * spec.gamma_scale;
    rec.flow = outcome.report.displacement[u];
    rec.gap = rec.gamma - rec.flow;
    records.push_back(rec);
  }
  return records;
}

CaseStats collect_stats(std::vector<double> gaps, std::size_t violations) {
  CaseStats s;
  s.count = gaps.size();
  s.violations = violations;
  if (gaps.empty()) return s;
  std::sort(gaps.begin(), gaps.end());
  s.min_gap = gaps.front();
  s.median_gap = gaps[gaps.size() / 2];
  const double probes[5] = {0.05, 0.25, 0.5, 0.75, 0.95};
  for (int i = 0; i < 5; ++i) {
    const std::size_t idx = std::min(
        gaps.size() - 1,
        static_cast<std::size_t>(probes[i] * static_cast<double>(gaps.size())));
    s.log10_gap_quantiles[i] = std::log10(std::max(gaps[idx], 1e-300));
  }
  return s;
}

int resolve_threads(int requested, std::size_t trials) {
  int t = requested;
  if (t <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    t = static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 4));
  }
  if (const char* env = std::getenv("CTDG_FLOW_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) t = std::min(t, cap);
  }
  return static_cast<int>(std::min<std::size_t>(t, std::max<std::size_t>(trials, 1)));
}

}  // namespace

BoundReport verify_bounds(const VerifySpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("verify_bounds: trials >= 1");
  if (!spec.config.is_theorem_conformant())
    throw std::invalid_argument(
        "verify_bounds: config must be theorem-conformant");

  std::vector<std::vector<BoundRecord>> per_trial(spec.trials);
  const int threads = resolve_threads(spec.threads, spec.trials);
  if (threads <= 1) {
    for (std::size_t t = 0; t < spec.trials; ++t)
      per_trial[t] = run_trial(spec, t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= spec.trials) return;
          per_trial[t] = run_trial(spec, t);
        }
      });
    for (std::thread& th : pool) th.join();
  }

  BoundReport report;
  report.trials = spec.trials;
  std::vector<double> near_gaps, far_gaps;
  std::size_t near_viol = 0, far_viol = 0;
  for (std::size_t t = 0; t < spec.trials; ++t) {
    for (const BoundRecord& rec : per_trial[t]) {
      report.checked += 1;
      const bool viol = is_violation(rec.gamma, rec.flow);
      if (viol) report.violations += 1;
      if (rec.case_tag == BoundCase::kNear) {
        near_gaps.push_back(rec.gap);
        near_viol += viol ? 1 : 0;
      } else {
        far_gaps.push_back(rec.gap);
        far_viol += viol ? 1 : 0;
      }
      if (spec.keep_records) report.records.push_back(rec);
    }
  }
  report.near_stats = collect_stats(std::move(near_gaps), near_viol);
  report.far_stats = collect_stats(std::move(far_gaps), far_viol);
  return report;
}

namespace {

nlohmann::json case_stats_json(const CaseStats& s) {
  return {{"count", s.count},
          {"violations", s.violations},
          {"min_gap", s.min_gap},
          {"median_gap", s.median_gap},
          {"log10_gap_quantiles",
           {{"p05", s.log10_gap_quantiles[0]},
            {"p25", s.log10_gap_quantiles[1]},
            {"p50", s.log10_gap_quantiles[2]},
            {"p75", s.log10_gap_quantiles[3]},
            {"p95", s.log10_gap_quantiles[4]}}}};
}

}  // namespace

std::string BoundReport::to_json() const {
  nlohmann::json j;
  j["trials"] = trials;
  j["checked"] = checked;
  j["violations"] = violations;
  j["near"] = case_stats_json(near_stats);
  j["far"] = case_stats_json(far_stats);
  return j.dump(2);
}

void BoundReport::write_records_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "trial,event,node,case,gamma,flow,gap,log10_gap\n";
  char buf[160];
  for (const BoundRecord& r : records) {
    const double lg = std::log10(std::max(r.gap, 1e-300));
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%u,%s,%.17g,%.17g,%.17g,%.17g",
                  r.trial, r.event_index, r.node,
                  r.case_tag == BoundCase::kNear ? "near" : "far", r.gamma,
                  r.flow, r.gap, lg);
    out << buf << "\n";
  }
}

}  // namespace ctdg
