#include "ctdg/synth.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace ctdg {

void SbmSpec::validate() const {
  if (communities < 1 || nodes_per_community < 1)
    throw std::invalid_argument("sbm: communities and nodes_per_community >= 1");
  if (!(p_intra >= 0.0 && p_intra <= 1.0) || !(p_inter >= 0.0 && p_inter <= 1.0))
    throw std::invalid_argument("sbm: densities must be in [0,1]");
  if (pairs_per_step < 1) throw std::invalid_argument("sbm: k_c must be >= 1");
  if (t_gen_min < 1 || t_gen_max <= t_gen_min)
    throw std::invalid_argument("sbm: need 1 <= t_gen_min < t_gen_max");
  if (horizon < 0) throw std::invalid_argument("sbm: horizon must be >= 0");
  const std::size_t total_pairs = communities * (communities - 1) / 2;
  if (horizon > 0 && pairs_per_step > total_pairs)
    throw std::invalid_argument("sbm: k_c exceeds available community pairs");
}

std::pair<EventLog, GroundTruth> gen_sbm_ctdg(const SbmSpec& spec) {
  spec.validate();
  const std::uint32_t B = static_cast<std::uint32_t>(spec.communities);
  const std::uint32_t NB = static_cast<std::uint32_t>(spec.nodes_per_community);
  const std::uint32_t n = B * NB;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  EventLog log;
  log.node_count = n;
  log.feature_dim = 0;
  GroundTruth gt;
  gt.membership.resize(n);
  for (std::uint32_t u = 0; u < n; ++u) gt.membership[u] = u / NB;

  const auto push_event = [&log](NodeId a, NodeId b, double t) {
    log.events.push_back({a, b, t, +1, {}});
  };

  // t = 0: i.i.d. intra-community edges
  for (std::uint32_t c = 0; c < B; ++c) {
    const NodeId base = c * NB;
    for (std::uint32_t i = 0; i < NB; ++i)
      for (std::uint32_t j = i + 1; j < NB; ++j)
        if (unit(rng) < spec.p_intra) push_event(base + i, base + j, 0.0);
  }

  // remaining unconnected community pairs, draw without replacement
  std::vector<std::pair<std::uint32_t, std::uint32_t>> unconnected;
  for (std::uint32_t a = 0; a < B; ++a)
    for (std::uint32_t b = a + 1; b < B; ++b) unconnected.push_back({a, b});

  struct ActivePair {
    std::uint32_t a, b;
    double density;  // p_inter / t_gen
    int last_step;   // inclusive
  };
  std::vector<ActivePair> active;

  for (int step = 1; step <= spec.horizon; ++step) {
    const std::size_t draws =
        std::min<std::size_t>(spec.pairs_per_step, unconnected.size());
    for (std::size_t d = 0; d < draws; ++d) {
      std::uniform_int_distribution<std::size_t> pick(0, unconnected.size() - 1);
      const std::size_t idx = pick(rng);
      const auto [a, b] = unconnected[idx];
      unconnected[idx] = unconnected.back();
      unconnected.pop_back();
      std::uniform_int_distribution<int> tg(spec.t_gen_min, spec.t_gen_max - 1);
      const int t_gen = tg(rng);
      active.push_back({a, b, spec.p_inter / static_cast<double>(t_gen),
                        step + t_gen - 1});
    }
    for (const ActivePair& p : active) {
      if (p.last_step < step) continue;
      gt.rows.push_back({step, p.a, p.b, p.density});
      const NodeId base_a = p.a * NB;
      const NodeId base_b = p.b * NB;
      for (std::uint32_t i = 0; i < NB; ++i)
        for (std::uint32_t j = 0; j < NB; ++j)
          if (unit(rng) < p.density)
            push_event(base_a + i, base_b + j, static_cast<double>(step));
    }
    active.erase(std::remove_if(active.begin(), active.end(),
                                [step](const ActivePair& p) {
                                  return p.last_step <= step;
                                }),
                 active.end());
  }
  log.validate();
  return {std::move(log), std::move(gt)};
}

void LongRangeSpec::validate() const {
  if (chain_len < 3) throw std::invalid_argument("long_range: chain_len >= 3");
  if (n_chains < 1) throw std::invalid_argument("long_range: n_chains >= 1");
}

LongRangeData gen_long_range(const LongRangeSpec& spec) {
  spec.validate();
  const std::size_t C = spec.chain_len;
  LongRangeData data;
  EventLog& log = data.log;
  log.feature_dim = 2;
  const NodeId chain_nodes = static_cast<NodeId>(spec.n_chains * C);
  data.beacon_zero = chain_nodes;
  data.beacon_one = chain_nodes + 1;
  data.anchor_zero = chain_nodes + 2;
  data.anchor_one = chain_nodes + 3;
  log.node_count = chain_nodes + 4;

  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin(0.5);
  double t = 0.0;
  const auto push_event = [&](NodeId a, NodeId b, double f0, double f1) {
    log.events.push_back({a, b, t += 1.0, +1, {f0, f1}});
  };

  for (std::size_t c = 0; c < spec.n_chains; ++c) {
    const NodeId base = static_cast<NodeId>(c * C);
    const NodeId query = base + static_cast<NodeId>(C - 1);
    const int bit = coin(rng) ? 1 : 0;
    // path  base -- base+1 -- ... -- query, neutral features
    for (std::size_t i = 0; i + 1 < C; ++i)
      push_event(base + static_cast<NodeId>(i), base + static_cast<NodeId>(i + 1),
                 0.0, 0.0);
    // attribute injection at the far end, after the chain is laid down
    push_event(base, bit ? data.beacon_one : data.beacon_zero,
               bit ? 1.0 : -1.0, bit ? -1.0 : 1.0);
    // labeled query event
    data.labels.push_back({log.events.size(), bit});
    push_event(query, bit ? data.anchor_one : data.anchor_zero, 0.0, 0.0);
  }
  log.validate();
  return data;
}

void BipartiteSpec::validate() const {
  if (n_users < 1 || n_items < 1)
    throw std::invalid_argument("bipartite: need users and items");
  if (!(repeat_prob >= 0.0 && repeat_prob <= 1.0))
    throw std::invalid_argument("bipartite: repeat_prob must be in [0,1]");
  if (n_events < 1) throw std::invalid_argument("bipartite: n_events >= 1");
}

EventLog gen_bipartite(const BipartiteSpec& spec) {
  spec.validate();
  EventLog log;
  log.node_count = spec.n_users + spec.n_items;
  log.feature_dim = 0;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<NodeId> user_dist(0, spec.n_users - 1);
  std::uniform_int_distribution<NodeId> item_dist(
      spec.n_users, spec.n_users + spec.n_items - 1);

  std::vector<std::pair<NodeId, NodeId>> seen;
  std::set<std::pair<NodeId, NodeId>> seen_set;
  for (std::size_t e = 0; e < spec.n_events; ++e) {
    std::pair<NodeId, NodeId> pair;
    if (!seen.empty() && unit(rng) < spec.repeat_prob) {
      std::uniform_int_distribution<std::size_t> pick(0, seen.size() - 1);
      pair = seen[pick(rng)];
    } else {
      pair = {user_dist(rng), item_dist(rng)};
      if (seen_set.insert(pair).second) seen.push_back(pair);
    }
    log.events.push_back(
        {pair.first, pair.second, static_cast<double>(e + 1), +1, {}});
  }
  log.validate();
  return log;
}

double surprise_index(const EventLog& log, double split_time) {
  std::set<std::pair<NodeId, NodeId>> train_pairs;
  std::size_t test_total = 0;
  std::size_t test_new = 0;
  for (const EventRecord& e : log.events) {
    const auto pair = std::minmax(e.src, e.dst);
    if (e.time <= split_time) {
      train_pairs.insert({pair.first, pair.second});
    } else {
      ++test_total;
      if (!train_pairs.contains({pair.first, pair.second})) ++test_new;
    }
  }
  if (test_total == 0)
    throw std::invalid_argument("surprise_index: empty test side");
  return static_cast<double>(test_new) / static_cast<double>(test_total);
}

}  // namespace ctdg
