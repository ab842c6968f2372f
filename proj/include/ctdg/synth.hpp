#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ctdg/events.hpp"

namespace ctdg {

// Stochastic-block-model CTDG: dense communities seeded at t = 0, then k_c
// fresh community pairs drawn per timestep and pairwise connected over a
// sampled horizon with per-step density p_inter / t_gen.
struct SbmSpec {
  std::size_t communities = 100;        // B
  std::size_t nodes_per_community = 30; // N_B
  double p_intra = 0.25;
  double p_inter = 0.025;
  std::size_t pairs_per_step = 4;  // k_c
  int t_gen_min = 6;               // horizon sampled from [t_gen_min, t_gen_max)
  int t_gen_max = 20;
  int horizon = 60;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruthRow {
  int timestep = 0;
  std::uint32_t comm_a = 0;
  std::uint32_t comm_b = 0;
  double relevance = 0.0;  // the normalized sampling density in effect
};

struct GroundTruth {
  std::vector<std::uint32_t> membership;  // node -> community
  std::vector<GroundTruthRow> rows;
};

std::pair<EventLog, GroundTruth> gen_sbm_ctdg(const SbmSpec& spec);

// Long-range construction. Per instance: a temporal path of chain_len nodes
// is laid down with neutral features, then a +/-1 attribute is attached to
// the far end (via one of two beacon nodes), then the query node links to
// the anchor selected by that attribute. The attribute sits chain_len-1 hops
// from the query source and postdates every chain edge, so neither memory
// relay nor any receptive field smaller than chain_len-1 hops can recover
// it at query time.
struct LongRangeSpec {
  std::size_t n_chains = 1000;
  std::size_t chain_len = 4;  // nodes per chain, >= 3
  std::uint64_t seed = 0;

  void validate() const;
};

struct LongRangeData {
  EventLog log;
  std::vector<std::pair<std::size_t, int>> labels;  // (query event index, bit)
  NodeId anchor_zero = 0;
  NodeId anchor_one = 0;
  NodeId beacon_zero = 0;
  NodeId beacon_one = 0;
};

LongRangeData gen_long_range(const LongRangeSpec& spec);

// Bipartite interaction stream with a surprise knob: each event repeats an
// already-seen (user,item) pair with probability repeat_prob, else samples a
// fresh uniform pair. Items occupy [n_users, n_users + n_items).
struct BipartiteSpec {
  std::uint32_t n_users = 100;
  std::uint32_t n_items = 200;
  std::size_t n_events = 5000;
  double repeat_prob = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

EventLog gen_bipartite(const BipartiteSpec& spec);

// Fraction of post-split events whose (src,dst) pair was never seen at or
// before split_time.
double surprise_index(const EventLog& log, double split_time);

}  // namespace ctdg
