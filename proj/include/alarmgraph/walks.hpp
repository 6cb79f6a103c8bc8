#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "alarmgraph/errors.hpp"
#include "alarmgraph/graph.hpp"
#include "alarmgraph/rng.hpp"

namespace alarmgraph {

/// Second-order walk parameters: r walks of length L per node, with the
/// return parameter p and in-out parameter q biasing each step.
struct WalkParams {
  int num_walks = 10;   // r
  int walk_length = 40; // L, counts the start node
  double p = 1.0;
  double q = 1.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (num_walks < 1) throw error(errc::invalid_config, "walk.num_walks must be >= 1");
    if (walk_length < 2) throw error(errc::invalid_config, "walk.length must be >= 2");
    if (p <= 0) throw error(errc::invalid_config, "walk.p must be > 0");
    if (q <= 0) throw error(errc::invalid_config, "walk.q must be > 0");
  }
};

struct WalkCorpus {
  std::vector<std::vector<int>> walks;
};

/// Unnormalized transition weights out of `curr` given the previous node:
/// alpha * e(curr, x) with alpha = 1/p when x is the previous node, 1 when x
/// is adjacent to it, 1/q otherwise. Without a previous node alpha = 1.
inline std::vector<std::pair<int, double>> biased_step_weights(const CooccurrenceGraph& graph,
                                                               std::optional<int> prev, int curr,
                                                               double p, double q) {
  const auto& adj = graph.adjacency[static_cast<std::size_t>(curr)];
  if (adj.empty()) throw error(errc::dead_end, "node " + std::to_string(curr) + " is isolated");

  std::vector<std::pair<int, double>> weights;
  weights.reserve(adj.size());
  for (const auto& [x, e] : adj) {
    double alpha = 1.0;
    if (prev) {
      if (x == *prev) alpha = 1.0 / p;               // d_tx = 0
      else if (graph.has_edge(*prev, x)) alpha = 1.0; // d_tx = 1
      else alpha = 1.0 / q;                           // d_tx = 2
    }
    weights.emplace_back(x, alpha * e);
  }
  return weights;
}

/// Sample the next node with probability proportional to the biased weights.
inline int sample_step(const CooccurrenceGraph& graph, std::optional<int> prev, int curr,
                       double p, double q, rng& r) {
  auto weights = biased_step_weights(graph, prev, curr, p, q);
  double total = 0.0;
  for (const auto& [x, w] : weights) total += w;
  double u = r.uniform() * total;
  double acc = 0.0;
  for (const auto& [x, w] : weights) {
    acc += w;
    if (u < acc) return x;
  }
  return weights.back().first;  // u landed on the accumulated rounding edge
}

/// One biased random walk from `start` (which must not be isolated). The walk
/// has at most `walk_length` nodes, starting with `start`.
inline std::vector<int> generate_walk(const CooccurrenceGraph& graph, int start,
                                      const WalkParams& params, rng& r) {
  std::vector<int> walk;
  walk.reserve(static_cast<std::size_t>(params.walk_length));
  walk.push_back(start);
  std::optional<int> prev;
  int curr = start;
  while (static_cast<int>(walk.size()) < params.walk_length) {
    if (graph.is_isolated(curr)) break;  // dead end (cannot happen on undirected graphs)
    int next = sample_step(graph, prev, curr, params.p, params.q, r);
    walk.push_back(next);
    prev = curr;
    curr = next;
  }
  return walk;
}

/// r walks per non-isolated node. Walk content depends only on
/// (seed, node, walk round), so generation order cannot change results; the
/// per-round visitation order is shuffled deterministically from the seed.
inline WalkCorpus generate_corpus(const CooccurrenceGraph& graph, const WalkParams& params) {
  params.validate();
  std::vector<int> starts = graph.non_isolated();
  if (starts.empty()) throw error(errc::empty_graph, "graph has no edges");

  WalkCorpus corpus;
  corpus.walks.reserve(starts.size() * static_cast<std::size_t>(params.num_walks));
  constexpr std::uint64_t kOrderStream = 0x6f72646572ull;  // distinct from node ids
  for (int round = 0; round < params.num_walks; ++round) {
    std::vector<int> order = starts;
    rng order_rng(derive_seed(params.seed, kOrderStream, static_cast<std::uint64_t>(round)));
    order_rng.shuffle(order);
    for (int v : order) {
      rng walk_rng(derive_seed(params.seed, static_cast<std::uint64_t>(v),
                               static_cast<std::uint64_t>(round)));
      corpus.walks.push_back(generate_walk(graph, v, params, walk_rng));
    }
  }
  return corpus;
}

}  // namespace alarmgraph
