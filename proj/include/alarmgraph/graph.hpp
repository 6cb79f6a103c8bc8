#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "alarmgraph/errors.hpp"
#include "alarmgraph/ingest.hpp"
#include "alarmgraph/preprocess.hpp"

namespace alarmgraph {

/// Binary M x N presence matrix: row per sequence, column per tag,
/// cell 1 iff the tag occurs at least once in the sequence.
struct PresenceMatrix {
  std::size_t rows = 0;  // M sequences
  std::size_t cols = 0;  // N tags
  std::vector<std::uint8_t> cells;

  std::uint8_t at(std::size_t i, std::size_t p) const { return cells[i * cols + p]; }
  void set(std::size_t i, std::size_t p) { cells[i * cols + p] = 1; }
};

inline PresenceMatrix presence_matrix(const std::vector<AlarmSequence>& sequences,
                                      std::size_t vocab_size) {
  PresenceMatrix w;
  w.rows = sequences.size();
  w.cols = vocab_size;
  w.cells.assign(w.rows * w.cols, 0);
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    for (const auto& [tag_idx, ts] : sequences[i].items) {
      if (tag_idx < 0 || static_cast<std::size_t>(tag_idx) >= vocab_size)
        throw error(errc::index_out_of_vocabulary,
                    "tag index " + std::to_string(tag_idx) + " out of vocabulary of size " +
                        std::to_string(vocab_size));
      w.set(i, static_cast<std::size_t>(tag_idx));
    }
  }
  return w;
}

inline PresenceMatrix presence_matrix(const std::vector<AlarmSequence>& sequences,
                                      const TagVocabulary& vocab) {
  return presence_matrix(sequences, vocab.size());
}

/// Undirected edge with its raw co-occurrence count and normalized weight
/// count / M. Always stored with p < q.
struct GraphEdge {
  int p = 0;
  int q = 0;
  std::int64_t count = 0;
  double weight = 0.0;
};

/// Weighted co-occurrence graph: one node per tag, edge weight = fraction of
/// sequences containing both endpoints. No self-loops; zero-weight pairs are
/// not stored. Nodes with no edges are flagged isolated and skipped by walks.
struct CooccurrenceGraph {
  int nodes = 0;
  std::size_t sequences = 0;                          // M
  std::vector<double> support;                        // per node: (#sequences with it)/M
  std::vector<GraphEdge> edges;                       // sorted by (p, q)
  std::vector<std::vector<std::pair<int, double>>> adjacency;  // sorted by neighbor

  bool is_isolated(int v) const { return adjacency[static_cast<std::size_t>(v)].empty(); }

  int degree(int v) const {
    return static_cast<int>(adjacency[static_cast<std::size_t>(v)].size());
  }

  bool has_edge(int a, int b) const {
    const auto& adj = adjacency[static_cast<std::size_t>(a)];
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const std::pair<int, double>& e, int v) { return e.first < v; });
    return it != adj.end() && it->first == b;
  }

  double edge_weight(int a, int b) const {
    const auto& adj = adjacency[static_cast<std::size_t>(a)];
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const std::pair<int, double>& e, int v) { return e.first < v; });
    return (it != adj.end() && it->first == b) ? it->second : 0.0;
  }

  std::vector<int> non_isolated() const {
    std::vector<int> out;
    for (int v = 0; v < nodes; ++v)
      if (!is_isolated(v)) out.push_back(v);
    return out;
  }

  /// Rebuild a graph from an exported edge list (counts unavailable).
  static CooccurrenceGraph from_edges(int nodes, std::size_t sequences,
                                      const std::vector<GraphEdge>& edges,
                                      const std::vector<double>& support) {
    CooccurrenceGraph g;
    g.nodes = nodes;
    g.sequences = sequences;
    g.support = support;
    g.support.resize(static_cast<std::size_t>(nodes), 0.0);
    g.edges = edges;
    std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
      return std::make_pair(a.p, a.q) < std::make_pair(b.p, b.q);
    });
    g.adjacency.assign(static_cast<std::size_t>(nodes), {});
    for (const auto& e : g.edges) {
      g.adjacency[static_cast<std::size_t>(e.p)].emplace_back(e.q, e.weight);
      g.adjacency[static_cast<std::size_t>(e.q)].emplace_back(e.p, e.weight);
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    return g;
  }
};

/// Edge weights e_pq = |{i : W[i][p] and W[i][q]}| / M over all p != q;
/// pairs that never co-occur are omitted.
inline CooccurrenceGraph build_graph(const PresenceMatrix& w) {
  if (w.rows == 0) throw error(errc::empty_presence, "presence matrix has no sequences");

  CooccurrenceGraph g;
  g.nodes = static_cast<int>(w.cols);
  g.sequences = w.rows;
  const double m = static_cast<double>(w.rows);

  std::vector<std::int64_t> node_count(w.cols, 0);
  std::map<std::pair<int, int>, std::int64_t> pair_count;
  std::vector<int> present;
  for (std::size_t i = 0; i < w.rows; ++i) {
    present.clear();
    for (std::size_t p = 0; p < w.cols; ++p) {
      if (w.at(i, p)) {
        present.push_back(static_cast<int>(p));
        ++node_count[p];
      }
    }
    for (std::size_t a = 0; a < present.size(); ++a)
      for (std::size_t b = a + 1; b < present.size(); ++b)
        ++pair_count[{present[a], present[b]}];
  }

  g.support.resize(w.cols);
  for (std::size_t p = 0; p < w.cols; ++p)
    g.support[p] = static_cast<double>(node_count[p]) / m;

  g.edges.reserve(pair_count.size());
  g.adjacency.assign(w.cols, {});
  for (const auto& [pq, count] : pair_count) {
    GraphEdge e{pq.first, pq.second, count, static_cast<double>(count) / m};
    g.edges.push_back(e);
    g.adjacency[static_cast<std::size_t>(e.p)].emplace_back(e.q, e.weight);
    g.adjacency[static_cast<std::size_t>(e.q)].emplace_back(e.p, e.weight);
  }
  for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
  return g;
}

}  // namespace alarmgraph
