#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "alarmgraph/csv.hpp"
#include "alarmgraph/errors.hpp"
#include "alarmgraph/graph.hpp"

namespace alarmgraph {

/// Square matrix with tag labels on both axes (cosine / consensus artifacts).
inline void write_labeled_matrix(std::ostream& out, const std::vector<std::string>& labels,
                                 const Eigen::MatrixXd& m) {
  out << "tag";
  for (const auto& l : labels) out << "," << csv_escape(l);
  out << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << csv_escape(labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << "," << format_double(m(i, j));
    out << "\n";
  }
}

struct LabeledMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
};

inline LabeledMatrix read_labeled_matrix(std::istream& in) {
  LabeledMatrix out;
  std::string line;
  if (!getline_norm(in, line)) throw error(errc::io_error, "empty matrix file");
  auto header = split_delimited(line);
  if (header.size() < 2) throw error(errc::io_error, "matrix header too short");
  out.labels.assign(header.begin() + 1, header.end());
  const std::size_t n = out.labels.size();
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::size_t row = 0;
  while (getline_norm(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line);
    if (fields.size() != n + 1 || row >= n)
      throw error(errc::io_error, "matrix row has wrong arity");
    for (std::size_t j = 0; j < n; ++j) {
      auto v = parse_double(fields[j + 1]);
      if (!v) throw error(errc::io_error, "bad matrix value '" + fields[j + 1] + "'");
      out.values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) = *v;
    }
    ++row;
  }
  if (row != n) throw error(errc::io_error, "matrix row count does not match header");
  return out;
}

/// Edge list artifact: tag_p, tag_q, weight.
inline void write_edges(std::ostream& out, const CooccurrenceGraph& g,
                        const TagVocabulary& vocab) {
  out << "tag_p,tag_q,weight\n";
  for (const auto& e : g.edges)
    out << csv_escape(vocab.tag_of(e.p)) << "," << csv_escape(vocab.tag_of(e.q)) << ","
        << format_double(e.weight) << "\n";
}

/// Node table artifact: tag, support, isolated flag.
inline void write_nodes(std::ostream& out, const CooccurrenceGraph& g,
                        const TagVocabulary& vocab) {
  out << "tag,support,isolated\n";
  for (int v = 0; v < g.nodes; ++v)
    out << csv_escape(vocab.tag_of(v)) << "," << format_double(g.support[static_cast<std::size_t>(v)])
        << "," << (g.is_isolated(v) ? 1 : 0) << "\n";
}

inline CooccurrenceGraph read_graph(std::istream& edges_in, std::istream& nodes_in,
                                    const TagVocabulary& vocab, std::size_t sequences = 0) {
  std::vector<GraphEdge> edges;
  std::string line;
  getline_norm(edges_in, line);  // header
  while (getline_norm(edges_in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line);
    if (fields.size() != 3) throw error(errc::io_error, "bad edge row '" + line + "'");
    auto p = vocab.index_of(fields[0]);
    auto q = vocab.index_of(fields[1]);
    auto w = parse_double(fields[2]);
    if (!p || !q) throw error(errc::index_out_of_vocabulary, "edge tag not in vocabulary");
    if (!w) throw error(errc::io_error, "bad edge weight '" + fields[2] + "'");
    GraphEdge e;
    e.p = std::min(*p, *q);
    e.q = std::max(*p, *q);
    e.weight = *w;
    edges.push_back(e);
  }

  std::vector<double> support(vocab.size(), 0.0);
  getline_norm(nodes_in, line);  // header
  while (getline_norm(nodes_in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line);
    if (fields.size() != 3) throw error(errc::io_error, "bad node row '" + line + "'");
    auto v = vocab.index_of(fields[0]);
    auto s = parse_double(fields[1]);
    if (!v) throw error(errc::index_out_of_vocabulary, "node tag not in vocabulary");
    if (!s) throw error(errc::io_error, "bad support value '" + fields[1] + "'");
    support[static_cast<std::size_t>(*v)] = *s;
  }
  return CooccurrenceGraph::from_edges(static_cast<int>(vocab.size()), sequences, edges, support);
}

/// Embedding table: tag, v_0..v_{d-1}, one row per embedded tag.
inline void write_embeddings(std::ostream& out, const std::vector<std::string>& labels,
                             const Eigen::MatrixXd& vectors) {
  out << "tag";
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) out << ",v_" << j;
  out << "\n";
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    out << csv_escape(labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) out << "," << format_double(vectors(i, j));
    out << "\n";
  }
}

struct EmbeddingTable {
  std::vector<std::string> labels;
  Eigen::MatrixXd vectors;
};

inline EmbeddingTable read_embeddings(std::istream& in) {
  EmbeddingTable out;
  std::string line;
  if (!getline_norm(in, line)) throw error(errc::io_error, "empty embedding file");
  auto header = split_delimited(line);
  if (header.size() < 2) throw error(errc::io_error, "embedding header too short");
  const std::size_t d = header.size() - 1;
  std::vector<std::vector<double>> rows;
  while (getline_norm(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line);
    if (fields.size() != d + 1) throw error(errc::io_error, "embedding row has wrong arity");
    out.labels.push_back(fields[0]);
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) {
      auto v = parse_double(fields[j + 1]);
      if (!v) throw error(errc::io_error, "bad embedding value '" + fields[j + 1] + "'");
      row[j] = *v;
    }
    rows.push_back(std::move(row));
  }
  out.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      out.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io_error, "cannot write '" + path + "'");
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::missing_input, "expected input file '" + path + "'");
  return in;
}

}  // namespace alarmgraph
